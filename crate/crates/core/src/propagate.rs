//! Unit propagation to fixpoint, with a backtrackable trail so that many
//! related partial assignments can share work.
//!
//! Each clause keeps a counter of its processed false literals; a clause is
//! only inspected once that counter shows at most one literal left.

use crate::encode::cnf::{ClauseSet, Lit};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Fixpoint,
    /// Some clause became all-false. `clause` is its index, or `None` when the
    /// seed itself contained a literal and its negation.
    Conflict { clause: Option<usize> },
}

impl Status {
    pub fn is_conflict(self) -> bool {
        matches!(self, Status::Conflict { .. })
    }
}

/// A partial assignment of CNF variables, with the order in which literals
/// were set and the clause that forced each one (`None` for seed literals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<bool>>,
    trail: Vec<(Lit, Option<usize>)>,
}

impl Assignment {
    pub fn value(&self, var: u32) -> Option<bool> {
        self.values.get(var as usize).copied().flatten()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.value(lit.var()).map(|v| v == lit.is_positive())
    }

    pub fn is_true(&self, lit: Lit) -> bool {
        self.lit_value(lit) == Some(true)
    }

    pub fn trail(&self) -> &[(Lit, Option<usize>)] {
        &self.trail
    }

    /// The true literals, sorted by variable.
    pub fn literals(&self) -> Vec<Lit> {
        let mut lits: Vec<Lit> = self.trail.iter().map(|(l, _)| *l).collect();
        lits.sort_by_key(|l| l.var());
        lits
    }
}

pub struct Propagator<'a> {
    clauses: &'a [Vec<Lit>],
    occurs: Vec<Vec<u32>>,
    false_count: Vec<u32>,
    values: Vec<i8>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    head: usize,
    root_conflict: Option<Status>,
}

impl<'a> Propagator<'a> {
    /// Sets up propagation over `clauses` (variables `1..=num_vars`) and
    /// propagates its unit clauses.
    pub fn new(clauses: &'a [Vec<Lit>], num_vars: u32) -> Propagator<'a> {
        let mut occurs = vec![Vec::new(); 2 * (num_vars as usize + 1)];
        for (i, clause) in clauses.iter().enumerate() {
            for l in clause {
                occurs[l.code()].push(i as u32);
            }
        }
        let mut p = Propagator {
            clauses,
            occurs,
            false_count: vec![0; clauses.len()],
            values: vec![0; num_vars as usize + 1],
            reason: vec![None; num_vars as usize + 1],
            trail: Vec::new(),
            head: 0,
            root_conflict: None,
        };
        for (i, clause) in clauses.iter().enumerate() {
            let status = match clause.as_slice() {
                [] => Some(Status::Conflict { clause: Some(i) }),
                [l] => match p.lit_value(*l) {
                    Some(true) => None,
                    Some(false) => Some(Status::Conflict { clause: Some(i) }),
                    None => {
                        p.enqueue(*l, Some(i));
                        None
                    }
                },
                _ => None,
            };
            if status.is_some() {
                p.root_conflict = status;
                return p;
            }
        }
        if let Err(status) = p.propagate() {
            p.root_conflict = Some(status);
        }
        p
    }

    pub fn for_clause_set(cnf: &'a ClauseSet) -> Propagator<'a> {
        Propagator::new(cnf.clauses(), cnf.num_vars())
    }

    /// Conflict reached without any seed literal.
    pub fn root_conflict(&self) -> Option<Status> {
        self.root_conflict
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        match self.values[lit.var() as usize] {
            0 => None,
            v => Some((v > 0) == lit.is_positive()),
        }
    }

    pub fn value(&self, var: u32) -> Option<bool> {
        self.lit_value(Lit::pos(var))
    }

    /// Trail length, to be passed to [`Propagator::backtrack`].
    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    /// Makes `lit` true and propagates. On conflict the state stays
    /// conflicting until the caller backtracks.
    pub fn assign(&mut self, lit: Lit) -> Result<(), Status> {
        if let Some(status) = self.root_conflict {
            return Err(status);
        }
        match self.lit_value(lit) {
            Some(true) => Ok(()),
            Some(false) => Err(Status::Conflict {
                clause: self.reason[lit.var() as usize],
            }),
            None => {
                self.enqueue(lit, None);
                self.propagate()
            }
        }
    }

    /// Undoes every assignment made after `mark`.
    pub fn backtrack(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let lit = self.trail.pop().unwrap();
            if self.trail.len() < self.head {
                for &c in &self.occurs[(!lit).code()] {
                    self.false_count[c as usize] -= 1;
                }
            }
            self.values[lit.var() as usize] = 0;
            self.reason[lit.var() as usize] = None;
        }
        self.head = self.head.min(mark);
    }

    pub fn snapshot(&self) -> Assignment {
        let values = self
            .values
            .iter()
            .map(|&v| if v == 0 { None } else { Some(v > 0) })
            .collect();
        let trail = self
            .trail
            .iter()
            .map(|l| (*l, self.reason[l.var() as usize]))
            .collect();
        Assignment { values, trail }
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<usize>) {
        self.values[lit.var() as usize] = if lit.is_positive() { 1 } else { -1 };
        self.reason[lit.var() as usize] = reason;
        self.trail.push(lit);
    }

    fn propagate(&mut self) -> Result<(), Status> {
        while self.head < self.trail.len() {
            let falsified = !self.trail[self.head];
            self.head += 1;
            let occurs = std::mem::take(&mut self.occurs[falsified.code()]);
            for &c in &occurs {
                self.false_count[c as usize] += 1;
            }
            let mut result = Ok(());
            for &c in &occurs {
                let clause = &self.clauses[c as usize];
                if (self.false_count[c as usize] as usize) + 1 < clause.len() {
                    continue;
                }
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for &l in clause {
                    match self.lit_value(l) {
                        Some(true) => {
                            satisfied = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open = Some(l);
                            open_count += 1;
                        }
                    }
                }
                if satisfied || open_count > 1 {
                    continue;
                }
                match open {
                    Some(l) => self.enqueue(l, Some(c as usize)),
                    None => {
                        result = Err(Status::Conflict {
                            clause: Some(c as usize),
                        });
                        break;
                    }
                }
            }
            self.occurs[falsified.code()] = occurs;
            result?;
        }
        Ok(())
    }
}

/// Runs unit propagation from `seed` to its fixpoint.
pub fn unit_propagate(clauses: &[Vec<Lit>], num_vars: u32, seed: &[Lit]) -> (Assignment, Status) {
    let mut p = Propagator::new(clauses, num_vars);
    if let Some(status) = p.root_conflict() {
        return (p.snapshot(), status);
    }
    for &lit in seed {
        if seed.contains(&!lit) {
            return (p.snapshot(), Status::Conflict { clause: None });
        }
    }
    for &lit in seed {
        if let Err(status) = p.assign(lit) {
            return (p.snapshot(), status);
        }
    }
    (p.snapshot(), Status::Fixpoint)
}

pub fn propagate_clause_set(cnf: &ClauseSet, seed: &[Lit]) -> (Assignment, Status) {
    unit_propagate(cnf.clauses(), cnf.num_vars(), seed)
}
