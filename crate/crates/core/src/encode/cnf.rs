use std::fmt;
use std::ops::Not;

use crate::pb::Literal;
use crate::robdd::NodeId;

/// A CNF literal in DIMACS convention: `+v` or `-v`, never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Lit {
        assert!(var > 0 && var <= i32::MAX as u32);
        Lit(var as i32)
    }

    pub fn neg(var: u32) -> Lit {
        !Lit::pos(var)
    }

    pub fn from_dimacs(value: i32) -> Option<Lit> {
        (value != 0).then_some(Lit(value))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Dense code: `2·var` for positive, `2·var + 1` for negative literals.
    pub fn code(self) -> usize {
        (self.var() as usize) << 1 | usize::from(self.0 < 0)
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where an auxiliary variable comes from: a node of the `diagram`-th
/// diagram encoded into the set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AuxOrigin {
    pub diagram: u32,
    pub node: NodeId,
}

/// Clause counts by length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClauseShapes {
    pub empty: usize,
    pub unit: usize,
    pub binary: usize,
    pub ternary: usize,
    pub longer: usize,
}

impl ClauseShapes {
    pub fn record(&mut self, len: usize) {
        match len {
            0 => self.empty += 1,
            1 => self.unit += 1,
            2 => self.binary += 1,
            3 => self.ternary += 1,
            _ => self.longer += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.empty + self.unit + self.binary + self.ternary + self.longer
    }

    pub fn add(&mut self, other: &ClauseShapes) {
        self.empty += other.empty;
        self.unit += other.unit;
        self.binary += other.binary;
        self.ternary += other.ternary;
        self.longer += other.longer;
    }
}

/// A CNF under construction. Input variable `xᵢ` is CNF variable `i`;
/// auxiliary variables are allocated after all inputs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseSet {
    clauses: Vec<Vec<Lit>>,
    inputs: u32,
    aux: Vec<AuxOrigin>,
    diagrams: u32,
    raw: ClauseShapes,
}

impl ClauseSet {
    pub fn new(inputs: u32) -> ClauseSet {
        ClauseSet {
            inputs,
            ..ClauseSet::default()
        }
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    /// Highest variable in use; the allocator hands out `num_vars() + 1` next.
    pub fn num_vars(&self) -> u32 {
        self.inputs + self.aux.len() as u32
    }

    pub fn num_aux(&self) -> usize {
        self.aux.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Counts of the clauses as emitted, before unit simplification.
    pub fn raw_shapes(&self) -> ClauseShapes {
        self.raw
    }

    pub(crate) fn record_raw(&mut self, shapes: &ClauseShapes) {
        self.raw.add(shapes);
    }

    pub fn shapes(&self) -> ClauseShapes {
        let mut s = ClauseShapes::default();
        for c in &self.clauses {
            s.record(c.len());
        }
        s
    }

    pub fn input_lit(&self, literal: Literal) -> Lit {
        let var = literal.var().id();
        assert!(var <= self.inputs, "input x{var} outside the {} declared inputs", self.inputs);
        if literal.is_positive() {
            Lit::pos(var)
        } else {
            Lit::neg(var)
        }
    }

    pub fn is_input(&self, var: u32) -> bool {
        var >= 1 && var <= self.inputs
    }

    pub fn new_diagram(&mut self) -> u32 {
        self.diagrams += 1;
        self.diagrams - 1
    }

    pub fn new_aux(&mut self, origin: AuxOrigin) -> u32 {
        self.aux.push(origin);
        self.num_vars()
    }

    pub fn aux_origin(&self, var: u32) -> Option<AuxOrigin> {
        if var <= self.inputs {
            return None;
        }
        self.aux.get((var - self.inputs - 1) as usize).copied()
    }

    /// Adds a clause, dropping repeated literals. Tautologies are discarded
    /// and reported with `false`.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) -> bool {
        let mut clause: Vec<Lit> = Vec::new();
        for l in lits {
            assert!(l.var() <= self.num_vars(), "literal {l} uses an unallocated variable");
            if clause.contains(&!l) {
                return false;
            }
            if !clause.contains(&l) {
                clause.push(l);
            }
        }
        self.clauses.push(clause);
        true
    }

    /// Appends a set encoded over the same inputs, shifting its auxiliary
    /// variables past ours.
    pub fn absorb(&mut self, other: ClauseSet) {
        assert_eq!(self.inputs, other.inputs, "absorbed set has different inputs");
        let offset = self.aux.len() as i32;
        let inputs = self.inputs;
        let diagrams = self.diagrams;
        let shift = |l: Lit| {
            if l.var() <= inputs {
                l
            } else if l.is_positive() {
                Lit(l.0 + offset)
            } else {
                Lit(l.0 - offset)
            }
        };
        self.clauses
            .extend(other.clauses.into_iter().map(|c| c.into_iter().map(shift).collect()));
        self.aux.extend(other.aux.into_iter().map(|o| AuxOrigin {
            diagram: o.diagram + diagrams,
            node: o.node,
        }));
        self.diagrams += other.diagrams;
        self.raw.add(&other.raw);
    }
}
