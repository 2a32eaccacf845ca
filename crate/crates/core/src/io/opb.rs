use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use thiserror::Error;

use crate::pb::{normalize, Comparator, PbConstraint, RawConstraint, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpbErrorKind {
    Objective,
    Syntax(String),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct OpbError {
    pub line: usize,
    pub column: usize,
    pub kind: OpbErrorKind,
}

impl fmt::Display for OpbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            OpbErrorKind::Objective => f.write_str("objective functions are not supported, only decision instances"),
            OpbErrorKind::Syntax(msg) => f.write_str(msg),
        }
    }
}

/// Constraints plus the external variable names; `names[i]` is variable
/// `i + 1`. Ids are assigned in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub names: Vec<String>,
    pub constraints: Vec<RawConstraint>,
}

impl Instance {
    /// Wraps constraints over variables `1..=n`, naming them `x1..xn`.
    pub fn from_constraints(constraints: Vec<RawConstraint>) -> Instance {
        let n = constraints
            .iter()
            .flat_map(|c| c.variables())
            .map(|v| v.id())
            .max()
            .unwrap_or(0);
        Instance {
            names: (1..=n).map(|i| format!("x{i}")).collect(),
            constraints,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.names.len() as u32
    }

    pub fn normalized(&self) -> Vec<PbConstraint> {
        self.constraints.iter().flat_map(normalize).collect()
    }

    pub fn name(&self, var: Var) -> &str {
        &self.names[var.index()]
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
        } else if ch == ';' {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
            }
            out.push(Token {
                text: ";",
                column: line[..i].chars().count() + 1,
            });
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('+').unwrap_or(s);
    let body = digits.strip_prefix('-').unwrap_or(digits);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn comparator(s: &str) -> Option<Comparator> {
    Some(match s {
        "<=" => Comparator::Le,
        ">=" => Comparator::Ge,
        "=" => Comparator::Eq,
        "<" => Comparator::Lt,
        ">" => Comparator::Gt,
        _ => return None,
    })
}

/// Parses OPB decision instances: one `<terms> <op> <int> ;` per line, where
/// a term is `[+|-]<int> [~]<name>` and `op` is one of `<= >= = < >`. Lines
/// starting with `*` are comments. `~x` stands for `1 − x`.
pub fn parse_opb(text: &str) -> Result<Instance, OpbError> {
    let mut instance = Instance::default();
    let mut ids: HashMap<String, Var> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('*') {
            continue;
        }
        let toks = tokens(line);
        let err = |column: usize, msg: String| OpbError {
            line: lineno,
            column,
            kind: OpbErrorKind::Syntax(msg),
        };
        if toks[0].text.starts_with("min:") || toks[0].text.starts_with("max:") {
            return Err(OpbError {
                line: lineno,
                column: toks[0].column,
                kind: OpbErrorKind::Objective,
            });
        }

        let mut terms: Vec<(BigInt, Var)> = Vec::new();
        let mut shift = BigInt::from(0);
        let mut pending: Option<(BigInt, usize)> = None;
        let mut k = 0;
        let op = loop {
            let Some(tok) = toks.get(k) else {
                return Err(err(line.chars().count() + 1, "missing comparison operator".into()));
            };
            k += 1;
            if tok.text == ";" {
                return Err(err(tok.column, "missing comparison operator".into()));
            }
            if let Some(op) = comparator(tok.text) {
                if let Some((_, col)) = pending {
                    return Err(err(col, "coefficient without a variable".into()));
                }
                break op;
            }
            if let Some(a) = parse_int(tok.text) {
                if let Some((_, col)) = pending {
                    return Err(err(col, "coefficient without a variable".into()));
                }
                pending = Some((a, tok.column));
                continue;
            }
            let (negated, name) = match tok.text.strip_prefix('~') {
                Some(rest) => (true, rest),
                None => (false, tok.text),
            };
            if !is_name(name) {
                return Err(err(tok.column, format!("unexpected `{}`", tok.text)));
            }
            let a = pending.take().map(|(a, _)| a).unwrap_or_else(|| BigInt::from(1));
            let next = Var::new(ids.len() as u32 + 1).expect("positive id");
            let var = *ids.entry(name.to_string()).or_insert_with(|| {
                instance.names.push(name.to_string());
                next
            });
            if negated {
                // a·(1 − x)
                shift += &a;
                terms.push((-a, var));
            } else {
                terms.push((a, var));
            }
        };

        let Some(tok) = toks.get(k) else {
            return Err(err(line.chars().count() + 1, "missing right-hand side".into()));
        };
        let Some(bound) = parse_int(tok.text) else {
            return Err(err(tok.column, format!("expected an integer, found `{}`", tok.text)));
        };
        k += 1;
        match toks.get(k) {
            Some(t) if t.text == ";" => {}
            Some(t) => return Err(err(t.column, format!("expected `;`, found `{}`", t.text))),
            None => return Err(err(line.chars().count() + 1, "missing `;`".into())),
        }
        if let Some(t) = toks.get(k + 1) {
            return Err(err(t.column, "text after `;`".into()));
        }
        instance.constraints.push(RawConstraint::new(terms, op, bound - shift));
    }
    Ok(instance)
}

/// Writes the instance in the syntax accepted by [`parse_opb`].
pub fn write_opb(instance: &Instance) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "* #variable= {} #constraint= {}",
        instance.names.len(),
        instance.constraints.len()
    )
    .unwrap();
    for c in &instance.constraints {
        for (a, v) in &c.terms {
            let sign = if *a >= BigInt::from(0) { "+" } else { "" };
            write!(out, "{sign}{a} {} ", instance.name(*v)).unwrap();
        }
        writeln!(out, "{} {} ;", c.comparator.symbol(), c.bound).unwrap();
    }
    out
}
