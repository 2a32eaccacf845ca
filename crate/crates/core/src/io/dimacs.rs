use std::io::{self, Write};

use crate::encode::cnf::ClauseSet;

/// Comment block written before the problem line.
#[derive(Clone, Debug, Default)]
pub struct DimacsComments {
    pub method: Option<String>,
    pub seed: Option<u64>,
    /// External name of each input variable, `names[i]` for variable `i + 1`.
    pub names: Vec<String>,
}

/// Writes `c method`, `c seed` and one `c map <name> = <var>` line per
/// input, then `p cnf <vars> <clauses>` and the clauses.
pub fn write_dimacs(cnf: &ClauseSet, comments: &DimacsComments, sink: &mut impl Write) -> io::Result<()> {
    if let Some(method) = &comments.method {
        writeln!(sink, "c method {method}")?;
    }
    if let Some(seed) = comments.seed {
        writeln!(sink, "c seed {seed}")?;
    }
    for (i, name) in comments.names.iter().enumerate() {
        writeln!(sink, "c map {name} = {}", i + 1)?;
    }
    writeln!(sink, "p cnf {} {}", cnf.num_vars(), cnf.len())?;
    let mut line = String::new();
    for clause in cnf.clauses() {
        line.clear();
        for lit in clause {
            line.push_str(&lit.to_dimacs().to_string());
            line.push(' ');
        }
        line.push('0');
        writeln!(sink, "{line}")?;
    }
    Ok(())
}

/// One line per CNF variable: `<var> <name>` for inputs and
/// `<var> aux <diagram> <node>` for auxiliaries.
pub fn write_map(cnf: &ClauseSet, names: &[String], sink: &mut impl Write) -> io::Result<()> {
    for var in 1..=cnf.num_vars() {
        match cnf.aux_origin(var) {
            Some(o) => writeln!(sink, "{var} aux {} {}", o.diagram, o.node.raw())?,
            None => {
                let fallback = format!("x{var}");
                let name = names.get(var as usize - 1).unwrap_or(&fallback);
                writeln!(sink, "{var} {name}")?
            }
        }
    }
    Ok(())
}
