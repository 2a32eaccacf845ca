use std::fmt::Write as _;
use std::time::Duration;

use crate::encode::cnf::ClauseShapes;
use crate::encode::{ConstraintStats, Method};

/// Sums over all constraints of a report.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Totals {
    pub input_vars: usize,
    pub aux_vars: usize,
    pub clauses: ClauseShapes,
    pub raw_clauses: ClauseShapes,
    pub decision_nodes: usize,
    pub build_time: Duration,
}

#[derive(Clone, Debug)]
pub struct EncodingReport {
    pub method: Method,
    pub rows: Vec<ConstraintStats>,
}

fn widths(row: &ConstraintStats) -> String {
    row.diagrams
        .iter()
        .map(|d| d.level_widths.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("/")
}

impl EncodingReport {
    pub fn totals(&self) -> Totals {
        let mut t = Totals::default();
        for row in &self.rows {
            t.input_vars += row.input_vars;
            t.aux_vars += row.aux_vars;
            t.clauses.add(&row.clauses);
            t.raw_clauses.add(&row.raw_clauses);
            t.decision_nodes += row.decision_nodes();
            t.build_time += row.build_time;
        }
        t
    }

    /// Human-readable table, one line per constraint plus a total line.
    pub fn table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:>5} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10}  widths",
            "#", "inputs", "aux", "binary", "ternary", "other", "nodes", "time(us)"
        )
        .unwrap();
        let line = |out: &mut String, label: &str, inputs, aux, c: &ClauseShapes, nodes, time: Duration, w: &str| {
            writeln!(
                out,
                "{:>5} {:>6} {:>8} {:>8} {:>8} {:>8} {:>8} {:>10}  {}",
                label,
                inputs,
                aux,
                c.binary,
                c.ternary,
                c.empty + c.unit + c.longer,
                nodes,
                time.as_micros(),
                w
            )
            .unwrap();
        };
        for (i, row) in self.rows.iter().enumerate() {
            line(
                &mut out,
                &(i + 1).to_string(),
                row.input_vars,
                row.aux_vars,
                &row.clauses,
                row.decision_nodes(),
                row.build_time,
                &widths(row),
            );
        }
        let t = self.totals();
        line(
            &mut out,
            "total",
            t.input_vars,
            t.aux_vars,
            &t.clauses,
            t.decision_nodes,
            t.build_time,
            "",
        );
        out
    }

    /// Tab-separated rows: a header, one `row` per constraint and a `total`.
    pub fn tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "kind\tindex\tmethod\tinputs\taux\tempty\tunit\tbinary\tternary\tlonger\traw_clauses\tnodes\ttime_us\twidths\n",
        );
        for (i, row) in self.rows.iter().enumerate() {
            let c = &row.clauses;
            writeln!(
                out,
                "row\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                self.method,
                row.input_vars,
                row.aux_vars,
                c.empty,
                c.unit,
                c.binary,
                c.ternary,
                c.longer,
                row.raw_clauses.total(),
                row.decision_nodes(),
                row.build_time.as_micros(),
                widths(row)
            )
            .unwrap();
        }
        let t = self.totals();
        let c = &t.clauses;
        writeln!(
            out,
            "total\t-\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t-",
            self.method,
            t.input_vars,
            t.aux_vars,
            c.empty,
            c.unit,
            c.binary,
            c.ternary,
            c.longer,
            t.raw_clauses.total(),
            t.decision_nodes,
            t.build_time.as_micros()
        )
        .unwrap();
        out
    }
}
