//! OPB input, DIMACS output and encoding reports.

pub mod dimacs;
pub mod opb;
pub mod report;

pub use dimacs::{write_dimacs, write_map, DimacsComments};
pub use opb::{parse_opb, write_opb, Instance, OpbError, OpbErrorKind};
pub use report::{EncodingReport, Totals};
