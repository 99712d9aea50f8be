//! Command-line front end for the graph-matching equivalence library.
//!
//! Everything the binary does lives here so it can be tested as a library:
//! [`analyze`](analyze::analyze) runs the single-graph pipeline,
//! [`commands`] implements the five subcommands as functions returning exit
//! codes, [`sweep`] drives seeded Erdős–Rényi scans, and [`report`] defines
//! the serialized forms with their canonical (byte-deterministic) JSON.

pub mod analyze;
pub mod commands;
pub mod corpus_check;
pub mod report;
pub mod sweep;

/// A command failure: what to print and what to exit with.
///
/// `2` is a usage or input problem (the user can fix it), `1` an internal
/// defect (a guarantee of the build failed to hold). Semantic negatives are
/// not failures — commands return those as plain exit codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Failure {
        Failure { code: 2, message }
    }

    pub fn internal(message: String) -> Failure {
        Failure { code: 1, message }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

/// Maps library errors onto the exit-code contract. Anything the user could
/// have caused (bad files, out-of-range parameters, inapplicable methods) is
/// a usage error; the rest means the toolkit itself misbehaved.
pub fn exit_code_for(e: &gmeq::Error) -> i32 {
    use gmeq::Error::*;
    match e {
        Internal(_) | NoConvergence { .. } | NotDoublyStochastic { .. }
        | InfeasiblePoint { .. } | NotSymmetric { .. } | NonFinite => 1,
        _ => 2,
    }
}

impl From<gmeq::Error> for Failure {
    fn from(e: gmeq::Error) -> Failure {
        Failure {
            code: exit_code_for(&e),
            message: e.to_string(),
        }
    }
}
