//! Seeded Monte-Carlo experiments, closed-form analysis tables and a
//! command-line front end for the `amop` crate.

pub mod error;
pub mod runner;
pub mod seed;
pub mod spec;
pub mod table;
pub mod textio;

pub use error::{BenchError, Result};
pub use runner::{run, Report, TrialRecord};
pub use spec::{Algorithm, ExperimentKind, ExperimentSpec, Snr};
pub use table::{format_g9, Cell, Table};
