//! Benchmark harness for the `ldltr` solvers: suite runs, extended
//! performance profiles and CSV/SVG output.

pub mod emit;
pub mod profile;
pub mod suite;

pub use profile::{performance_profile, Metric, ProfilePoint, Profiles, SolverProfile};
pub use suite::{run_suite, standard_problems, BenchProblem, RunRecord, SolverId, SuiteConfig};
