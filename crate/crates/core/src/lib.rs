//! Quasi-Newton trust-region minimization with factored inverse Hessians.
//!
//! The inverse BFGS approximation `H = T·G·Tᵀ` (triangular `T`, diagonal `G`)
//! is updated by two rank-one factor modifications per iteration. Steps that
//! leave the trust region are computed with either an exact Moré-Sorensen
//! solve (small problems) or a factorization-free shift estimate followed by
//! conjugate-gradient solves and shift backtracking.
//!
//! ```
//! use ldltr::{minimize, problems, SolverConfig, Status};
//!
//! let p = problems::find::<f64>("ROSENBROCK", 2).unwrap();
//! let x0 = p.x0.clone();
//! let report = minimize(p, &x0, &SolverConfig::default()).unwrap();
//! assert_eq!(report.status, Status::Converged);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod backtrack;
pub mod bfgs;
pub mod cg;
pub mod driver;
pub mod error;
pub mod exact;
pub mod factored;
pub mod linalg;
pub mod linesearch;
pub mod objective;
pub mod problems;
pub mod report;
pub mod scalar;
pub mod shift;

pub use backtrack::{backtrack_shift, BacktrackResult, CgSettings};
pub use bfgs::{bfgs_coefficients, bfgs_factor_update, BfgsCoefficients, CurvaturePair, InverseFactors};
pub use cg::{cg_solve_shifted, CgReport};
pub use driver::{initialize, minimize, minimize_with, IterationEvent, IterationState, RadiusAction, SolverConfig, Start, SubproblemMode};
pub use error::{Error, Result};
pub use exact::{solve_ms, SubproblemResult};
pub use factored::{
    apply_inverse_factors, column_norms_sq, givens_for, rank_one_update, recover_direct_factors, DiagonalFactor,
    DirectFactors, GivensRotation, TriangularFactor,
};
pub use linalg::DenseMatrix;
pub use linesearch::{bfgsr_minimize, strong_wolfe_search, BfgsrConfig, LineSearchOutcome, WolfeParams};
pub use objective::{Counted, FnObjective, Objective};
pub use problems::{catalog, gradient_check, Problem};
pub use report::{Diagnostics, SolveReport, Status};
pub use scalar::Scalar;
pub use shift::{solve_modified_shift, ShiftResult};

/// Double-precision aliases.
pub type TriangularFactor64 = TriangularFactor<f64>;
pub type DiagonalFactor64 = DiagonalFactor<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type Problem64 = Problem<f64>;

/// Single-precision aliases.
pub type TriangularFactor32 = TriangularFactor<f32>;
pub type DiagonalFactor32 = DiagonalFactor<f32>;
pub type SolverConfig32 = SolverConfig<f32>;
pub type SolveReport32 = SolveReport<f32>;
pub type Problem32 = Problem<f32>;
