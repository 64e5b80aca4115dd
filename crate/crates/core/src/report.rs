//! Termination status and per-solve summary shared by all solvers.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::scalar::Scalar;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// `‖g‖ ≤ ε`
    Converged,
    /// Stopped early but `|f_k| ≤ |f_0|·ε_M^{2/3}` or `‖g_k‖ ≤ ‖g_0‖·ε_M^{2/3}`.
    NearOptimal,
    IterationLimit,
    /// Trust radius fell to the floor.
    RadiusCollapse,
    /// The line search could not find a better point.
    LinesearchFailure,
    EvaluatorFailure,
}

impl Status {
    pub const ALL: [Status; 6] = [
        Status::Converged,
        Status::NearOptimal,
        Status::IterationLimit,
        Status::RadiusCollapse,
        Status::LinesearchFailure,
        Status::EvaluatorFailure,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::NearOptimal => "near-optimal",
            Status::IterationLimit => "iteration-limit",
            Status::RadiusCollapse => "radius-collapse",
            Status::LinesearchFailure => "linesearch-failure",
            Status::EvaluatorFailure => "evaluator-failure",
        }
    }

    /// Converged or near-optimal.
    pub fn is_success(self) -> bool {
        matches!(self, Status::Converged | Status::NearOptimal)
    }

    /// Statuses eligible for near-optimal reclassification.
    pub fn may_be_near_optimal(self) -> bool {
        matches!(self, Status::IterationLimit | Status::RadiusCollapse | Status::LinesearchFailure)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Status::ALL.into_iter().find(|st| st.as_str() == s).ok_or_else(|| format!("unknown status `{s}`"))
    }
}

/// `|f_k| ≤ |f_0|·ε_M^{2/3}` or `‖g_k‖ ≤ ‖g_0‖·ε_M^{2/3}`.
pub fn is_near_optimal<T: Scalar>(f0: T, g0_norm: T, fk: T, gk_norm: T) -> bool {
    let factor = T::eps_two_thirds();
    fk.abs() <= f0.abs() * factor || gk_norm <= g0_norm * factor
}

/// Applies near-optimal reclassification to a terminal status.
pub fn classify<T: Scalar>(status: Status, f0: T, g0_norm: T, fk: T, gk_norm: T) -> Status {
    if status.may_be_near_optimal() && is_near_optimal(f0, g0_norm, fk, gk_norm) {
        Status::NearOptimal
    } else {
        status
    }
}

/// Per-iteration statistics collected by the trust-region driver.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics<T> {
    /// Newton solves per phase-1 call.
    pub phase1_iterations: Vec<usize>,
    /// Iterations per exact-subproblem call.
    pub exact_iterations: Vec<usize>,
    /// Exit index of each shift backtracking call.
    pub backtrack_exits: Vec<usize>,
    pub cg_iterations: usize,
    /// Largest `trace(T·G·Tᵀ)` seen, a bound on `‖H_k‖₂`.
    pub max_h_trace: T,
    pub rejected_steps: usize,
    pub skipped_updates: usize,
    /// Steps accepted through the gradient-norm fallback.
    pub gradient_fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub status: Status,
    pub iterations: usize,
    pub function_evals: usize,
    pub gradient_evals: usize,
    pub final_f: T,
    pub final_gnorm: T,
    pub wall_time: Duration,
    pub x: Vec<T>,
    pub initial_f: T,
    pub initial_gnorm: T,
    pub diagnostics: Diagnostics<T>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_round_trip() {
        for st in Status::ALL {
            assert_eq!(st.as_str().parse::<Status>().unwrap(), st);
        }
        assert!("solved".parse::<Status>().is_err());
    }

    #[test]
    fn near_optimal_both_branches() {
        // ε^{2/3} ≈ 3.67e-11 in double precision
        assert!(is_near_optimal(1.0, 1.0, 1e-12, 1.0));
        assert!(is_near_optimal(1.0, 1.0, 0.5, 1e-12));
        assert!(!is_near_optimal(1.0, 1.0, 1e-9, 1e-9));
        assert_eq!(classify(Status::IterationLimit, 1.0, 1.0, 1e-12, 1.0), Status::NearOptimal);
        assert_eq!(classify(Status::EvaluatorFailure, 1.0, 1.0, 1e-12, 1.0), Status::EvaluatorFailure);
    }
}
