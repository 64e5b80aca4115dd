//! Geometric backtracking on the shift.
//!
//! Starting from `σ₀`, trial shifts `σ₀, γσ₀, γ²σ₀, …` are solved with the
//! phase-2 CG scheme and evaluated. The loop continues while each trial
//! strictly improves on the best objective value seen so far (initially
//! `f(x)`), and the best evaluated trial is returned.

use crate::cg::cg_solve_shifted_with;
use crate::error::{Error, Result};
use crate::factored::{DiagonalFactor, TriangularFactor};
use crate::linalg::add;
use crate::objective::Objective;
use crate::scalar::Scalar;

/// Settings for the phase-2 conjugate-gradient solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSettings<T> {
    pub tol: T,
    pub max_iter: usize,
    pub jacobi: bool,
}

impl<T: Scalar> Default for CgSettings<T> {
    fn default() -> Self {
        Self { tol: T::c(1e-8), max_iter: 15, jacobi: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktrackResult<T> {
    pub s_best: Vec<T>,
    /// `f(x + s_best)`; `+∞` if no trial produced a finite value.
    pub f_best: T,
    pub sigma_used: T,
    /// Trial index (1-based) at which the loop stopped.
    pub exit_index: usize,
    pub function_evals: usize,
    /// First trial index with `f(x) ≤ f(x + s_i)`, if any trial reached it.
    pub literal_exit_index: Option<usize>,
    pub trial_shifts: Vec<T>,
    pub trial_values: Vec<T>,
    pub cg_iterations: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn backtrack_shift<T: Scalar, O: Objective<T>>(
    objective: &mut O,
    x: &[T],
    f_x: T,
    t: &TriangularFactor<T>,
    g_diag: &DiagonalFactor<T>,
    g: &[T],
    sigma0: T,
    gamma: T,
    i_max: usize,
    cg: &CgSettings<T>,
) -> Result<BacktrackResult<T>> {
    if !(sigma0 >= T::zero()) || !(gamma > T::zero() && gamma < T::one()) || i_max == 0 {
        return Err(Error::InvalidArgument("need σ₀ ≥ 0, γ ∈ (0,1), i_max ≥ 1".into()));
    }
    let mut best: Option<(Vec<T>, T, T)> = None;
    let mut reference = f_x;
    let mut trial_shifts = Vec::with_capacity(i_max);
    let mut trial_values = Vec::with_capacity(i_max);
    let mut literal_exit_index = None;
    let mut cg_iterations = 0;
    let mut sigma = sigma0;
    let mut exit_index = 0;

    for i in 1..=i_max {
        exit_index = i;
        let report = match cg_solve_shifted_with(t, g_diag, g, sigma, cg.tol, cg.max_iter, cg.jacobi) {
            Ok(r) => r,
            Err(e) if best.is_none() => return Err(e),
            Err(_) => {
                exit_index = i - 1;
                break;
            }
        };
        cg_iterations += report.iterations;
        let f_trial = objective.value(&add(x, &report.s));
        let f_trial = if f_trial.is_finite() { f_trial } else { T::infinity() };
        trial_shifts.push(sigma);
        trial_values.push(f_trial);
        if literal_exit_index.is_none() && f_x <= f_trial {
            literal_exit_index = Some(i);
        }
        let improves = f_trial < reference;
        if best.as_ref().is_none_or(|(_, fb, _)| f_trial < *fb) {
            best = Some((report.s, f_trial, sigma));
        }
        // An unshifted trial cannot be reduced further.
        if !improves || sigma == T::zero() {
            break;
        }
        reference = f_trial;
        sigma = gamma * sigma;
    }
    let (s_best, f_best, sigma_used) = best.expect("first trial always recorded");
    Ok(BacktrackResult {
        s_best,
        f_best,
        sigma_used,
        exit_index,
        function_evals: trial_values.len(),
        literal_exit_index,
        trial_shifts,
        trial_values,
        cg_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;

    fn quad() -> impl Objective<f64> {
        FnObjective::new(2, |x: &[f64]| 0.5 * (x[0] * x[0] + 4.0 * x[1] * x[1]) - x[0] - x[1], |_: &[f64], _: &mut [f64]| {})
    }

    #[test]
    fn trial_shifts_are_geometric() {
        let mut f = quad();
        let t = TriangularFactor::identity(2);
        let gd = DiagonalFactor::new(vec![1.0, 0.25]);
        let x = [0.0, 0.0];
        let g = [-1.0, -1.0];
        let r = backtrack_shift(&mut f, &x, 0.0, &t, &gd, &g, 1.0, 0.25, 3, &CgSettings::default()).unwrap();
        assert_eq!(r.trial_shifts, vec![1.0, 0.25, 0.0625]);
        assert_eq!(r.exit_index, 3);
        assert_eq!(r.function_evals, 3);
    }

    #[test]
    fn zero_shift_single_solve() {
        let mut f = quad();
        let t = TriangularFactor::identity(2);
        let gd = DiagonalFactor::new(vec![1.0, 0.25]);
        let r = backtrack_shift(&mut f, &[0.0, 0.0], 0.0, &t, &gd, &[-1.0, -1.0], 0.0, 0.5, 3, &CgSettings::default()).unwrap();
        assert_eq!(r.exit_index, 1);
        assert_eq!(r.function_evals, 1);
        assert!((r.s_best[0] - 1.0).abs() < 1e-14 && (r.s_best[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn invalid_gamma() {
        let mut f = quad();
        let t = TriangularFactor::identity(2);
        let gd = DiagonalFactor::constant(2, 1.0);
        assert!(backtrack_shift(&mut f, &[0.0; 2], 0.0, &t, &gd, &[1.0; 2], 1.0, 1.0, 3, &CgSettings::default()).is_err());
    }
}
