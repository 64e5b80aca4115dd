//! Moré-Sorensen Newton iteration for the two-norm trust-region subproblem
//!
//! ```text
//! minimize gᵀs + ½ sᵀBs  subject to ‖s‖₂ ≤ Δ
//! ```
//!
//! Each iteration factors `B + σI` by Cholesky, so this path is reserved for
//! small problems.

use crate::error::{Error, Result};
use crate::linalg::{all_finite, axpy, dot, norm2, DenseMatrix};
use crate::scalar::Scalar;

/// Step and shift returned by a subproblem solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult<T> {
    pub s: Vec<T>,
    pub sigma: T,
    pub iterations: usize,
    /// `‖(B + σI)s + g‖`
    pub residual: T,
    /// `|‖s‖₂ − Δ|`
    pub boundary_gap: T,
    pub converged: bool,
}

/// Bracketing retries allowed while searching for an initial positive-definite shift.
const SHIFT_RETRIES: usize = 30;

/// Solves the trust-region subproblem with the safeguarded Newton iteration
/// `σ ← σ + (‖s‖²/‖q‖²)·(‖s‖ − Δ)/Δ`, where `RᵀR = B + σI`, `RᵀRs = −g`, `Rᵀq = s`.
///
/// Stops when `|‖s‖ − Δ| ≤ tol·Δ`. Exceeding `i_max` returns the last iterate with
/// `converged = false`. The hard case is not corrected for.
pub fn solve_ms<T: Scalar>(b: &DenseMatrix<T>, g: &[T], delta: T, tol: T, i_max: usize) -> Result<SubproblemResult<T>> {
    solve_ms_traced(b, g, delta, tol, i_max, |_, _| {})
}

/// [`solve_ms`] with a callback receiving the safeguarding bracket `[σ_L, σ_U]`
/// after every iteration.
pub fn solve_ms_traced<T: Scalar>(
    b: &DenseMatrix<T>,
    g: &[T],
    delta: T,
    tol: T,
    i_max: usize,
    mut on_bracket: impl FnMut(T, T),
) -> Result<SubproblemResult<T>> {
    let n = b.dim();
    if g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.len() });
    }
    if !b.is_finite() || !all_finite(g) {
        return Err(Error::NonFinite("subproblem data"));
    }
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument("trust radius must be positive".into()));
    }
    let gnorm = norm2(g);
    let b_norm = b.norm1();
    let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();

    // Interior Newton step when B is positive definite.
    let unshifted = b.cholesky().ok();
    if let Some(ch) = &unshifted {
        let s = ch.solve(&neg_g);
        if norm2(&s) <= delta * (T::one() + tol) {
            return Ok(finish(b, g, s, T::zero(), 0, delta, true));
        }
    }
    if gnorm == T::zero() {
        // Only reachable for indefinite B: hard case with no gradient information.
        let sigma = (-b.min_diagonal()).max(T::zero());
        return Ok(finish(b, g, vec![T::zero(); n], sigma, 0, delta, false));
    }

    let mut lo = (-b.min_diagonal()).max(T::zero());
    let mut hi = gnorm / delta + b_norm;
    let (mut sigma, mut chol) = if let Some(ch) = unshifted {
        (T::zero(), ch)
    } else {
        let base = (-b.gershgorin_lower()).max(T::zero());
        let mut margin = T::sqrt_eps() * b_norm.max(T::one());
        let mut found = None;
        for _ in 0..SHIFT_RETRIES {
            let trial = base + margin;
            if let Ok(ch) = b.shifted(trial).cholesky() {
                found = Some((trial, ch));
                break;
            }
            lo = lo.max(trial);
            margin = margin + margin;
        }
        found.ok_or(Error::NotPositiveDefinite { pivot: 0 })?
    };
    hi = hi.max(sigma);

    let mut best: Option<(Vec<T>, T)> = None;
    for it in 1..=i_max {
        let s = chol.solve(&neg_g);
        let snorm = norm2(&s);
        let gap = (snorm - delta).abs();
        best = Some((s.clone(), sigma));
        if gap <= tol * delta {
            on_bracket(lo, hi);
            return Ok(finish(b, g, s, sigma, it, delta, true));
        }
        if snorm > delta {
            lo = lo.max(sigma);
        } else {
            hi = hi.min(sigma);
        }
        on_bracket(lo, hi);

        let q = chol.solve_lower(&s);
        let qnorm_sq = dot(&q, &q);
        let mut next = sigma + (snorm * snorm / qnorm_sq) * ((snorm - delta) / delta);
        if !(next > lo && next < hi) || !next.is_finite() {
            next = T::c(0.5) * (lo + hi);
        }
        if hi - lo <= T::eps_m() * hi.max(T::one()) {
            break;
        }
        // Move toward feasibility until B + σI factors.
        loop {
            match b.shifted(next).cholesky() {
                Ok(ch) => {
                    chol = ch;
                    sigma = next;
                    break;
                }
                Err(_) => {
                    lo = lo.max(next);
                    next = T::c(0.5) * (lo + hi);
                    if hi - lo <= T::eps_m() * hi.max(T::one()) {
                        let (s, sg) = best.take().expect("at least one iterate");
                        return Ok(finish(b, g, s, sg, it, delta, false));
                    }
                }
            }
        }
    }
    let (s, sg) = best.unwrap_or_else(|| (vec![T::zero(); n], sigma));
    Ok(finish(b, g, s, sg, i_max, delta, false))
}

fn finish<T: Scalar>(b: &DenseMatrix<T>, g: &[T], s: Vec<T>, sigma: T, iterations: usize, delta: T, converged: bool) -> SubproblemResult<T> {
    let mut r = b.matvec(&s);
    axpy(sigma, &s, &mut r);
    axpy(T::one(), g, &mut r);
    let boundary_gap = (norm2(&s) - delta).abs();
    SubproblemResult { residual: norm2(&r), boundary_gap, s, sigma, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_interior() {
        let b = DenseMatrix::<f64>::identity(3);
        let g = [0.1, -0.2, 0.3];
        let r = solve_ms(&b, &g, 1.0, 1e-8, 50).unwrap();
        assert_eq!(r.sigma, 0.0);
        for i in 0..3 {
            assert_eq!(r.s[i], -g[i]);
        }
        assert!(r.converged);
    }

    #[test]
    fn identity_boundary_closed_form() {
        let b = DenseMatrix::<f64>::identity(3);
        let g = [3.0, -4.0, 12.0];
        let delta = 2.0;
        let r = solve_ms(&b, &g, delta, 1e-8, 50).unwrap();
        let gn = 13.0;
        assert!((r.sigma - (gn / delta - 1.0)).abs() < 1e-12);
        for i in 0..3 {
            assert!((r.s[i] + delta * g[i] / gn).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_diagonal() {
        let b = DenseMatrix::from_row_major(2, vec![-1.0, 0.0, 0.0, 2.0]).unwrap();
        let g = [1.0, 1.0];
        let r = solve_ms(&b, &g, 1.0, 1e-10, 50).unwrap();
        assert!(r.converged);
        assert!(r.sigma > 1.0);
        assert!(r.boundary_gap < 1e-9);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        let b = DenseMatrix::<f64>::identity(2);
        assert!(solve_ms(&b, &[f64::NAN, 0.0], 1.0, 1e-8, 5).is_err());
        assert!(solve_ms(&b, &[1.0, 0.0], 0.0, 1e-8, 5).is_err());
        assert!(solve_ms(&b, &[1.0], 1.0, 1e-8, 5).is_err());
    }

    #[test]
    fn iteration_cap_flags_not_converged() {
        let b = DenseMatrix::from_row_major(2, vec![1.0, 0.0, 0.0, 100.0]).unwrap();
        let r = solve_ms(&b, &[5.0, 1.0], 0.1, 1e-14, 1).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
    }
}
