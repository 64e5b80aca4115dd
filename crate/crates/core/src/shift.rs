//! Phase 1: the factorization-free Newton iteration for the modified shift.
//!
//! Replacing `TᵀT` by its diagonal `E` in the shifted system
//! `L(D + σTᵀT)Lᵀs = −g` turns every solve into one diagonal scaling and one
//! triangular product:
//!
//! ```text
//! h = −Tᵀg,   w = (D + σE)⁻¹h,   s⁺ = T·w
//! q⁺ = T·((D + σE)⁻¹(−E·w))       (derivative ds⁺/dσ)
//! ```
//!
//! Newton's method is applied to `φ(σ) = 1/‖s⁺(σ)‖ − 1/Δ`.

use crate::error::{Error, Result};
use crate::factored::{DiagonalFactor, TriangularFactor};
use crate::linalg::{all_finite, dot, norm2};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftResult<T> {
    pub s_plus: Vec<T>,
    pub sigma_plus: T,
    /// Number of shifted solves performed.
    pub iterations: usize,
    pub boundary_gap: T,
    pub converged: bool,
}

/// The diagonally-approximated shifted system for fixed `T`, `D`, `E`, `g`.
pub struct ModifiedSystem<'a, T> {
    t: &'a TriangularFactor<T>,
    d: Vec<T>,
    e: &'a [T],
    h: Vec<T>,
}

impl<'a, T: Scalar> ModifiedSystem<'a, T> {
    pub fn new(t: &'a TriangularFactor<T>, g_diag: &DiagonalFactor<T>, e: &'a DiagonalFactor<T>, g: &[T]) -> Self {
        let mut h = t.tr_mul_vec(g);
        h.iter_mut().for_each(|v| *v = -*v);
        Self { t, d: g_diag.reciprocal().values().to_vec(), e: e.values(), h }
    }

    /// Smallest shift keeping `D + σE` entrywise nonnegative.
    pub fn shift_floor(&self) -> T {
        self.d
            .iter()
            .zip(self.e)
            .map(|(&d, &e)| -d / e)
            .fold(T::zero(), T::max)
    }

    /// Returns `(w, s⁺)` at shift `σ`.
    pub fn step(&self, sigma: T) -> (Vec<T>, Vec<T>) {
        let w: Vec<T> = self
            .h
            .iter()
            .zip(&self.d)
            .zip(self.e)
            .map(|((&h, &d), &e)| h / (d + sigma * e))
            .collect();
        let s = self.t.mul_vec(&w);
        (w, s)
    }

    /// `q⁺ = ds⁺/dσ` given `w` from [`ModifiedSystem::step`] at the same shift.
    pub fn derivative(&self, sigma: T, w: &[T]) -> Vec<T> {
        let u: Vec<T> = w
            .iter()
            .zip(&self.d)
            .zip(self.e)
            .map(|((&w, &d), &e)| -(e * w) / (d + sigma * e))
            .collect();
        self.t.mul_vec(&u)
    }

    /// A shift at which `‖s⁺‖ ≤ Δ` is guaranteed.
    fn upper_shift(&self, delta: T) -> T {
        let t_fro = self.e.iter().copied().sum::<T>().sqrt();
        let e_min = self.e.iter().copied().fold(T::infinity(), T::min);
        (t_fro * norm2(&self.h) / (delta * e_min)).max(self.shift_floor())
    }
}

/// Default initial shift: zero when `D` is entrywise positive, otherwise just
/// above the smallest shift making `D + σE` nonnegative.
pub fn initial_shift<T: Scalar>(g_diag: &DiagonalFactor<T>, e: &DiagonalFactor<T>) -> T {
    if g_diag.values().iter().all(|&v| v > T::zero()) {
        return T::zero();
    }
    let floor = g_diag
        .values()
        .iter()
        .zip(e.values())
        .map(|(&g, &e)| -(T::one() / g) / e)
        .fold(T::neg_infinity(), T::max);
    floor.max(T::zero()) + T::sqrt_eps()
}

/// Newton iteration on the modified secular equation.
///
/// Iterates `σ ← σ − (‖s⁺‖²/s⁺ᵀq⁺)·(‖s⁺‖ − Δ)/Δ` from `sigma0` until
/// `|‖s⁺‖ − Δ| ≤ tol·Δ` or `i_max` solves. A non-negative `s⁺ᵀq⁺` or a step
/// leaving the current bracket falls back to bisection.
#[allow(clippy::too_many_arguments)]
pub fn solve_modified_shift<T: Scalar>(
    t: &TriangularFactor<T>,
    g_diag: &DiagonalFactor<T>,
    e: &DiagonalFactor<T>,
    g: &[T],
    delta: T,
    sigma0: T,
    tol: T,
    i_max: usize,
) -> Result<ShiftResult<T>> {
    let n = t.dim();
    for len in [g_diag.dim(), e.dim(), g.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    if !all_finite(g) || !all_finite(g_diag.values()) || !all_finite(e.values()) || !t.is_finite() {
        return Err(Error::NonFinite("modified shift data"));
    }
    if g_diag.values().iter().any(|&v| v == T::zero()) || e.values().iter().any(|&v| !(v > T::zero())) {
        return Err(Error::InvalidArgument("G must be nonzero and E positive".into()));
    }
    if !(delta > T::zero()) || !(sigma0 >= T::zero()) {
        return Err(Error::InvalidArgument("Δ must be positive and σ₀ nonnegative".into()));
    }

    let sys = ModifiedSystem::new(t, g_diag, e, g);
    let floor = sys.shift_floor();
    let mut lo = floor;
    let mut hi = sys.upper_shift(delta);
    let mut iterations = 0;

    // Complementarity: an interior unshifted step is the answer.
    let mut cached = None;
    if floor == T::zero() {
        let (w, s) = sys.step(T::zero());
        iterations += 1;
        let snorm = norm2(&s);
        if snorm <= delta {
            return Ok(ShiftResult { boundary_gap: (snorm - delta).abs(), s_plus: s, sigma_plus: T::zero(), iterations, converged: true });
        }
        cached = Some((w, s));
    }

    let mut sigma = sigma0.max(floor);
    if sigma <= floor && floor > T::zero() {
        sigma = floor + T::sqrt_eps() * floor.max(T::one());
    }
    loop {
        let (w, s) = match cached.take() {
            Some(ws) if sigma == T::zero() => ws,
            _ => {
                iterations += 1;
                sys.step(sigma)
            }
        };
        let snorm = norm2(&s);
        let gap = (snorm - delta).abs();
        if !snorm.is_finite() {
            return Err(Error::NonFinite("modified shifted step"));
        }
        if gap <= tol * delta {
            return Ok(ShiftResult { s_plus: s, sigma_plus: sigma, iterations, boundary_gap: gap, converged: true });
        }
        if snorm > delta {
            lo = lo.max(sigma);
        } else {
            hi = hi.min(sigma);
        }
        let q = sys.derivative(sigma, &w);
        let sq = dot(&s, &q);
        let mut next = if sq < T::zero() {
            sigma - (snorm * snorm / sq) * ((snorm - delta) / delta)
        } else {
            T::nan()
        };
        if !(next > lo && next < hi) {
            next = T::c(0.5) * (lo + hi);
        }
        if iterations >= i_max {
            return Ok(ShiftResult { s_plus: s, sigma_plus: sigma, iterations, boundary_gap: gap, converged: false });
        }
        sigma = next.max(T::zero());
    }
}
