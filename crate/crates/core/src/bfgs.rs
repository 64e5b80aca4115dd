//! BFGS update of the inverse factorization `H = T·G·Tᵀ`.
//!
//! The rank-two inverse BFGS correction
//!
//! ```text
//! H⁺ = H + (yᵀs + yᵀHy)/(yᵀs)²·ssᵀ − (Hy·sᵀ + s·yᵀH)/yᵀs
//! ```
//!
//! is split into `α₁a₁a₁ᵀ + α₂a₂a₂ᵀ` through the factorization of the 2×2
//! middle matrix and applied as two rank-one factor updates.

use crate::error::{Error, Result};
use crate::factored::{
    apply_inverse_factors, inverse_trace, rank_one_update_in_place, solve_inverse_factors, DiagonalFactor,
    TriangularFactor, UpdateStats,
};
use crate::linalg::{dot, norm2, sub, DenseMatrix};
use crate::scalar::Scalar;

/// Step/gradient-change pair `(s, y)` with cached `yᵀs`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePair<T> {
    pub s: Vec<T>,
    pub y: Vec<T>,
    pub sy: T,
}

impl<T: Scalar> CurvaturePair<T> {
    pub fn new(s: Vec<T>, y: Vec<T>) -> Self {
        let sy = dot(&s, &y);
        Self { s, y, sy }
    }

    /// Pair from consecutive iterates and gradients.
    pub fn from_points(x_old: &[T], x_new: &[T], g_old: &[T], g_new: &[T]) -> Self {
        Self::new(sub(x_new, x_old), sub(g_new, g_old))
    }

    /// `yᵀs > √ε_M·‖y‖·‖s‖`
    pub fn admissible(&self) -> bool {
        self.sy > T::sqrt_eps() * norm2(&self.y) * norm2(&self.s)
    }
}

/// The two rank-one terms of the BFGS correction.
#[derive(Debug, Clone, PartialEq)]
pub struct BfgsCoefficients<T> {
    pub alpha1: T,
    pub a1: Vec<T>,
    pub alpha2: T,
    pub a2: Vec<T>,
}

/// Splits the BFGS correction given `Hy = H·y`.
///
/// `β₁ = (yᵀs + yᵀHy)/(yᵀs)²`, `β₂ = 1/yᵀs`, `α₁ = β₁`, `α₂ = −β₂²/β₁`,
/// `a₁ = s + (yᵀs)·α₂·Hy`, `a₂ = Hy`.
pub fn bfgs_coefficients<T: Scalar>(pair: &CurvaturePair<T>, hy: &[T]) -> Result<BfgsCoefficients<T>> {
    let sy = pair.sy;
    if !(sy > T::zero()) {
        return Err(Error::CurvatureRejected { sy: sy.to_f64().unwrap_or(f64::NAN) });
    }
    let yhy = dot(&pair.y, hy);
    let beta1 = (sy + yhy) / (sy * sy);
    let beta2 = T::one() / sy;
    let alpha2 = -(beta2 * beta2) / beta1;
    if !(beta1 > T::zero()) || !alpha2.is_finite() {
        return Err(Error::UpdateFailure { column: 0 });
    }
    let coeff = sy * alpha2;
    let a1 = pair.s.iter().zip(hy).map(|(&s, &h)| s + coeff * h).collect();
    Ok(BfgsCoefficients { alpha1: beta1, a1, alpha2, a2: hy.to_vec() })
}

/// Returns the updated factors `(T′, G′)`. The input factors are untouched
/// on every error path.
pub fn bfgs_factor_update<T: Scalar>(
    t: &TriangularFactor<T>,
    g_diag: &DiagonalFactor<T>,
    pair: &CurvaturePair<T>,
) -> Result<(TriangularFactor<T>, DiagonalFactor<T>)> {
    let mut f = InverseFactors { t: t.clone(), g: g_diag.clone() };
    f.bfgs_update(pair)?;
    Ok((f.t, f.g))
}

/// Inverse quasi-Newton matrix `H = T·G·Tᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseFactors<T> {
    pub t: TriangularFactor<T>,
    pub g: DiagonalFactor<T>,
}

/// Outcome of an accepted factor update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BfgsUpdateStats {
    pub first: UpdateStats,
    pub second: UpdateStats,
    /// Entries of `G′` lifted to positive values after the update.
    pub repaired: usize,
}

impl<T: Scalar> InverseFactors<T> {
    /// `H₀ = φ·I`
    pub fn scaled_identity(n: usize, phi: T) -> Self {
        Self { t: TriangularFactor::identity(n), g: DiagonalFactor::constant(n, phi) }
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// `H·v`
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        apply_inverse_factors(&self.t, &self.g, v)
    }

    /// `B·s = H⁻¹·s`
    pub fn solve(&self, s: &[T]) -> Result<Vec<T>> {
        solve_inverse_factors(&self.t, &self.g, s)
    }

    pub fn trace(&self) -> T {
        inverse_trace(&self.t, &self.g)
    }

    /// Dense `T·G·Tᵀ`.
    pub fn assemble(&self) -> DenseMatrix<T> {
        let n = self.dim();
        let mut h = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let upto = j;
                let v = (0..=upto).fold(T::zero(), |acc, k| acc + self.t.get(i, k) * self.g.values()[k] * self.t.get(j, k));
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }

    /// Applies the BFGS update in place. On error `self` is unchanged.
    pub fn bfgs_update(&mut self, pair: &CurvaturePair<T>) -> Result<BfgsUpdateStats> {
        if !pair.admissible() {
            return Err(Error::CurvatureRejected { sy: pair.sy.to_f64().unwrap_or(f64::NAN) });
        }
        let hy = self.apply(&pair.y);
        let coeffs = bfgs_coefficients(pair, &hy)?;
        let mut t = self.t.clone();
        let mut g = self.g.clone();
        let first = rank_one_update_in_place(&mut t, &mut g, coeffs.alpha1, &coeffs.a1)?;
        let second = rank_one_update_in_place(&mut t, &mut g, coeffs.alpha2, &coeffs.a2)?;
        let repaired = g.repair_positive();
        if !t.is_finite() || !g.values().iter().all(|v| v.is_finite()) {
            return Err(Error::UpdateFailure { column: 0 });
        }
        self.t = t;
        self.g = g;
        Ok(BfgsUpdateStats { first, second, repaired })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_when_y_equals_s() {
        let s: Vec<f64> = vec![1.0, -2.0, 0.5];
        let pair = CurvaturePair::new(s.clone(), s.clone());
        let c = bfgs_coefficients(&pair, &s).unwrap();
        let ss = 5.25;
        assert!((c.alpha1 - 2.0 / ss).abs() < 1e-15);
        assert!((c.alpha2 + 1.0 / (2.0 * ss)).abs() < 1e-15);
        let (t, g) = bfgs_factor_update(&TriangularFactor::identity(3), &DiagonalFactor::constant(3, 1.0), &pair).unwrap();
        let h = InverseFactors { t, g }.assemble();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((h[(i, j)] - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scalar_secant() {
        for h0 in [0.1f64, 1.0, 7.0] {
            let pair = CurvaturePair::new(vec![1.0], vec![2.0]);
            let (t, g) = bfgs_factor_update(&TriangularFactor::identity(1), &DiagonalFactor::new(vec![h0]), &pair).unwrap();
            let h = InverseFactors { t, g };
            assert!((h.assemble()[(0, 0)] - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_curvature_rejected() {
        let t = TriangularFactor::identity(2);
        let g = DiagonalFactor::constant(2, 1.0);
        let pair = CurvaturePair::new(vec![1.0, 0.0], vec![-1.0, 0.0]);
        assert_eq!(pair.sy, -1.0);
        assert!(matches!(bfgs_factor_update(&t, &g, &pair), Err(Error::CurvatureRejected { .. })));
        assert!(bfgs_coefficients(&pair, &[1.0, 0.0]).is_err());
        let mut f = InverseFactors { t: t.clone(), g: g.clone() };
        assert!(f.bfgs_update(&pair).is_err());
        assert_eq!(f.t, t);
        assert_eq!(f.g, g);
    }
}
