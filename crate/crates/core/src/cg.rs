//! Phase 2: conjugate gradients on the shifted system in inverse form.
//!
//! `(B + σI)s = −g` with `B = (T·G·Tᵀ)⁻¹` is equivalent to
//!
//! ```text
//! h = −Tᵀg,   (D + σ·TᵀT)·v = h,   s = T·v
//! ```
//!
//! with `D = G⁻¹`. The middle system is symmetric positive definite whenever
//! `D > 0` and `σ ≥ 0`, and each operator application costs two triangular
//! products.

use crate::error::{Error, Result};
use crate::factored::{column_norms_sq, DiagonalFactor, TriangularFactor};
use crate::linalg::{all_finite, axpy, dot, norm2};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CgReport<T> {
    pub s: Vec<T>,
    pub iterations: usize,
    /// `‖(D + σTᵀT)v − h‖ / ‖h‖` (recurrence residual)
    pub relative_residual: T,
    /// Set when `pᵀAp ≤ 0` stopped the iteration early.
    pub negative_curvature: bool,
}

/// Solves `(B + σI)s = −g` without refactorizing. Plain CG (no preconditioner).
pub fn cg_solve_shifted<T: Scalar>(
    t: &TriangularFactor<T>,
    g_diag: &DiagonalFactor<T>,
    g: &[T],
    sigma: T,
    tol: T,
    i_cg_max: usize,
) -> Result<CgReport<T>> {
    cg_solve_shifted_with(t, g_diag, g, sigma, tol, i_cg_max, false)
}

/// As [`cg_solve_shifted`], optionally Jacobi-preconditioned by `diag(D + σE)`.
pub fn cg_solve_shifted_with<T: Scalar>(
    t: &TriangularFactor<T>,
    g_diag: &DiagonalFactor<T>,
    g: &[T],
    sigma: T,
    tol: T,
    i_cg_max: usize,
    jacobi: bool,
) -> Result<CgReport<T>> {
    let n = t.dim();
    if g.len() != n || g_diag.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.len().min(g_diag.dim()) });
    }
    if !(sigma >= T::zero()) {
        return Err(Error::InvalidArgument("shift must be nonnegative".into()));
    }
    let mut h = t.tr_mul_vec(g);
    h.iter_mut().for_each(|v| *v = -*v);
    let h_norm = norm2(&h);
    if h_norm == T::zero() {
        return Ok(CgReport { s: vec![T::zero(); n], iterations: 0, relative_residual: T::zero(), negative_curvature: false });
    }
    let d = g_diag.reciprocal();
    let d = d.values();

    // Unshifted system is diagonal.
    if sigma == T::zero() {
        let v: Vec<T> = h.iter().zip(g_diag.values()).map(|(&h, &g)| h * g).collect();
        let s = t.mul_vec(&v);
        if !all_finite(&s) {
            return Err(Error::SolveFailure("non-finite unshifted solve"));
        }
        return Ok(CgReport { s, iterations: 0, relative_residual: T::zero(), negative_curvature: false });
    }

    let apply = |v: &[T]| -> Vec<T> {
        let tv = t.mul_vec(v);
        let mut out = t.tr_mul_vec(&tv);
        for ((o, &vi), &di) in out.iter_mut().zip(v).zip(d) {
            *o = di * vi + sigma * *o;
        }
        out
    };
    let precond: Option<Vec<T>> = jacobi.then(|| {
        let e = column_norms_sq(t);
        d.iter().zip(e.values()).map(|(&di, &ei)| T::one() / (di + sigma * ei)).collect()
    });
    let precondition = |r: &[T]| -> Vec<T> {
        match &precond {
            Some(m) => r.iter().zip(m).map(|(&ri, &mi)| ri * mi).collect(),
            None => r.to_vec(),
        }
    };

    let mut x = vec![T::zero(); n];
    let mut r = h.clone();
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut rel = T::one();
    let mut iterations = 0;
    let mut negative_curvature = false;
    while iterations < i_cg_max && rel > tol {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !pap.is_finite() {
            return Err(Error::SolveFailure("non-finite operator application"));
        }
        if pap <= T::zero() {
            negative_curvature = true;
            break;
        }
        let alpha = rz / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        iterations += 1;
        rel = norm2(&r) / h_norm;
        if rel <= tol {
            break;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, &zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    let s = t.mul_vec(&x);
    if !all_finite(&s) || !rel.is_finite() {
        return Err(Error::SolveFailure("non-finite shifted solve"));
    }
    Ok(CgReport { s, iterations, relative_residual: rel, negative_curvature })
}
