#![allow(dead_code)]

use ldltr::{DenseMatrix, DiagonalFactor, TriangularFactor};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

pub fn tri_to_na(t: &TriangularFactor<f64>) -> DMatrix<f64> {
    let n = t.dim();
    DMatrix::from_fn(n, n, |i, j| t.get(i, j))
}

pub fn vec_na(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

/// `L·diag(d)·Lᵀ`
pub fn ldlt(l: &DMatrix<f64>, d: &[f64]) -> DMatrix<f64> {
    l * DMatrix::from_diagonal(&vec_na(d)) * l.transpose()
}

pub fn random_vec(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Lower-triangular factor with diagonal in `±[0.5, 1.5]` and off-diagonal in `[−0.5, 0.5]/√n`.
pub fn random_lower(rng: &mut impl Rng, n: usize, unit: bool) -> TriangularFactor<f64> {
    let off = 0.5 / (n as f64).sqrt();
    let mut t = TriangularFactor::identity(n);
    for j in 0..n {
        for i in j..n {
            let v = if i == j {
                if unit {
                    1.0
                } else {
                    rng.gen_range(0.5..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
                }
            } else {
                rng.gen_range(-off..off)
            };
            t.set(i, j, v);
        }
    }
    t
}

pub fn random_positive(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> DiagonalFactor<f64> {
    DiagonalFactor::new((0..n).map(|_| rng.gen_range(lo..hi)).collect())
}

/// Frobenius-relative distance.
pub fn rel_fro(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn rel_vec(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Dense `T·G·Tᵀ`.
pub fn assemble_h(t: &TriangularFactor<f64>, g: &DiagonalFactor<f64>) -> DMatrix<f64> {
    ldlt(&tri_to_na(t), g.values())
}

/// Dense inverse BFGS update.
pub fn dense_bfgs(h: &DMatrix<f64>, s: &[f64], y: &[f64]) -> DMatrix<f64> {
    let s = vec_na(s);
    let y = vec_na(y);
    let sy = s.dot(&y);
    let hy = h * &y;
    let yhy = y.dot(&hy);
    h + (&s * s.transpose()) * ((sy + yhy) / (sy * sy)) - (&hy * s.transpose() + &s * hy.transpose()) / sy
}

/// Optimal shift of the trust-region subproblem by eigendecomposition and bisection on the
/// secular equation. Returns `(σ*, s*)`; the hard case is not handled.
pub fn eigen_tr_oracle(b: &DMatrix<f64>, g: &[f64], delta: f64) -> (f64, Vec<f64>) {
    let eig = b.clone().symmetric_eigen();
    let q = &eig.eigenvectors;
    let lam = &eig.eigenvalues;
    let gt = q.transpose() * vec_na(g);
    let n = g.len();
    let lmin = lam.iter().copied().fold(f64::INFINITY, f64::min);
    let norm_at = |sigma: f64| (0..n).map(|i| (gt[i] / (lam[i] + sigma)).powi(2)).sum::<f64>().sqrt();
    let step = |sigma: f64| {
        let c = DVector::from_fn(n, |i, _| -gt[i] / (lam[i] + sigma));
        (q * c).iter().copied().collect::<Vec<f64>>()
    };
    if lmin > 0.0 && norm_at(0.0) <= delta {
        return (0.0, step(0.0));
    }
    let mut lo = (-lmin).max(0.0);
    let mut hi = lo + 1.0;
    while norm_at(hi) > delta {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_at(mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    (sigma, step(sigma))
}
