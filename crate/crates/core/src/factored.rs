//! Dense triangular and diagonal factors and their rank-one modification.
//!
//! A symmetric matrix is held as `L·D·Lᵀ` with `L` lower triangular and `D`
//! diagonal. The same kernels serve the inverse form `H = T·G·Tᵀ` used by
//! the trust-region driver, where `T` plays the role of `L` and `G` of `D`.
//!
//! Triangular factors are stored column-major so that the rank-one sweep,
//! `T·v` and `Tᵀ·v` all run over contiguous memory.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, DenseMatrix};
use crate::scalar::Scalar;

/// Dense lower-triangular `n×n` matrix. Entries above the diagonal are never
/// written and read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularFactor<T> {
    n: usize,
    // column-major, data[j * n + i] = (i, j)
    data: Vec<T>,
}

impl<T: Scalar> TriangularFactor<T> {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![T::zero(); n * n];
        for j in 0..n {
            data[j * n + j] = T::one();
        }
        Self { n, data }
    }

    /// Builds a factor from `f(i, j)` evaluated on the lower triangle `i >= j`.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for j in 0..n {
            for i in j..n {
                data[j * n + i] = f(i, j);
            }
        }
        Self { n, data }
    }

    /// Copies the lower triangle of a dense matrix; the strict upper part is ignored.
    pub fn from_dense_lower(m: &DenseMatrix<T>) -> Self {
        Self::from_lower_fn(m.dim(), |i, j| m[(i, j)])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if i < j {
            T::zero()
        } else {
            self.data[j * self.n + i]
        }
    }

    /// Sets a lower-triangle entry.
    ///
    /// # Panics
    /// If `i < j`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i >= j, "entry ({i}, {j}) is above the diagonal");
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn diag(&self, j: usize) -> T {
        self.data[j * self.n + j]
    }

    /// Column `j` from the diagonal down (rows `j..n`).
    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.n + j..(j + 1) * self.n]
    }

    #[inline]
    fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.n + j..(j + 1) * self.n]
    }

    /// True when every strictly-upper entry of the backing store is exactly zero.
    pub fn strictly_upper_is_zero(&self) -> bool {
        (0..self.n).all(|j| (0..j).all(|i| self.data[j * self.n + i] == T::zero()))
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n).all(|j| self.column(j).iter().all(|v| v.is_finite()))
    }

    /// `T·v`
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        let mut out = vec![T::zero(); self.n];
        for j in 0..self.n {
            let vj = v[j];
            if vj != T::zero() {
                axpy(vj, self.column(j), &mut out[j..]);
            }
        }
        out
    }

    /// `Tᵀ·v`
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|j| dot(self.column(j), &v[j..])).collect()
    }

    /// Solves `T·x = b` by forward substitution.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        for j in 0..self.n {
            let tjj = self.diag(j);
            if tjj == T::zero() {
                return Err(Error::SingularFactor { index: j });
            }
            let xj = x[j] / tjj;
            x[j] = xj;
            if xj != T::zero() {
                axpy(-xj, &self.column(j)[1..], &mut x[j + 1..]);
            }
        }
        Ok(x)
    }

    /// Solves `Tᵀ·x = b` by backward substitution.
    pub fn solve_transpose(&self, b: &[T]) -> Result<Vec<T>> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        for j in (0..self.n).rev() {
            let tjj = self.diag(j);
            if tjj == T::zero() {
                return Err(Error::SingularFactor { index: j });
            }
            let col = self.column(j);
            x[j] = (x[j] - dot(&col[1..], &x[j + 1..])) / tjj;
        }
        Ok(x)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.n, |i, j| self.get(i, j))
    }

    /// Dense inverse (lower triangular), `O(n³)`.
    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        let n = self.n;
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![T::zero(); n];
        for k in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[k] = T::one();
            let col = self.solve(&e)?;
            for i in k..n {
                inv[(i, k)] = col[i];
            }
        }
        Ok(inv)
    }
}

/// Length-`n` diagonal factor.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalFactor<T> {
    values: Vec<T>,
}

impl<T: Scalar> DiagonalFactor<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn constant(n: usize, v: T) -> Self {
        Self { values: vec![v; n] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Entrywise reciprocal, e.g. `D = G⁻¹`.
    pub fn reciprocal(&self) -> Self {
        Self { values: self.values.iter().map(|&v| T::one() / v).collect() }
    }

    /// Replaces non-positive entries by their absolute values; exact zeros
    /// become `ε_M · max|g|` so the result is strictly positive.
    /// Returns the number of entries modified.
    pub fn repair_positive(&mut self) -> usize {
        let floor = T::eps_m() * self.values.iter().fold(T::zero(), |m, v| m.max(v.abs())).max(T::min_positive_value());
        let mut changed = 0;
        for v in &mut self.values {
            if *v <= T::zero() {
                *v = v.abs().max(floor);
                changed += 1;
            }
        }
        changed
    }
}

/// Plane rotation acting on the pair (column `pivot`, bordered column).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation<T> {
    pub pivot: usize,
    pub c: T,
    pub s: T,
}

impl<T: Scalar> GivensRotation<T> {
    /// Rotates `(x, y)` to `(c·x − s·y, s·x + c·y)`.
    #[inline]
    pub fn apply(&self, x: T, y: T) -> (T, T) {
        (self.c * x - self.s * y, self.s * x + self.c * y)
    }
}

/// Rotation that maps `(column_entry, spike_entry)` to `(r, 0)` with
/// `r = √(a² + b²)`.
pub fn givens_for<T: Scalar>(column_entry: T, spike_entry: T) -> Result<GivensRotation<T>> {
    givens_at(0, column_entry, spike_entry)
}

fn givens_at<T: Scalar>(pivot: usize, a: T, b: T) -> Result<GivensRotation<T>> {
    if a == T::zero() && b == T::zero() {
        return Err(Error::DegenerateRotation);
    }
    let r = a.hypot(b);
    Ok(GivensRotation { pivot, c: a / r, s: -b / r })
}

/// Work counters reported by an in-place update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub multiplications: usize,
    pub rotations: usize,
    pub repaired_diagonals: usize,
}

/// Returns `(L′, D′)` with `L′D′L′ᵀ = L·D·Lᵀ + α·a·aᵀ`.
pub fn rank_one_update<T: Scalar>(
    l: &TriangularFactor<T>,
    d: &DiagonalFactor<T>,
    alpha: T,
    a: &[T],
) -> Result<(TriangularFactor<T>, DiagonalFactor<T>)> {
    let mut l = l.clone();
    let mut d = d.clone();
    rank_one_update_in_place(&mut l, &mut d, alpha, a)?;
    Ok((l, d))
}

/// In-place form of [`rank_one_update`]. On error the factors are left in an
/// unspecified state and must be discarded.
///
/// The diagonal of `L` is preserved. When `α > 0` and `D > 0` the spike column
/// is eliminated by orthogonal rotations of the `D^{1/2}`-scaled columns; any
/// other sign pattern uses the diagonal-preserving elementary recurrence
/// (composite-t method), which keeps `D` exactly diagonal.
pub fn rank_one_update_in_place<T: Scalar>(
    l: &mut TriangularFactor<T>,
    d: &mut DiagonalFactor<T>,
    alpha: T,
    a: &[T],
) -> Result<UpdateStats> {
    let n = l.dim();
    if d.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: d.dim() });
    }
    if a.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.len() });
    }
    let mut stats = UpdateStats::default();
    if alpha == T::zero() || a.iter().all(|&v| v == T::zero()) {
        return Ok(stats);
    }
    if !alpha.is_finite() || !a.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("rank-one update data"));
    }
    if alpha > T::zero() && d.values().iter().all(|&v| v > T::zero()) {
        rotate_sweep(l, d, alpha, a, &mut stats)?;
    } else {
        elementary_sweep(l, d, alpha, a, &mut stats)?;
    }
    stats.repaired_diagonals = repair_diagonal(l);
    Ok(stats)
}

fn rotate_sweep<T: Scalar>(
    l: &mut TriangularFactor<T>,
    d: &mut DiagonalFactor<T>,
    alpha: T,
    a: &[T],
    stats: &mut UpdateStats,
) -> Result<()> {
    let n = l.dim();
    let root_alpha = alpha.sqrt();
    let mut w: Vec<T> = a.iter().map(|&v| root_alpha * v).collect();
    stats.multiplications += n + 1;
    for j in 0..n {
        let ljj = l.diag(j);
        if ljj == T::zero() {
            return Err(Error::SingularFactor { index: j });
        }
        let wj = w[j];
        if wj == T::zero() {
            continue;
        }
        let scale = d.values()[j].sqrt();
        let rot = givens_at(j, scale * ljj, wj)?;
        let r = rot.apply(scale * ljj, wj).0;
        let back = ljj / r;
        if !back.is_finite() || back == T::zero() {
            return Err(Error::UpdateFailure { column: j });
        }
        let c_scaled = rot.c * scale;
        let s_scaled = rot.s * scale;
        let col = l.column_mut(j);
        col[0] = ljj;
        for (lij, wi) in col[1..].iter_mut().zip(&mut w[j + 1..]) {
            let new_col = c_scaled * *lij - rot.s * *wi;
            *wi = s_scaled * *lij + rot.c * *wi;
            *lij = back * new_col;
        }
        w[j] = T::zero();
        let dj = (r / ljj) * (r / ljj);
        if !dj.is_finite() {
            return Err(Error::UpdateFailure { column: j });
        }
        d.values_mut()[j] = dj;
        stats.rotations += 1;
        stats.multiplications += 5 * (n - j - 1) + 12;
    }
    Ok(())
}

fn elementary_sweep<T: Scalar>(
    l: &mut TriangularFactor<T>,
    d: &mut DiagonalFactor<T>,
    alpha: T,
    a: &[T],
    stats: &mut UpdateStats,
) -> Result<()> {
    let n = l.dim();
    let mut w = a.to_vec();
    let mut weight = alpha;
    for j in 0..n {
        let ljj = l.diag(j);
        if ljj == T::zero() {
            return Err(Error::SingularFactor { index: j });
        }
        let p = w[j];
        if p == T::zero() {
            continue;
        }
        let mu = p / ljj;
        let dj = d.values()[j];
        let dbar = dj + weight * mu * mu;
        if dbar == T::zero() || !dbar.is_finite() {
            return Err(Error::UpdateFailure { column: j });
        }
        let beta = weight * mu / dbar;
        weight = weight * dj / dbar;
        d.values_mut()[j] = dbar;
        let col = l.column_mut(j);
        for (lij, wi) in col[1..].iter_mut().zip(&mut w[j + 1..]) {
            *wi -= mu * *lij;
            *lij += beta * *wi;
        }
        w[j] = T::zero();
        if !beta.is_finite() || !weight.is_finite() {
            return Err(Error::UpdateFailure { column: j });
        }
        stats.multiplications += 2 * (n - j - 1) + 6;
    }
    Ok(())
}

/// Lifts diagonals with `|L(j,j)| < √ε_M · max|L(i,i)|` to that threshold,
/// keeping their sign (`+` for exact zeros).
fn repair_diagonal<T: Scalar>(l: &mut TriangularFactor<T>) -> usize {
    let n = l.dim();
    let max_diag = (0..n).map(|j| l.diag(j).abs()).fold(T::zero(), T::max);
    let threshold = T::sqrt_eps() * max_diag;
    let mut repaired = 0;
    for j in 0..n {
        let v = l.diag(j);
        if v.abs() < threshold {
            let sign = if v < T::zero() { -T::one() } else { T::one() };
            l.set(j, j, sign * threshold);
            repaired += 1;
        }
    }
    repaired
}

/// `H·g = T·(G·(Tᵀ·g))`
pub fn apply_inverse_factors<T: Scalar>(t: &TriangularFactor<T>, g_diag: &DiagonalFactor<T>, g: &[T]) -> Vec<T> {
    let mut v = t.tr_mul_vec(g);
    for (vi, &gi) in v.iter_mut().zip(g_diag.values()) {
        *vi *= gi;
    }
    t.mul_vec(&v)
}

/// Solves `T·G·Tᵀ·h = s`, i.e. `h = B·s` for `B = H⁻¹`.
pub fn solve_inverse_factors<T: Scalar>(t: &TriangularFactor<T>, g_diag: &DiagonalFactor<T>, s: &[T]) -> Result<Vec<T>> {
    let mut u = t.solve(s)?;
    for (ui, &gi) in u.iter_mut().zip(g_diag.values()) {
        *ui /= gi;
    }
    t.solve_transpose(&u)
}

/// `E = diag(TᵀT)`: squared two-norm of every column of `T`.
pub fn column_norms_sq<T: Scalar>(t: &TriangularFactor<T>) -> DiagonalFactor<T> {
    DiagonalFactor::new((0..t.dim()).map(|j| { let c = t.column(j); dot(c, c) }).collect())
}

/// Trace of `T·G·Tᵀ`, `Σ_j G_j·E_j`. Bounds the two-norm of a positive-definite `H`.
pub fn inverse_trace<T: Scalar>(t: &TriangularFactor<T>, g_diag: &DiagonalFactor<T>) -> T {
    (0..t.dim()).fold(T::zero(), |acc, j| {
        let c = t.column(j);
        acc + g_diag.values()[j] * dot(c, c)
    })
}

/// Direct factors `B = L·D·Lᵀ` of the matrix whose inverse is `T·G·Tᵀ`.
/// `L = T⁻ᵀ` is upper triangular.
#[derive(Debug, Clone)]
pub struct DirectFactors<T> {
    pub l: DenseMatrix<T>,
    pub d: DiagonalFactor<T>,
}

impl<T: Scalar> DirectFactors<T> {
    /// Dense `L·D·Lᵀ`.
    pub fn assemble(&self) -> DenseMatrix<T> {
        let n = self.l.dim();
        let mut b = DenseMatrix::zeros(n);
        let d = self.d.values();
        for i in 0..n {
            for j in i..n {
                let li = self.l.row(i);
                let lj = self.l.row(j);
                let v = (0..n).fold(T::zero(), |acc, k| acc + li[k] * d[k] * lj[k]);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        b
    }
}

/// Recovers `B = (T·G·Tᵀ)⁻¹` in factored form by dense triangular inversion.
/// Cubic cost, so it is refused above `n_max`.
pub fn recover_direct_factors<T: Scalar>(
    t: &TriangularFactor<T>,
    g_diag: &DiagonalFactor<T>,
    n_max: usize,
) -> Result<DirectFactors<T>> {
    let n = t.dim();
    if n > n_max {
        return Err(Error::InvalidArgument(format!("dimension {n} exceeds n_max = {n_max}")));
    }
    if g_diag.values().iter().any(|&v| v == T::zero()) {
        return Err(Error::InvalidArgument("G has a zero entry".into()));
    }
    let t_inv = t.inverse()?;
    // Normalize L = T⁻ᵀ to a unit diagonal, moving the scale into D.
    let mut l = t_inv.transpose();
    let mut d = g_diag.reciprocal();
    for j in 0..n {
        let ljj = l[(j, j)];
        for i in 0..=j {
            l[(i, j)] /= ljj;
        }
        d.values_mut()[j] *= ljj * ljj;
    }
    Ok(DirectFactors { l, d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_trivial_cases() {
        let r = givens_for(1.0f64, 0.0).unwrap();
        assert_eq!((r.c, r.s), (1.0, 0.0));
        let r = givens_for(0.0, 1.0).unwrap();
        assert_eq!((r.c, r.s), (0.0, -1.0));
        let r = givens_for(3.0f64, 4.0).unwrap();
        assert!((r.c - 0.6).abs() < 1e-15 && (r.s + 0.8).abs() < 1e-15);
        let (x, y) = r.apply(3.0, 4.0);
        assert!((x - 5.0).abs() < 1e-15 && y.abs() < 1e-15);
        assert_eq!(givens_for(0.0, 0.0), Err(Error::DegenerateRotation));
    }

    #[test]
    fn zero_rank_update_is_identity() {
        let l = TriangularFactor::from_lower_fn(3, |i, j| if i == j { 1.0 } else { 0.3 * (i + j) as f64 });
        let d = DiagonalFactor::new(vec![1.0, 2.0, 3.0]);
        let (l2, d2) = rank_one_update(&l, &d, 0.0, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(l, l2);
        assert_eq!(d, d2);
    }

    #[test]
    fn scalar_update() {
        for &alpha in &[2.5f64, -0.5] {
            let l = TriangularFactor::identity(1);
            let d = DiagonalFactor::new(vec![3.0]);
            let (l2, d2) = rank_one_update(&l, &d, alpha, &[1.5]).unwrap();
            assert_eq!(l2.get(0, 0), 1.0);
            assert!((d2.values()[0] - (3.0 + alpha * 2.25)).abs() < 1e-14);
        }
    }

    #[test]
    fn update_to_zero_pivot_fails() {
        let l = TriangularFactor::identity(2);
        let d = DiagonalFactor::new(vec![1.0, 1.0]);
        let err = rank_one_update(&l, &d, -1.0, &[1.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::UpdateFailure { column: 0 });
    }

    #[test]
    fn inverse_factor_products() {
        let t = TriangularFactor::identity(2);
        assert_eq!(apply_inverse_factors(&t, &DiagonalFactor::constant(2, 1.0), &[1.0, -4.0]), vec![1.0, -4.0]);
        assert_eq!(apply_inverse_factors(&t, &DiagonalFactor::constant(2, 2.0), &[1.0, 3.0]), vec![2.0, 6.0]);
    }

    #[test]
    fn column_norms_small() {
        assert_eq!(column_norms_sq(&TriangularFactor::<f64>::identity(3)).values(), &[1.0, 1.0, 1.0]);
        let t = TriangularFactor::from_lower_fn(2, |i, j| [[1.0, 0.0], [2.0, 1.0]][i][j]);
        assert_eq!(column_norms_sq(&t).values(), &[5.0, 1.0]);
    }

    #[test]
    fn recover_direct_trivial() {
        let t = TriangularFactor::identity(3);
        let g = DiagonalFactor::new(vec![2.0, 4.0, 0.5]);
        let f = recover_direct_factors(&t, &g, 100).unwrap();
        assert_eq!(f.l, DenseMatrix::identity(3));
        assert_eq!(f.d.values(), &[0.5, 0.25, 2.0]);

        let t = TriangularFactor::from_lower_fn(1, |_, _| 2.0f64);
        let f = recover_direct_factors(&t, &DiagonalFactor::new(vec![4.0]), 100).unwrap();
        assert!((f.assemble()[(0, 0)] - 1.0 / 16.0).abs() < 1e-16);
        assert_eq!(f.l[(0, 0)], 1.0);
        assert!((f.d.values()[0] - 1.0 / 16.0).abs() < 1e-16);
        assert!(recover_direct_factors(&t, &DiagonalFactor::new(vec![4.0]), 0).is_err());
    }

    #[test]
    fn triangular_solves_invert_products() {
        let t = TriangularFactor::from_lower_fn(4, |i, j| if i == j { 1.5 + i as f64 } else { 0.1 * (i as f64 - j as f64) });
        let v = [1.0, -2.0, 0.5, 3.0];
        let x = t.solve(&t.mul_vec(&v)).unwrap();
        let y = t.solve_transpose(&t.tr_mul_vec(&v)).unwrap();
        for k in 0..4 {
            assert!((x[k] - v[k]).abs() < 1e-14);
            assert!((y[k] - v[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn repair_makes_positive() {
        let mut g = DiagonalFactor::new(vec![-2.0, 0.0, 3.0]);
        assert_eq!(g.repair_positive(), 2);
        assert_eq!(g.values()[0], 2.0);
        assert!(g.values()[1] > 0.0);
    }
}
