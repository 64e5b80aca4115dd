//! Objective-function contract used by every solver.

use crate::scalar::Scalar;

/// A smooth objective with an analytic gradient.
pub trait Objective<T: Scalar> {
    fn dim(&self) -> usize;

    fn value(&mut self, x: &[T]) -> T;

    /// Writes `∇f(x)` into `grad`.
    fn gradient(&mut self, x: &[T], grad: &mut [T]);
}

impl<T: Scalar, O: Objective<T> + ?Sized> Objective<T> for &mut O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&mut self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn gradient(&mut self, x: &[T], grad: &mut [T]) {
        (**self).gradient(x, grad)
    }
}

/// Objective built from two closures.
pub struct FnObjective<F, G> {
    n: usize,
    f: F,
    g: G,
}

impl<F, G> FnObjective<F, G> {
    pub fn new(n: usize, f: F, g: G) -> Self {
        Self { n, f, g }
    }
}

impl<T, F, G> Objective<T> for FnObjective<F, G>
where
    T: Scalar,
    F: FnMut(&[T]) -> T,
    G: FnMut(&[T], &mut [T]),
{
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&mut self, x: &[T]) -> T {
        (self.f)(x)
    }
    fn gradient(&mut self, x: &[T], grad: &mut [T]) {
        (self.g)(x, grad)
    }
}

/// Wraps an objective and tallies calls.
pub struct Counted<O> {
    inner: O,
    pub fevals: usize,
    pub gevals: usize,
}

impl<O> Counted<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, fevals: 0, gevals: 0 }
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<T: Scalar, O: Objective<T>> Objective<T> for Counted<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&mut self, x: &[T]) -> T {
        self.fevals += 1;
        self.inner.value(x)
    }
    fn gradient(&mut self, x: &[T], grad: &mut [T]) {
        self.gevals += 1;
        self.inner.gradient(x, grad)
    }
}

impl<O> Counted<O> {
    /// Returns `∇f(x)` as a fresh vector.
    pub fn grad_vec<T: Scalar>(&mut self, x: &[T]) -> Vec<T>
    where
        O: Objective<T>,
    {
        let mut g = vec![T::zero(); x.len()];
        self.gradient(x, &mut g);
        g
    }
}
