//! Classic unconstrained test problems with analytic gradients.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::scalar::Scalar;

/// Dimensions at which scalable problems are instantiated.
pub const SCALABLE_SIZES: [usize; 3] = [50, 200, 1000];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Rosenbrock,
    ChainedRosenbrock,
    Woods,
    Fletchcr,
    Powell,
    Trigonometric,
    Dixmaana,
    IllQuadratic,
    DiagQuadratic,
    Beale,
    ExtBeale,
    Helical,
    Penalty1,
    VarDim,
    BroydenTri,
    DoubleWell,
    Engval1,
    Arwhead,
    Tridia,
    Raydan1,
    Himmelblau,
    Dqdrtic,
    Liarwhd,
}

/// Size rule for a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sizing {
    Fixed(usize),
    /// Any `n` that is a multiple of the given block size.
    Multiple(usize),
}

struct Entry {
    name: &'static str,
    kind: Kind,
    sizing: Sizing,
}

const ENTRIES: &[Entry] = &[
    Entry { name: "ROSENBROCK", kind: Kind::Rosenbrock, sizing: Sizing::Fixed(2) },
    Entry { name: "EXTROSNB", kind: Kind::Rosenbrock, sizing: Sizing::Multiple(2) },
    Entry { name: "GENROSE", kind: Kind::ChainedRosenbrock, sizing: Sizing::Multiple(1) },
    Entry { name: "WOODS", kind: Kind::Woods, sizing: Sizing::Multiple(4) },
    Entry { name: "FLETCHCR", kind: Kind::Fletchcr, sizing: Sizing::Multiple(1) },
    Entry { name: "POWELLSG", kind: Kind::Powell, sizing: Sizing::Multiple(4) },
    Entry { name: "TRIGON", kind: Kind::Trigonometric, sizing: Sizing::Multiple(1) },
    Entry { name: "DIXMAANA", kind: Kind::Dixmaana, sizing: Sizing::Multiple(3) },
    Entry { name: "ILLQUAD", kind: Kind::IllQuadratic, sizing: Sizing::Multiple(1) },
    Entry { name: "DIAGQUAD", kind: Kind::DiagQuadratic, sizing: Sizing::Multiple(1) },
    Entry { name: "BEALE", kind: Kind::Beale, sizing: Sizing::Fixed(2) },
    Entry { name: "EXTBEALE", kind: Kind::ExtBeale, sizing: Sizing::Multiple(2) },
    Entry { name: "HELIX", kind: Kind::Helical, sizing: Sizing::Fixed(3) },
    Entry { name: "PENALTY1", kind: Kind::Penalty1, sizing: Sizing::Multiple(1) },
    Entry { name: "VARDIM", kind: Kind::VarDim, sizing: Sizing::Multiple(1) },
    Entry { name: "BROYDNTR", kind: Kind::BroydenTri, sizing: Sizing::Multiple(1) },
    Entry { name: "DBLWELL", kind: Kind::DoubleWell, sizing: Sizing::Multiple(1) },
    Entry { name: "ENGVAL1", kind: Kind::Engval1, sizing: Sizing::Multiple(1) },
    Entry { name: "ARWHEAD", kind: Kind::Arwhead, sizing: Sizing::Multiple(1) },
    Entry { name: "TRIDIA", kind: Kind::Tridia, sizing: Sizing::Multiple(1) },
    Entry { name: "RAYDAN1", kind: Kind::Raydan1, sizing: Sizing::Multiple(1) },
    Entry { name: "HIMMELBG", kind: Kind::Himmelblau, sizing: Sizing::Multiple(2) },
    Entry { name: "DQDRTIC", kind: Kind::Dqdrtic, sizing: Sizing::Multiple(1) },
    Entry { name: "LIARWHD", kind: Kind::Liarwhd, sizing: Sizing::Multiple(1) },
];

/// Names and size rules of every catalog entry.
pub fn problem_names() -> impl Iterator<Item = (&'static str, Sizing)> {
    ENTRIES.iter().map(|e| (e.name, e.sizing))
}

/// A test problem instance with its own evaluation counters.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<T> {
    pub name: &'static str,
    pub n: usize,
    pub x0: Vec<T>,
    /// Optimal value, where known exactly.
    pub f_star: Option<T>,
    pub fevals: usize,
    pub gevals: usize,
    kind: Kind,
}

/// All catalog problems, scalable ones at each size in [`SCALABLE_SIZES`] up to `max_n`.
pub fn catalog<T: Scalar>(max_n: usize) -> Vec<Problem<T>> {
    let mut out = Vec::new();
    for e in ENTRIES {
        match e.sizing {
            Sizing::Fixed(n) if n <= max_n => out.push(Problem::new(e, n)),
            Sizing::Fixed(_) => {}
            Sizing::Multiple(m) => {
                for size in SCALABLE_SIZES.into_iter().filter(|&s| s <= max_n) {
                    out.push(Problem::new(e, size - size % m));
                }
            }
        }
    }
    out
}

/// Looks up a problem by name. Scalable problems are rounded down to a valid size.
pub fn find<T: Scalar>(name: &str, n: usize) -> Result<Problem<T>> {
    let e = ENTRIES
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::ProblemNotFound(name.to_string()))?;
    let size = match e.sizing {
        Sizing::Fixed(k) if k == n => k,
        Sizing::Fixed(k) => return Err(Error::InvalidArgument(format!("{} has fixed dimension {k}", e.name))),
        Sizing::Multiple(m) if n >= m && n >= 2 => n - n % m,
        Sizing::Multiple(m) => return Err(Error::InvalidArgument(format!("{} needs n ≥ {}", e.name, m.max(2)))),
    };
    Ok(Problem::new(e, size))
}

fn c<T: Scalar>(v: f64) -> T {
    T::c(v)
}

fn idx<T: Scalar>(i: usize) -> T {
    T::from_count(i)
}

impl<T: Scalar> Problem<T> {
    fn new(e: &Entry, n: usize) -> Self {
        let x0 = start_point(e.kind, n);
        let f_star = match e.kind {
            Kind::Dixmaana => Some(T::one()),
            Kind::DiagQuadratic => Some(-c::<T>(0.5) * (1..=n).map(|i| T::one() / idx::<T>(i)).sum::<T>()),
            Kind::Raydan1 => Some((1..=n).map(|i| idx::<T>(i) / c(10.0)).sum()),
            Kind::Trigonometric | Kind::Penalty1 | Kind::DoubleWell | Kind::Engval1 => None,
            _ => Some(T::zero()),
        };
        Self { name: e.name, n, x0, f_star, fevals: 0, gevals: 0, kind: e.kind }
    }

    /// `name` for fixed-size problems, `name-n` otherwise.
    pub fn label(&self) -> String {
        let fixed = ENTRIES.iter().any(|e| e.name == self.name && matches!(e.sizing, Sizing::Fixed(_)));
        if fixed {
            self.name.to_string()
        } else {
            format!("{}-{}", self.name, self.n)
        }
    }

    /// Objective value without touching the counters.
    pub fn eval(&self, x: &[T]) -> T {
        value(self.kind, x)
    }

    /// Gradient without touching the counters.
    pub fn eval_grad(&self, x: &[T], g: &mut [T]) {
        gradient(self.kind, x, g)
    }
}

impl<T: Scalar> Objective<T> for Problem<T> {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&mut self, x: &[T]) -> T {
        self.fevals += 1;
        value(self.kind, x)
    }
    fn gradient(&mut self, x: &[T], grad: &mut [T]) {
        self.gevals += 1;
        gradient(self.kind, x, grad)
    }
}

fn start_point<T: Scalar>(kind: Kind, n: usize) -> Vec<T> {
    let nf = idx::<T>(n);
    (0..n)
        .map(|i| match kind {
            Kind::Rosenbrock | Kind::ChainedRosenbrock => c(if i % 2 == 0 { -1.2 } else { 1.0 }),
            Kind::Woods => c([-3.0, -1.0, -3.0, -1.0][i % 4]),
            Kind::Fletchcr => T::zero(),
            Kind::Powell => c([3.0, -1.0, 0.0, 1.0][i % 4]),
            Kind::Trigonometric => T::one() / nf,
            Kind::Dixmaana => c(2.0),
            Kind::IllQuadratic | Kind::Tridia => T::one(),
            Kind::DiagQuadratic => T::zero(),
            Kind::Beale => T::one(),
            Kind::ExtBeale => c(if i % 2 == 0 { 1.0 } else { 0.8 }),
            Kind::Helical => c([-1.0, 0.0, 0.0][i]),
            Kind::Penalty1 => idx(i + 1),
            Kind::VarDim => T::one() - idx::<T>(i + 1) / nf,
            Kind::BroydenTri => -T::one(),
            Kind::DoubleWell => c(0.1 * ((i + 1) as f64).sin()),
            Kind::Engval1 => c(2.0),
            Kind::Arwhead | Kind::Raydan1 | Kind::Himmelblau => T::one(),
            Kind::Dqdrtic => c(3.0),
            Kind::Liarwhd => c(4.0),
        })
        .collect()
}

/// Eigenvalues `10^{6(i−1)/(n−1) − 6}` of the ill-conditioned quadratic.
fn ill_weight<T: Scalar>(i: usize, n: usize) -> T {
    c::<T>(10.0).powf(c::<T>(6.0) * idx::<T>(i) / idx::<T>((n - 1).max(1)) - c(6.0))
}

fn helix_theta<T: Scalar>(x1: T, x2: T) -> T {
    let th = x2.atan2(x1) / c(2.0 * PI);
    if th < c(-0.25) {
        th + T::one()
    } else {
        th
    }
}

const DIX_ALPHA: f64 = 1.0;
const DIX_GAMMA: f64 = 0.125;
const DIX_DELTA: f64 = 0.125;
const PENALTY1_A: f64 = 1e-5;

fn value<T: Scalar>(kind: Kind, x: &[T]) -> T {
    let n = x.len();
    let one = T::one();
    let sq = |v: T| v * v;
    match kind {
        Kind::Rosenbrock => x.chunks(2).map(|p| c::<T>(100.0) * sq(p[1] - p[0] * p[0]) + sq(one - p[0])).sum(),
        Kind::ChainedRosenbrock => x.windows(2).map(|w| c::<T>(100.0) * sq(w[1] - w[0] * w[0]) + sq(one - w[0])).sum(),
        Kind::Woods => x
            .chunks(4)
            .map(|p| {
                c::<T>(100.0) * sq(p[1] - p[0] * p[0])
                    + sq(one - p[0])
                    + c::<T>(90.0) * sq(p[3] - p[2] * p[2])
                    + sq(one - p[2])
                    + c::<T>(10.1) * (sq(p[1] - one) + sq(p[3] - one))
                    + c::<T>(19.8) * (p[1] - one) * (p[3] - one)
            })
            .sum(),
        Kind::Fletchcr => x.windows(2).map(|w| c::<T>(100.0) * sq(w[1] - w[0] + one - w[0] * w[0])).sum(),
        Kind::Powell => x
            .chunks(4)
            .map(|p| {
                sq(p[0] + c::<T>(10.0) * p[1])
                    + c::<T>(5.0) * sq(p[2] - p[3])
                    + sq(sq(p[1] - c::<T>(2.0) * p[2]))
                    + c::<T>(10.0) * sq(sq(p[0] - p[3]))
            })
            .sum(),
        Kind::Trigonometric => {
            let nf = idx::<T>(n);
            let cs: T = x.iter().map(|v| v.cos()).sum();
            x.iter().enumerate().map(|(i, &v)| sq(nf - cs + idx::<T>(i + 1) * (one - v.cos()) - v.sin())).sum()
        }
        Kind::Dixmaana => {
            let m = n / 3;
            let mut f = one;
            for i in 0..n {
                f += c::<T>(DIX_ALPHA) * sq(x[i]);
            }
            for i in 0..2 * m {
                f += c::<T>(DIX_GAMMA) * sq(x[i]) * sq(sq(x[i + m]));
            }
            for i in 0..m {
                f += c::<T>(DIX_DELTA) * x[i] * x[i + 2 * m];
            }
            f
        }
        Kind::IllQuadratic => c::<T>(0.5) * x.iter().enumerate().map(|(i, &v)| ill_weight::<T>(i, n) * v * v).sum::<T>(),
        Kind::DiagQuadratic => x.iter().enumerate().map(|(i, &v)| c::<T>(0.5) * idx::<T>(i + 1) * v * v - v).sum(),
        Kind::Beale | Kind::ExtBeale => x
            .chunks(2)
            .map(|p| {
                let (a, b) = (p[0], p[1]);
                sq(c::<T>(1.5) - a + a * b) + sq(c::<T>(2.25) - a + a * b * b) + sq(c::<T>(2.625) - a + a * b * b * b)
            })
            .sum(),
        Kind::Helical => {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let th = helix_theta(x[0], x[1]);
            c::<T>(100.0) * (sq(x[2] - c::<T>(10.0) * th) + sq(r - one)) + sq(x[2])
        }
        Kind::Penalty1 => {
            let s: T = x.iter().map(|&v| v * v).sum();
            c::<T>(PENALTY1_A) * x.iter().map(|&v| sq(v - one)).sum::<T>() + sq(s - c(0.25))
        }
        Kind::VarDim => {
            let s: T = x.iter().enumerate().map(|(i, &v)| idx::<T>(i + 1) * (v - one)).sum();
            x.iter().map(|&v| sq(v - one)).sum::<T>() + sq(s) + sq(sq(s))
        }
        Kind::BroydenTri => (0..n).map(|i| sq(broyden_residual(x, i))).sum(),
        Kind::DoubleWell => {
            x.iter().map(|&v| sq(v * v - one)).sum::<T>() + x.windows(2).map(|w| c::<T>(0.1) * sq(w[1] - w[0])).sum::<T>()
        }
        Kind::Engval1 => x.windows(2).map(|w| sq(w[0] * w[0] + w[1] * w[1]) - c::<T>(4.0) * w[0] + c(3.0)).sum(),
        Kind::Arwhead => {
            let xn = x[n - 1];
            x[..n - 1].iter().map(|&v| sq(v * v + xn * xn) - c::<T>(4.0) * v + c(3.0)).sum()
        }
        Kind::Tridia => {
            sq(x[0] - one) + (1..n).map(|i| idx::<T>(i + 1) * sq(c::<T>(2.0) * x[i] - x[i - 1])).sum::<T>()
        }
        Kind::Raydan1 => x.iter().enumerate().map(|(i, &v)| idx::<T>(i + 1) / c(10.0) * (v.exp() - v)).sum(),
        Kind::Himmelblau => x
            .chunks(2)
            .map(|p| sq(p[0] * p[0] + p[1] - c(11.0)) + sq(p[0] + p[1] * p[1] - c(7.0)))
            .sum(),
        Kind::Dqdrtic => x.windows(3).map(|w| sq(w[0]) + c::<T>(100.0) * (sq(w[1]) + sq(w[2]))).sum(),
        Kind::Liarwhd => x.iter().map(|&v| c::<T>(4.0) * sq(v * v - x[0]) + sq(v - one)).sum(),
    }
}

fn broyden_residual<T: Scalar>(x: &[T], i: usize) -> T {
    let n = x.len();
    let prev = if i > 0 { x[i - 1] } else { T::zero() };
    let next = if i + 1 < n { x[i + 1] } else { T::zero() };
    (c::<T>(3.0) - c::<T>(2.0) * x[i]) * x[i] - prev - c::<T>(2.0) * next + T::one()
}

fn gradient<T: Scalar>(kind: Kind, x: &[T], g: &mut [T]) {
    let n = x.len();
    let one = T::one();
    let two = c::<T>(2.0);
    g.iter_mut().for_each(|v| *v = T::zero());
    match kind {
        Kind::Rosenbrock => {
            for k in (0..n).step_by(2) {
                let t = x[k + 1] - x[k] * x[k];
                g[k] = c::<T>(-400.0) * x[k] * t - two * (one - x[k]);
                g[k + 1] = c::<T>(200.0) * t;
            }
        }
        Kind::ChainedRosenbrock => {
            for i in 0..n - 1 {
                let t = x[i + 1] - x[i] * x[i];
                g[i] += c::<T>(-400.0) * x[i] * t - two * (one - x[i]);
                g[i + 1] += c::<T>(200.0) * t;
            }
        }
        Kind::Woods => {
            for k in (0..n).step_by(4) {
                let (a, b, cc, d) = (x[k], x[k + 1], x[k + 2], x[k + 3]);
                let t1 = b - a * a;
                let t2 = d - cc * cc;
                g[k] = c::<T>(-400.0) * a * t1 - two * (one - a);
                g[k + 1] = c::<T>(200.0) * t1 + c::<T>(20.2) * (b - one) + c::<T>(19.8) * (d - one);
                g[k + 2] = c::<T>(-360.0) * cc * t2 - two * (one - cc);
                g[k + 3] = c::<T>(180.0) * t2 + c::<T>(20.2) * (d - one) + c::<T>(19.8) * (b - one);
            }
        }
        Kind::Fletchcr => {
            for i in 0..n - 1 {
                let r = x[i + 1] - x[i] + one - x[i] * x[i];
                let w = c::<T>(200.0) * r;
                g[i + 1] += w;
                g[i] += w * (-one - two * x[i]);
            }
        }
        Kind::Powell => {
            for k in (0..n).step_by(4) {
                let (a, b, cc, d) = (x[k], x[k + 1], x[k + 2], x[k + 3]);
                let t1 = a + c::<T>(10.0) * b;
                let t2 = cc - d;
                let t3 = b - two * cc;
                let t4 = a - d;
                let t3c = t3 * t3 * t3;
                let t4c = t4 * t4 * t4;
                g[k] = two * t1 + c::<T>(40.0) * t4c;
                g[k + 1] = c::<T>(20.0) * t1 + c::<T>(4.0) * t3c;
                g[k + 2] = c::<T>(10.0) * t2 - c::<T>(8.0) * t3c;
                g[k + 3] = c::<T>(-10.0) * t2 - c::<T>(40.0) * t4c;
            }
        }
        Kind::Trigonometric => {
            let nf = idx::<T>(n);
            let cs: T = x.iter().map(|v| v.cos()).sum();
            let r: Vec<T> = x.iter().enumerate().map(|(i, &v)| nf - cs + idx::<T>(i + 1) * (one - v.cos()) - v.sin()).collect();
            let total: T = r.iter().copied().sum();
            for j in 0..n {
                let (s, co) = x[j].sin_cos();
                g[j] = two * s * total + two * r[j] * (idx::<T>(j + 1) * s - co);
            }
        }
        Kind::Dixmaana => {
            let m = n / 3;
            for i in 0..n {
                g[i] = two * c::<T>(DIX_ALPHA) * x[i];
            }
            for i in 0..2 * m {
                let (a, b) = (x[i], x[i + m]);
                let b2 = b * b;
                g[i] += two * c::<T>(DIX_GAMMA) * a * b2 * b2;
                g[i + m] += c::<T>(4.0 * DIX_GAMMA) * a * a * b2 * b;
            }
            for i in 0..m {
                g[i] += c::<T>(DIX_DELTA) * x[i + 2 * m];
                g[i + 2 * m] += c::<T>(DIX_DELTA) * x[i];
            }
        }
        Kind::IllQuadratic => {
            for i in 0..n {
                g[i] = ill_weight::<T>(i, n) * x[i];
            }
        }
        Kind::DiagQuadratic => {
            for i in 0..n {
                g[i] = idx::<T>(i + 1) * x[i] - one;
            }
        }
        Kind::Beale | Kind::ExtBeale => {
            for k in (0..n).step_by(2) {
                let (a, b) = (x[k], x[k + 1]);
                let r1 = c::<T>(1.5) - a + a * b;
                let r2 = c::<T>(2.25) - a + a * b * b;
                let r3 = c::<T>(2.625) - a + a * b * b * b;
                g[k] = two * (r1 * (b - one) + r2 * (b * b - one) + r3 * (b * b * b - one));
                g[k + 1] = two * (r1 * a + r2 * two * a * b + r3 * c::<T>(3.0) * a * b * b);
            }
        }
        Kind::Helical => {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let r = r2.sqrt();
            let th = helix_theta(x[0], x[1]);
            let u = x[2] - c::<T>(10.0) * th;
            let k = c::<T>(1.0 / (2.0 * PI));
            let dth = [-x[1] * k / r2, x[0] * k / r2];
            for j in 0..2 {
                g[j] = c::<T>(200.0) * (u * c::<T>(-10.0) * dth[j] + (r - one) * x[j] / r);
            }
            g[2] = c::<T>(200.0) * u + two * x[2];
        }
        Kind::Penalty1 => {
            let s: T = x.iter().map(|&v| v * v).sum();
            let t = c::<T>(4.0) * (s - c(0.25));
            for i in 0..n {
                g[i] = two * c::<T>(PENALTY1_A) * (x[i] - one) + t * x[i];
            }
        }
        Kind::VarDim => {
            let s: T = x.iter().enumerate().map(|(i, &v)| idx::<T>(i + 1) * (v - one)).sum();
            let w = two * s + c::<T>(4.0) * s * s * s;
            for i in 0..n {
                g[i] = two * (x[i] - one) + w * idx::<T>(i + 1);
            }
        }
        Kind::BroydenTri => {
            for i in 0..n {
                let r = broyden_residual(x, i);
                g[i] += two * r * (c::<T>(3.0) - c::<T>(4.0) * x[i]);
                if i > 0 {
                    g[i - 1] -= two * r;
                }
                if i + 1 < n {
                    g[i + 1] -= c::<T>(4.0) * r;
                }
            }
        }
        Kind::DoubleWell => {
            for i in 0..n {
                g[i] = c::<T>(4.0) * x[i] * (x[i] * x[i] - one);
            }
            for i in 0..n - 1 {
                let d = c::<T>(0.2) * (x[i + 1] - x[i]);
                g[i + 1] += d;
                g[i] -= d;
            }
        }
        Kind::Engval1 => {
            for i in 0..n - 1 {
                let q = x[i] * x[i] + x[i + 1] * x[i + 1];
                g[i] += c::<T>(4.0) * q * x[i] - c(4.0);
                g[i + 1] += c::<T>(4.0) * q * x[i + 1];
            }
        }
        Kind::Arwhead => {
            let xn = x[n - 1];
            for i in 0..n - 1 {
                let q = x[i] * x[i] + xn * xn;
                g[i] = c::<T>(4.0) * q * x[i] - c(4.0);
                g[n - 1] += c::<T>(4.0) * q * xn;
            }
        }
        Kind::Tridia => {
            g[0] = two * (x[0] - one);
            for i in 1..n {
                let t = two * idx::<T>(i + 1) * (two * x[i] - x[i - 1]);
                g[i] += two * t;
                g[i - 1] -= t;
            }
        }
        Kind::Raydan1 => {
            for i in 0..n {
                g[i] = idx::<T>(i + 1) / c(10.0) * (x[i].exp() - one);
            }
        }
        Kind::Himmelblau => {
            for k in (0..n).step_by(2) {
                let (a, b) = (x[k], x[k + 1]);
                let r1 = a * a + b - c(11.0);
                let r2 = a + b * b - c(7.0);
                g[k] = c::<T>(4.0) * r1 * a + two * r2;
                g[k + 1] = two * r1 + c::<T>(4.0) * r2 * b;
            }
        }
        Kind::Dqdrtic => {
            for i in 0..n - 2 {
                g[i] += two * x[i];
                g[i + 1] += c::<T>(200.0) * x[i + 1];
                g[i + 2] += c::<T>(200.0) * x[i + 2];
            }
        }
        Kind::Liarwhd => {
            for i in 0..n {
                let t = c::<T>(8.0) * (x[i] * x[i] - x[0]);
                g[i] += two * t * x[i] + two * (x[i] - one);
                g[0] -= t;
            }
        }
    }
}

/// Largest relative discrepancy between the analytic gradient and central
/// differences with step `h = ε_M^{1/3}(1 + |x_i|)`, over all `points`.
///
/// Each component error is `|g_i − d_i| / max(1, |g_i|, |d_i|)`.
pub fn gradient_check<T: Scalar, O: Objective<T>>(p: &mut O, points: &[Vec<T>]) -> T {
    let cbrt = T::eps_m().cbrt();
    let mut worst = T::zero();
    for x in points {
        let n = x.len();
        let mut g = vec![T::zero(); n];
        p.gradient(x, &mut g);
        let mut xp = x.clone();
        for i in 0..n {
            let h = cbrt * (T::one() + x[i].abs());
            xp[i] = x[i] + h;
            let fp = p.value(&xp);
            xp[i] = x[i] - h;
            let fm = p.value(&xp);
            xp[i] = x[i];
            let d = (fp - fm) / (h + h);
            let err = (g[i] - d).abs() / T::one().max(g[i].abs()).max(d.abs());
            if err > worst || err.is_nan() {
                worst = err;
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_minimizers() {
        let r = find::<f64>("ROSENBROCK", 2).unwrap();
        assert_eq!(r.eval(&[1.0, 1.0]), 0.0);
        let mut g = [1.0; 2];
        r.eval_grad(&[1.0, 1.0], &mut g);
        assert_eq!(g, [0.0, 0.0]);
        let w = find::<f64>("WOODS", 4).unwrap();
        assert_eq!(w.eval(&[1.0; 4]), 0.0);
    }

    #[test]
    fn fletchcr_at_origin() {
        let p = find::<f64>("FLETCHCR", 10).unwrap();
        assert_eq!(p.x0, vec![0.0; 10]);
        assert_eq!(p.eval(&p.x0), 900.0);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(find::<f64>("NOPE", 10), Err(Error::ProblemNotFound(_))));
        assert!(find::<f64>("BEALE", 3).is_err());
    }

    #[test]
    fn catalog_size_and_caps() {
        let all = catalog::<f64>(1000);
        let distinct: std::collections::HashSet<_> = all.iter().map(|p| p.name).collect();
        assert!(distinct.len() >= 20);
        assert!(all.iter().all(|p| p.n <= 1000 && p.x0.len() == p.n));
        assert!(catalog::<f64>(50).iter().all(|p| p.n <= 50));
    }

    #[test]
    fn counters_tick_once_per_call() {
        let mut p = find::<f64>("TRIDIA", 50).unwrap();
        let x = p.x0.clone();
        let mut g = vec![0.0; 50];
        p.value(&x);
        p.gradient(&x, &mut g);
        p.value(&x);
        assert_eq!((p.fevals, p.gevals), (2, 1));
    }

    #[test]
    fn constant_function_check_is_zero() {
        let mut f = crate::objective::FnObjective::new(3, |_: &[f64]| 7.0, |_: &[f64], g: &mut [f64]| g.fill(0.0));
        assert_eq!(gradient_check(&mut f, &[vec![1.0, 2.0, 3.0]]), 0.0);
    }
}
