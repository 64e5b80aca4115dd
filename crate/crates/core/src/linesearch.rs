//! Strong-Wolfe line search (Moré-Thuente interval updates) and the dense
//! BFGS line-search baseline.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, dot, norm2, DenseMatrix};
use crate::objective::{Counted, Objective};
use crate::report::{classify, Diagnostics, SolveReport, Status};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfeParams<T> {
    pub c_armijo: T,
    pub c_curv: T,
    pub alpha_init: T,
    pub alpha_max: T,
    pub max_trials: usize,
    /// Relative width at which the bracket is considered collapsed.
    pub xtol: T,
}

impl<T: Scalar> Default for WolfeParams<T> {
    fn default() -> Self {
        Self { c_armijo: T::c(1e-4), c_curv: T::c(0.9), alpha_init: T::one(), alpha_max: T::c(1e10), max_trials: 40, xtol: T::c(1e-12) }
    }
}

impl<T: Scalar> WolfeParams<T> {
    fn validate(&self) -> Result<()> {
        if !(T::zero() < self.c_armijo && self.c_armijo < self.c_curv && self.c_curv < T::one()) {
            return Err(Error::InvalidArgument("need 0 < c_armijo < c_curv < 1".into()));
        }
        if !(self.alpha_init > T::zero() && self.alpha_max >= self.alpha_init) {
            return Err(Error::InvalidArgument("need 0 < alpha_init ≤ alpha_max".into()));
        }
        Ok(())
    }
}

/// Result of a line search. `x`, `f`, `grad` describe the returned point.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome<T> {
    pub alpha: T,
    pub x: Vec<T>,
    pub f: T,
    pub grad: Vec<T>,
    /// Both strong-Wolfe inequalities hold at `alpha`.
    pub wolfe: bool,
    /// `f < f0` at the returned point.
    pub decrease: bool,
    pub trials: usize,
}

/// Checks `f ≤ f0 + c₁αg₀ᵀp` and `|gᵀp| ≤ c₂|g₀ᵀp|`.
pub fn satisfies_strong_wolfe<T: Scalar>(f0: T, dg0: T, alpha: T, f: T, dg: T, params: &WolfeParams<T>) -> bool {
    f <= f0 + params.c_armijo * alpha * dg0 && dg.abs() <= params.c_curv * dg0.abs()
}

/// Finds a step along `p` satisfying the strong Wolfe conditions.
///
/// `dg0 = g₀ᵀp` must be negative. When `max_trials` is exhausted the best
/// point seen is returned with `wolfe = false`.
pub fn strong_wolfe_search<T: Scalar, O: Objective<T>>(
    objective: &mut O,
    x: &[T],
    p: &[T],
    f0: T,
    dg0: T,
    params: &WolfeParams<T>,
) -> Result<LineSearchOutcome<T>> {
    params.validate()?;
    if !(dg0 < T::zero()) {
        return Err(Error::InvalidArgument("search direction is not a descent direction".into()));
    }
    let n = x.len();
    let xtrapl = T::c(1.1);
    let xtrapu = T::c(4.0);
    let half = T::c(0.5);
    let p66 = T::c(0.66);
    let stpmin = T::zero();
    let stpmax = params.alpha_max;
    let gtest = params.c_armijo * dg0;

    let mut bracket = Bracket { stx: T::zero(), fx: f0, gx: dg0, sty: T::zero(), fy: f0, gy: dg0, brackt: false };
    let mut stage1 = true;
    let mut width = stpmax - stpmin;
    let mut width1 = width / half;
    let mut stmin = T::zero();
    let mut stmax = params.alpha_init + xtrapu * params.alpha_init;
    let mut stp = params.alpha_init.min(stpmax);

    let mut xt = vec![T::zero(); n];
    let mut gt = vec![T::zero(); n];
    let mut best: Option<LineSearchOutcome<T>> = None;

    for trial in 1..=params.max_trials {
        for i in 0..n {
            xt[i] = x[i] + stp * p[i];
        }
        let f = objective.value(&xt);
        objective.gradient(&xt, &mut gt);
        if !f.is_finite() || !all_finite(&gt) {
            // Shrink toward the last good endpoint.
            stmax = stp;
            bracket.brackt = true;
            bracket.sty = stp;
            bracket.fy = T::infinity();
            stp = bracket.stx + half * (stp - bracket.stx);
            if stp <= stpmin {
                break;
            }
            continue;
        }
        let dg = dot(&gt, p);
        let ftest = f0 + stp * gtest;

        if f < f0 && best.as_ref().is_none_or(|b| f < b.f) {
            best = Some(LineSearchOutcome { alpha: stp, x: xt.clone(), f, grad: gt.clone(), wolfe: false, decrease: true, trials: trial });
        }
        if satisfies_strong_wolfe(f0, dg0, stp, f, dg, params) {
            return Ok(LineSearchOutcome { alpha: stp, x: xt, f, grad: gt, wolfe: true, decrease: f < f0, trials: trial });
        }
        if stage1 && f <= ftest && dg >= T::zero() {
            stage1 = false;
        }
        if bracket.brackt && (stp <= stmin || stp >= stmax) {
            break;
        }
        if bracket.brackt && stmax - stmin <= params.xtol * stmax {
            break;
        }
        if stp == stpmax && f <= ftest && dg <= gtest {
            break;
        }
        if stp == stpmin && (f > ftest || dg >= gtest) {
            break;
        }

        if stage1 && f <= bracket.fx && f > ftest {
            // Modified function ψ(α) = f(α) − f0 − α·gtest.
            let mut m = Bracket {
                stx: bracket.stx,
                fx: bracket.fx - bracket.stx * gtest,
                gx: bracket.gx - gtest,
                sty: bracket.sty,
                fy: bracket.fy - bracket.sty * gtest,
                gy: bracket.gy - gtest,
                brackt: bracket.brackt,
            };
            stp = m.step(stp, f - stp * gtest, dg - gtest, stmin, stmax);
            bracket = Bracket {
                stx: m.stx,
                fx: m.fx + m.stx * gtest,
                gx: m.gx + gtest,
                sty: m.sty,
                fy: m.fy + m.sty * gtest,
                gy: m.gy + gtest,
                brackt: m.brackt,
            };
        } else {
            stp = bracket.step(stp, f, dg, stmin, stmax);
        }

        if bracket.brackt {
            if (bracket.sty - bracket.stx).abs() >= p66 * width1 {
                stp = bracket.stx + half * (bracket.sty - bracket.stx);
            }
            width1 = width;
            width = (bracket.sty - bracket.stx).abs();
            stmin = bracket.stx.min(bracket.sty);
            stmax = bracket.stx.max(bracket.sty);
        } else {
            stmin = stp + xtrapl * (stp - bracket.stx);
            stmax = stp + xtrapu * (stp - bracket.stx);
        }
        stp = stp.max(stpmin).min(stpmax);
        if bracket.brackt && (stp <= stmin || stp >= stmax || stmax - stmin <= params.xtol * stmax) {
            stp = bracket.stx;
        }
        if !(stp > T::zero()) {
            break;
        }
    }
    match best {
        Some(b) => Ok(b),
        None => Ok(LineSearchOutcome {
            alpha: T::zero(),
            x: x.to_vec(),
            f: f0,
            grad: Vec::new(),
            wolfe: false,
            decrease: false,
            trials: params.max_trials,
        }),
    }
}

/// Interval of uncertainty `[stx, sty]` with function values and slopes.
struct Bracket<T> {
    stx: T,
    fx: T,
    gx: T,
    sty: T,
    fy: T,
    gy: T,
    brackt: bool,
}

impl<T: Scalar> Bracket<T> {
    /// Safeguarded cubic/quadratic step; updates the interval and returns the new trial.
    fn step(&mut self, stp: T, fp: T, dp: T, stpmin: T, stpmax: T) -> T {
        let three = T::c(3.0);
        let two = T::c(2.0);
        let p66 = T::c(0.66);
        let (stx, fx, dx) = (self.stx, self.fx, self.gx);
        let (sty, fy, dy) = (self.sty, self.fy, self.gy);
        let sgnd = dp * dx.signum();

        let stpf;
        if fp > fx {
            // Higher function value: the minimum is bracketed.
            let theta = three * (fx - fp) / (stp - stx) + dx + dp;
            let s = theta.abs().max(dx.abs()).max(dp.abs());
            let mut gamma = s * ((theta / s).powi(2) - (dx / s) * (dp / s)).max(T::zero()).sqrt();
            if stp < stx {
                gamma = -gamma;
            }
            let p = (gamma - dx) + theta;
            let q = ((gamma - dx) + gamma) + dp;
            let r = p / q;
            let stpc = stx + r * (stp - stx);
            let stpq = stx + ((dx / ((fx - fp) / (stp - stx) + dx)) / two) * (stp - stx);
            stpf = if (stpc - stx).abs() < (stpq - stx).abs() { stpc } else { stpc + (stpq - stpc) / two };
            self.brackt = true;
        } else if sgnd < T::zero() {
            // Derivatives of opposite sign: the minimum is bracketed.
            let theta = three * (fx - fp) / (stp - stx) + dx + dp;
            let s = theta.abs().max(dx.abs()).max(dp.abs());
            let mut gamma = s * ((theta / s).powi(2) - (dx / s) * (dp / s)).max(T::zero()).sqrt();
            if stp > stx {
                gamma = -gamma;
            }
            let p = (gamma - dp) + theta;
            let q = ((gamma - dp) + gamma) + dx;
            let r = p / q;
            let stpc = stp + r * (stx - stp);
            let stpq = stp + (dp / (dp - dx)) * (stx - stp);
            stpf = if (stpc - stp).abs() > (stpq - stp).abs() { stpc } else { stpq };
            self.brackt = true;
        } else if dp.abs() < dx.abs() {
            // Derivative magnitude decreases.
            let theta = three * (fx - fp) / (stp - stx) + dx + dp;
            let s = theta.abs().max(dx.abs()).max(dp.abs());
            let mut gamma = s * ((theta / s).powi(2) - (dx / s) * (dp / s)).max(T::zero()).sqrt();
            if stp > stx {
                gamma = -gamma;
            }
            let p = (gamma - dp) + theta;
            let q = (gamma + (dx - dp)) + gamma;
            let r = p / q;
            let stpc = if r < T::zero() && gamma != T::zero() {
                stp + r * (stx - stp)
            } else if stp > stx {
                stpmax
            } else {
                stpmin
            };
            let stpq = stp + (dp / (dp - dx)) * (stx - stp);
            if self.brackt {
                let cand = if (stpc - stp).abs() < (stpq - stp).abs() { stpc } else { stpq };
                stpf = if stp > stx { (stp + p66 * (sty - stp)).min(cand) } else { (stp + p66 * (sty - stp)).max(cand) };
            } else {
                let cand = if (stpc - stp).abs() > (stpq - stp).abs() { stpc } else { stpq };
                stpf = cand.min(stpmax).max(stpmin);
            }
        } else {
            // Derivative magnitude does not decrease.
            stpf = if self.brackt {
                let theta = three * (fp - fy) / (sty - stp) + dy + dp;
                let s = theta.abs().max(dy.abs()).max(dp.abs());
                let mut gamma = s * ((theta / s).powi(2) - (dy / s) * (dp / s)).max(T::zero()).sqrt();
                if stp > sty {
                    gamma = -gamma;
                }
                let p = (gamma - dp) + theta;
                let q = ((gamma - dp) + gamma) + dy;
                let r = p / q;
                stp + r * (sty - stp)
            } else if stp > stx {
                stpmax
            } else {
                stpmin
            };
        }

        if fp > fx {
            self.sty = stp;
            self.fy = fp;
            self.gy = dp;
        } else {
            if sgnd < T::zero() {
                self.sty = stx;
                self.fy = fx;
                self.gy = dx;
            }
            self.stx = stp;
            self.fx = fp;
            self.gx = dp;
        }
        if stpf.is_finite() {
            stpf
        } else {
            // Degenerate interpolation; bisect or extrapolate.
            if self.brackt {
                T::c(0.5) * (self.stx + self.sty)
            } else {
                stp * T::c(4.0)
            }
        }
    }
}

/// Scale of the initial inverse Hessian, `φ = min(max(10⁻², 1/‖g₀‖), 10⁴)`.
pub fn initial_scale<T: Scalar>(g0_norm: T) -> T {
    (T::one() / g0_norm).max(T::c(1e-2)).min(T::c(1e4))
}

/// First-iteration trial step `min(1, 2(f_low − f0)/g₀ᵀp)` with `f_low = f0 − ‖g₀‖`.
pub fn first_trial_step<T: Scalar>(g0_norm: T, dg0: T) -> T {
    let guess = T::c(2.0) * (-g0_norm) / dg0;
    if guess.is_finite() && guess > T::zero() {
        guess.min(T::one())
    } else {
        T::one()
    }
}

/// Settings for [`bfgsr_minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsrConfig<T> {
    pub eps: T,
    pub k_max: usize,
    pub wolfe: WolfeParams<T>,
}

impl<T: Scalar> Default for BfgsrConfig<T> {
    fn default() -> Self {
        Self { eps: T::c(1e-4), k_max: 6000, wolfe: WolfeParams::default() }
    }
}

/// Dense inverse-BFGS with strong-Wolfe steps.
pub fn bfgsr_minimize<T: Scalar, O: Objective<T>>(problem: O, x0: &[T], config: &BfgsrConfig<T>) -> SolveReport<T> {
    let start = Instant::now();
    let mut obj = Counted::new(problem);
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut f = obj.value(&x);
    let mut g = obj.grad_vec(&x);
    let mut gnorm = norm2(&g);
    let (f0, g0n) = (f, gnorm);
    let mut diagnostics = Diagnostics { max_h_trace: T::zero(), ..Default::default() };

    let finish = |status: Status, iterations: usize, x: Vec<T>, f: T, gnorm: T, obj: &Counted<O>, diagnostics: Diagnostics<T>| SolveReport {
        status: classify(status, f0, g0n, f, gnorm),
        iterations,
        function_evals: obj.fevals,
        gradient_evals: obj.gevals,
        final_f: f,
        final_gnorm: gnorm,
        wall_time: start.elapsed(),
        x,
        initial_f: f0,
        initial_gnorm: g0n,
        diagnostics,
    };

    if !f.is_finite() || !all_finite(&g) {
        return finish(Status::EvaluatorFailure, 0, x, f, gnorm, &obj, diagnostics);
    }
    let phi = initial_scale(gnorm);
    let diag = |v: T| DenseMatrix::from_fn(n, |i, j| if i == j { v } else { T::zero() });
    let mut h = diag(phi);
    let mut k = 0;
    let status = loop {
        if gnorm <= config.eps {
            break Status::Converged;
        }
        if k >= config.k_max {
            break Status::IterationLimit;
        }
        let mut p: Vec<T> = h.matvec(&g).into_iter().map(|v| -v).collect();
        let mut dg = dot(&g, &p);
        if !(dg < T::zero()) {
            h = diag(phi);
            p = g.iter().map(|&v| -phi * v).collect();
            dg = dot(&g, &p);
        }
        let mut params = config.wolfe;
        params.alpha_init = if k == 0 { first_trial_step(g0n, dg) } else { T::one() };
        let ls = match strong_wolfe_search(&mut obj, &x, &p, f, dg, &params) {
            Ok(ls) => ls,
            Err(_) => break Status::LinesearchFailure,
        };
        if !ls.decrease {
            break Status::LinesearchFailure;
        }
        let s: Vec<T> = ls.x.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = ls.grad.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > T::sqrt_eps() * norm2(&s) * norm2(&y) {
            if k == 0 {
                h = diag(sy / dot(&y, &y));
            }
            dense_bfgs_inverse_update(&mut h, &s, &y);
        } else {
            diagnostics.skipped_updates += 1;
        }
        x = ls.x;
        f = ls.f;
        g = ls.grad;
        gnorm = norm2(&g);
        k += 1;
    };
    finish(status, k, x, f, gnorm, &obj, diagnostics)
}

/// `H ← H + (yᵀs + yᵀHy)/(yᵀs)²·ssᵀ − (Hy·sᵀ + s·yᵀH)/yᵀs`
pub fn dense_bfgs_inverse_update<T: Scalar>(h: &mut DenseMatrix<T>, s: &[T], y: &[T]) {
    let n = s.len();
    let hy = h.matvec(y);
    let sy = dot(s, y);
    let yhy = dot(y, &hy);
    let c1 = (sy + yhy) / (sy * sy);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] += c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;

    #[test]
    fn scale_clamps() {
        assert_eq!(initial_scale(1e6), 1e-2);
        assert_eq!(initial_scale(1.0), 1.0);
        assert_eq!(initial_scale(1e-6), 1e4);
    }

    #[test]
    fn exact_minimizer_of_parabola_accepted() {
        let mut f = FnObjective::new(1, |x: &[f64]| x[0] * x[0], |x: &[f64], g: &mut [f64]| g[0] = 2.0 * x[0]);
        let out = strong_wolfe_search(&mut f, &[1.0], &[-1.0], 1.0, -2.0, &WolfeParams::default()).unwrap();
        assert!(out.wolfe);
        assert_eq!(out.alpha, 1.0);
        assert_eq!(out.f, 0.0);
    }

    #[test]
    fn non_descent_rejected() {
        let mut f = FnObjective::new(1, |x: &[f64]| x[0] * x[0], |x: &[f64], g: &mut [f64]| g[0] = 2.0 * x[0]);
        assert!(strong_wolfe_search(&mut f, &[1.0], &[1.0], 1.0, 2.0, &WolfeParams::default()).is_err());
    }

    #[test]
    fn bad_wolfe_constants_rejected() {
        let mut f = FnObjective::new(1, |x: &[f64]| x[0] * x[0], |x: &[f64], g: &mut [f64]| g[0] = 2.0 * x[0]);
        let params = WolfeParams { c_armijo: 0.9, c_curv: 0.1, ..WolfeParams::default() };
        assert!(strong_wolfe_search(&mut f, &[1.0], &[-1.0], 1.0, -2.0, &params).is_err());
    }

    #[test]
    fn bfgsr_stationary_start() {
        let f = FnObjective::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1], |x: &[f64], g: &mut [f64]| {
            g[0] = 2.0 * x[0];
            g[1] = 2.0 * x[1];
        });
        let r = bfgsr_minimize(f, &[0.0, 0.0], &BfgsrConfig::default());
        assert_eq!(r.status, Status::Converged);
        assert_eq!(r.iterations, 0);
    }
}
