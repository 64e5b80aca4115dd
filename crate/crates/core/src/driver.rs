//! Two-phase LDLᵀ quasi-Newton trust-region solver.
//!
//! The inverse Hessian approximation is kept as `H = T·G·Tᵀ`. Each iteration
//! tries the full quasi-Newton step; when it leaves the trust region a shift is
//! estimated (exactly for small problems, by the modified secular equation
//! otherwise), refined by shift backtracking, and the better of the two steps
//! is tested for acceptance.

use std::time::Instant;

use log::{debug, trace};

use crate::backtrack::{backtrack_shift, CgSettings};
use crate::bfgs::{CurvaturePair, InverseFactors};
use crate::error::{Error, Result};
use crate::exact::solve_ms;
use crate::factored::{column_norms_sq, recover_direct_factors};
use crate::linalg::{add, all_finite, dot, norm2, scaled, sub};
use crate::linesearch::{first_trial_step, strong_wolfe_search, WolfeParams};
use crate::objective::{Counted, Objective};
use crate::report::{classify, Diagnostics, SolveReport, Status};
use crate::scalar::Scalar;
use crate::shift::{initial_shift, solve_modified_shift};

/// Which phase-1 solver handles steps that leave the trust region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubproblemMode {
    /// Exact solver when `n ≤ n_max`, modified shift otherwise.
    #[default]
    Auto,
    Exact,
    Shift,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub c1: T,
    pub c2: T,
    pub c3: T,
    pub c4: T,
    pub c5: T,
    pub c6: T,
    pub c7: T,
    pub gamma0: T,
    pub gamma_min: T,
    pub gamma_max: T,
    pub n_max: usize,
    /// Gradient-norm tolerance.
    pub eps: T,
    pub k_max: usize,
    pub delta_min: T,
    pub exact_max_iter: usize,
    pub exact_tol: T,
    pub shift_max_iter: usize,
    pub shift_tol: T,
    pub backtrack_max_iter: usize,
    pub cg: CgSettings<T>,
    pub phi_min: T,
    pub phi_max: T,
    pub wolfe: WolfeParams<T>,
    pub subproblem: SubproblemMode,
    /// Refine the phase-1 step by shift backtracking.
    pub backtrack: bool,
    /// Apply admissible curvature pairs from rejected trial points.
    pub update_on_reject: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        let quarter = T::c(0.25);
        Self {
            c1: T::c(1e-4),
            c2: T::c(0.75),
            c3: T::c(0.8),
            c4: T::c(2.0),
            c5: T::c(0.1),
            c6: T::c(0.75),
            c7: T::c(0.5),
            gamma0: quarter,
            gamma_min: quarter.powi(10),
            gamma_max: quarter,
            n_max: 100,
            eps: T::c(1e-4),
            k_max: 6000,
            delta_min: T::c(1e-22),
            exact_max_iter: 50,
            exact_tol: T::c(1e-8),
            shift_max_iter: 10,
            shift_tol: T::c(1e-4),
            backtrack_max_iter: 3,
            cg: CgSettings::default(),
            phi_min: T::c(1e-2),
            phi_max: T::c(1e4),
            wolfe: WolfeParams::default(),
            subproblem: SubproblemMode::Auto,
            backtrack: true,
            update_on_reject: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    /// Exact subproblem on every constrained step, no backtracking.
    pub fn exact_only() -> Self {
        Self { subproblem: SubproblemMode::Exact, backtrack: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let (z, one) = (T::zero(), T::one());
        let checks = [
            (z < self.c1 && self.c1 <= self.c2, "0 < c1 ≤ c2"),
            (z < self.c3 && self.c3 < one && one < self.c4, "0 < c3 < 1 < c4"),
            (z < self.c5 && self.c5 <= self.c6 && self.c6 <= self.c2, "0 < c5 ≤ c6 ≤ c2"),
            (z < self.c7 && self.c7 < one, "0 < c7 < 1"),
            (z < self.gamma0 && self.gamma0 < one, "0 < gamma0 < 1"),
            (self.gamma_min <= self.gamma0 && self.gamma0 <= self.gamma_max && self.gamma_max < one, "gamma_min ≤ gamma0 ≤ gamma_max < 1"),
            (z < self.gamma_min, "gamma_min > 0"),
            (self.eps >= z && self.delta_min >= z, "eps and delta_min nonnegative"),
            (z < self.phi_min && self.phi_min <= self.phi_max, "0 < phi_min ≤ phi_max"),
            (self.exact_max_iter > 0 && self.shift_max_iter > 0 && self.backtrack_max_iter > 0, "iteration caps positive"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::InvalidArgument(format!("invalid solver config: need {msg}"))),
            None => Ok(()),
        }
    }

    /// `φ = min(max(φ_min, 1/‖g₀‖), φ_max)`
    pub fn initial_scale(&self, g0_norm: T) -> T {
        (T::one() / g0_norm).max(self.phi_min).min(self.phi_max)
    }

    fn use_exact(&self, n: usize) -> bool {
        match self.subproblem {
            SubproblemMode::Auto => n <= self.n_max,
            SubproblemMode::Exact => true,
            SubproblemMode::Shift => false,
        }
    }
}

/// Solver state between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState<T> {
    pub x: Vec<T>,
    pub f: T,
    pub g: Vec<T>,
    pub factors: InverseFactors<T>,
    pub delta: T,
    pub gamma: T,
    pub k: usize,
}

impl<T: Scalar> IterationState<T> {
    pub fn gnorm(&self) -> T {
        norm2(&self.g)
    }
}

/// How initialization ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Start<T> {
    /// Ready to iterate from `x₁`.
    Ready(IterationState<T>),
    /// Stopped before iterating; carries the point reached.
    Stopped { status: Status, x: Vec<T>, f: T, g: Vec<T>, iterations: usize },
}

/// Evaluates the start point, takes the strong-Wolfe step along `−φg₀`, sets
/// `Δ₁ = 2‖x₁ − x₀‖` and applies the first curvature pair.
pub fn initialize<T: Scalar, O: Objective<T>>(
    objective: &mut O,
    x0: &[T],
    config: &SolverConfig<T>,
    diagnostics: &mut Diagnostics<T>,
) -> Start<T> {
    let n = x0.len();
    let f0 = objective.value(x0);
    let mut g0 = vec![T::zero(); n];
    objective.gradient(x0, &mut g0);
    let stop = |status, x: &[T], f, g: Vec<T>, iterations| Start::Stopped { status, x: x.to_vec(), f, g, iterations };
    if !f0.is_finite() || !all_finite(&g0) || !all_finite(x0) {
        return stop(Status::EvaluatorFailure, x0, f0, g0, 0);
    }
    let g0n = norm2(&g0);
    if g0n <= config.eps {
        return stop(Status::Converged, x0, f0, g0, 0);
    }
    if config.k_max == 0 {
        return stop(Status::IterationLimit, x0, f0, g0, 0);
    }
    let phi = config.initial_scale(g0n);
    let p = scaled(-phi, &g0);
    let dg0 = dot(&g0, &p);
    let mut wolfe = config.wolfe;
    wolfe.alpha_init = first_trial_step(g0n, dg0);
    let ls = match strong_wolfe_search(objective, x0, &p, f0, dg0, &wolfe) {
        Ok(ls) if ls.decrease => ls,
        _ => return stop(Status::EvaluatorFailure, x0, f0, g0, 0),
    };
    let mut factors = InverseFactors::scaled_identity(n, phi);
    let pair = CurvaturePair::from_points(x0, &ls.x, &g0, &ls.grad);
    if factors.bfgs_update(&pair).is_err() {
        diagnostics.skipped_updates += 1;
    }
    let delta = T::c(2.0) * norm2(&pair.s);
    debug!("initial step α = {:e}, Δ₁ = {:e}", ls.alpha, delta);
    Start::Ready(IterationState { x: ls.x, f: ls.f, g: ls.grad, factors, delta, gamma: config.gamma0, k: 1 })
}

/// Candidate step with its objective value.
struct Trial<T> {
    s: Vec<T>,
    f: T,
    /// Exit index of shift backtracking, when it ran.
    backtrack_exit: Option<usize>,
}

/// Minimizes `objective` from `x0`.
pub fn minimize<T: Scalar, O: Objective<T>>(objective: O, x0: &[T], config: &SolverConfig<T>) -> Result<SolveReport<T>> {
    minimize_with(objective, x0, config, |_| {})
}

/// [`minimize`] with a callback after every trust-region iteration.
pub fn minimize_with<T: Scalar, O: Objective<T>>(
    objective: O,
    x0: &[T],
    config: &SolverConfig<T>,
    mut observer: impl FnMut(&IterationEvent<T>),
) -> Result<SolveReport<T>> {
    config.validate()?;
    if objective.dim() != x0.len() {
        return Err(Error::DimensionMismatch { expected: objective.dim(), found: x0.len() });
    }
    let start = Instant::now();
    let mut obj = Counted::new(objective);
    let mut diagnostics = Diagnostics { max_h_trace: T::zero(), ..Default::default() };

    let f0 = obj.value(x0);
    let mut g0 = vec![T::zero(); x0.len()];
    obj.gradient(x0, &mut g0);
    let g0n = norm2(&g0);
    // Initialization re-evaluates through the same counter; undo the probe.
    obj.fevals -= 1;
    obj.gevals -= 1;

    let mut state = match initialize(&mut obj, x0, config, &mut diagnostics) {
        Start::Ready(state) => state,
        Start::Stopped { status, x, f, g, iterations } => {
            let gn = norm2(&g);
            return Ok(SolveReport {
                status: classify(status, f0, g0n, f, gn),
                iterations,
                function_evals: obj.fevals,
                gradient_evals: obj.gevals,
                final_f: f,
                final_gnorm: gn,
                wall_time: start.elapsed(),
                x,
                initial_f: f0,
                initial_gnorm: g0n,
                diagnostics,
            });
        }
    };
    diagnostics.max_h_trace = state.factors.trace();

    let status = loop {
        let gnorm = state.gnorm();
        if gnorm <= config.eps {
            break Status::Converged;
        }
        if state.k >= config.k_max {
            break Status::IterationLimit;
        }
        if state.delta <= config.delta_min {
            break Status::RadiusCollapse;
        }
        let event = iterate(&mut obj, &mut state, config, &mut diagnostics);
        if event.h_trace > diagnostics.max_h_trace {
            diagnostics.max_h_trace = event.h_trace;
        }
        observer(&event);
        state.k += 1;
    };
    let gnorm = state.gnorm();
    Ok(SolveReport {
        status: classify(status, f0, g0n, state.f, gnorm),
        iterations: state.k,
        function_evals: obj.fevals,
        gradient_evals: obj.gevals,
        final_f: state.f,
        final_gnorm: gnorm,
        wall_time: start.elapsed(),
        x: state.x,
        initial_f: f0,
        initial_gnorm: g0n,
        diagnostics,
    })
}

/// Radius change made by one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusAction {
    Increase,
    Hold,
    Decrease,
}

/// Summary of one trust-region iteration, passed to the observer of [`minimize_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationEvent<T> {
    /// Index of the iteration that produced the event.
    pub k: usize,
    /// Objective at the iterate after the step was accepted or rejected.
    pub f: T,
    pub rho: T,
    pub accepted: bool,
    /// The full quasi-Newton step left the trust region.
    pub constrained: bool,
    pub step_norm: T,
    /// Radius after the update.
    pub delta: T,
    pub radius: RadiusAction,
    pub gamma: T,
    /// `trace(T·G·Tᵀ)` after the factor update.
    pub h_trace: T,
}

/// One trust-region iteration: step, acceptance, radius, γ and factor update.
fn iterate<T: Scalar, O: Objective<T>>(
    obj: &mut Counted<O>,
    state: &mut IterationState<T>,
    config: &SolverConfig<T>,
    diagnostics: &mut Diagnostics<T>,
) -> IterationEvent<T> {
    let n = state.x.len();
    let h = &state.factors;
    let full = scaled(-T::one(), &h.apply(&state.g));
    let constrained = h.g.min() <= T::zero() || norm2(&full) > state.delta;

    let trial = if constrained {
        constrained_step(obj, state, config, diagnostics)
    } else {
        let f = eval(obj, &add(&state.x, &full));
        Trial { s: full, f, backtrack_exit: None }
    };
    let Trial { s, f: f_trial, backtrack_exit } = trial;
    let snorm = norm2(&s);

    let hs = state.factors.solve(&s).unwrap_or_else(|_| vec![T::nan(); n]);
    let predicted = -(dot(&s, &state.g) + T::c(0.5) * dot(&s, &hs));
    let actual = state.f - f_trial;
    let x_trial = add(&state.x, &s);
    let mut g_trial: Option<Vec<T>> = None;

    let cancellation = f_trial.is_finite() && actual.abs() <= T::c(4.0) * T::eps_m() * state.f.abs().max(T::one());
    let mut rho = if !f_trial.is_finite() {
        T::neg_infinity()
    } else if cancellation {
        // Function values carry no information; compare gradient norms.
        let gt = obj.grad_vec(&x_trial);
        let better = all_finite(&gt) && norm2(&gt) < norm2(&state.g);
        g_trial = Some(gt);
        if better {
            diagnostics.gradient_fallbacks += 1;
            config.c5
        } else {
            T::neg_infinity()
        }
    } else if !(predicted > T::zero()) || !predicted.is_finite() {
        if actual > T::zero() {
            config.c5
        } else {
            T::neg_infinity()
        }
    } else {
        actual / predicted
    };

    if (config.c1 < rho || config.update_on_reject) && g_trial.is_none() && f_trial.is_finite() {
        g_trial = Some(obj.grad_vec(&x_trial));
    }
    let g_trial = g_trial.filter(|g| all_finite(g));
    if config.c1 < rho && g_trial.is_none() {
        rho = T::neg_infinity();
    }
    let accepted = config.c1 < rho;
    trace!("k = {} ρ = {:e} ‖s‖ = {:e} Δ = {:e}", state.k, rho, snorm, state.delta);

    let radius = if config.c2 < rho {
        if snorm <= config.c3 * state.delta {
            RadiusAction::Hold
        } else {
            RadiusAction::Increase
        }
    } else if config.c5 <= rho && rho <= config.c6 {
        RadiusAction::Hold
    } else {
        RadiusAction::Decrease
    };
    match radius {
        RadiusAction::Increase => state.delta = config.c4 * state.delta,
        RadiusAction::Hold => {}
        RadiusAction::Decrease => state.delta = config.c7 * state.delta,
    }

    let pair = g_trial.as_ref().map(|gt| CurvaturePair::new(s, sub(gt, &state.g)));
    if accepted {
        if let Some(exit) = backtrack_exit {
            if exit == config.backtrack_max_iter {
                state.gamma *= T::c(0.5);
            } else if exit == 2 {
                state.gamma *= T::c(2.0);
            }
            state.gamma = state.gamma.min(config.gamma_max).max(config.gamma_min);
        }
        state.x = x_trial;
        state.f = f_trial;
        state.g = g_trial.expect("finite gradient at accepted point");
    } else {
        diagnostics.rejected_steps += 1;
    }
    if accepted || config.update_on_reject {
        match pair {
            Some(pair) if state.factors.bfgs_update(&pair).is_ok() => {}
            _ => diagnostics.skipped_updates += 1,
        }
    }
    IterationEvent {
        k: state.k,
        f: state.f,
        rho,
        accepted,
        constrained,
        step_norm: snorm,
        delta: state.delta,
        radius,
        gamma: state.gamma,
        h_trace: state.factors.trace(),
    }
}

fn eval<T: Scalar, O: Objective<T>>(obj: &mut Counted<O>, x: &[T]) -> T {
    let f = obj.value(x);
    if f.is_finite() {
        f
    } else {
        T::infinity()
    }
}

/// Phase 1 followed by shift backtracking; returns the better step.
fn constrained_step<T: Scalar, O: Objective<T>>(
    obj: &mut Counted<O>,
    state: &IterationState<T>,
    config: &SolverConfig<T>,
    diagnostics: &mut Diagnostics<T>,
) -> Trial<T> {
    let n = state.x.len();
    let h = &state.factors;
    let phase1 = if config.use_exact(n) {
        exact_phase(state, config, diagnostics)
    } else {
        None
    };
    let (s_plus, sigma_plus) = match phase1 {
        Some(r) => r,
        None => shift_phase(state, config, diagnostics),
    };
    let f_plus = eval(obj, &add(&state.x, &s_plus));
    if !config.backtrack {
        return Trial { s: s_plus, f: f_plus, backtrack_exit: None };
    }
    match backtrack_shift(obj, &state.x, state.f, &h.t, &h.g, &state.g, sigma_plus, state.gamma, config.backtrack_max_iter, &config.cg) {
        Ok(bt) => {
            diagnostics.backtrack_exits.push(bt.exit_index);
            diagnostics.cg_iterations += bt.cg_iterations;
            if f_plus < bt.f_best {
                Trial { s: s_plus, f: f_plus, backtrack_exit: Some(bt.exit_index) }
            } else {
                Trial { s: bt.s_best, f: bt.f_best, backtrack_exit: Some(bt.exit_index) }
            }
        }
        Err(_) => Trial { s: s_plus, f: f_plus, backtrack_exit: None },
    }
}

fn exact_phase<T: Scalar>(state: &IterationState<T>, config: &SolverConfig<T>, diagnostics: &mut Diagnostics<T>) -> Option<(Vec<T>, T)> {
    let h = &state.factors;
    let direct = recover_direct_factors(&h.t, &h.g, usize::MAX).ok()?;
    let b = direct.assemble();
    let r = solve_ms(&b, &state.g, state.delta, config.exact_tol, config.exact_max_iter).ok()?;
    diagnostics.exact_iterations.push(r.iterations);
    all_finite(&r.s).then_some((r.s, r.sigma))
}

fn shift_phase<T: Scalar>(state: &IterationState<T>, config: &SolverConfig<T>, diagnostics: &mut Diagnostics<T>) -> (Vec<T>, T) {
    let h = &state.factors;
    let e = column_norms_sq(&h.t);
    let sigma0 = initial_shift(&h.g, &e);
    match solve_modified_shift(&h.t, &h.g, &e, &state.g, state.delta, sigma0, config.shift_tol, config.shift_max_iter) {
        Ok(r) => {
            diagnostics.phase1_iterations.push(r.iterations);
            (r.s_plus, r.sigma_plus)
        }
        Err(_) => {
            // Scaled steepest descent to the boundary.
            let gn = norm2(&state.g);
            (scaled(-state.delta / gn, &state.g), gn / state.delta)
        }
    }
}
