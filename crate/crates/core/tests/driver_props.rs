mod common;

use ldltr::{minimize, minimize_with, problems, FnObjective, IterationEvent, RadiusAction, SolverConfig, Status, SubproblemMode};
use proptest::prelude::*;

fn run(name: &str, n: usize, cfg: &SolverConfig<f64>) -> (ldltr::SolveReport<f64>, Vec<IterationEvent<f64>>) {
    let p = problems::find::<f64>(name, n).unwrap();
    let x0 = p.x0.clone();
    let mut events = Vec::new();
    let report = minimize_with(p, &x0, cfg, |e| events.push(*e)).unwrap();
    (report, events)
}

fn check_trace(cfg: &SolverConfig<f64>, events: &[IterationEvent<f64>]) {
    let mut f_prev = f64::INFINITY;
    let mut delta_prev = None;
    for e in events {
        assert!(e.f <= f_prev, "k = {}: f increased", e.k);
        f_prev = e.f;
        assert!(e.gamma >= cfg.gamma_min && e.gamma <= cfg.gamma_max);
        assert!(e.h_trace.is_finite() && e.h_trace > 0.0);
        if let Some(d) = delta_prev {
            let want: f64 = match e.radius {
                RadiusAction::Increase => cfg.c4 * d,
                RadiusAction::Hold => d,
                RadiusAction::Decrease => cfg.c7 * d,
            };
            assert!((e.delta - want).abs() <= 1e-12 * want, "k = {}", e.k);
        }
        // Radius rule as a function of ρ.
        if e.rho > cfg.c2 && e.step_norm > cfg.c3 * delta_prev.unwrap_or(f64::INFINITY) {
            assert_eq!(e.radius, RadiusAction::Increase);
        } else if e.rho >= cfg.c5 && e.rho <= cfg.c6 {
            assert_eq!(e.radius, RadiusAction::Hold);
        } else if e.rho < cfg.c5 {
            assert_eq!(e.radius, RadiusAction::Decrease);
        }
        delta_prev = Some(e.delta);
    }
}

#[test]
fn rosenbrock_converges() {
    let cfg = SolverConfig { eps: 1e-10, ..SolverConfig::default() };
    let (r, events) = run("ROSENBROCK", 2, &cfg);
    assert_eq!(r.status, Status::Converged);
    assert!(r.iterations <= 100, "{} iterations", r.iterations);
    assert!(r.final_f <= 1e-8);
    check_trace(&cfg, &events);
}

#[test]
fn traces_obey_update_rules() {
    let cfg = SolverConfig::default();
    for (name, n) in [("GENROSE", 50), ("WOODS", 200), ("TRIGON", 50), ("BROYDNTR", 200), ("ILLQUAD", 50)] {
        let (r, events) = run(name, n, &cfg);
        assert!(r.status.is_success(), "{name}: {:?}", r.status);
        check_trace(&cfg, &events);
    }
}

#[test]
fn shift_mode_on_small_problem() {
    let cfg = SolverConfig { subproblem: SubproblemMode::Shift, ..SolverConfig::default() };
    let (r, events) = run("EXTROSNB", 50, &cfg);
    assert!(r.status.is_success(), "{:?}", r.status);
    assert!(!r.diagnostics.phase1_iterations.is_empty());
    assert!(r.diagnostics.exact_iterations.is_empty());
    check_trace(&cfg, &events);
}

#[test]
fn exact_mode_on_small_problem() {
    let cfg = SolverConfig::exact_only();
    let (r, _) = run("DIXMAANA", 50, &cfg);
    assert!(r.status.is_success(), "{:?}", r.status);
    assert!(r.diagnostics.phase1_iterations.is_empty());
}

#[test]
fn one_dimensional_quadratic() {
    let obj = FnObjective::new(1, |x: &[f64]| 2.0 * (x[0] - 3.0).powi(2), |x: &[f64], g: &mut [f64]| g[0] = 4.0 * (x[0] - 3.0));
    let r = minimize(obj, &[10.0], &SolverConfig { eps: 1e-10, ..SolverConfig::default() }).unwrap();
    assert_eq!(r.status, Status::Converged);
    assert!((r.x[0] - 3.0).abs() <= 1e-9);
    assert!(r.iterations <= 3);
}

#[test]
fn single_precision_smoke() {
    let p = problems::find::<f32>("ROSENBROCK", 2).unwrap();
    let x0 = p.x0.clone();
    let cfg = SolverConfig::<f32> { eps: 1e-3, ..SolverConfig::default() };
    let r = minimize(p, &x0, &cfg).unwrap();
    assert!(r.status.is_success(), "{:?}", r.status);
    assert!(r.final_f < 1e-3);
}

#[test]
fn iteration_limit_reported() {
    let cfg = SolverConfig { k_max: 3, eps: 0.0, ..SolverConfig::default() };
    let (r, events) = run("GENROSE", 50, &cfg);
    assert_eq!(r.status, Status::IterationLimit);
    assert_eq!(r.iterations, 3);
    assert_eq!(events.len(), 2);
}

#[test]
fn dimension_mismatch_rejected() {
    let p = problems::find::<f64>("ROSENBROCK", 2).unwrap();
    assert!(minimize(p, &[1.0, 2.0, 3.0], &SolverConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn convex_quadratics_converge(seed in any::<u64>(), n in 2usize..=40) {
        use rand::Rng;
        let mut rng = common::rng(seed);
        let d: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(0.0..3.0))).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (d2, c2) = (d.clone(), c.clone());
        let obj = FnObjective::new(
            n,
            move |x: &[f64]| x.iter().zip(&d).zip(&c).map(|((x, d), c)| 0.5 * d * (x - c).powi(2)).sum(),
            move |x: &[f64], g: &mut [f64]| {
                for i in 0..x.len() {
                    g[i] = d2[i] * (x[i] - c2[i]);
                }
            },
        );
        let cfg = SolverConfig { subproblem: if seed % 2 == 0 { SubproblemMode::Shift } else { SubproblemMode::Auto }, ..SolverConfig::default() };
        let mut events = Vec::new();
        let r = minimize_with(obj, &vec![0.0; n], &cfg, |e| events.push(*e)).unwrap();
        prop_assert!(r.status.is_success(), "{:?}", r.status);
        prop_assert!(r.final_gnorm <= cfg.eps || r.status != Status::Converged);
        check_trace(&cfg, &events);
    }
}
