use ldltr::linesearch::satisfies_strong_wolfe;
use ldltr::{bfgsr_minimize, problems, strong_wolfe_search, BfgsrConfig, FnObjective, Objective, Status, WolfeParams};
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn exact_on_quadratic_line() {
    let mut obj = FnObjective::new(1, |x: &[f64]| (x[0] - 2.0).powi(2), |x: &[f64], g: &mut [f64]| g[0] = 2.0 * (x[0] - 2.0));
    let params = WolfeParams { c_curv: 0.1, ..WolfeParams::default() };
    let r = strong_wolfe_search(&mut obj, &[0.0], &[1.0], 4.0, -4.0, &params).unwrap();
    assert!(r.wolfe);
    assert!((r.x[0] - 2.0).abs() <= 0.2 * 2.0);
}

#[test]
fn ascent_direction_rejected() {
    let mut obj = FnObjective::new(1, |x: &[f64]| x[0] * x[0], |x: &[f64], g: &mut [f64]| g[0] = 2.0 * x[0]);
    assert!(strong_wolfe_search(&mut obj, &[1.0], &[1.0], 1.0, 2.0, &WolfeParams::default()).is_err());
}

#[test]
fn bfgsr_rosenbrock() {
    let p = problems::find::<f64>("ROSENBROCK", 2).unwrap();
    let x0 = p.x0.clone();
    let r = bfgsr_minimize(p, &x0, &BfgsrConfig { eps: 1e-8, ..BfgsrConfig::default() });
    assert_eq!(r.status, Status::Converged);
    assert!(r.iterations <= 150, "{}", r.iterations);
    assert!(r.final_f <= 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rosenbrock_steps_satisfy_wolfe(x0 in -2.0f64..2.0, x1 in -1.0f64..3.0, angle in 0.0f64..1.5) {
        let mut p = problems::find::<f64>("ROSENBROCK", 2).unwrap();
        let x = [x0, x1];
        let f0 = p.value(&x);
        let mut g = [0.0; 2];
        p.gradient(&x, &mut g);
        prop_assume!(dot(&g, &g).sqrt() > 1e-6);
        // Rotate −g by less than π/2.
        let (c, s) = (angle.cos(), angle.sin());
        let dir = [-(c * g[0] - s * g[1]), -(s * g[0] + c * g[1])];
        let dg0 = dot(&g, &dir);
        prop_assume!(dg0 < -1e-8);
        let params = WolfeParams::default();
        let r = strong_wolfe_search(&mut p, &x, &dir, f0, dg0, &params).unwrap();
        prop_assert!(r.f <= f0);
        if r.wolfe {
            let dg = dot(&r.grad, &dir);
            prop_assert!(satisfies_strong_wolfe(f0, dg0, r.alpha, r.f, dg, &params));
        }
        prop_assert!(r.wolfe || r.trials == params.max_trials || r.decrease);
    }
}
