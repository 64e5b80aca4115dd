mod common;

use common::*;
use ldltr::{backtrack_shift, CgSettings, FnObjective};
use proptest::prelude::*;
use rand::Rng;

fn quadratic(center: Vec<f64>) -> impl ldltr::Objective<f64> {
    let c2 = center.clone();
    FnObjective::new(
        center.len(),
        move |x: &[f64]| x.iter().zip(&center).map(|(x, c)| (x - c).powi(2)).sum::<f64>(),
        move |x: &[f64], g: &mut [f64]| {
            for i in 0..x.len() {
                g[i] = 2.0 * (x[i] - c2[i]);
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn keeps_best_trial(seed in any::<u64>(), n in 2usize..=12, i_max in 1usize..=6) {
        let mut rng = rng(seed);
        let t = random_lower(&mut rng, n, true);
        let gd = random_positive(&mut rng, n, 0.2, 3.0);
        let x = random_vec(&mut rng, n, 1.0);
        let center = random_vec(&mut rng, n, 2.0);
        let mut obj = quadratic(center.clone());
        let f_x = ldltr::Objective::value(&mut obj, &x);
        let mut g = vec![0.0; n];
        ldltr::Objective::gradient(&mut obj, &x, &mut g);
        let sigma0 = rng.gen_range(0.1..100.0);
        let gamma = rng.gen_range(0.01..0.9);
        let r = backtrack_shift(&mut obj, &x, f_x, &t, &gd, &g, sigma0, gamma, i_max, &CgSettings::default()).unwrap();

        prop_assert!(r.exit_index >= 1 && r.exit_index <= i_max);
        prop_assert_eq!(r.trial_values.len(), r.exit_index);
        prop_assert_eq!(r.function_evals, r.exit_index);
        for (i, &s) in r.trial_shifts.iter().enumerate() {
            prop_assert!((s - sigma0 * gamma.powi(i as i32)).abs() <= 1e-12 * sigma0);
        }
        let min = r.trial_values.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.f_best, min);
        // Every trial before the exit improved on its predecessor.
        let mut reference = f_x;
        for &v in &r.trial_values[..r.exit_index - 1] {
            prop_assert!(v < reference);
            reference = v;
        }
        let f_check = ldltr::Objective::value(&mut obj, &x.iter().zip(&r.s_best).map(|(a, b)| a + b).collect::<Vec<_>>());
        prop_assert!((f_check - r.f_best).abs() <= 1e-12 * f_check.abs().max(1.0));
        if let Some(li) = r.literal_exit_index {
            prop_assert!(r.trial_values[li - 1] >= f_x);
        }
    }
}

#[test]
fn invalid_arguments_rejected() {
    let t = ldltr::TriangularFactor::identity(2);
    let gd = ldltr::DiagonalFactor::constant(2, 1.0);
    let mut obj = quadratic(vec![0.0, 0.0]);
    let x = [1.0, 1.0];
    let g = [2.0, 2.0];
    let cg = CgSettings::default();
    assert!(backtrack_shift(&mut obj, &x, 2.0, &t, &gd, &g, -1.0, 0.5, 3, &cg).is_err());
    assert!(backtrack_shift(&mut obj, &x, 2.0, &t, &gd, &g, 1.0, 1.0, 3, &cg).is_err());
    assert!(backtrack_shift(&mut obj, &x, 2.0, &t, &gd, &g, 1.0, 0.5, 0, &cg).is_err());
}

#[test]
fn zero_shift_stops_after_one_trial() {
    let t = ldltr::TriangularFactor::identity(2);
    let gd = ldltr::DiagonalFactor::constant(2, 0.5);
    let mut obj = quadratic(vec![0.0, 0.0]);
    let r = backtrack_shift(&mut obj, &[1.0, -1.0], 2.0, &t, &gd, &[2.0, -2.0], 0.0, 0.5, 3, &CgSettings::default()).unwrap();
    assert_eq!(r.exit_index, 1);
    assert!(r.f_best <= 1e-20);
}
