mod common;

use common::*;
use ldltr::{bfgs_coefficients, bfgs_factor_update, CurvaturePair, DiagonalFactor, InverseFactors, TriangularFactor};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

/// Random SPD inverse factors and a pair with `yᵀs > 0`.
fn instance(rng: &mut impl Rng, n: usize) -> (InverseFactors<f64>, CurvaturePair<f64>) {
    let t = random_lower(rng, n, true);
    let g = random_positive(rng, n, 0.2, 5.0);
    let s = random_vec(rng, n, 1.0);
    let mut y = random_vec(rng, n, 1.0);
    let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
    let ss: f64 = s.iter().map(|a| a * a).sum();
    if sy <= 0.1 * ss {
        let shift = 0.1 - sy / ss + rng.gen_range(0.0..1.0);
        for i in 0..n {
            y[i] += shift * s[i];
        }
    }
    (InverseFactors { t, g }, CurvaturePair::new(s, y))
}

#[test]
fn coefficients_reproduce_dense_correction() {
    let mut rng = rng(21);
    for _ in 0..20 {
        let (h, pair) = instance(&mut rng, 5);
        let hd = h.assemble();
        let hy = h.apply(&pair.y);
        let c = bfgs_coefficients(&pair, &hy).unwrap();
        let a1 = vec_na(&c.a1);
        let a2 = vec_na(&c.a2);
        let correction = &a1 * a1.transpose() * c.alpha1 + &a2 * a2.transpose() * c.alpha2;
        let h_na = to_na(&hd);
        let want = dense_bfgs(&h_na, &pair.s, &pair.y) - &h_na;
        assert!(rel_fro(&correction, &want) <= 1e-11);
    }
}

#[test]
fn fixed_point_identity() {
    let s = vec![0.3, -1.0, 2.0, 0.5];
    let pair = CurvaturePair::new(s.clone(), s);
    let (t, g) = bfgs_factor_update(&TriangularFactor::identity(4), &DiagonalFactor::constant(4, 1.0), &pair).unwrap();
    let h = assemble_h(&t, &g);
    assert!((h - DMatrix::identity(4, 4)).amax() <= 1e-12);
}

#[test]
fn negative_curvature_leaves_factors() {
    let t = TriangularFactor::identity(2);
    let g = DiagonalFactor::constant(2, 1.0);
    let pair = CurvaturePair::new(vec![1.0, 0.0], vec![-1.0, 0.0]);
    assert_eq!(pair.sy, -1.0);
    assert!(bfgs_factor_update(&t, &g, &pair).is_err());
    let mut h = InverseFactors { t: t.clone(), g: g.clone() };
    assert!(h.bfgs_update(&pair).is_err());
    assert_eq!(h, InverseFactors { t, g });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factored_update_matches_dense(seed in any::<u64>(), n in 1usize..=30) {
        let mut rng = rng(seed);
        let (mut h, pair) = instance(&mut rng, n);
        let before = to_na(&h.assemble());
        h.bfgs_update(&pair).unwrap();
        let after = to_na(&h.assemble());
        prop_assert!(rel_fro(&after, &dense_bfgs(&before, &pair.s, &pair.y)) <= 1e-9);
        let hy = h.apply(&pair.y);
        prop_assert!(rel_vec(&hy, &pair.s) <= 1e-9);
        prop_assert!(h.g.values().iter().all(|&v| v > 0.0));
        prop_assert!(after.clone().cholesky().is_some());
    }
}
