use std::f64::consts::PI;

use fc_monodromy::numerics::*;
use fc_monodromy::{CycNum, MonodromySystem, ParameterSet};
use num_complex::Complex64;
use proptest::prelude::*;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    while (a - b).abs() > 1e-16 * a {
        (a, b) = ((a + b) / 2.0, (a * b).sqrt());
    }
    a
}

#[test]
fn gauss_matches_agm() {
    // 2F1(1/2, 1/2; 1; k^2) = 1 / agm(1, sqrt(1 - k^2))
    let cfg = SeriesConfig::default();
    for x in [0.05, 0.3, 0.6] {
        let v = gauss_2f1(0.5, 0.5, 1.0, re(x), &cfg).unwrap();
        assert!((v.re - 1.0 / agm(1.0, (1.0 - x).sqrt())).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn one_variable_series_is_gauss() {
    let cfg = SeriesConfig::default();
    let p = FcParams::new(0.5, 0.5, vec![1.0]);
    let fc = fc_series(&p, &[re(0.3)], &cfg).unwrap();
    let exact = 1.0 / agm(1.0, 0.7f64.sqrt());
    assert!((fc.value() - re(exact)).norm() < 1e-10);
    let g = gauss_2f1(0.5, 0.5, 1.0, re(0.3), &cfg).unwrap();
    assert!((fc.value() - g.value()).norm() < 1e-10);
}

#[test]
fn appell_f4_product_formula() {
    let (a, c1, c2, x, y) = (0.5, 1.0, 1.0, 0.1, 0.15);
    let b = c1 + c2 - a - 1.0;
    let cfg = SeriesConfig::default();
    let lhs = fc_series(&FcParams::new(a, b, vec![c1, c2]), &[re(x * (1.0 - y)), re(y * (1.0 - x))], &cfg).unwrap();
    let rhs = gauss_2f1(a, b, c1, re(x), &cfg).unwrap().value() * gauss_2f1(a, b, c2, re(y), &cfg).unwrap().value();
    assert!((lhs.value() - rhs).norm() < 1e-8);
}

#[test]
fn contour_agrees_with_series() {
    let cfg = SeriesConfig::default();
    let q = TorusQuadrature { epsilon: 0.2, points_per_circle: 64 };
    let p1 = FcParams::new(0.5, 0.5, vec![1.0]);
    let a = fc_contour(&p1, &[0.001], &q).unwrap();
    let b = fc_series(&p1, &[re(0.001)], &cfg).unwrap();
    assert!((a.value() - b.value()).norm() < 1e-8);

    let p2 = FcParams::new(0.5, 0.5, vec![1.0, 1.0]);
    let a = fc_contour(&p2, &[0.003, 0.004], &q).unwrap();
    let b = fc_series(&p2, &[re(0.003), re(0.004)], &cfg).unwrap();
    assert!((a.value() - b.value()).norm() < 1e-7);
}

#[test]
fn contour_with_larger_c() {
    let cfg = SeriesConfig::default();
    let q = TorusQuadrature { epsilon: 0.2, points_per_circle: 64 };
    let p = FcParams::new(0.3, 0.7, vec![2.0, 1.0]);
    let a = fc_contour(&p, &[0.002, 0.005], &q).unwrap();
    let b = fc_series(&p, &[re(0.002), re(0.005)], &cfg).unwrap();
    assert!((a.value() - b.value()).norm() < 1e-8);
}

#[test]
fn quadrature_converges() {
    for (p, x) in [
        (FcParams::new(0.5, 0.5, vec![1.0]), vec![0.001]),
        (FcParams::new(0.5, 0.5, vec![1.0, 1.0]), vec![0.003, 0.004]),
    ] {
        for m in [32, 64] {
            let q1 = TorusQuadrature { epsilon: 0.2, points_per_circle: m };
            let q2 = TorusQuadrature { epsilon: 0.2, points_per_circle: 2 * m };
            let d = (fc_contour(&p, &x, &q1).unwrap().value() - fc_contour(&p, &x, &q2).unwrap().value()).norm();
            assert!(d < 1e-10, "m = {m}: {d}");
        }
    }
}

#[test]
fn residue_extraction() {
    // t^-2 (1 + 2t + 3t^2 + 4t^3) around the circle picks 2 * 2 pi i
    let v = torus_trapezoid(1, 0.5, 16, |t| {
        let z = t[0];
        (re(1.0) + z * 2.0 + z * z * 3.0 + z * z * z * 4.0) / (z * z)
    });
    assert!((v - Complex64::new(0.0, 4.0 * PI)).norm() < 1e-12);
}

#[test]
fn embedded_isometry() {
    for (a, b, c) in [("1/3", "1/5", vec!["1/7"]), ("1/3", "1/5", vec!["1/7", "1/11"]), ("2/5", "1/4", vec!["1/3", "3/4", "1/6"])] {
        let sys = MonodromySystem::new(&ParameterSet::parse(a, b, &c).unwrap()).unwrap();
        assert!(float_isometry_residual(&sys).unwrap() < 1e-10);
    }
}

proptest! {
    #[test]
    fn embedding_is_additive_and_multiplicative(
        xs in proptest::collection::vec(-20i64..20, 4),
        ys in proptest::collection::vec(-20i64..20, 4),
    ) {
        let build = |v: &[i64]| v.iter().enumerate().fold(CycNum::zero(5), |acc, (j, &k)| {
            acc + CycNum::root_of_unity(5, j as i64) * CycNum::from_integer(5, k)
        });
        let (x, y) = (build(&xs), build(&ys));
        let sum = numeric_embed(&(x.clone() + y.clone()));
        prop_assert!((sum - numeric_embed(&x) - numeric_embed(&y)).norm() < 1e-12);
        let prod = numeric_embed(&(x.clone() * y.clone()));
        prop_assert!((prod - numeric_embed(&x) * numeric_embed(&y)).norm() < 1e-9);
    }

    #[test]
    fn reflection_formula(z in 0.01f64..0.99) {
        let lhs = gamma_value(z).unwrap() * gamma_value(1.0 - z).unwrap();
        prop_assert!((lhs * (PI * z).sin() / PI - 1.0).abs() < 1e-12);
    }
}
