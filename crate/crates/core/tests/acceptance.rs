//! One line per acceptance criterion. Exits nonzero when a criterion's outcome
//! differs from the recorded expectation.

mod common;

use std::time::{Duration, Instant};

use fc_monodromy::classify::{classify, Delta0Case, FinitenessHint, Verdict, ASSUME_MON0_IRREDUCIBLE};
use fc_monodromy::matrix::basis_vector;
use fc_monodromy::numerics::{contour_prefactor, fc_contour, fc_series, gauss_2f1, FcParams, SeriesConfig, TorusQuadrature};
use fc_monodromy::special::{self, load_fixture, verify_change_of_basis};
use fc_monodromy::structure::{
    build_reducible_witness, conjugate_orbit_probe, enumerate_group, in_span, same_span, Enumeration, OrderProbe,
};
use fc_monodromy::{CycNum, ExactMatrix, IndexWord, MonodromySystem, ParameterSet};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const ISOMETRY_SETS: usize = 50;
const ISOMETRY_BUDGET: Duration = Duration::from_secs(60);
const BASIS_SETS: usize = 20;
const WITNESS_SETS: usize = 10;
const SERIES_VS_GAUSS_TOL: f64 = 1e-10;
const F4_PRODUCT_TOL: f64 = 1e-8;
const CONTOUR_TOL: f64 = 1e-7;
const PREFACTOR_TOL: f64 = 1e-12;
const NUMERICS_BUDGET: Duration = Duration::from_secs(30);

/// Criteria expected to be red, with the exact reason they are.
const KNOWN_RED: &[(usize, &str)] =
    &[(6, "n=3: tP H P equals -H' entrywise; every other fixture check passes")];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn params(a: &str, b: &str, c: &[&str]) -> ParameterSet {
    ParameterSet::parse(a, b, c).unwrap()
}

fn systems(sets: &[ParameterSet]) -> Vec<MonodromySystem> {
    sets.iter().map(|p| MonodromySystem::new(p).unwrap()).collect()
}

fn isometry_systems() -> Vec<MonodromySystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    systems(&common::isometry_sample(&mut rng, ISOMETRY_SETS))
}

fn criterion_1(sample: &[MonodromySystem], build_time: Duration) -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (idx, sys) in sample.iter().enumerate() {
        let h = sys.h().unwrap();
        let isometry = sys.generators.iter().all(|m| m.transpose().mul(h).mul(&m.involution()) == *h);
        let sign = CycNum::from_integer(1, if sys.n() % 2 == 0 { 1 } else { -1 });
        let transpose = h.transpose() == h.involution().scale(&sign);
        if !(isometry && transpose) {
            bad.push(idx);
        }
    }
    let elapsed = build_time + start.elapsed();
    outcome(
        bad.is_empty() && elapsed < ISOMETRY_BUDGET,
        format!("{} sets, failures at {:?}, {:.1} s", sample.len(), bad, elapsed.as_secs_f64()),
    )
}

/// The relations are stated for `n >= 2`; for `n = 1` the pair `M_0, M_1` is free.
fn criterion_2(sample: &[MonodromySystem]) -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut n1_braid_fails = 0;
    for (idx, sys) in sample.iter().enumerate() {
        let n = sys.n();
        let commute = (1..=n).all(|i| (1..=n).all(|j| sys.m(i).mul(sys.m(j)) == sys.m(j).mul(sys.m(i))));
        let braid = (1..=n).all(|k| {
            let x = sys.m0().mul(sys.m(k));
            let y = sys.m(k).mul(sys.m0());
            x.mul(&x) == y.mul(&y)
        });
        if n == 1 {
            n1_braid_fails += usize::from(!braid);
            continue;
        }
        checked += 1;
        if !(commute && braid) {
            bad.push(idx);
        }
    }
    outcome(
        bad.is_empty() && checked > 0,
        format!("{checked} sets with n >= 2, failures at {bad:?}; braid fails on {n1_braid_fails} n = 1 sets"),
    )
}

fn criterion_3(sample: &[MonodromySystem]) -> Outcome {
    let mut bad = Vec::new();
    for (idx, sys) in sample.iter().enumerate() {
        let size = sys.size();
        let cond = sys.conductor();
        let m0 = sys.m0();
        let e = ExactMatrix::identity(size, cond);
        let r = &sys.roots;
        let mut expected = r.gamma.iter().fold(CycNum::one(cond), |acc, g| acc * g.clone());
        expected = expected.div(&(&r.alpha * &r.beta)).unwrap();
        if sys.n() % 2 == 0 {
            expected = -expected;
        }
        let e_top = basis_vector(&IndexWord::ones(sys.n()), cond);
        let fixed: Vec<CycNum> = e_top.iter().map(|x| x * &sys.delta0).collect();
        let n0 = e.sub(m0);
        let kernel = n0.kernel_basis();
        let h_e = sys.h().unwrap().apply(&e_top);
        let form = ExactMatrix::from_rows(vec![h_e]).unwrap().kernel_basis();
        let ok = m0.sub(&e).rank() == 1
            && m0.det().unwrap() == sys.delta0
            && sys.delta0 == expected
            && m0.apply(&e_top) == fixed
            && kernel.len() == size - 1
            && form.len() == size - 1
            && same_span(&kernel, &form);
        if !ok {
            bad.push(idx);
        }
    }
    outcome(bad.is_empty(), format!("{} sets, failures at {:?}", sample.len(), bad))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let sets = common::irreducible_sample(&mut rng, BASIS_SETS);
    let mut bad = Vec::new();
    let mut oracle_disagreements = 0;
    for (idx, sys) in systems(&sets).iter().enumerate() {
        let columns: Vec<_> = IndexWord::all(sys.n()).map(|w| sys.f_vector(&w)).collect();
        let f = ExactMatrix::from_columns(&columns).unwrap();
        let nu_invertible = sys.nu_matrix().inverse().is_ok();
        if f.rank() != sys.size() || !nu_invertible {
            bad.push(idx);
        }
        if sys.n() <= 2 && !common::burnside_irreducible(sys) {
            oracle_disagreements += 1;
        }
    }
    outcome(
        bad.is_empty() && oracle_disagreements == 0,
        format!("{} sets, failures at {:?}, algebra-dimension oracle disagreements {}", sets.len(), bad, oracle_disagreements),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut sets = common::two_gamma_sample(&mut rng, WITNESS_SETS);
    sets.extend(common::gamma_ab_sample(&mut rng, WITNESS_SETS));
    let mut bad = Vec::new();
    let mut survived_perturbation = 0;
    for (idx, sys) in systems(&sets).iter().enumerate() {
        let w = build_reducible_witness(sys).unwrap();
        let transcript = w.verify(sys);
        if !transcript.iter().all(|l| l.passed) {
            bad.push(idx);
        }
        let half = w.w_plus.len();
        for plus in [true, false] {
            for i in 0..half {
                let space = if plus { &w.w_plus } else { &w.w_minus };
                let entry = (0..sys.size())
                    .find(|&j| !in_span(&basis_vector(&IndexWord::from_rank(j, sys.n()), sys.conductor()), space))
                    .expect("proper subspace");
                if w.perturbed(plus, i, entry, 1).reflections_preserve(sys) {
                    survived_perturbation += 1;
                }
            }
        }
    }
    outcome(
        bad.is_empty() && survived_perturbation == 0,
        format!("{} sets, failures at {:?}, perturbations left invariant {}", sets.len(), bad, survived_perturbation),
    )
}

fn criterion_6() -> Outcome {
    let mut failed = Vec::new();
    let mut spot = true;
    for n in [2, 3] {
        let model = load_fixture(n).unwrap();
        for line in verify_change_of_basis(&model).unwrap() {
            if !line.passed {
                failed.push(format!("n={n} [{}] {}", line.name, line.detail.unwrap_or_default()));
            }
        }
        spot &= model.m_prime.len() == n + 1 && model.p.rows() == 1 << n;
    }
    let m2 = load_fixture(2).unwrap();
    spot &= m2.h_prime == ExactMatrix::from_integers(&[&[0, 0, 0, 1], &[0, 0, -1, 0], &[0, -1, 0, 0], &[1, 0, 0, 0]]);
    spot &= m2.h_prime.transpose() == m2.h_prime;
    let m3 = load_fixture(3).unwrap();
    spot &= m3.h_prime.transpose() == m3.h_prime.scale(&CycNum::from_integer(1, -1));
    let detail = if failed.is_empty() { "all checks pass".to_string() } else { failed.join("; ") };
    outcome(spot && failed.is_empty(), detail)
}

fn criterion_6_is_exactly_the_sign(out: &Outcome) -> bool {
    out.detail == "n=3 [H' = tP H P] first mismatch at (1, 8): computed -1 vs fixture 1; tP H P = -H' entrywise"
}

fn criterion_7() -> Outcome {
    let model = load_fixture(2).unwrap();
    let mut names = Vec::new();
    if !special::segre_quadric_check(&model).unwrap() {
        names.push("segre".to_string());
    }
    for line in special::moebius_action_check(&model).unwrap() {
        if !line.passed {
            names.push(line.name);
        }
    }
    let (lines, _) = special::gamma2_generator_check(&model).unwrap();
    for line in lines {
        if !line.passed {
            names.push(line.name);
        }
    }
    outcome(names.is_empty(), format!("failures {:?}", names))
}

fn criterion_8() -> Outcome {
    let o = classify(&params("1/2", "1/2", &["1", "1"]), FinitenessHint::None);
    let sp = classify(&params("1/2", "1/2", &["1", "1", "1"]), FinitenessHint::None);
    let red = classify(&params("0", "1/2", &["1/3"]), FinitenessHint::None);
    let sl = classify(&params("1/3", "1/5", &["1/7"]), FinitenessHint::None);
    let checks = [
        ("definite_O", o.verdict == Verdict::DefiniteO && o.delta0 == CycNum::from_integer(1, -1)),
        ("definite_Sp", sp.verdict == Verdict::DefiniteSp && sp.delta0.is_one()),
        ("reducible", red.verdict == Verdict::Reducible),
        (
            "case I",
            sl.delta0_case == Delta0Case::I
                && sl.verdict == Verdict::SlContained
                && sl.assumptions_used.iter().any(|a| a == ASSUME_MON0_IRREDUCIBLE),
        ),
    ];
    let failed: Vec<_> = checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
    outcome(failed.is_empty(), format!("failures {:?}", failed))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = SeriesConfig::default();
    let re = |x: f64| Complex64::new(x, 0.0);
    let mut errors = Vec::new();

    let s = fc_series(&FcParams::new(0.5, 0.5, vec![1.0]), &[re(0.3)], &cfg).unwrap().value();
    let g = gauss_2f1(0.5, 0.5, 1.0, re(0.3), &cfg).unwrap().value();
    errors.push(("series vs 2F1", (s - g).norm(), SERIES_VS_GAUSS_TOL));

    let (a, c1, c2, x, y) = (0.5, 1.0, 1.0, 0.1, 0.15);
    let b = c1 + c2 - a - 1.0;
    let f4 = fc_series(&FcParams::new(a, b, vec![c1, c2]), &[re(x * (1.0 - y)), re(y * (1.0 - x))], &cfg).unwrap();
    let prod = gauss_2f1(a, b, c1, re(x), &cfg).unwrap().value() * gauss_2f1(a, b, c2, re(y), &cfg).unwrap().value();
    errors.push(("F4 product", (f4.value() - prod).norm(), F4_PRODUCT_TOL));

    let quad = TorusQuadrature { epsilon: 0.2, points_per_circle: 64 };
    for x in [vec![0.001], vec![0.003, 0.004]] {
        let p = FcParams::new(0.5, 0.5, vec![1.0; x.len()]);
        let c = fc_contour(&p, &x, &quad).unwrap().value();
        let xs: Vec<_> = x.iter().map(|&v| re(v)).collect();
        let s = fc_series(&p, &xs, &cfg).unwrap().value();
        errors.push(("series vs contour", (c - s).norm(), CONTOUR_TOL));
    }
    for n in 1..=3 {
        let p = FcParams::new(0.5, 0.5, vec![1.0; n]);
        let expected = Complex64::new(1.0, 0.0) / Complex64::new(0.0, 2.0 * std::f64::consts::PI).powi(n as i32);
        errors.push(("prefactor", (contour_prefactor(&p).unwrap() - expected).norm(), PREFACTOR_TOL));
    }
    let elapsed = start.elapsed();
    let failed: Vec<_> = errors.iter().filter(|(_, e, tol)| !(e < tol)).map(|(name, e, _)| format!("{name} {e:.1e}")).collect();
    let worst = errors.iter().map(|(_, e, _)| *e).fold(0.0, f64::max);
    outcome(
        failed.is_empty() && elapsed < NUMERICS_BUDGET,
        format!("largest error {worst:.1e}, failures {failed:?}, {:.2} s", elapsed.as_secs_f64()),
    )
}

fn criterion_10() -> Outcome {
    let sys = MonodromySystem::new(&params("1/3", "1/5", &["1/2", "1/3", "2/5"])).unwrap();
    let orders: Vec<_> = (1..=3).map(|k| conjugate_orbit_probe(&sys, k, 100).unwrap()).collect();
    let orders_ok = orders == [OrderProbe::FiniteOrder(2), OrderProbe::FiniteOrder(3), OrderProbe::FiniteOrder(5)];
    let unipotent = MonodromySystem::new(&params("1/3", "1/5", &["1", "1/7"])).unwrap();
    let unipotent_ok = conjugate_orbit_probe(&unipotent, 1, 50).unwrap() == OrderProbe::ExceedsBudget;
    let single = MonodromySystem::new(&params("1/5", "1/7", &["1/3"])).unwrap();
    let enumeration = enumerate_group(&[single.m(1).clone()], 100).unwrap();
    let enum_ok = enumeration == Enumeration::Finite { order: 3 };
    outcome(
        orders_ok && unipotent_ok && enum_ok,
        format!("orders {orders:?}, unipotent budget_exceeded {unipotent_ok}, enumeration {enumeration:?}"),
    )
}

fn main() {
    let build_start = Instant::now();
    let sample = isometry_systems();
    let build_time = build_start.elapsed();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "isometry identities", criterion_1(&sample, build_time)),
        (2, "commutation and braid relations", criterion_2(&sample)),
        (3, "reflection structure of M_0", criterion_3(&sample)),
        (4, "basis f_I and nu-map", criterion_4()),
        (5, "reducible witnesses", criterion_5()),
        (6, "integer model fixtures", criterion_6()),
        (7, "P^1 x P^1 identities", criterion_7()),
        (8, "classification examples", criterion_8()),
        (9, "numerics", criterion_9()),
        (10, "finiteness probes", criterion_10()),
    ];
    let mut unexpected = 0;
    for (id, name, out) in &results {
        let known = KNOWN_RED.iter().find(|(k, _)| k == id);
        let status = if out.passed { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name}: {}", out.detail);
        match (out.passed, known) {
            (true, None) => {}
            (false, Some((_, reason))) if *id == 6 && criterion_6_is_exactly_the_sign(out) => {
                println!("             known: {reason}");
            }
            _ => unexpected += 1,
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria differ from the recorded expectation");
        std::process::exit(1);
    }
}
