#![allow(dead_code)]

use fc_monodromy::field::unit_roots;
use fc_monodromy::structure::{check_irr, TriState};
use fc_monodromy::{ExactMatrix, MonodromySystem, ParameterSet};
use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const MAX_DEN: i64 = 12;

pub fn random_rational(rng: &mut ChaCha8Rng, max_den: i64) -> BigRational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-den..2 * den);
    BigRational::new(num.into(), den.into())
}

pub fn half(k: i64) -> BigRational {
    BigRational::new(k.into(), 2.into())
}

pub fn random_params(rng: &mut ChaCha8Rng, n: usize) -> ParameterSet {
    let a = random_rational(rng, MAX_DEN);
    let b = random_rational(rng, MAX_DEN);
    let c = (0..n).map(|_| random_rational(rng, MAX_DEN)).collect();
    ParameterSet::new(a, b, c).unwrap()
}

/// `alpha != prod gamma_k` and `beta != 1`.
pub fn h_defined(p: &ParameterSet) -> bool {
    let r = unit_roots(p);
    !r.beta.is_one() && r.alpha != r.gamma_product((1 << p.n()) - 1)
}

/// Random sets with `n` uniform in `1..=3` for which `H` exists.
pub fn isometry_sample(rng: &mut ChaCha8Rng, count: usize) -> Vec<ParameterSet> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=3);
        let p = random_params(rng, n);
        if h_defined(&p) {
            out.push(p);
        }
    }
    out
}

pub fn irreducible_sample(rng: &mut ChaCha8Rng, count: usize) -> Vec<ParameterSet> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=3);
        let p = random_params(rng, n);
        if check_irr(&p).mon_irreducible == TriState::Holds {
            out.push(p);
        }
    }
    out
}

fn random_half_odd(rng: &mut ChaCha8Rng) -> BigRational {
    half(2 * rng.gen_range(-1i64..=1) + 1)
}

fn random_c_avoiding_half(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let c = random_rational(rng, MAX_DEN);
        if (&c - half(1)).fract() != BigRational::from_integer(0.into()) {
            return c;
        }
    }
}

/// Two of the `c_k` are half odd integers.
pub fn two_gamma_sample(rng: &mut ChaCha8Rng, count: usize) -> Vec<ParameterSet> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=3);
            let p = rng.gen_range(0..n);
            let mut q = rng.gen_range(0..n - 1);
            if q >= p {
                q += 1;
            }
            let c = (0..n)
                .map(|k| if k == p || k == q { random_half_odd(rng) } else { random_c_avoiding_half(rng) })
                .collect();
            ParameterSet::new(random_rational(rng, MAX_DEN), random_rational(rng, MAX_DEN), c).unwrap()
        })
        .collect()
}

/// One `c_k` a half odd integer and `b = a + 1/2`.
pub fn gamma_ab_sample(rng: &mut ChaCha8Rng, count: usize) -> Vec<ParameterSet> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3);
            let p = rng.gen_range(0..n);
            let c = (0..n).map(|k| if k == p { random_half_odd(rng) } else { random_c_avoiding_half(rng) }).collect();
            let a = random_rational(rng, MAX_DEN);
            let b = &a + half(2 * rng.gen_range(-1i64..=1) + 1);
            ParameterSet::new(a, b, c).unwrap()
        })
        .collect()
}

/// Dimension of the algebra spanned by all products of `generators`.
pub fn algebra_dimension(generators: &[ExactMatrix]) -> usize {
    let size = generators[0].rows();
    let conductor = generators.iter().map(ExactMatrix::conductor).fold(1, num_integer::lcm);
    let flatten = |m: &ExactMatrix| -> Vec<fc_monodromy::CycNum> {
        m.entries().iter().map(|x| x.lift(conductor)).collect()
    };
    let mut basis: Vec<ExactMatrix> = vec![ExactMatrix::identity(size, conductor)];
    let mut rows = vec![flatten(&basis[0])];
    let mut frontier = basis.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in generators {
                let y = x.mul(g);
                let mut candidate = rows.clone();
                candidate.push(flatten(&y));
                if ExactMatrix::from_rows(candidate.clone()).unwrap().rank() > rows.len() {
                    rows = candidate;
                    basis.push(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    rows.len()
}

/// Irreducible if and only if the generated algebra is the full matrix algebra.
pub fn burnside_irreducible(sys: &MonodromySystem) -> bool {
    let s = sys.size();
    algebra_dimension(&sys.generators) == s * s
}
