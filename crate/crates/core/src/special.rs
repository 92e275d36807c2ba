//! Integer models of the monodromy for `a = b = 1/2`, `c = (1, ..., 1)` with
//! `n = 2, 3`, and the projective `P^1 x P^1` picture for `n = 2`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{CycNum, ParameterSet};
use crate::matrix::ExactMatrix;
use crate::monodromy::MonodromySystem;
use crate::structure::CheckLine;

const MODEL_N2: &str = include_str!("../fixtures/model_n2.json");
const MODEL_N3: &str = include_str!("../fixtures/model_n3.json");

/// Change of basis `P`, intersection matrix `H' = tP H P` and generators `M'_k = P^{-1} M_k P`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct IntegerModel {
    pub n: usize,
    #[serde(rename = "P")]
    pub p: ExactMatrix,
    #[serde(rename = "H_prime")]
    pub h_prime: ExactMatrix,
    #[serde(rename = "M_prime")]
    pub m_prime: Vec<ExactMatrix>,
}

pub fn load_fixture(n: usize) -> Result<IntegerModel> {
    let text = match n {
        2 => MODEL_N2,
        3 => MODEL_N3,
        _ => return Err(Error::UnsupportedModel(n)),
    };
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// The system the models are built from.
pub fn base_params(n: usize) -> ParameterSet {
    ParameterSet::parse("1/2", "1/2", &vec!["1"; n]).expect("valid literals")
}

fn compare(name: &str, actual: &ExactMatrix, expected: &ExactMatrix) -> CheckLine {
    let detail = if actual.rows() != expected.rows() || actual.cols() != expected.cols() {
        Some(format!("shape {}x{} vs {}x{}", actual.rows(), actual.cols(), expected.rows(), expected.cols()))
    } else {
        actual.first_difference(expected).map(|(i, j)| {
            format!("first mismatch at ({}, {}): computed {} vs fixture {}", i + 1, j + 1, actual.get(i, j), expected.get(i, j))
        })
    };
    CheckLine::with_detail(name, detail.is_none(), detail)
}

fn is_integral(m: &ExactMatrix) -> bool {
    m.entries().iter().all(|x| x.as_integer().is_some())
}

/// Exact comparison of the fixture against the matrices computed from the base system.
pub fn verify_change_of_basis(model: &IntegerModel) -> Result<Vec<CheckLine>> {
    if model.m_prime.len() != model.n + 1 {
        return Err(Error::DimensionMismatch(format!("{} generators for n = {}", model.m_prime.len(), model.n)));
    }
    let sys = MonodromySystem::new(&base_params(model.n))?;
    let h = sys.h()?;
    let p = &model.p;
    let p_inv = p.inverse()?;
    let h_computed = p.transpose().mul(h).mul(p);
    let mut h_line = compare("H' = tP H P", &h_computed, &model.h_prime);
    if !h_line.passed && h_computed == model.h_prime.scale(&CycNum::from_integer(1, -1)) {
        h_line.detail = h_line.detail.map(|d| format!("{d}; tP H P = -H' entrywise"));
    }
    let mut lines = vec![h_line];
    for (k, mk) in model.m_prime.iter().enumerate() {
        lines.push(compare(&format!("M'_{k} = P^-1 M_{k} P"), &p_inv.mul(sys.m(k)).mul(p), mk));
    }
    lines.push(CheckLine::new("H' integral", is_integral(&model.h_prime)));
    for (k, mk) in model.m_prime.iter().enumerate() {
        lines.push(CheckLine::new(format!("M'_{k} integral"), is_integral(mk)));
        lines.push(compare(&format!("tM'_{k} H' M'_{k} = H'"), &mk.transpose().mul(&model.h_prime).mul(mk), &model.h_prime));
    }
    let sign = CycNum::from_integer(1, if model.n % 2 == 1 { -1 } else { 1 });
    lines.push(compare("tH' = (-1)^n H'", &model.h_prime.transpose(), &model.h_prime.scale(&sign)));
    Ok(lines)
}

/// Polynomial in several variables with rational coefficients, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Poly {
    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::default();
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Poly::default();
        p.add_term(e, BigRational::one());
        p
    }

    fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut out = Poly::default();
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let vars: String = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &d)| d > 0)
                    .map(|(k, &d)| if d == 1 { format!("x{k}") } else { format!("x{k}^{d}") })
                    .collect::<Vec<_>>()
                    .join("*");
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("({c})*{vars}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn rational(x: &CycNum) -> Result<BigRational> {
    x.as_rational().ok_or_else(|| Error::Precondition("expected a rational matrix".into()))
}

/// `m H tm` for the Segre monomials `m = (s0 t0, s0 t1, s1 t0, s1 t1)`; variables `s0, s1, t0, t1`.
pub fn segre_quadric(h: &ExactMatrix) -> Result<Poly> {
    if h.rows() != 4 || h.cols() != 4 {
        return Err(Error::DimensionMismatch("the Segre quadric needs a 4x4 form".into()));
    }
    let v = |k| Poly::var(4, k);
    let (s0, s1, t0, t1) = (v(0), v(1), v(2), v(3));
    let m = [s0.mul(&t0), s0.mul(&t1), s1.mul(&t0), s1.mul(&t1)];
    let mut q = Poly::default();
    for i in 0..4 {
        for j in 0..4 {
            let c = rational(h.get(i, j))?;
            if !c.is_zero() {
                q = q.add(&m[i].mul(&m[j]).scale(&c));
            }
        }
    }
    Ok(q)
}

pub fn segre_quadric_check(model: &IntegerModel) -> Result<bool> {
    Ok(segre_quadric(&model.h_prime)?.is_zero())
}

/// A fractional linear map `z -> (a z + b) / (c z + d)` with rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moebius(pub [BigRational; 4]);

impl Moebius {
    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Self {
        let q = |x: i64| BigRational::from_integer(x.into());
        Moebius([q(a), q(b), q(c), q(d)])
    }

    pub fn identity() -> Self {
        Self::from_integers(1, 0, 0, 1)
    }

    pub fn compose(&self, other: &Moebius) -> Moebius {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &other.0;
        Moebius([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn inverse(&self) -> Moebius {
        let [a, b, c, d] = &self.0;
        Moebius([d.clone(), -b, -c, a.clone()])
    }

    pub fn det(&self) -> BigRational {
        let [a, b, c, d] = &self.0;
        a * d - b * c
    }

    /// Equality up to a nonzero scalar.
    pub fn projectively_eq(&self, other: &Moebius) -> bool {
        let (x, y) = (&self.0, &other.0);
        (0..4).all(|i| (0..4).all(|j| &x[i] * &y[j] == &x[j] * &y[i]))
            && x.iter().any(|v| !v.is_zero())
            && y.iter().any(|v| !v.is_zero())
    }

    /// Entries scaled to coprime integers with a positive first nonzero entry.
    pub fn normalized(&self) -> [BigInt; 4] {
        let den = self.0.iter().fold(BigInt::one(), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let ints: Vec<BigInt> = self.0.iter().map(|q| (q * BigRational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
        let lead_negative = ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
        let scale = if lead_negative { -g } else { g };
        let out: Vec<BigInt> = ints.iter().map(|x| if scale.is_zero() { x.clone() } else { x / &scale }).collect();
        [out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()]
    }

    fn numerator(&self, z: &Poly, nvars: usize) -> Poly {
        z.scale(&self.0[0]).add(&Poly::constant(nvars, self.0[1].clone()))
    }

    fn denominator(&self, z: &Poly, nvars: usize) -> Poly {
        z.scale(&self.0[2]).add(&Poly::constant(nvars, self.0[3].clone()))
    }
}

impl fmt::Display for Moebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.normalized();
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// Action on `P^1 x P^1` in affine coordinates `s = s1/s0`, `t = t1/t0`.
/// Without swap the image is `(s_map(s), t_map(t))`; with swap it is `(s_map(t), t_map(s))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoebiusPair {
    pub swap: bool,
    pub s_map: Moebius,
    pub t_map: Moebius,
}

impl MoebiusPair {
    pub fn projectively_eq(&self, other: &MoebiusPair) -> bool {
        self.swap == other.swap && self.s_map.projectively_eq(&other.s_map) && self.t_map.projectively_eq(&other.t_map)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &MoebiusPair) -> MoebiusPair {
        // other: (s, t) -> (S, T); self then reads S or T according to its swap flag.
        let (s_inner, t_inner) = if self.swap {
            (&other.t_map, &other.s_map)
        } else {
            (&other.s_map, &other.t_map)
        };
        MoebiusPair {
            swap: self.swap != other.swap,
            s_map: self.s_map.compose(s_inner),
            t_map: self.t_map.compose(t_inner),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"swap": self.swap, "s_map": self.s_map.to_string(), "t_map": self.t_map.to_string()})
    }
}

/// The row vector `(1, t, s, st) M^{-1}` as polynomials in `s` (var 0) and `t` (var 1);
/// `None` for a singular matrix.
fn segre_image(m: &ExactMatrix) -> Result<Option<Vec<Poly>>> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch("the P^1 x P^1 action needs a 4x4 matrix".into()));
    }
    let Ok(inv) = m.inverse() else { return Ok(None) };
    let (s, t) = (Poly::var(2, 0), Poly::var(2, 1));
    let x = [Poly::constant(2, BigRational::one()), t.clone(), s.clone(), s.mul(&t)];
    (0..4)
        .map(|j| {
            let mut y = Poly::default();
            for (i, xi) in x.iter().enumerate() {
                y = y.add(&xi.scale(&rational(inv.get(i, j))?));
            }
            Ok(y)
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Whether the matrix sends the Segre point of `(s, t)` to a multiple of the Segre point of `pair(s, t)`,
/// as an identity of polynomials after clearing denominators.
pub fn moebius_identity_holds(m: &ExactMatrix, pair: &MoebiusPair) -> Result<bool> {
    let Some(y) = segre_image(m)? else { return Ok(false) };
    let (s, t) = (Poly::var(2, 0), Poly::var(2, 1));
    let (s_arg, t_arg) = if pair.swap { (&t, &s) } else { (&s, &t) };
    let (sn, sd) = (pair.s_map.numerator(s_arg, 2), pair.s_map.denominator(s_arg, 2));
    let (tn, td) = (pair.t_map.numerator(t_arg, 2), pair.t_map.denominator(t_arg, 2));
    let target = [sd.mul(&td), sd.mul(&tn), sn.mul(&td), sn.mul(&tn)];
    if y.iter().all(Poly::is_zero) || target.iter().all(Poly::is_zero) {
        return Ok(false);
    }
    // y and target proportional: y_i target_j = y_j target_i
    Ok((0..4).all(|i| (0..4).all(|j| y[i].mul(&target[j]).sub(&y[j].mul(&target[i])).is_zero())))
}

/// Coefficients of a polynomial of bidegree at most (1, 1) as `c[s-degree][t-degree]`.
fn bilinear_coeffs(p: &Poly) -> Option<[[BigRational; 2]; 2]> {
    let mut c: [[BigRational; 2]; 2] = Default::default();
    for (e, x) in &p.terms {
        if e[0] > 1 || e[1] > 1 {
            return None;
        }
        c[e[0] as usize][e[1] as usize] = x.clone();
    }
    Some(c)
}

fn factor_product(c: &[[[BigRational; 2]; 2]; 4]) -> Option<(Moebius, Moebius)> {
    let (a0, b0) = (0..2).flat_map(|a| (0..2).map(move |b| (a, b))).find(|&(a, b)| !c[0][a][b].is_zero())?;
    let pivot = c[0][a0][b0].clone();
    // y0 = u (x) w, y1 = u (x) w', y2 = u' (x) w, y3 = u' (x) w'
    let u: Vec<BigRational> = (0..2).map(|a| c[0][a][b0].clone()).collect();
    let w: Vec<BigRational> = (0..2).map(|b| &c[0][a0][b] / &pivot).collect();
    let w2: Vec<BigRational> = (0..2).map(|b| &c[1][a0][b] / &u[a0]).collect();
    let u2: Vec<BigRational> = (0..2).map(|a| &c[2][a][b0] / &w[b0]).collect();
    let pairs = [(&u, &w), (&u, &w2), (&u2, &w), (&u2, &w2)];
    for (k, (x, y)) in pairs.iter().enumerate() {
        for a in 0..2 {
            for b in 0..2 {
                if c[k][a][b] != &x[a] * &y[b] {
                    return None;
                }
            }
        }
    }
    // numerator a z + b has coefficients (b, a) in degree order; denominator likewise (d, c)
    let s_map = Moebius([u2[1].clone(), u2[0].clone(), u[1].clone(), u[0].clone()]);
    let t_map = Moebius([w2[1].clone(), w2[0].clone(), w[1].clone(), w[0].clone()]);
    if s_map.det().is_zero() || t_map.det().is_zero() {
        return None;
    }
    Some((s_map, t_map))
}

/// The induced action on `P^1 x P^1`, if the matrix preserves the product structure.
pub fn extract_moebius(m: &ExactMatrix) -> Result<Option<MoebiusPair>> {
    let Some(y) = segre_image(m)? else { return Ok(None) };
    let Some(c) = y.iter().map(bilinear_coeffs).collect::<Option<Vec<_>>>() else { return Ok(None) };
    let c: [[[BigRational; 2]; 2]; 4] = [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()];
    if let Some((s_map, t_map)) = factor_product(&c) {
        return Ok(Some(MoebiusPair { swap: false, s_map, t_map }));
    }
    let transpose = |x: &[[BigRational; 2]; 2]| -> [[BigRational; 2]; 2] {
        [[x[0][0].clone(), x[1][0].clone()], [x[0][1].clone(), x[1][1].clone()]]
    };
    let ct = [transpose(&c[0]), transpose(&c[1]), transpose(&c[2]), transpose(&c[3])];
    Ok(factor_product(&ct).map(|(s_map, t_map)| MoebiusPair { swap: true, s_map, t_map }))
}

/// The stated actions of `M'_0, M'_1, M'_2`.
pub fn expected_actions() -> [MoebiusPair; 3] {
    [
        MoebiusPair { swap: true, s_map: Moebius::from_integers(0, -1, 1, 0), t_map: Moebius::from_integers(0, -1, 1, 0) },
        MoebiusPair { swap: false, s_map: Moebius::identity(), t_map: Moebius::from_integers(1, 2, 0, 1) },
        MoebiusPair { swap: false, s_map: Moebius::from_integers(1, 2, 0, 1), t_map: Moebius::identity() },
    ]
}

fn require_n2(model: &IntegerModel) -> Result<()> {
    if model.n != 2 {
        return Err(Error::UnsupportedModel(model.n));
    }
    Ok(())
}

pub fn moebius_action_check(model: &IntegerModel) -> Result<Vec<CheckLine>> {
    require_n2(model)?;
    let names = ["M'_0 (s,t) = (-1/t, -1/s)", "M'_1 (s,t) = (s, t+2)", "M'_2 (s,t) = (s+2, t)"];
    expected_actions()
        .iter()
        .zip(names)
        .enumerate()
        .map(|(k, (pair, name))| {
            let ok = moebius_identity_holds(&model.m_prime[k], pair)?;
            let detail = (!ok).then(|| match extract_moebius(&model.m_prime[k]) {
                Ok(Some(found)) => format!("induced action is {}", found.to_json()),
                _ => "no induced product action".to_string(),
            });
            Ok(CheckLine::with_detail(name, ok, detail))
        })
        .collect()
}

/// Whether the map is projectively one of `[[1,2],[0,1]]`, `[[1,0],[2,1]]`, their inverses, or the identity.
pub fn is_gamma2_generator(m: &Moebius) -> bool {
    let upper = Moebius::from_integers(1, 2, 0, 1);
    let lower = Moebius::from_integers(1, 0, 2, 1);
    [Moebius::identity(), upper.clone(), upper.inverse(), lower.clone(), lower.inverse()]
        .iter()
        .any(|g| g.projectively_eq(m))
}

/// Whether the map is projectively in `Gamma(2)`: coprime integer entries `= ±identity (mod 2)` with determinant ±1.
pub fn in_gamma2(m: &Moebius) -> bool {
    let [a, b, c, d] = m.normalized();
    let two = BigInt::from(2);
    let det = &a * &d - &b * &c;
    det.abs().is_one() && (&a % &two).abs().is_one() && (&d % &two).abs().is_one() && (&b % &two).is_zero() && (&c % &two).is_zero()
}

/// `M'_1, M'_2, M'_0 M'_1 M'_0, M'_0 M'_2 M'_0`.
pub fn gamma2_generators(model: &IntegerModel) -> Result<Vec<(String, ExactMatrix)>> {
    require_n2(model)?;
    let m = &model.m_prime;
    Ok(vec![
        ("M'_1".into(), m[1].clone()),
        ("M'_2".into(), m[2].clone()),
        ("M'_0 M'_1 M'_0".into(), m[0].mul(&m[1]).mul(&m[0])),
        ("M'_0 M'_2 M'_0".into(), m[0].mul(&m[2]).mul(&m[0])),
    ])
}

pub fn gamma2_generator_check(model: &IntegerModel) -> Result<(Vec<CheckLine>, Vec<(String, Option<MoebiusPair>)>)> {
    let mut lines = Vec::new();
    let mut actions = Vec::new();
    for (name, g) in gamma2_generators(model)? {
        let pair = extract_moebius(&g)?;
        let ok = pair
            .as_ref()
            .map(|p| !p.swap && is_gamma2_generator(&p.s_map) && is_gamma2_generator(&p.t_map))
            .unwrap_or(false);
        let detail = pair.as_ref().map(|p| format!("s: {}, t: {}", p.s_map, p.t_map));
        lines.push(CheckLine::with_detail(format!("{name} acts by Gamma(2) generators factorwise"), ok, detail));
        actions.push((name, pair));
    }
    Ok((lines, actions))
}

/// Check that factor extraction respects products on the given words over the
/// four generators and their inverses (letters `0..8`, odd letters are inverses).
pub fn gamma2_word_check(model: &IntegerModel, words: &[Vec<usize>]) -> Result<Vec<CheckLine>> {
    let gens = gamma2_generators(model)?;
    let mut letters = Vec::new();
    for (_, g) in &gens {
        let pair = extract_moebius(g)?.ok_or_else(|| Error::Precondition("generator without product action".into()))?;
        let inv_matrix = g.inverse()?;
        let inv_pair = MoebiusPair { swap: false, s_map: pair.s_map.inverse(), t_map: pair.t_map.inverse() };
        letters.push((g.clone(), pair));
        letters.push((inv_matrix, inv_pair));
    }
    let mut lines = Vec::new();
    for word in words {
        let mut matrix = ExactMatrix::identity(4, 1);
        let mut composed = MoebiusPair { swap: false, s_map: Moebius::identity(), t_map: Moebius::identity() };
        for &l in word {
            matrix = matrix.mul(&letters[l].0);
            composed = composed.compose(&letters[l].1);
        }
        let extracted = extract_moebius(&matrix)?;
        let ok = extracted.as_ref().map(|p| {
            p.projectively_eq(&composed) && !p.swap && in_gamma2(&p.s_map) && in_gamma2(&p.t_map)
        });
        lines.push(CheckLine::with_detail(format!("word {word:?}"), ok == Some(true), None));
    }
    Ok(lines)
}

/// All five identities for `n = 2`, or the change-of-basis checks for `n = 3`.
pub fn run_all_checks(n: usize) -> Result<Vec<CheckLine>> {
    let model = load_fixture(n)?;
    let mut lines = verify_change_of_basis(&model)?;
    if n == 2 {
        lines.push(CheckLine::new("Segre quadric vanishes", segre_quadric_check(&model)?));
        lines.extend(moebius_action_check(&model)?);
        lines.extend(gamma2_generator_check(&model)?.0);
    }
    Ok(lines)
}
