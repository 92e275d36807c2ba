//! Circuit matrices `M_0, ..., M_n` of the system `E_C(a, b, c)`, the
//! intersection matrix `H`, and the reflections `R_I = M^I M_0 (M^I)^{-1}`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{format_rational, unit_roots, CycNum, ParameterSet, UnitRoots};
use crate::matrix::{basis_vector, paper_kron, paper_kron_vec, ExactMatrix, IndexWord, Vector};

fn sign(conductor: u32, odd: bool) -> CycNum {
    CycNum::from_integer(conductor, if odd { -1 } else { 1 })
}

/// Inverse of a root of unity.
fn unit_inv(x: &CycNum) -> CycNum {
    x.involution()
}

/// `G_k = [[1, -1/gamma], [0, 1/gamma]]`.
pub fn build_gk(gamma: &CycNum) -> Result<ExactMatrix> {
    let g_inv = gamma.inv().map_err(|_| Error::InvalidParameter("gamma_k must be nonzero".into()))?;
    let n = gamma.conductor();
    ExactMatrix::from_rows(vec![vec![CycNum::one(n), -&g_inv], vec![CycNum::zero(n), g_inv]])
}

/// `G_k^{-1} = [[1, 1], [0, gamma]]`.
pub fn build_gk_inverse(gamma: &CycNum) -> ExactMatrix {
    let n = gamma.conductor();
    ExactMatrix::from_rows(vec![vec![CycNum::one(n), CycNum::one(n)], vec![CycNum::zero(n), gamma.clone()]])
        .expect("2x2")
}

/// `E_2 (x) ... (x) block (x) ... (x) E_2` with `block` in slot `k` (1-based).
pub fn embed_in_slot(n: usize, k: usize, block: &ExactMatrix) -> Result<ExactMatrix> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!("slot {k} outside 1..={n}")));
    }
    let e2 = ExactMatrix::identity(2, block.conductor());
    let mut m = if k == 1 { block.clone() } else { e2.clone() };
    for slot in 2..=n {
        m = paper_kron(&m, if slot == k { block } else { &e2 });
    }
    Ok(m)
}

pub fn build_mk(n: usize, k: usize, gamma: &CycNum) -> Result<ExactMatrix> {
    embed_in_slot(n, k, &build_gk(gamma)?)
}

/// The vector `v` whose transpose is the last row of `N_0 = E - M_0`.
pub fn build_v(roots: &UnitRoots) -> Vector {
    let n = roots.gamma.len();
    let cond = roots.conductor;
    let one = CycNum::one(cond);
    let ab = &roots.alpha * &roots.beta;
    let ab_inv = unit_inv(&ab);
    let all = (1usize << n) - 1;
    IndexWord::all(n)
        .map(|word| {
            let mask = word.rank();
            if mask == 0 {
                let x = &(&roots.alpha - &one) * &(&roots.beta - &one);
                let x = &(&x * &roots.gamma_product(all)) * &ab_inv;
                &sign(cond, n % 2 == 1) * &x
            } else {
                let weight = word.weight();
                let inner = &ab + &(&sign(cond, weight % 2 == 1) * &roots.gamma_product(mask));
                let x = &(&inner * &roots.gamma_product(all & !mask)) * &ab_inv;
                &sign(cond, (n + weight) % 2 == 1) * &x
            }
        })
        .collect()
}

pub fn build_m0(roots: &UnitRoots) -> ExactMatrix {
    let v = build_v(roots);
    let size = v.len();
    let mut m = ExactMatrix::identity(size, roots.conductor);
    for (j, x) in v.into_iter().enumerate() {
        let entry = m.get(size - 1, j) - &x;
        m.set(size - 1, j, entry);
    }
    m
}

/// `delta_0 = (-1)^{n+1} gamma_1 ... gamma_n / (alpha beta)`.
pub fn delta0(roots: &UnitRoots) -> CycNum {
    let n = roots.gamma.len();
    let all = (1usize << n) - 1;
    let x = &roots.gamma_product(all) * &unit_inv(&(&roots.alpha * &roots.beta));
    &sign(roots.conductor, n % 2 == 0) * &x
}

/// The intersection matrix `H`, or an error naming the vanishing denominator.
pub fn build_h(roots: &UnitRoots) -> Result<ExactMatrix> {
    let n = roots.gamma.len();
    let cond = roots.conductor;
    let one = CycNum::one(cond);
    let all = (1usize << n) - 1;
    let d_alpha = &roots.alpha - &roots.gamma_product(all);
    if d_alpha.is_zero() {
        return Err(Error::IntersectionUndefined { condition: "alpha = gamma_1 ... gamma_n".into() });
    }
    let d_beta = &roots.beta - &one;
    if d_beta.is_zero() {
        return Err(Error::IntersectionUndefined { condition: "beta = 1".into() });
    }
    let inv_alpha = CycNum::inv_difference(&roots.alpha, &roots.gamma_product(all))?;
    let inv_both = &inv_alpha * &CycNum::inv_difference(&roots.beta, &one)?;
    let first = &(&roots.alpha - &one) * &inv_alpha;
    let ab = &roots.alpha * &roots.beta;
    let neg_gamma: Vec<CycNum> = roots.gamma.iter().map(|g| -g).collect();
    let one_minus_gamma: Vec<CycNum> = roots.gamma.iter().map(|g| &one - g).collect();

    let size = 1usize << n;
    let mut h = ExactMatrix::zeros(size, size, cond);
    for row in IndexWord::all(n) {
        for col in IndexWord::all(n) {
            let meet = row.meet(&col);
            let mut factor = one.clone();
            for k in 0..n {
                let (i, j) = (row.bits()[k], col.bits()[k]);
                if meet.is_zero() {
                    if j == 1 {
                        factor = &factor * &neg_gamma[k];
                    }
                    if i + j == 0 {
                        factor = &factor * &one_minus_gamma[k];
                    }
                } else {
                    if j == 1 && i == 0 {
                        factor = &factor * &neg_gamma[k];
                    }
                    if i == 0 && j == 0 {
                        factor = &factor * &one_minus_gamma[k];
                    }
                }
                if factor.is_zero() {
                    break;
                }
            }
            if factor.is_zero() {
                continue;
            }
            let value = if meet.is_zero() {
                &factor * &first
            } else {
                let inner = &ab + &(&sign(cond, meet.weight() % 2 == 1) * &roots.gamma_product(meet.rank()));
                &(&inner * &inv_both) * &factor
            };
            h.set(row.rank(), col.rank(), value);
        }
    }
    Ok(h)
}

/// The generators, intersection matrix and derived data for one parameter set.
#[derive(Clone, Debug)]
pub struct MonodromySystem {
    pub params: ParameterSet,
    pub roots: UnitRoots,
    /// `M_0, M_1, ..., M_n`.
    pub generators: Vec<ExactMatrix>,
    pub delta0: CycNum,
    pub v: Vector,
    h: std::result::Result<ExactMatrix, Error>,
    inverses: Vec<ExactMatrix>,
}

impl MonodromySystem {
    pub fn new(params: &ParameterSet) -> Result<Self> {
        let roots = unit_roots(params);
        let n = params.n();
        let v = build_v(&roots);
        let m0 = build_m0(&roots);
        let delta0 = delta0(&roots);
        let det = m0.det()?;
        assert_eq!(det, delta0, "det(M_0) disagrees with the closed form for delta_0");

        let mut generators = vec![m0];
        let mut inverses = Vec::with_capacity(n);
        for (k, g) in roots.gamma.iter().enumerate() {
            generators.push(build_mk(n, k + 1, g)?);
            inverses.push(embed_in_slot(n, k + 1, &build_gk_inverse(g))?);
        }
        let h = build_h(&roots);
        Ok(MonodromySystem { params: params.clone(), roots, generators, delta0, v, h, inverses })
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    pub fn size(&self) -> usize {
        1 << self.n()
    }

    pub fn conductor(&self) -> u32 {
        self.roots.conductor
    }

    pub fn m0(&self) -> &ExactMatrix {
        &self.generators[0]
    }

    /// `M_k` for `k = 0..=n`.
    pub fn m(&self, k: usize) -> &ExactMatrix {
        &self.generators[k]
    }

    /// `M_k^{-1}` for `k = 1..=n`.
    pub fn mk_inverse(&self, k: usize) -> &ExactMatrix {
        &self.inverses[k - 1]
    }

    pub fn h(&self) -> Result<&ExactMatrix> {
        self.h.as_ref().map_err(Clone::clone)
    }

    /// `N_0 = E - M_0`.
    pub fn n0(&self) -> ExactMatrix {
        ExactMatrix::identity(self.size(), self.conductor()).sub(self.m0())
    }

    pub fn e_top(&self) -> Vector {
        basis_vector(&IndexWord::ones(self.n()), self.conductor())
    }

    /// `M^I = M_1^{i_1} ... M_n^{i_n}`.
    pub fn word_matrix(&self, word: &IndexWord) -> ExactMatrix {
        let mut m = ExactMatrix::identity(self.size(), self.conductor());
        for (k, &bit) in word.bits().iter().enumerate() {
            if bit == 1 {
                m = m.mul(self.m(k + 1));
            }
        }
        m
    }

    /// `(M^I)^{-1}`.
    pub fn word_matrix_inverse(&self, word: &IndexWord) -> ExactMatrix {
        let mut m = ExactMatrix::identity(self.size(), self.conductor());
        for (k, &bit) in word.bits().iter().enumerate().rev() {
            if bit == 1 {
                m = m.mul(self.mk_inverse(k + 1));
            }
        }
        m
    }

    /// `f_I = (G_1^{i_1} e_1) (x) ... (x) (G_n^{i_n} e_1)`.
    pub fn f_vector(&self, word: &IndexWord) -> Vector {
        let cond = self.conductor();
        let factors: Vec<Vector> = word
            .bits()
            .iter()
            .zip(&self.roots.gamma)
            .map(|(&bit, g)| {
                if bit == 0 {
                    vec![CycNum::zero(cond), CycNum::one(cond)]
                } else {
                    let gi = unit_inv(g);
                    vec![-&gi, gi]
                }
            })
            .collect();
        factors[1..].iter().fold(factors[0].clone(), |acc, f| paper_kron_vec(&acc, f))
    }

    /// `f_I` computed as `M^I e_{1,...,1}`.
    pub fn f_vector_by_action(&self, word: &IndexWord) -> Vector {
        self.word_matrix(word).apply(&self.e_top())
    }

    pub fn reflection(&self, word: &IndexWord) -> ReflectionGen {
        let r = self.word_matrix(word).mul(self.m0()).mul(&self.word_matrix_inverse(word));
        let n_mat = ExactMatrix::identity(self.size(), self.conductor()).sub(&r);
        ReflectionGen { word: word.clone(), f: self.f_vector(word), r, n_mat }
    }

    pub fn reflections(&self) -> Vec<ReflectionGen> {
        IndexWord::all(self.n()).map(|w| self.reflection(&w)).collect()
    }

    /// Matrix of `nu : w -> (N_I w)_I` in the coordinates `N_I w = c_I f_I`;
    /// row `I` is the functional `c_I`.
    pub fn nu_matrix(&self) -> ExactMatrix {
        let rows: Vec<Vector> = self.reflections().iter().map(ReflectionGen::functional).collect();
        ExactMatrix::from_rows(rows).expect("rectangular")
    }

    pub fn to_json(&self) -> Value {
        let generators: Vec<Value> =
            self.generators.iter().map(|m| serde_json::to_value(m).expect("serializable")).collect();
        let (h, h_undefined) = match &self.h {
            Ok(h) => (serde_json::to_value(h).expect("serializable"), Value::Null),
            Err(e) => (Value::Null, Value::String(e.to_string())),
        };
        json!({
            "n": self.n(),
            "size": self.size(),
            "params": params_json(&self.params),
            "conductor": self.conductor(),
            "alpha": self.roots.alpha,
            "beta": self.roots.beta,
            "gamma": self.roots.gamma,
            "generators": generators,
            "H": h,
            "H_undefined": h_undefined,
            "delta0": self.delta0,
            "v": self.v,
        })
    }
}

pub fn params_json(p: &ParameterSet) -> Value {
    json!({
        "a": format_rational(&p.a),
        "b": format_rational(&p.b),
        "c": p.c.iter().map(format_rational).collect::<Vec<_>>(),
    })
}

/// One conjugate `R_I` of `M_0` with `N_I = E - R_I` and the spanning vector `f_I` of its image.
#[derive(Clone, Debug)]
pub struct ReflectionGen {
    pub word: IndexWord,
    pub r: ExactMatrix,
    pub n_mat: ExactMatrix,
    pub f: Vector,
}

impl ReflectionGen {
    /// The row vector `c` with `N_I = f_I c^t`, read off the matrix `N_I`.
    pub fn functional(&self) -> Vector {
        let p = self.f.iter().position(|x| !x.is_zero()).expect("f_I is nonzero");
        let scale = self.f[p].inv().expect("nonzero");
        self.n_mat.row(p).iter().map(|x| x * &scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &str, b: &str, c: &[&str]) -> ParameterSet {
        ParameterSet::parse(a, b, c).unwrap()
    }

    fn int(k: i64) -> CycNum {
        CycNum::from_integer(1, k)
    }

    #[test]
    fn gk_examples() {
        let g = build_gk(&CycNum::one(1)).unwrap();
        assert_eq!(g, ExactMatrix::from_integers(&[&[1, -1], &[0, 1]]));
        let g = build_gk(&CycNum::from_integer(2, -1)).unwrap();
        assert_eq!(g, ExactMatrix::from_integers(&[&[1, 1], &[0, -1]]));
        assert!(g.mul(&g).is_identity());
        let z3 = CycNum::root_of_unity(3, 1);
        let g = build_gk(&z3).unwrap();
        let z3sq = CycNum::root_of_unity(3, 2);
        assert_eq!(g.get(0, 1), &-&z3sq);
        assert_eq!(g.get(1, 1), &z3sq);
        assert!(build_gk(&CycNum::zero(3)).is_err());
        assert!(build_gk_inverse(&z3).mul(&g).is_identity());
    }

    #[test]
    fn mk_examples() {
        let g = CycNum::root_of_unity(5, 2);
        assert_eq!(build_mk(1, 1, &g).unwrap(), build_gk(&g).unwrap());
        assert!(build_mk(2, 3, &g).is_err());
        assert!(build_mk(2, 0, &g).is_err());
        let m2 = build_mk(2, 2, &CycNum::one(1)).unwrap();
        let e11 = basis_vector(&IndexWord::ones(2), 1);
        // G_2 e_1 = -e_0 + e_1 in slot 2
        assert_eq!(m2.apply(&e11), vec![int(0), int(-1), int(0), int(1)]);
        assert!(m2.is_upper_triangular());
    }

    #[test]
    fn special_parameters_match_closed_forms() {
        for n in 1..=3usize {
            let c = vec!["1"; n];
            let sys = MonodromySystem::new(&params("1/2", "1/2", &c)).unwrap();
            let size = sys.size();
            let top = size - 1;
            let odd = |k: usize| if k % 2 == 1 { -1 } else { 1 };
            assert_eq!(sys.v[0], int(4 * odd(n)));
            for word in IndexWord::all(n) {
                let r = word.rank();
                let entry = sys.m0().get(top, r);
                let expected = if r == top {
                    odd(n + 1)
                } else if r == 0 {
                    4 * odd(n + 1)
                } else if word.weight() % 2 == 0 {
                    2 * odd(n + 1)
                } else {
                    0
                };
                assert_eq!(entry, &int(expected), "n={n} column {word}");
            }
            assert_eq!(sys.delta0, int(odd(n + 1)));
            // every entry of H lies in Z[1/2]
            for x in sys.h().unwrap().entries() {
                let q = x.as_rational().unwrap();
                let d = q.denom().clone();
                assert!(d == 1.into() || d == 2.into(), "{q}");
            }
        }
    }

    #[test]
    fn generic_n1_delta() {
        let sys = MonodromySystem::new(&params("1/3", "1/5", &["1/7"])).unwrap();
        let r = &sys.roots;
        let expected = &r.gamma[0] * &(&r.alpha * &r.beta).inv().unwrap();
        assert_eq!(sys.delta0, expected);
        assert_eq!(sys.v[1], &CycNum::one(105) - &expected);
        assert_eq!(sys.m0().det().unwrap(), sys.delta0);
    }

    #[test]
    fn h_n1_by_hand() {
        let sys = MonodromySystem::new(&params("1/3", "1/5", &["1/2"])).unwrap();
        let r = &sys.roots;
        let one = CycNum::one(r.conductor);
        let (a, b, g) = (&r.alpha, &r.beta, &r.gamma[0]);
        let first = &(a - &one) * &(a - g).inv().unwrap();
        let expected = ExactMatrix::from_rows(vec![
            vec![&(&one - g) * &first, &-g * &first],
            vec![first.clone(), &(&(a * b) - g) * &(&(a - g) * &(b - &one)).inv().unwrap()],
        ])
        .unwrap();
        assert_eq!(sys.h().unwrap(), &expected);
    }

    #[test]
    fn h_undefined_reports_condition() {
        let sys = MonodromySystem::new(&params("1/3", "1/5", &["1/3"])).unwrap();
        match sys.h() {
            Err(Error::IntersectionUndefined { condition }) => assert!(condition.contains("alpha")),
            other => panic!("unexpected {other:?}"),
        }
        let sys = MonodromySystem::new(&params("1/3", "0", &["1/5"])).unwrap();
        match sys.h() {
            Err(Error::IntersectionUndefined { condition }) => assert_eq!(condition, "beta = 1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn f_vectors_agree() {
        let sys = MonodromySystem::new(&params("1/3", "1/4", &["1/2", "1/6", "1"])).unwrap();
        for w in IndexWord::all(3) {
            assert_eq!(sys.f_vector(&w), sys.f_vector_by_action(&w), "{w}");
        }
        assert_eq!(sys.f_vector(&IndexWord::zeros(3)), sys.e_top());
        let sys = MonodromySystem::new(&params("1/3", "1/4", &["1"])).unwrap();
        let f = sys.f_vector(&IndexWord::ones(1));
        assert_eq!(f, vec![CycNum::from_integer(12, -1), CycNum::one(12)]);
    }

    #[test]
    fn reflection_of_empty_word_is_m0() {
        let sys = MonodromySystem::new(&params("1/3", "1/4", &["1/2", "1/6"])).unwrap();
        let r = sys.reflection(&IndexWord::zeros(2));
        assert_eq!(&r.r, sys.m0());
        for w in IndexWord::all(2) {
            assert!(sys.word_matrix(&w).mul(&sys.word_matrix_inverse(&w)).is_identity());
        }
    }

    #[test]
    fn json_export_has_fields() {
        let sys = MonodromySystem::new(&params("1/2", "1/2", &["1", "1"])).unwrap();
        let j = sys.to_json();
        assert_eq!(j["size"], 4);
        assert_eq!(j["generators"].as_array().unwrap().len(), 3);
        assert_eq!(j["delta0"]["coeffs"][0], "-1/1");
        assert_eq!(j["params"]["c"][1], "1/1");
    }
}
