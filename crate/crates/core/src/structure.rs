//! Irreducibility criteria, explicit invariant subspaces for the reducible
//! reflection-subgroup cases, and budget-bounded finiteness probes.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{unit_roots, CycNum, ParameterSet};
use crate::matrix::{ExactMatrix, IndexWord, Vector};
use crate::monodromy::MonodromySystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TriState {
    Holds,
    Fails,
    Unknown,
}

/// `alpha` or `beta` equal to `prod gamma_k^{i_k}` for the word `word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrWitness {
    pub parameter: &'static str,
    pub word: IndexWord,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibilityVerdict {
    pub mon_irreducible: TriState,
    pub mon_witness: Option<IrrWitness>,
    pub ref_irreducible: TriState,
    /// Elements of `{gamma_1, ..., gamma_n, alpha/beta}` equal to `-1`.
    pub minus_one_count: usize,
    /// Their labels, e.g. `gamma_2` or `alpha/beta`.
    pub minus_one_labels: Vec<String>,
}

impl IrreducibilityVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "mon_irreducible": self.mon_irreducible,
            "mon_witness": self.mon_witness.as_ref().map(|w| json!({
                "parameter": w.parameter,
                "word": w.word.to_string(),
            })),
            "ref_irreducible": self.ref_irreducible,
            "minus_one_count": self.minus_one_count,
            "minus_one_labels": self.minus_one_labels,
        })
    }
}

/// Evaluate the irreducibility conditions for `Mon` and `Ref` exactly.
pub fn check_irr(params: &ParameterSet) -> IrreducibilityVerdict {
    let roots = unit_roots(params);
    let n = params.n();
    let mut mon_witness = None;
    'outer: for word in IndexWord::all(n) {
        let prod = roots.gamma_product(word.rank());
        for (name, value) in [("alpha", &roots.alpha), ("beta", &roots.beta)] {
            if *value == prod {
                mon_witness = Some(IrrWitness { parameter: name, word });
                break 'outer;
            }
        }
    }
    let minus = CycNum::from_integer(1, -1);
    let mut minus_one_labels: Vec<String> = roots
        .gamma
        .iter()
        .enumerate()
        .filter(|(_, g)| **g == minus)
        .map(|(k, _)| format!("gamma_{}", k + 1))
        .collect();
    let ratio = &roots.alpha * &roots.beta.involution();
    if ratio == minus {
        minus_one_labels.push("alpha/beta".into());
    }
    let mon_irreducible = if mon_witness.is_none() { TriState::Holds } else { TriState::Fails };
    let ref_irreducible = if mon_irreducible == TriState::Holds && minus_one_labels.len() <= 1 {
        TriState::Holds
    } else {
        TriState::Fails
    };
    IrreducibilityVerdict {
        mon_irreducible,
        mon_witness,
        ref_irreducible,
        minus_one_count: minus_one_labels.len(),
        minus_one_labels,
    }
}

/// Which `-1` pattern produces the invariant subspaces. Slots are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    /// `gamma_p = gamma_q = -1`.
    TwoGammas { p: usize, q: usize },
    /// `gamma_p = -1` and `beta = -alpha`.
    GammaAndAb { p: usize },
}

impl WitnessKind {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessKind::TwoGammas { .. } => "two-gammas",
            WitnessKind::GammaAndAb { .. } => "gamma-and-ab",
        }
    }

    /// Generators that exchange `W^+` and `W^-`.
    pub fn swapping_slots(&self) -> Vec<usize> {
        match *self {
            WitnessKind::TwoGammas { p, q } => vec![p, q],
            WitnessKind::GammaAndAb { p } => vec![p],
        }
    }
}

/// One coefficient `lambda` with its closed form and the value read off `M_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaEntry {
    pub label: String,
    pub formula: CycNum,
    pub from_m0: CycNum,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckLine {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        CheckLine { name: name.into(), passed, detail: None }
    }

    pub fn with_detail(name: impl Into<String>, passed: bool, detail: Option<String>) -> Self {
        CheckLine { name: name.into(), passed, detail }
    }

    pub fn to_json(&self) -> Value {
        json!({"check": self.name, "passed": self.passed, "detail": self.detail})
    }
}

#[derive(Clone, Debug)]
pub struct ReducibleWitness {
    pub kind: WitnessKind,
    pub w_plus: Vec<Vector>,
    pub w_minus: Vec<Vector>,
    pub lambda_table: Vec<LambdaEntry>,
}

/// `e_0` or `2 e_1 - e_0`.
fn twisted_factor(bit: u8, conductor: u32) -> Vector {
    let int = |k| CycNum::from_integer(conductor, k);
    if bit == 0 {
        vec![int(1), int(0)]
    } else {
        vec![int(-1), int(2)]
    }
}

/// Tensor product of per-slot factors, slot 1 fastest.
fn tensor(factors: &[Vector]) -> Vector {
    factors[1..].iter().fold(factors[0].clone(), |acc, f| crate::matrix::paper_kron_vec(&acc, f))
}

fn unit_factor(bit: u8, conductor: u32) -> Vector {
    let mut v = vec![CycNum::zero(conductor); 2];
    v[bit as usize] = CycNum::one(conductor);
    v
}

/// Splice the bits of `rest` into all slots except `skip` (1-based), with `fixed` bits there.
fn splice(n: usize, skip: &[usize], fixed: &[u8], rest: &IndexWord) -> IndexWord {
    let mut bits = Vec::with_capacity(n);
    let mut it = rest.bits().iter();
    for slot in 1..=n {
        match skip.iter().position(|&s| s == slot) {
            Some(i) => bits.push(fixed[i]),
            None => bits.push(*it.next().expect("rest word length")),
        }
    }
    IndexWord::new(bits).expect("0/1 word")
}

/// `(-1)^{n+|J|} (alpha beta + (-1)^{|J|} prod gamma^J) prod gamma^{1-J} / (alpha beta)` over the slots of `rest`.
fn lambda_formula(sys: &MonodromySystem, skip: &[usize], rest: &IndexWord) -> CycNum {
    let r = &sys.roots;
    let n = sys.n();
    let cond = r.conductor;
    let others: Vec<usize> = (1..=n).filter(|s| !skip.contains(s)).collect();
    let mut with = CycNum::one(cond);
    let mut without = CycNum::one(cond);
    for (&slot, &bit) in others.iter().zip(rest.bits()) {
        if bit == 1 {
            with = &with * &r.gamma[slot - 1];
        } else {
            without = &without * &r.gamma[slot - 1];
        }
    }
    let ab = &r.alpha * &r.beta;
    let w = rest.weight();
    let sgn = |odd: bool| CycNum::from_integer(cond, if odd { -1 } else { 1 });
    let inner = &ab + &(&sgn(w % 2 == 1) * &with);
    &sgn((n + w) % 2 == 1) * &(&(&inner * &without) * &ab.involution())
}

/// `(-1)^n (alpha - 1)(beta - 1) prod gamma / (alpha beta)` over the slots not in `skip`.
fn lambda_zero_formula(sys: &MonodromySystem, skip: &[usize]) -> CycNum {
    let r = &sys.roots;
    let n = sys.n();
    let cond = r.conductor;
    let one = CycNum::one(cond);
    let prod = (1..=n)
        .filter(|s| !skip.contains(s))
        .fold(one.clone(), |acc, s| &acc * &r.gamma[s - 1]);
    let ab = &r.alpha * &r.beta;
    let x = &(&(&r.alpha - &one) * &(&r.beta - &one)) * &(&prod * &ab.involution());
    if n % 2 == 1 {
        -x
    } else {
        x
    }
}

/// Locate a `-1` pattern among the parameters, preferring two gammas.
pub fn detect_witness_kind(sys: &MonodromySystem) -> Option<WitnessKind> {
    let minus = CycNum::from_integer(1, -1);
    let slots: Vec<usize> =
        sys.roots.gamma.iter().enumerate().filter(|(_, g)| **g == minus).map(|(k, _)| k + 1).collect();
    if slots.len() >= 2 {
        return Some(WitnessKind::TwoGammas { p: slots[0], q: slots[1] });
    }
    let r = &sys.roots;
    if let Some(&p) = slots.first() {
        if r.beta == -&r.alpha {
            return Some(WitnessKind::GammaAndAb { p });
        }
    }
    None
}

/// Build `W^+` and `W^-` directly in the original tensor slots.
pub fn build_reducible_witness(sys: &MonodromySystem) -> Result<ReducibleWitness> {
    let kind = detect_witness_kind(sys).ok_or_else(|| {
        Error::Precondition("need two gamma_k = -1, or one gamma_k = -1 together with beta = -alpha".into())
    })?;
    let n = sys.n();
    let cond = sys.conductor();
    let v = &sys.v;
    let add = |x: &Vector, y: &Vector, sign: i64| -> Vector {
        let s = CycNum::from_integer(cond, sign);
        x.iter().zip(y).map(|(a, b)| a + &(&s * b)).collect()
    };
    let mut w_plus = Vec::new();
    let mut w_minus = Vec::new();
    let mut lambda_table = Vec::new();
    match kind {
        WitnessKind::TwoGammas { p, q } => {
            let skip = [p, q];
            let g = |bp: u8, bq: u8, rest: &IndexWord| -> Vector {
                let word = splice(n, &skip, &[bp, bq], rest);
                let factors: Vec<Vector> = (1..=n)
                    .map(|s| {
                        let bit = word.bits()[s - 1];
                        if s == p || s == q {
                            twisted_factor(bit, cond)
                        } else {
                            unit_factor(bit, cond)
                        }
                    })
                    .collect();
                tensor(&factors)
            };
            for rest in IndexWord::all(n - 2) {
                let (g00, g11, g10, g01) = (g(0, 0, &rest), g(1, 1, &rest), g(1, 0, &rest), g(0, 1, &rest));
                w_plus.push(add(&g00, &g11, 1));
                w_plus.push(add(&g10, &g01, 1));
                w_minus.push(add(&g00, &g11, -1));
                w_minus.push(add(&g10, &g01, -1));

                let l1 = lambda_formula(sys, &skip, &rest);
                let l0 = if rest.is_zero() { lambda_zero_formula(sys, &skip) } else { l1.clone() };
                lambda_table.push(LambdaEntry {
                    label: format!("lambda_0;{rest}"),
                    formula: l0,
                    from_m0: v[splice(n, &skip, &[0, 0], &rest).rank()].clone(),
                });
                for (bp, bq) in [(1, 0), (0, 1), (1, 1)] {
                    lambda_table.push(LambdaEntry {
                        label: format!("lambda_1;{rest} at ({bp},{bq})"),
                        formula: l1.clone(),
                        from_m0: v[splice(n, &skip, &[bp, bq], &rest).rank()].clone(),
                    });
                }
            }
        }
        WitnessKind::GammaAndAb { p } => {
            let skip = [p];
            let h = |bp: u8, rest: &IndexWord| -> Vector {
                let word = splice(n, &skip, &[bp], rest);
                let factors: Vec<Vector> = (1..=n)
                    .map(|s| {
                        let bit = word.bits()[s - 1];
                        if s == p {
                            twisted_factor(bit, cond)
                        } else {
                            unit_factor(bit, cond)
                        }
                    })
                    .collect();
                tensor(&factors)
            };
            for rest in IndexWord::all(n - 1) {
                let (h0, h1) = (h(0, &rest), h(1, &rest));
                w_plus.push(add(&h0, &h1, 1));
                w_minus.push(add(&h0, &h1, -1));
                let formula = lambda_formula(sys, &skip, &rest);
                for bp in [0, 1] {
                    lambda_table.push(LambdaEntry {
                        label: format!("lambda_{rest} at ({bp})"),
                        formula: formula.clone(),
                        from_m0: -&v[splice(n, &skip, &[bp], &rest).rank()],
                    });
                }
            }
            let zero = IndexWord::zeros(n - 1);
            lambda_table.push(LambdaEntry {
                label: format!("lambda_{zero} factored"),
                formula: lambda_zero_formula(sys, &skip),
                from_m0: lambda_formula(sys, &skip, &zero),
            });
        }
    }
    Ok(ReducibleWitness { kind, w_plus, w_minus, lambda_table })
}

fn span_rank(vectors: &[Vector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(vectors.to_vec()).expect("equal lengths").rank()
}

/// Whether `span(a) = span(b)`.
pub fn same_span(a: &[Vector], b: &[Vector]) -> bool {
    let ra = span_rank(a);
    ra == span_rank(b) && ra == span_rank(&[a, b].concat())
}

/// Whether `v` lies in `span(basis)`.
pub fn in_span(v: &Vector, basis: &[Vector]) -> bool {
    span_rank(basis) == span_rank(&[basis, std::slice::from_ref(v)].concat())
}

pub fn image(m: &ExactMatrix, vectors: &[Vector]) -> Vec<Vector> {
    vectors.iter().map(|v| m.apply(v)).collect()
}

impl ReducibleWitness {
    /// Exact verification transcript in the original coordinates.
    pub fn verify(&self, sys: &MonodromySystem) -> Vec<CheckLine> {
        let mut lines = Vec::new();
        let mut push = |name: String, passed: bool| lines.push(CheckLine::new(name, passed));
        let size = sys.size();
        let half = size / 2;
        let (wp, wm) = (&self.w_plus, &self.w_minus);
        push(
            "dimensions".into(),
            span_rank(wp) == half && span_rank(wm) == half && wp.len() == half && wm.len() == half,
        );
        push("complementary".into(), span_rank(&[wp.as_slice(), wm.as_slice()].concat()) == size);
        push("e_top in W+".into(), in_span(&sys.e_top(), wp));
        for entry in &self.lambda_table {
            push(format!("{} matches M_0", entry.label), entry.formula == entry.from_m0);
        }
        let swapping = self.kind.swapping_slots();
        for k in 0..=sys.n() {
            let m = sys.m(k);
            if swapping.contains(&k) {
                push(format!("M_{k} W+ = W-"), same_span(&image(m, wp), wm));
                push(format!("M_{k} W- = W+"), same_span(&image(m, wm), wp));
            } else {
                push(format!("M_{k} W+ = W+"), same_span(&image(m, wp), wp));
                push(format!("M_{k} W- = W-"), same_span(&image(m, wm), wm));
            }
        }
        for r in sys.reflections() {
            let ok = same_span(&image(&r.r, wp), wp) && same_span(&image(&r.r, wm), wm);
            push(format!("R_{} preserves W+ and W-", r.word), ok);
        }
        lines
    }

    /// Whether every reflection `R_I` preserves both subspaces.
    pub fn reflections_preserve(&self, sys: &MonodromySystem) -> bool {
        sys.reflections().iter().all(|r| {
            same_span(&image(&r.r, &self.w_plus), &self.w_plus)
                && same_span(&image(&r.r, &self.w_minus), &self.w_minus)
        })
    }

    /// A copy with `delta` added to entry `entry` of basis vector `index` of `W^+`
    /// (`plus = true`) or `W^-`.
    pub fn perturbed(&self, plus: bool, index: usize, entry: usize, delta: i64) -> Self {
        let mut out = self.clone();
        let target = if plus { &mut out.w_plus } else { &mut out.w_minus };
        let x = &target[index][entry];
        target[index][entry] = x + &CycNum::from_integer(x.conductor(), delta);
        out
    }

    pub fn to_json(&self, transcript: &[CheckLine]) -> Value {
        let slots = match self.kind {
            WitnessKind::TwoGammas { p, q } => vec![p, q],
            WitnessKind::GammaAndAb { p } => vec![p],
        };
        json!({
            "kind": self.kind.name(),
            "slots": slots,
            "W_plus": self.w_plus,
            "W_minus": self.w_minus,
            "lambda_table": self.lambda_table.iter().map(|e| json!({
                "label": e.label,
                "formula": e.formula,
                "from_M0": e.from_m0,
            })).collect::<Vec<_>>(),
            "transcript": transcript.iter().map(CheckLine::to_json).collect::<Vec<_>>(),
            "all_passed": transcript.iter().all(|l| l.passed),
        })
    }
}

/// The defining identities of a system, each checked exactly. Fails with
/// `IntersectionUndefined` when `H` does not exist.
pub fn verify_system(sys: &MonodromySystem) -> Result<Vec<CheckLine>> {
    let h = sys.h()?.clone();
    let n = sys.n();
    let mut lines = Vec::new();
    for (i, m) in sys.generators.iter().enumerate() {
        lines.push(CheckLine::new(format!("tM_{i} H M_{i}^v = H"), m.transpose().mul(&h).mul(&m.involution()) == h));
    }
    let sign = CycNum::from_integer(1, if n % 2 == 0 { 1 } else { -1 });
    lines.push(CheckLine::new("tH = (-1)^n H^v", h.transpose() == h.involution().scale(&sign)));
    if n >= 2 {
        let commute = (1..=n).all(|i| (1..=n).all(|j| sys.m(i).mul(sys.m(j)) == sys.m(j).mul(sys.m(i))));
        lines.push(CheckLine::new("M_i M_j = M_j M_i", commute));
        for k in 1..=n {
            let x = sys.m0().mul(sys.m(k));
            let y = sys.m(k).mul(sys.m0());
            lines.push(CheckLine::new(format!("(M_0 M_{k})^2 = (M_{k} M_0)^2"), x.mul(&x) == y.mul(&y)));
        }
    }
    let n0 = sys.n0();
    lines.push(CheckLine::new("rank(M_0 - E) = 1", n0.rank() == 1));
    lines.push(CheckLine::new("det(M_0) = delta_0", sys.m0().det()? == sys.delta0));
    let e_top = sys.e_top();
    let scaled: Vector = e_top.iter().map(|x| x * &sys.delta0).collect();
    lines.push(CheckLine::new("M_0 e_top = delta_0 e_top", sys.m0().apply(&e_top) == scaled));
    let kernel = n0.kernel_basis();
    let form = ExactMatrix::from_rows(vec![h.apply(&e_top)])?.kernel_basis();
    lines.push(CheckLine::new(
        "ker N_0 = {w : tw H e_top = 0}",
        kernel.len() + 1 == sys.size() && same_span(&kernel, &form),
    ));
    let f_ok = IndexWord::all(n).all(|w| sys.f_vector(&w) == sys.f_vector_by_action(&w));
    lines.push(CheckLine::new("f_I tensor form = M^I e_top", f_ok));
    Ok(lines)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderProbe {
    FiniteOrder(u64),
    ExceedsBudget,
}

impl OrderProbe {
    pub fn to_json(&self) -> Value {
        match self {
            OrderProbe::FiniteOrder(d) => json!({"status": "finite_order", "order": d}),
            OrderProbe::ExceedsBudget => json!({"status": "exceeds_budget"}),
        }
    }
}

/// Order of `M_k` if at most `budget`; then `M_k^d M_0 M_k^{-d}` runs over a finite set.
pub fn conjugate_orbit_probe(sys: &MonodromySystem, k: usize, budget: u64) -> Result<OrderProbe> {
    if k == 0 || k > sys.n() {
        return Err(Error::IndexOutOfRange(format!("generator M_{k} outside 1..={}", sys.n())));
    }
    if budget == 0 {
        return Err(Error::Precondition("budget must be at least 1".into()));
    }
    let m = sys.m(k);
    let mut power = m.clone();
    for d in 1..=budget {
        if power.is_identity() {
            return Ok(OrderProbe::FiniteOrder(d));
        }
        power = power.mul(m);
    }
    Ok(OrderProbe::ExceedsBudget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Finite { order: usize },
    BudgetExceeded { element_count: usize },
}

impl Enumeration {
    pub fn to_json(&self) -> Value {
        match self {
            Enumeration::Finite { order } => json!({"status": "finite", "order": order}),
            Enumeration::BudgetExceeded { element_count } => {
                json!({"status": "budget_exceeded", "element_count": element_count})
            }
        }
    }
}

fn matrix_key(m: &ExactMatrix) -> Vec<u8> {
    let mut key = Vec::new();
    for x in m.entries() {
        let k = x.lift(m.conductor()).key();
        key.extend_from_slice(&(k.len() as u32).to_le_bytes());
        key.extend_from_slice(&k);
    }
    key
}

/// Breadth-first closure of the group generated by `generators` and their inverses.
/// Stops once more than `budget` distinct elements have been found.
pub fn enumerate_group(generators: &[ExactMatrix], budget: usize) -> Result<Enumeration> {
    if budget == 0 {
        return Err(Error::Precondition("budget must be at least 1".into()));
    }
    let first = generators.first().ok_or_else(|| Error::Precondition("no generators".into()))?;
    let conductor = generators.iter().fold(first.conductor(), |acc, g| num_integer::lcm(acc, g.conductor()));
    let mut steps = Vec::new();
    for g in generators {
        let mut g = g.clone();
        g.lift_to(conductor);
        let mut inv = g.inverse()?;
        inv.lift_to(conductor);
        steps.push(g);
        steps.push(inv);
    }
    let identity = ExactMatrix::identity(first.rows(), conductor);
    let mut seen = HashSet::from([matrix_key(&identity)]);
    let mut queue = VecDeque::from([identity]);
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let mut y = x.mul(s);
            y.lift_to(conductor);
            if seen.insert(matrix_key(&y)) {
                if seen.len() > budget {
                    return Ok(Enumeration::BudgetExceeded { element_count: seen.len() });
                }
                queue.push_back(y);
            }
        }
    }
    Ok(Enumeration::Finite { order: seen.len() })
}
