//! Zariski-closure classification of the monodromy group from exact
//! parameter tests, each step tagged with the result it applies.

use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use crate::field::{CycNum, ParameterSet};
use crate::monodromy::{params_json, MonodromySystem};
use crate::structure::{check_irr, Enumeration, IrreducibilityVerdict, TriState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// `SL_{2^n} ⊂ closure`.
    #[serde(rename = "SL_contained")]
    SlContained,
    /// `Sp ⊂ closure ⊂ GSp`.
    #[serde(rename = "Sp_between")]
    SpBetween,
    /// `SO ⊂ closure ⊂ GO`.
    #[serde(rename = "SO_between")]
    SoBetween,
    #[serde(rename = "definite_O")]
    DefiniteO,
    #[serde(rename = "definite_Sp")]
    DefiniteSp,
    #[serde(rename = "finite")]
    Finite,
    #[serde(rename = "reducible")]
    Reducible,
    #[serde(rename = "undetermined")]
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Delta0Case {
    /// `delta_0 != ±1`.
    I,
    /// `delta_0 = 1`.
    II,
    /// `delta_0 = -1`.
    III,
}

/// Results applied during classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Citation {
    IrreducibilityCriterion,
    RepresentationMatrices,
    ClosureTrichotomy,
    DefiniteClosure,
    FinitenessEquivalence,
    ReflectionIrreducibility,
    ReflectionIdentityComponent,
    IdentityComponentIrreducible,
}

impl Citation {
    pub fn label(&self) -> &'static str {
        match self {
            Citation::IrreducibilityCriterion => "prop-irr",
            Citation::RepresentationMatrices => "cor-rep-matrix",
            Citation::ClosureTrichotomy => "main",
            Citation::DefiniteClosure => "cor-main",
            Citation::FinitenessEquivalence => "finite-prop",
            Citation::ReflectionIrreducibility => "main2",
            Citation::ReflectionIdentityComponent => "main3",
            Citation::IdentityComponentIrreducible => "main3-cor",
        }
    }
}

/// Outside knowledge about finiteness of `Mon`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FinitenessHint {
    #[default]
    None,
    InfiniteAssumed,
    Enumeration(Enumeration),
}

pub const ASSUME_MON0_IRREDUCIBLE: &str = "Mon0 irreducible";
pub const ASSUME_MON_INFINITE: &str = "Mon infinite";

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub params: ParameterSet,
    pub verdict: Verdict,
    pub delta0: CycNum,
    pub delta0_case: Delta0Case,
    pub irreducibility: IrreducibilityVerdict,
    /// How infiniteness of `Mon` was established, if it was.
    pub mon_infinite: Option<String>,
    pub assumptions_used: Vec<String>,
    pub citations: Vec<Citation>,
    pub sl_determinant: bool,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn cites(&self, c: Citation) -> bool {
        self.citations.contains(&c)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": params_json(&self.params),
            "verdict": self.verdict,
            "delta0": self.delta0,
            "delta0_case": self.delta0_case,
            "irreducibility": self.irreducibility.to_json(),
            "mon_infinite": self.mon_infinite,
            "assumptions_used": self.assumptions_used,
            "citations": self.citations.iter().map(Citation::label).collect::<Vec<_>>(),
            "sl_determinant_note": self.sl_determinant,
            "notes": self.notes,
        })
    }
}

pub fn delta0_value(params: &ParameterSet) -> CycNum {
    crate::monodromy::delta0(&crate::field::unit_roots(params))
}

pub fn delta0_case(params: &ParameterSet) -> Delta0Case {
    let d = delta0_value(params);
    if d.is_one() {
        Delta0Case::II
    } else if d == CycNum::from_integer(1, -1) {
        Delta0Case::III
    } else {
        Delta0Case::I
    }
}

/// `Mon^0 ⊂ SL` holds for rational parameters, which is every exact parameter set.
pub fn sl_determinant_note(_params: &ParameterSet) -> bool {
    true
}

/// `a + b ∈ Z`, `c_k ∈ Z/2`, `sum c_k ∈ Z`.
pub fn definite_hypotheses(params: &ParameterSet) -> bool {
    let half = BigRational::new(1.into(), 2.into());
    (&params.a + &params.b).is_integer()
        && params.c.iter().all(|c| (c / &half).is_integer())
        && params.c_sum().is_integer()
}

/// Whether `H` is defined, real, nondegenerate, preserved as a bilinear form by
/// every generator, and has transpose `sign * H`.
pub fn invariant_bilinear_form(sys: &MonodromySystem, sign: i64) -> bool {
    let Ok(h) = sys.h() else { return false };
    if h.involution() != *h || h.transpose() != h.scale(&CycNum::from_integer(1, sign)) {
        return false;
    }
    if h.det().map(|d| d.is_zero()).unwrap_or(true) {
        return false;
    }
    sys.generators.iter().all(|m| m.involution() == *m && m.transpose().mul(h).mul(m) == *h)
}

pub fn classify(params: &ParameterSet, hint: FinitenessHint) -> ClassificationReport {
    let irreducibility = check_irr(params);
    let delta0 = delta0_value(params);
    let case = delta0_case(params);
    let mut report = ClassificationReport {
        params: params.clone(),
        verdict: Verdict::Undetermined,
        delta0,
        delta0_case: case,
        irreducibility: irreducibility.clone(),
        mon_infinite: None,
        assumptions_used: Vec::new(),
        citations: vec![Citation::IrreducibilityCriterion],
        sl_determinant: sl_determinant_note(params),
        notes: Vec::new(),
    };

    if irreducibility.mon_irreducible == TriState::Fails {
        report.verdict = Verdict::Reducible;
        if let Some(w) = &irreducibility.mon_witness {
            report.notes.push(format!("{} equals the gamma product over {}", w.parameter, w.word));
        }
        return report;
    }

    report.citations.push(Citation::ReflectionIrreducibility);
    let ref_irreducible = irreducibility.ref_irreducible == TriState::Holds;
    if !ref_irreducible {
        report.notes.push(format!("Ref is reducible: -1 occurs at {}", irreducibility.minus_one_labels.join(", ")));
    }

    let unipotent = params.c.iter().position(|c| c.is_integer());
    match hint {
        FinitenessHint::Enumeration(Enumeration::Finite { order }) => {
            report.verdict = Verdict::Finite;
            report.citations.push(Citation::FinitenessEquivalence);
            report.notes.push(format!("closure enumeration completed with group order {order}"));
            return report;
        }
        FinitenessHint::Enumeration(Enumeration::BudgetExceeded { element_count }) => {
            report
                .notes
                .push(format!("enumeration stopped after {element_count} elements; finiteness not decided"));
        }
        _ => {}
    }
    if case == Delta0Case::II && ref_irreducible {
        report.mon_infinite = Some("delta0 = 1 with Ref irreducible".into());
    } else if let Some(k) = unipotent {
        report.mon_infinite = Some(format!("M_{} is unipotent and nontrivial (gamma_{} = 1)", k + 1, k + 1));
    } else if hint == FinitenessHint::InfiniteAssumed {
        report.mon_infinite = Some("assumed".into());
        report.assumptions_used.push(ASSUME_MON_INFINITE.into());
    }

    if ref_irreducible && report.mon_infinite.is_some() {
        report.citations.push(Citation::IdentityComponentIrreducible);
    } else {
        report.assumptions_used.push(ASSUME_MON0_IRREDUCIBLE.into());
    }
    if ref_irreducible {
        report.citations.push(Citation::ReflectionIdentityComponent);
        report.notes.push("if Ref0 were reducible, Ref and hence Mon would be finite; not decided here".into());
    }

    report.citations.push(Citation::ClosureTrichotomy);
    let n = params.n();
    report.verdict = match case {
        Delta0Case::I => Verdict::SlContained,
        Delta0Case::II | Delta0Case::III if definite_hypotheses(params) => {
            report.citations.push(Citation::RepresentationMatrices);
            report.citations.push(Citation::DefiniteClosure);
            if n % 2 == 0 {
                Verdict::DefiniteO
            } else {
                Verdict::DefiniteSp
            }
        }
        Delta0Case::II | Delta0Case::III => {
            let (sign, verdict) =
                if case == Delta0Case::II { (-1, Verdict::SpBetween) } else { (1, Verdict::SoBetween) };
            let form_ok = MonodromySystem::new(params).map(|s| invariant_bilinear_form(&s, sign)).unwrap_or(false);
            if form_ok {
                verdict
            } else {
                report.notes.push("no invariant bilinear form verified; SL containment not excluded".into());
                Verdict::Undetermined
            }
        }
    };
    report
}
