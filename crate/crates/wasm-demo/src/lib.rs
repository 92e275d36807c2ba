//! Browser bindings: build a system, classify it, evaluate `F_C`.

use fc_monodromy::classify::{classify, FinitenessHint};
use fc_monodromy::monodromy::params_json;
use fc_monodromy::numerics::{fc_contour, fc_series, Complex, FcParams, SeriesConfig, TorusQuadrature};
use fc_monodromy::{ExactMatrix, MonodromySystem, ParameterSet};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn params(a: &str, b: &str, c: &str) -> Result<ParameterSet, String> {
    ParameterSet::parse_list(a, b, c).map_err(|e| e.to_string())
}

fn readable(m: &ExactMatrix) -> Value {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>()).collect()
}

/// Generators and `H` with entries written in powers of `z = exp(2 pi i / N)`.
pub fn generate_json(a: &str, b: &str, c: &str) -> Result<String, String> {
    let p = params(a, b, c)?;
    let sys = MonodromySystem::new(&p).map_err(|e| e.to_string())?;
    let (h, h_undefined) = match sys.h() {
        Ok(h) => (readable(h), Value::Null),
        Err(e) => (Value::Null, json!(e.to_string())),
    };
    let out = json!({
        "params": params_json(&p),
        "n": sys.n(),
        "size": sys.size(),
        "conductor": sys.conductor(),
        "delta0": sys.delta0.to_string(),
        "generators": sys.generators.iter().map(readable).collect::<Vec<_>>(),
        "H": h,
        "H_undefined": h_undefined,
    });
    Ok(serde_json::to_string_pretty(&out).expect("serializable"))
}

pub fn classify_json(a: &str, b: &str, c: &str, assume_infinite: bool) -> Result<String, String> {
    let hint = if assume_infinite { FinitenessHint::InfiniteAssumed } else { FinitenessHint::None };
    let report = classify(&params(a, b, c)?, hint);
    Ok(serde_json::to_string_pretty(&report.to_json()).expect("serializable"))
}

/// Series value, plus the torus integral when every `c_k` is a positive integer and `x` is small enough.
pub fn eval_json(a: &str, b: &str, c: &str, x: &str) -> Result<String, String> {
    let exact = params(a, b, c)?;
    let p = FcParams::from(&exact);
    let x: Vec<f64> = x
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a real number")))
        .collect::<Result<_, _>>()?;
    let xs: Vec<_> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let series = fc_series(&p, &xs, &SeriesConfig::default()).map_err(|e| e.to_string())?;
    let contour = fc_contour(&p, &x, &TorusQuadrature::default());
    let mut out = json!({
        "params": params_json(&exact),
        "x": x,
        "series": {"re": series.re, "im": series.im, "terms": series.size},
    });
    match contour {
        Ok(v) => {
            out["contour"] = json!({"re": v.re, "im": v.im, "points": v.size});
            out["difference"] = json!((v.value() - series.value()).norm());
        }
        Err(e) => out["contour_skipped"] = json!(e.to_string()),
    }
    Ok(serde_json::to_string_pretty(&out).expect("serializable"))
}

#[wasm_bindgen]
pub fn generate(a: &str, b: &str, c: &str) -> Result<String, JsValue> {
    generate_json(a, b, c).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = classify)]
pub fn classify_params(a: &str, b: &str, c: &str, assume_infinite: bool) -> Result<String, JsValue> {
    classify_json(a, b, c, assume_infinite).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn evaluate(a: &str, b: &str, c: &str, x: &str) -> Result<String, JsValue> {
    eval_json(a, b, c, x).map_err(|e| JsValue::from_str(&e))
}
