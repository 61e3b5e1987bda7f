//! Browser bindings. Every function returns a JSON string; errors become
//! JavaScript exceptions.

use rootchain::admissibility::{enumerate_admissible_with, is_admissible_with};
use rootchain::analysis::analyze as analyze_poly;
use rootchain::arrangement::{extract_with, parse_arrangement, ExtractOptions, Shape};
use rootchain::config::SolverConfig;
use rootchain::poly::{parse_polynomial, roots_complex, Polynomial};
use rootchain::realizer::{realize as realize_target, RealizeError};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// All complex roots of `p` and of its `s`-th derivative as `[re, im]` pairs.
fn root_cloud(p: &Polynomial, s: u32) -> Value {
    let cloud = |q: &Polynomial| -> Vec<[f64; 2]> {
        roots_complex(&q.to_float()).iter().map(|z| [z.re, z.im]).collect()
    };
    let q = p.derivative(s as usize).expect("s below the degree");
    json!({ "p": cloud(p), "q": cloud(&q) })
}

fn to_js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

pub fn analyze_json(poly: &str, s: u32) -> Result<Value, String> {
    let p = Polynomial::Exact(parse_polynomial(poly).map_err(|e| e.to_string())?);
    let cfg = SolverConfig::default();
    let a = analyze_poly(&p, s, &ExtractOptions::default(), cfg.cond_c).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&a).expect("analysis serializes");
    v["roots"] = root_cloud(&p, s);
    Ok(v)
}

pub fn enumerate_json(n: u32, s: u32, m: u32) -> Result<Value, String> {
    let cfg = SolverConfig::default();
    let all = enumerate_admissible_with(n, s, m, cfg.cond_c).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = all
        .iter()
        .map(|a| json!({ "arrangement": a.to_string(), "m_prime": a.m_prime }))
        .collect();
    Ok(json!({ "n": n, "s": s, "m": m, "count": rows.len(), "rows": rows }))
}

pub fn realize_json(arrangement: &str, shape: Shape, seed: u64) -> Result<Value, String> {
    let target = parse_arrangement(arrangement, &shape).map_err(|e| e.to_string())?;
    if target.rolle_count() < 0 {
        return Err(format!("n - 2m - s = {} is negative", target.rolle_count()));
    }
    let cfg = SolverConfig {
        seed,
        ..SolverConfig::default()
    };
    let report = is_admissible_with(&target, cfg.cond_c);
    if !report.verdict {
        return Ok(json!({ "target": target.to_string(), "status": "inadmissible", "admissibility": report }));
    }
    let r = match realize_target(&target, &cfg) {
        Ok(r) => r,
        Err(RealizeError::MaxRestartsExceeded { best: Some(b), .. }) => *b,
        Err(e) => return Ok(json!({ "target": target.to_string(), "status": "failed", "error": e.to_string() })),
    };
    let opts = ExtractOptions {
        allow_ambiguity: !r.witness.is_exact(),
        ..ExtractOptions::default()
    };
    let reextracted = extract_with(&r.witness, target.s, &opts).ok().map(|e| e.arrangement.to_string());
    let realized = r.success && reextracted.as_deref() == Some(target.to_string().as_str());
    Ok(json!({
        "target": target.to_string(),
        "status": if realized { "realized" } else { "failed" },
        "witness": r.witness.to_string(),
        "witness_decimals": r.witness_decimals(),
        "reextracted": reextracted,
        "residual": r.residual,
        "path": r.path,
        "roots": root_cloud(&r.witness, target.s),
    }))
}

#[wasm_bindgen]
pub fn analyze(poly: &str, s: u32) -> Result<String, JsError> {
    analyze_json(poly, s).map(|v| v.to_string()).map_err(to_js)
}

#[wasm_bindgen]
pub fn enumerate(n: u32, s: u32, m: u32) -> Result<String, JsError> {
    enumerate_json(n, s, m).map(|v| v.to_string()).map_err(to_js)
}

/// Missing shape parameters are inferred from the chain.
#[wasm_bindgen]
pub fn realize(
    arrangement: &str,
    n: Option<u32>,
    s: Option<u32>,
    m: Option<u32>,
    m_prime: Option<u32>,
    seed: u32,
) -> Result<String, JsError> {
    let shape = Shape { n, s, m, m_prime };
    realize_json(arrangement, shape, seed as u64).map(|v| v.to_string()).map_err(to_js)
}
