//! Report assembly and JSON encoding.
//!
//! Rationals are encoded as `{"num": "..", "den": ".."}` with decimal
//! strings, floats as strings with 17 significant digits. Object keys are
//! sorted, so output is byte-stable for fixed inputs.

use folhol_core::exactalg::{QMatrix, Rational};
use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

pub fn rat(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn qmatrix(m: &QMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| rats(m.row(i))).collect())
}

pub fn float(x: f64) -> Value {
    Value::String(fmt_float(x))
}

pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| float(*x)).collect())
}

pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| float(m[(i, j)])).collect()))
            .collect(),
    )
}

/// Short human form of a float for the text report.
pub fn short(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn short_matrix(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let cells: Vec<String> = (0..m.ncols()).map(|j| short(m[(i, j)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn point_text(p: &[Rational]) -> String {
    p.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub struct AnalysisResult {
    pub analysis: String,
    pub params: Map<String, Value>,
    pub outcome: std::result::Result<(Value, Vec<String>), String>,
}

pub struct Report {
    pub input: Value,
    pub results: Vec<AnalysisResult>,
    pub tolerances: Map<String, Value>,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.results.iter().any(|r| r.outcome.is_err())
    }

    pub fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let (outcome, data) = match &r.outcome {
                    Ok((data, _)) => ("ok", data.clone()),
                    Err(e) => ("error", json!({ "message": e })),
                };
                json!({
                    "analysis": r.analysis,
                    "params": Value::Object(r.params.clone()),
                    "outcome": outcome,
                    "data": data,
                })
            })
            .collect();
        json!({
            "tool": "folhol",
            "version": env!("CARGO_PKG_VERSION"),
            "input": self.input,
            "results": results,
            "tolerances": Value::Object(self.tolerances.clone()),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = self.input["document"].as_str().unwrap_or("?");
        out.push_str(&format!("folhol {} - {name}\n", env!("CARGO_PKG_VERSION")));
        for r in &self.results {
            let params: Vec<String> = r
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", v.as_str().map(String::from).unwrap_or_else(|| v.to_string())))
                .collect();
            out.push_str(&format!("\n{} {}\n", r.analysis, params.join(" ")));
            match &r.outcome {
                Ok((_, lines)) => {
                    for l in lines {
                        out.push_str(&format!("  {l}\n"));
                    }
                }
                Err(e) => out.push_str(&format!("  error: {e}\n")),
            }
        }
        out
    }
}
