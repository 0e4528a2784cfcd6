//! Browser bindings. Each export returns a JSON string; the page in `web/`
//! renders it. The plain functions are what the tests call natively.

use dioph_core::certified::ThetaSpec;
use dioph_core::corpus::{self, CORPUS};
use dioph_core::cylinder::{pipeline_witness, CaseTag};
use dioph_core::geometry::LineFrame;
use dioph_core::records::{enumerate_lin, enumerate_sim, estimate_exponents, plot_points, RecordKind, RecordList};
use dioph_core::svg::{records_svg, CylinderFigure};
use dioph_core::transference::{evaluate_inequalities, parse_tuple, Provenance};
use serde_json::json;
use wasm_bindgen::prelude::*;

const PRECISION: u32 = 128;
/// Kept small: the page runs on the main thread.
const BUDGET: u64 = 20_000_000;
const MAX_SIM_T: u64 = 1_000_000;

fn theta(s: &str) -> Result<ThetaSpec, String> {
    corpus::resolve(s.trim()).map_err(|e| e.to_string())
}

fn enumerate(th: &ThetaSpec, kind: &str, t: u64) -> Result<RecordList, String> {
    let kind: RecordKind = kind.parse()?;
    if t == 0 {
        return Err("T must be positive".into());
    }
    match kind {
        RecordKind::Sim if t > MAX_SIM_T => Err(format!("T is capped at {MAX_SIM_T} in the browser")),
        RecordKind::Sim => enumerate_sim(th, t, PRECISION).map_err(|e| e.to_string()),
        RecordKind::Lin => enumerate_lin(th, t, PRECISION, BUDGET).map_err(|e| e.to_string()),
    }
}

/// Records, exponent estimates and a log-log figure.
pub fn records_report(theta_s: &str, kind: &str, t: u64) -> Result<String, String> {
    let th = theta(theta_s)?;
    let list = enumerate(&th, kind, t)?;
    let est = estimate_exponents(&list, 0.5).ok().map(|e| e.to_json(PRECISION));
    let svg = records_svg(&plot_points(&list), &format!("{} records of {}", list.kind, th));
    Ok(json!({"records": list.to_json(), "exponents": est, "svg": svg}).to_string())
}

/// The empty-cylinder pipeline for one record, with its figure.
pub fn cylinder_report(theta_s: &str, kind: &str, t: u64, index: usize) -> Result<String, String> {
    let th = theta(theta_s)?;
    let list = enumerate(&th, kind, t)?;
    let rec = list.records.get(index).ok_or_else(|| format!("only {} records below T = {t}", list.records.len()))?;
    let case = match list.kind {
        RecordKind::Sim => CaseTag::Case1,
        RecordKind::Lin => CaseTag::Case2,
    };
    let frame = LineFrame::new(&th);
    let w = pipeline_witness(&frame, index, &rec.x, case, PRECISION, BUDGET, false).map_err(|e| e.to_string())?;
    let svg = CylinderFigure::from_witness(&frame, &w, PRECISION).map_err(|e| e.to_string())?.to_svg();
    Ok(json!({"witness": w.to_json(PRECISION), "svg": svg}).to_string())
}

/// Transference verdicts for `n:λ,λ̂,ω,ω̂`.
pub fn transfer_report(tuple: &str, estimated: bool) -> Result<String, String> {
    let prov = if estimated { Provenance::Estimated } else { Provenance::ExactInput };
    let t = parse_tuple(tuple.trim(), prov).map_err(|e| e.to_string())?;
    Ok(evaluate_inequalities(&t, PRECISION).to_json().to_string())
}

pub fn corpus_names() -> String {
    let v: Vec<_> = CORPUS.iter().map(|e| json!({"name": e.name, "spec": e.spec, "note": e.note})).collect();
    serde_json::Value::Array(v).to_string()
}

#[wasm_bindgen]
pub fn records(theta: &str, kind: &str, t: u32) -> Result<String, JsError> {
    records_report(theta, kind, t as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cylinder(theta: &str, kind: &str, t: u32, index: u32) -> Result<String, JsError> {
    cylinder_report(theta, kind, t as u64, index as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn transfer(tuple: &str, estimated: bool) -> Result<String, JsError> {
    transfer_report(tuple, estimated).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn corpus() -> String {
    corpus_names()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn records_payload() {
        let v = parse(&records_report("sqrt2-sqrt3", "sim", 1000).unwrap());
        assert_eq!(v["records"]["records"][2]["t"], 7);
        assert!(v["svg"].as_str().unwrap().contains("<svg"));
        assert!(records_report("sqrt2", "sim", 0).is_err());
        assert!(records_report("sqrt2", "sim", MAX_SIM_T + 1).is_err());
        assert!(records_report("nope", "sim", 10).is_err());
    }

    #[test]
    fn cylinder_payload() {
        let v = parse(&cylinder_report("sqrt2-sqrt3", "sim", 10_000, 5).unwrap());
        assert_eq!(v["witness"]["lemma"]["verdict"], "CERTIFIED_EMPTY");
        assert!(v["svg"].as_str().unwrap().contains("<svg"));
        assert!(cylinder_report("sqrt2-sqrt3", "sim", 10, 40).is_err());
    }

    #[test]
    fn transfer_payload() {
        let v = parse(&transfer_report("2:0.6,0.6,3,3", false).unwrap());
        let j = v["inequalities"].as_array().unwrap().iter().find(|e| e["name"] == "jarnik_identity").unwrap().clone();
        assert_eq!(j["verdict"], "VIOLATED");
        assert!(transfer_report("2:1", false).is_err());
        assert!(parse(&corpus_names()).as_array().unwrap().len() >= 5);
    }
}
