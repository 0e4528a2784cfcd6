use std::path::Path;

use dioph_core::certified::{CertifiedScalar, ThetaSpec};
use dioph_core::corpus::CORPUS;
use dioph_core::cylinder::{pipeline_witness, ss_pipeline, BruteVerdict, CaseTag, PipelineWitness};
use dioph_core::geometry::LineFrame;
use dioph_core::nesterenko::{
    angle_bound_check, check_entries, delta, dimension_bound, empirical_c3, line, package_evidence, parse_scalar,
    prop4_bounds, EvidenceSequence, NesterenkoError, NesterenkoParams,
};
use dioph_core::records::{enumerate_lin, enumerate_sim, estimate_exponents, lin_candidates, plot_points, RecordKind, RecordList};
use dioph_core::svg::{records_svg, CylinderFigure};
use dioph_core::transference::{evaluate_inequalities, parse_tuple, tuple_from_estimates, InequalityReport, Provenance};

use crate::config::{Format, RunConfig};
use crate::exit::{self, cylinder_code, Failure};

/// What a command produced: the primary payload, an optional figure, the
/// exit code and messages for standard error.
#[derive(Debug, Default)]
pub struct Output {
    pub body: String,
    pub svg: Option<String>,
    pub code: i32,
    pub notes: Vec<String>,
}

impl Output {
    fn json(v: &serde_json::Value) -> Output {
        Output { body: pretty(v), ..Default::default() }
    }

    fn note(mut self, s: impl Into<String>) -> Output {
        self.notes.push(s.into());
        self
    }

    fn code(mut self, c: i32) -> Output {
        self.code = self.code.max(c);
        self
    }
}

pub fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::data(format!("cannot read {}: {e}", path.display())))
}

fn enumerate(theta: &ThetaSpec, kind: RecordKind, t: u64, cfg: &RunConfig) -> Result<RecordList, Failure> {
    if t == 0 {
        return Err(Failure::usage("--T must be at least 1"));
    }
    Ok(match kind {
        RecordKind::Sim => {
            let cost = (t as u128) * theta.n() as u128;
            if cost > cfg.budget as u128 {
                return Err(Failure::new(exit::BUDGET, format!("{cost} evaluations exceed the budget {}", cfg.budget)));
            }
            enumerate_sim(theta, t, cfg.precision)?
        }
        RecordKind::Lin => enumerate_lin(theta, t, cfg.precision, cfg.budget)?,
    })
}

pub fn records(cfg: &RunConfig, kind: RecordKind, t: u64) -> Result<Output, Failure> {
    let theta = cfg.theta()?;
    let list = enumerate(theta, kind, t, cfg)?;
    let body = match cfg.format_or(Format::Csv) {
        Format::Csv => list.to_csv(),
        Format::Json => pretty(&list.to_json()),
    };
    let mut out = Output { body, ..Default::default() };
    if let Some(x) = &list.degenerate {
        out = out.note(format!("exact relation {x}: err = 0, enumeration stopped"));
    }
    if cfg.svg.is_some() {
        out.svg = Some(records_svg(&plot_points(&list), &format!("{} records of {}", kind, theta)));
    }
    Ok(out)
}

fn load_records(path: &Path, theta: &ThetaSpec, cfg: &RunConfig) -> Result<RecordList, Failure> {
    Ok(RecordList::from_csv(&read(path)?, theta, cfg.precision)?)
}

pub fn exponents(cfg: &RunConfig, kind: RecordKind, t: Option<u64>, records: Option<&Path>) -> Result<Output, Failure> {
    let theta = cfg.theta()?;
    let list = match (records, t) {
        (Some(p), _) => load_records(p, theta, cfg)?,
        (None, Some(t)) => enumerate(theta, kind, t, cfg)?,
        (None, None) => return Err(Failure::usage("give --T or --records")),
    };
    let est = estimate_exponents(&list, cfg.tail)?;
    Ok(match cfg.format_or(Format::Json) {
        Format::Json => Output::json(&est.to_json(cfg.precision)),
        Format::Csv => {
            let [rl, rh] = est.regular.bounds_strings(cfg.precision);
            let [ul, uh] = est.uniform.bounds_strings(cfg.precision);
            let body = format!(
                "kind,regular_lo,regular_hi,uniform_lo,uniform_hi,first,last,search_bound\n{},{rl},{rh},{ul},{uh},{},{},{}\n",
                est.kind, est.window.0, est.window.1, est.search_bound
            );
            Output { body, ..Default::default() }
        }
    })
}

pub struct TransferArgs<'a> {
    pub tuple: Option<&'a str>,
    pub provenance: Provenance,
    pub sim_records: Option<&'a Path>,
    pub lin_records: Option<&'a Path>,
    pub t_sim: u64,
    pub t_lin: u64,
}

fn report_output(report: &InequalityReport, cfg: &RunConfig, extra: Option<serde_json::Value>) -> Output {
    let mut out = match cfg.format_or(Format::Json) {
        Format::Json => {
            let mut v = report.to_json();
            if let Some(e) = extra {
                v["estimates"] = e;
            }
            Output::json(&v)
        }
        Format::Csv => {
            let mut body = String::from("name,verdict,slack_lo,slack_hi\n");
            let v = report.to_json();
            for e in v["inequalities"].as_array().into_iter().flatten() {
                let slack = |i: usize| e["slack"].get(i).and_then(|s| s.as_str()).unwrap_or("").to_string();
                let slack = match e["slack"].as_str() {
                    Some(s) => [s.to_string(), s.to_string()],
                    None => [slack(0), slack(1)],
                };
                body.push_str(&format!("{},{},{},{}\n", e["name"].as_str().unwrap_or(""), e["verdict"].as_str().unwrap_or(""), slack[0], slack[1]));
            }
            Output { body, ..Default::default() }
        }
    };
    if report.has_errors() {
        out = out.code(exit::FAILED).note("an exact tuple violates a theorem: impossible input");
    }
    out
}

pub fn transfer(cfg: &RunConfig, a: TransferArgs) -> Result<Output, Failure> {
    if let Some(s) = a.tuple {
        let tuple = parse_tuple(s, a.provenance).map_err(|e| match e {
            dioph_core::transference::TupleError::TrivialRelation(_) => Failure::failed(e.to_string()),
            _ => Failure::usage(e.to_string()),
        })?;
        return Ok(report_output(&evaluate_inequalities(&tuple, cfg.precision), cfg, None));
    }
    let theta = cfg.theta()?;
    let sim = match a.sim_records {
        Some(p) => load_records(p, theta, cfg)?,
        None => enumerate(theta, RecordKind::Sim, a.t_sim, cfg)?,
    };
    let lin = match a.lin_records {
        Some(p) => load_records(p, theta, cfg)?,
        None => enumerate(theta, RecordKind::Lin, a.t_lin, cfg)?,
    };
    if sim.kind != RecordKind::Sim || lin.kind != RecordKind::Lin {
        return Err(Failure::data("--sim-records and --lin-records must hold SIM and LIN records"));
    }
    let es = estimate_exponents(&sim, cfg.tail)?;
    let el = estimate_exponents(&lin, cfg.tail)?;
    let tuple = tuple_from_estimates(&es, &el, theta.n() as u32).map_err(|e| Failure::usage(e.to_string()))?;
    let report = evaluate_inequalities(&tuple, cfg.precision);
    let extra = serde_json::json!({"sim": es.to_json(cfg.precision), "lin": el.to_json(cfg.precision)});
    Ok(report_output(&report, cfg, Some(extra)))
}

/// Records of the case's kind until index `k` exists, growing the bound
/// within the budget.
fn records_through(theta: &ThetaSpec, kind: RecordKind, k: usize, t: Option<u64>, cfg: &RunConfig) -> Result<RecordList, Failure> {
    if let Some(t) = t {
        return enumerate(theta, kind, t, cfg);
    }
    let mut t: u64 = if kind == RecordKind::Sim { 1000 } else { 8 };
    loop {
        let list = enumerate(theta, kind, t, cfg)?;
        if list.records.len() > k || list.degenerate.is_some() {
            return Ok(list);
        }
        let next = if kind == RecordKind::Sim { t * 10 } else { t * 2 };
        let cost = match kind {
            RecordKind::Sim => next as u128 * theta.n() as u128,
            RecordKind::Lin => lin_candidates(theta.n(), next),
        };
        if cost > cfg.budget as u128 {
            return Ok(list);
        }
        t = next;
    }
}

fn brute_code(w: &PipelineWitness) -> i32 {
    match &w.brute {
        Some(Err(e)) => cylinder_code(e),
        _ => exit::OK,
    }
}

fn brute_note(w: &PipelineWitness) -> Option<String> {
    match &w.brute {
        Some(Err(e)) => Some(format!("record {}: brute force: {e}", w.index)),
        Some(Ok(BruteVerdict::Witness(x))) => Some(format!("record {}: integer point {x} found in the cylinder", w.index)),
        _ => None,
    }
}

pub fn cylinder(cfg: &RunConfig, record: usize, case: CaseTag, t: Option<u64>, brute: bool, all: bool) -> Result<Output, Failure> {
    let theta = cfg.theta()?;
    let kind = case.record_kind();
    let p = cfg.precision;
    if all {
        let list = records_through(theta, kind, 0, t, cfg)?;
        let entries = ss_pipeline(&list, p, cfg.budget, brute);
        let mut out = match cfg.format_or(Format::Json) {
            Format::Json => Output::json(&serde_json::Value::Array(entries.iter().map(|e| e.to_json(p)).collect())),
            Format::Csv => {
                let mut body = String::from("index,verdict,t,alpha,beta,beta_vs_alpha,brute\n");
                for e in &entries {
                    let row = match &e.result {
                        Ok(w) => format!(
                            "{},{:?},{},{},{},{:?},{}\n",
                            e.index,
                            w.lemma.verdict,
                            w.t.approx_f64(),
                            w.alpha.approx_f64(),
                            w.beta.approx_f64(),
                            w.beta_vs_alpha,
                            match &w.brute {
                                None => "",
                                Some(Ok(b)) if b.is_empty() => "EMPTY",
                                Some(Ok(_)) => "WITNESS",
                                Some(Err(_)) => "ERROR",
                            }
                        ),
                        Err(err) => format!("{},ERROR,,,,,{}\n", e.index, err.to_string().replace(',', ";")),
                    };
                    body.push_str(&row);
                }
                Output { body, ..Default::default() }
            }
        };
        for e in &entries {
            match &e.result {
                Ok(w) => {
                    if let Some(n) = brute_note(w) {
                        out = out.note(n).code(brute_code(w));
                    }
                }
                Err(err) => out = out.note(format!("record {}: {err}", e.index)).code(cylinder_code(err)),
            }
        }
        return Ok(out);
    }
    let list = records_through(theta, kind, record, t, cfg)?;
    let rec = list.records.get(record).ok_or_else(|| {
        Failure::failed(format!("only {} {} records below T = {}", list.records.len(), kind, list.search_bound))
    })?;
    let frame = LineFrame::new(theta);
    let w = pipeline_witness(&frame, record, &rec.x, case, p, cfg.budget, brute)?;
    let mut out = Output::json(&w.to_json(p));
    if let Some(n) = brute_note(&w) {
        out = out.note(n).code(brute_code(&w));
    }
    if cfg.svg.is_some() {
        out.svg = Some(CylinderFigure::from_witness(&frame, &w, p)?.to_svg());
    }
    Ok(out)
}

fn scalar_arg(s: &str, what: &str) -> Result<CertifiedScalar, Failure> {
    parse_scalar(s).ok_or_else(|| Failure::usage(format!("{what}: cannot parse `{s}`")))
}

pub struct NesterenkoArgs<'a> {
    pub evidence: &'a Path,
    pub d: u32,
    pub prop4: bool,
    pub eps: &'a str,
    pub eps_prime: &'a str,
    pub c3: &'a str,
    pub angle_t: Option<u64>,
}

pub fn nesterenko(cfg: &RunConfig, a: NesterenkoArgs) -> Result<Output, Failure> {
    let p = cfg.precision;
    let text = read(a.evidence)?;
    let json: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::data(format!("{}: {e}", a.evidence.display())))?;
    let ev = EvidenceSequence::from_json(&json, p).map_err(|e| Failure::data(format!("{}: {e}", a.evidence.display())))?;
    let theta = match (&cfg.theta, &ev.theta) {
        (Some(t), _) | (None, Some(t)) => t.clone(),
        (None, None) => return Err(Failure::usage("--theta is required when the evidence carries no theta")),
    };
    let frame = LineFrame::new(&theta);
    let (eps, eps_prime, c3) = (scalar_arg(a.eps, "--eps")?, scalar_arg(a.eps_prime, "--eps-prime")?, scalar_arg(a.c3, "--c3")?);
    let mut code = exit::OK;
    let mut notes = Vec::new();

    let report = check_entries(&frame, &ev, p)?;
    if let Some((k, b)) = report.first_violation() {
        code = code.max(exit::FAILED);
        notes.push(format!("entry {k} violates {b}"));
    }
    let mut v = serde_json::json!({
        "theta": theta.to_string(),
        "alpha": ev.alpha.bounds_strings(p),
        "beta": ev.beta.bounds_strings(p),
        "hypothesis": report.to_json(p),
        "d": a.d,
        "dimension_bound": dimension_bound(&ev.alpha, &ev.beta, p)?.to_json(p),
    });
    let params = NesterenkoParams::new(&ev.alpha, &ev.beta, eps.clone(), eps_prime, c3.clone(), p)
        .map_err(|e| Failure::usage(e.to_string()))?;
    v["params"] = serde_json::json!({
        "eps": params.eps.bounds_strings(p),
        "eps_prime": params.eps_prime.bounds_strings(p),
        "alpha_prime": params.alpha_prime.bounds_strings(p),
        "beta_prime": params.beta_prime.bounds_strings(p),
        "delta_prime": params.delta_prime.bounds_strings(p),
        "c3": params.c3.bounds_strings(p),
    });
    let delta_d = match delta(&ev.alpha, &ev.beta, a.d, p) {
        Ok(d) => {
            v["delta"] = serde_json::json!(d.bounds_strings(p));
            Some(d)
        }
        Err(e @ NesterenkoError::DimensionTooLarge { .. }) => {
            v["delta"] = serde_json::Value::Null;
            v["proviso"] = serde_json::json!(e.to_string());
            notes.push(e.to_string());
            code = code.max(exit::FAILED);
            None
        }
        Err(e) => return Err(e.into()),
    };
    if let (Some(d), Some(t)) = (&delta_d, a.angle_t) {
        let list = enumerate(&theta, RecordKind::Sim, t, cfg)?;
        let dp = (a.d == 1).then_some(&params.delta_prime);
        let mut rows = Vec::new();
        let mut subs = Vec::new();
        for (k, rec) in list.records.iter().enumerate() {
            let l = line(&rec.x)?;
            let c = angle_bound_check(&frame, &l, d, &eps, &c3, dp, p)?;
            let mut row = c.to_json(p);
            row["k"] = serde_json::json!(k);
            row["x"] = serde_json::json!(rec.x);
            rows.push(row);
            subs.push(l);
        }
        v["angles"] = serde_json::Value::Array(rows);
        v["c3_empirical"] = match empirical_c3(&frame, &subs, d, &eps, p)? {
            Some(c) => serde_json::json!(c.bounds_strings(p)),
            None => serde_json::Value::Null,
        };
    }
    if a.prop4 {
        match prop4_bounds(theta.n() as u32, &ev.alpha, &ev.beta, p) {
            Ok(b) => v["prop4"] = b.to_json(p),
            Err(e) => {
                v["prop4"] = match &e {
                    NesterenkoError::ConditionFails { value } => {
                        serde_json::json!({"condition": "FAILS", "condition_value": value})
                    }
                    _ => serde_json::json!({"condition": "PRECONDITION", "message": e.to_string()}),
                };
                notes.push(format!("prop4: {e}"));
                code = code.max(Failure::from(e).code);
            }
        }
    }
    Ok(Output { body: pretty(&v), svg: None, code, notes })
}

pub fn evidence(cfg: &RunConfig, t: u64) -> Result<Output, Failure> {
    let theta = cfg.theta()?;
    let list = enumerate(theta, RecordKind::Lin, t, cfg)?;
    let ev = package_evidence(&list, cfg.precision)?;
    Ok(Output::json(&ev.to_json()))
}

pub fn corpus_list(cfg: &RunConfig) -> Output {
    match cfg.format_or(Format::Json) {
        Format::Json => Output::json(&serde_json::Value::Array(
            CORPUS
                .iter()
                .map(|e| serde_json::json!({"name": e.name, "spec": e.spec, "n": e.theta().n(), "note": e.note}))
                .collect(),
        )),
        Format::Csv => {
            let mut body = String::from("name,spec,n,note\n");
            for e in CORPUS {
                body.push_str(&format!("{},\"{}\",{},\"{}\"\n", e.name, e.spec, e.theta().n(), e.note));
            }
            Output { body, ..Default::default() }
        }
    }
}
