//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are still evaluated and still print
//! FAIL; they only stop failing the process. Set `ACCEPTANCE_STRICT=1` to make
//! every failure fatal.

use std::process::Command;
use std::time::{Duration, Instant};

use dioph_core::certified::{certified_compare, max_bits, CertifiedScalar, Comparison, Dyadic};
use dioph_core::corpus;
use dioph_core::cylinder::{ss_pipeline, CaseTag, LemmaVerdict};
use dioph_core::geometry::{project, IntegerVector, LineFrame};
use dioph_core::nesterenko::{delta, dimension_bound, prop4_bounds};
use dioph_core::records::{enumerate_lin, enumerate_sim, estimate_exponents, RecordList};
use dioph_core::transference::{
    evaluate_inequalities, mm_poly_f, mm_poly_g, mm_root_lin, mm_root_sim, ordering_branch, tuple_from_estimates, Branch,
    ExponentTuple, Provenance, Verdict,
};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 100_000_000;
const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn within(elapsed: Duration, limit: Duration) -> (bool, String) {
    (elapsed < limit, format!("{:.2}s of {:.0}s", elapsed.as_secs_f64(), limit.as_secs_f64()))
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> IntegerVector {
    let scale: i64 = [10, 1_000, 1_000_000, 1_000_000_000_000][rng.gen_range(0..4)];
    loop {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect();
        if v.iter().any(|&c| c != 0) {
            return IntegerVector::from_i64(&v);
        }
    }
}

fn pythagoras() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let names = ["sqrt2-sqrt3", "plastic", "cube-roots", "liouville", "golden"];
    let (mut ok, mut total) = (0, 0);
    for name in names {
        let frame = LineFrame::new(&corpus::lookup(name).unwrap().theta());
        for _ in 0..1000 {
            let x = random_vector(&mut rng, frame.n() + 1);
            let p = project(&frame, &x, 128).unwrap();
            let s = p.r.sqr().add(&p.h.sqr()).refine_lossy(128);
            total += 1;
            if s.interval().contains_rational(&BigRational::from_integer(x.norm_sq())) {
                ok += 1;
            }
        }
    }
    let (fast, t) = within(start.elapsed(), Duration::from_secs(10));
    outcome(ok == total && fast, format!("{ok}/{total} enclosures contain |x|^2, {t}"))
}

fn random_rational(rng: &mut ChaCha8Rng, lo: &BigRational, hi: &BigRational) -> BigRational {
    let d = 1i64 << 30;
    let u = q(rng.gen_range(0..=d), d);
    lo + (hi - lo) * u
}

fn abs_le_2_64(a: &CertifiedScalar, b: &CertifiedScalar) -> bool {
    let diff = a.sub(b).abs().refine_lossy(128);
    *diff.upper() <= Dyadic::pow2(-64)
}

fn closed_forms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let one = CertifiedScalar::one();
    let (mut lin_ok, mut sim_ok) = (0, 0);
    for _ in 0..100 {
        let w = CertifiedScalar::from_rational(random_rational(&mut rng, &q(2, 1), &q(50, 1)));
        if mm_root_lin(&w, 2, 128).is_ok_and(|g| abs_le_2_64(&g, &w.sub(&one))) {
            lin_ok += 1;
        }
        let l = CertifiedScalar::from_rational(random_rational(&mut rng, &q(1, 2), &q(99, 100)));
        let expect = l.div(&one.sub(&l)).unwrap();
        if mm_root_sim(&l, 2, 128).is_ok_and(|g| abs_le_2_64(&g, &expect)) {
            sim_ok += 1;
        }
    }
    let (fast, t) = within(start.elapsed(), Duration::from_secs(5));
    outcome(lin_ok == 100 && sim_ok == 100 && fast, format!("G_lin {lin_ok}/100, G_sim {sim_ok}/100 within 2^-64, {t}"))
}

/// Random `(n, ω̂, λ̂)` with `ω̂ >= n` and `1/n <= λ̂ < 1`.
fn admissible(rng: &mut ChaCha8Rng) -> (u32, BigRational, BigRational) {
    let n = rng.gen_range(2..=6u32);
    let nn = BigRational::from_integer(n.into());
    let w = random_rational(rng, &nn, &(&nn * q(10, 1)));
    let l = random_rational(rng, &q(1, n as i64), &q(999, 1000));
    (n, w, l)
}

fn root_deflation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let one = BigRational::one();
    let mut ok = 0;
    for _ in 0..1000 {
        let (n, w, l) = admissible(&mut rng);
        if mm_poly_f(&w, n).eval(&one).is_zero() && mm_poly_g(&l, n).eval(&one).is_zero() {
            ok += 1;
        }
    }
    outcome(ok == 1000, format!("{ok}/1000 with f(1) = g(1) = 0 exactly"))
}

/// Bracket of the largest root of `p` in `[1, hi]`, given `p <= 0` just
/// right of 1 and `p(hi) > 0`.
fn bisect_largest(p: impl Fn(&BigRational) -> BigRational, hi: BigRational, steps: u32) -> (BigRational, BigRational) {
    let mut lo = BigRational::one();
    let mut hi = hi;
    while !p(&hi).is_positive() {
        hi = &hi * q(2, 1);
    }
    for _ in 0..steps {
        let mid = (&lo + &hi) / q(2, 1);
        if p(&mid).is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

fn pow(x: &BigRational, k: u32) -> BigRational {
    (0..k).fold(BigRational::one(), |a, _| a * x)
}

/// Brackets of `G_lin`, `P`, `A`, `G_sim`, and the chain they certify.
fn oracle_branch(n: u32, w: &BigRational, l: &BigRational) -> Option<Branch> {
    let one = BigRational::one();
    let f = mm_poly_f(w, n);
    let g = mm_poly_g(l, n);
    let steps = 70;
    let glin = bisect_largest(|x| f.eval(x), w.clone(), steps);
    let gsim = bisect_largest(|x| g.eval(x), (&one - l).recip(), steps);
    let target = w * l;
    let p = if n == 2 {
        (target.clone(), target)
    } else {
        let mut lo = BigRational::zero();
        let mut hi = &target + &one;
        for _ in 0..steps {
            let mid = (&lo + &hi) / q(2, 1);
            if pow(&mid, n - 1) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    };
    let a = (&one - w.recip()) / (&one - l);
    let a = (a.clone(), a);
    let below = |x: &(BigRational, BigRational), y: &(BigRational, BigRational)| x.1 < y.0;
    if below(&glin, &p) && below(&p, &a) && below(&a, &gsim) {
        Some(Branch::Alt1)
    } else if below(&gsim, &a) && below(&a, &p) && below(&p, &glin) {
        Some(Branch::Alt2)
    } else {
        None
    }
}

fn trichotomy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut decided, mut agree, mut undecided, mut oracle_open) = (0, 0, 0, 0);
    let total = 10_000;
    for _ in 0..total {
        let (n, w, l) = admissible(&mut rng);
        let e = ExponentTuple::new(
            n,
            CertifiedScalar::from_rational(l.clone()),
            CertifiedScalar::from_rational(l.clone()),
            CertifiedScalar::from_rational(w.clone()).into(),
            CertifiedScalar::from_rational(w.clone()),
            Provenance::ExactInput,
        )
        .unwrap();
        let got = ordering_branch(&e, 256);
        if got == Branch::Undecided {
            undecided += 1;
            continue;
        }
        match oracle_branch(n, &w, &l) {
            Some(b) => {
                decided += 1;
                if b == got {
                    agree += 1;
                }
            }
            None => oracle_open += 1,
        }
    }
    let rate = undecided as f64 / total as f64;
    outcome(
        agree == decided && rate < 0.01,
        format!("{agree}/{decided} decided cases agree, UNDECIDED rate {:.2}%, oracle open {oracle_open}", rate * 100.0),
    )
}

/// The first `k` SIM records, growing the bound as needed.
fn first_sim(spec: &str, k: usize) -> RecordList {
    let theta = corpus::resolve(spec).unwrap();
    let mut t = 1000;
    loop {
        let mut list = enumerate_sim(&theta, t, 128).unwrap();
        if list.records.len() >= k {
            list.records.truncate(k);
            return list;
        }
        t *= 10;
    }
}

fn empty_cylinder() -> Outcome {
    let start = Instant::now();
    let list = first_sim("sqrt2-sqrt3", 20);
    let entries = ss_pipeline(&list, 128, BUDGET, true);
    let (mut certified, mut confirmed, mut errors) = (0, 0, Vec::new());
    for e in &entries {
        match &e.result {
            Ok(w) if w.lemma.verdict == LemmaVerdict::CertifiedEmpty => {
                certified += 1;
                if matches!(&w.brute, Some(Ok(b)) if b.is_empty()) {
                    confirmed += 1;
                }
            }
            Ok(_) => {}
            Err(err) => errors.push(format!("record {}: {err}", e.index)),
        }
    }
    let (fast, t) = within(start.elapsed(), Duration::from_secs(300));
    let mut detail = format!("{certified}/20 CERTIFIED_EMPTY, {confirmed} confirmed by brute force, {t}");
    if !errors.is_empty() {
        detail.push_str(&format!("; not evaluated: {}", errors.join("; ")));
    }
    outcome(certified == confirmed && certified >= 10 && fast, detail)
}

fn pipeline_signs() -> Outcome {
    let maxp = max_bits(128);
    let (mut checked, mut bad, mut errors) = (0, Vec::new(), 0);
    for spec in ["sqrt2-sqrt3", "plastic"] {
        let theta = corpus::resolve(spec).unwrap();
        let sim = first_sim(spec, 20);
        let lin = enumerate_lin(&theta, 2000, 128, BUDGET).unwrap();
        for list in [&sim, &lin] {
            for e in ss_pipeline(list, 128, BUDGET, false) {
                let Ok(w) = e.result else {
                    errors += 1;
                    continue;
                };
                checked += 1;
                let ok = match w.case_tag {
                    CaseTag::Case1 => w.beta_vs_alpha == Comparison::Greater && w.ratio_consistent,
                    CaseTag::Case2 => w.beta_vs_alpha == Comparison::Less,
                };
                // the identity once more, independently of the pipeline's flag
                let lhs = w.alpha.mul(&CertifiedScalar::one().add(&w.gamma));
                let rhs = CertifiedScalar::one().add(&w.beta);
                let ident = matches!(certified_compare(&lhs, &rhs, maxp), Comparison::EqualProven | Comparison::Undecided);
                if !ok || (w.case_tag == CaseTag::Case1 && !ident) {
                    bad.push(format!("{spec} {} {}", w.case_tag, w.index));
                }
            }
        }
    }
    let mut detail = format!("{checked} witnesses, {} exceptions", bad.len());
    if errors > 0 {
        detail.push_str(&format!(", {errors} records without a witness (budget)"));
    }
    if !bad.is_empty() {
        detail.push_str(&format!(": {}", bad.join(", ")));
    }
    outcome(bad.is_empty(), detail)
}

fn finite_scale() -> Outcome {
    let theta = corpus::resolve("sqrt2-sqrt3").unwrap();
    let maxp = max_bits(128);
    let sim = enumerate_sim(&theta, 10_000, 128).unwrap();
    let es = estimate_exponents(&sim, 0.5).unwrap();
    let le = |a: &CertifiedScalar, b: &CertifiedScalar| certified_compare(a, b, maxp).is_le();
    let one = CertifiedScalar::one();
    let u_le_r = le(&es.uniform, &es.regular);
    let u_le_1 = le(&es.uniform, &one);
    let reg = es.regular.approx_f64();
    let in_band = le(&CertifiedScalar::from_ratio(40, 100), &es.regular) && le(&es.regular, &CertifiedScalar::from_ratio(62, 100));
    // the largest LIN bound inside the default budget
    let lin = enumerate_lin(&theta, 5000, 128, BUDGET).unwrap();
    let el = estimate_exponents(&lin, 0.5).unwrap();
    let report = evaluate_inequalities(&tuple_from_estimates(&es, &el, 2).unwrap(), 128);
    let floor = CertifiedScalar::from_ratio(-5, 100);
    let worst: Vec<&str> = report
        .entries
        .iter()
        .filter(|e| e.verdict == Verdict::Violated)
        .filter(|e| match e.slack.as_ref().and_then(|s| s.finite()) {
            Some(s) => certified_compare(s, &floor, maxp) != Comparison::Greater,
            None => true,
        })
        .map(|e| e.name)
        .collect();
    let pass = u_le_r && u_le_1 && in_band && worst.is_empty();
    outcome(
        pass,
        format!(
            "regular {reg:.4} (band [0.40, 0.62]: {}), uniform {:.4} (<= regular: {u_le_r}, <= 1: {u_le_1}), window {:?}; \
             LIN T=5000 omega {:.4}, omega_hat {:.4}; violations below -0.05: {}",
            if in_band { "in" } else { "out" },
            es.uniform.approx_f64(),
            es.window,
            el.regular.approx_f64(),
            el.uniform.approx_f64(),
            if worst.is_empty() { "none".to_string() } else { worst.join(", ") }
        ),
    )
}

fn nesterenko_formulas() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let one = BigRational::one();
    let mut delta_ok = 0;
    let mut threshold_ok = 0;
    for _ in 0..100 {
        let a = random_rational(&mut rng, &q(1, 10), &q(10, 1));
        let b = &a + random_rational(&mut rng, &q(0, 1), &q(10, 1));
        let (ca, cb) = (CertifiedScalar::from_rational(a.clone()), CertifiedScalar::from_rational(b.clone()));
        if delta(&ca, &cb, 1, 128).ok().and_then(|d| d.exact().cloned()) == Some((&one + &b) / &a) {
            delta_ok += 1;
        }
        let bound = (&one + &b) / (&one + &b - &a);
        let consistent = (1..=bound.ceil().to_integer().try_into().unwrap_or(1u32) + 1)
            .all(|d| delta(&ca, &cb, d, 128).is_ok() == (BigRational::from_integer(d.into()) < bound));
        let exact_bound = dimension_bound(&ca, &cb, 128).unwrap().bound.exact().cloned() == Some(bound.clone());
        if consistent && exact_bound {
            threshold_ok += 1;
        }
    }
    // integer thresholds: α = β = k gives bound k + 1 exactly, so d = k + 1 is excluded
    let on_integer = (1..=8).all(|k: i64| {
        let ck = CertifiedScalar::from_int(k);
        delta(&ck, &ck, k as u32, 128).is_ok() && delta(&ck, &ck, k as u32 + 1, 128).is_err()
    });
    let two = CertifiedScalar::from_int(2);
    let p4 = prop4_bounds(2, &two, &two, 128).ok();
    let p4_ok = p4.as_ref().is_some_and(|p| {
        certified_compare(&p.condition_value, &CertifiedScalar::one(), 256) == Comparison::Greater
            && abs_le_2_64(&p.omega_upper, &two)
            && abs_le_2_64(&p.delta_refined, &CertifiedScalar::from_int(3))
    });
    let (fast, t) = within(start.elapsed(), Duration::from_secs(1));
    outcome(
        delta_ok == 100 && threshold_ok == 100 && on_integer && p4_ok && fast,
        format!(
            "delta(1) {delta_ok}/100, threshold {threshold_ok}/100, integer thresholds {on_integer}, prop4 (2,2,2) {}, {t}",
            if p4_ok { "HOLDS, omega 2, delta 3" } else { "wrong" }
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dioph"))
        .args(args)
        .env_remove("DIOPH_PRECISION")
        .env_remove("DIOPH_BUDGET")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &["records", "--theta", "sqrt:2,sqrt:3", "--kind", "sim", "--T", "10000"],
        &["records", "--theta", "plastic", "--kind", "lin", "--T", "300", "--format", "json"],
        &["transfer", "--theta", "sqrt:2,sqrt:3", "--T-sim", "10000", "--T-lin", "1000"],
        &["cylinder", "--theta", "sqrt:2,sqrt:3", "--record", "5", "--case", "case1", "--brute"],
    ];
    let mut same = 0;
    for args in runs {
        match (run_cli(args), run_cli(args)) {
            (Ok(a), Ok(b)) if a == b && !a.is_empty() => same += 1,
            (Err(e), _) | (_, Err(e)) => return outcome(false, e),
            _ => {}
        }
    }
    outcome(same == runs.len(), format!("{same}/{} payloads byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "Pythagoras suite", pythagoras),
        (2, "n=2 closed forms", closed_forms),
        (3, "root deflation identity", root_deflation),
        (4, "trichotomy", trichotomy),
        (5, "empty-cylinder cross-oracle", empty_cylinder),
        (6, "pipeline signs", pipeline_signs),
        (7, "finite-scale exponent sanity", finite_scale),
        (8, "Nesterenko formulas", nesterenko_formulas),
        (9, "determinism", determinism),
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut fatal = 0;
    for (id, name, f) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let o = f();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id} {tag}: {name}: {}", o.detail);
        if !o.pass && (strict || !known) {
            fatal += 1;
        }
    }
    if fatal > 0 {
        std::process::exit(1);
    }
}
