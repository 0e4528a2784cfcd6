//! Record enumeration against independent oracles: continued fractions for
//! one number, plain floating-point scans for two.

use dioph_core::certified::ThetaSpec;
use dioph_core::records::{enumerate_lin, enumerate_sim, RecordKind};

fn spec(s: &str) -> ThetaSpec {
    s.parse().unwrap()
}

/// Distinct convergent denominators of `sqrt(d)` up to `t`, from the integer
/// recurrence for the periodic expansion.
fn sqrt_denominators(d: u64, t: u64) -> Vec<u64> {
    let a0 = (d as f64).sqrt() as u64;
    let (mut m, mut den, mut a) = (0u64, 1u64, a0);
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut out = vec![1];
    loop {
        m = den * a - m;
        den = (d - m * m) / den;
        a = (a0 + m) / den;
        let next = a * q + q_prev;
        if next > t {
            return out;
        }
        q_prev = q;
        q = next;
        if out.last() != Some(&q) {
            out.push(q);
        }
    }
}

fn fibonacci_to(t: u64) -> Vec<u64> {
    let (mut a, mut b) = (1u64, 2u64);
    let mut out = vec![1];
    while b <= t {
        out.push(b);
        (a, b) = (b, a + b);
    }
    out
}

fn heights(l: &dioph_core::records::RecordList) -> Vec<u64> {
    l.records.iter().map(|r| r.height_t).collect()
}

#[test]
fn one_dimensional_records_are_convergents() {
    for d in [2u64, 3, 5, 7, 13, 19] {
        let want = sqrt_denominators(d, 100_000);
        let th = spec(&format!("sqrt:{d}"));
        assert_eq!(heights(&enumerate_sim(&th, 100_000, 128).unwrap()), want, "SIM sqrt {d}");
        assert_eq!(heights(&enumerate_lin(&th, 3000, 128, 10_000_000).unwrap()), sqrt_denominators(d, 3000), "LIN sqrt {d}");
    }
    let golden = spec("alg:1,-1,-1@[1.6,1.7]");
    assert_eq!(heights(&enumerate_sim(&golden, 50_000, 128).unwrap()), fibonacci_to(50_000));
}

fn f64_scan(kind: RecordKind, th: &[f64], t: u64) -> Vec<u64> {
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    match kind {
        RecordKind::Sim => {
            for q in 1..=t {
                let e = th.iter().map(|a| (q as f64 * a - (q as f64 * a).round()).abs()).fold(0.0, f64::max);
                if e < best {
                    best = e;
                    out.push(q);
                }
            }
        }
        RecordKind::Lin => {
            let (a, b) = (th[0], th[1]);
            for h in 1..=t as i64 {
                let mut shell = f64::INFINITY;
                for x1 in -h..=h {
                    for x2 in -h..=h {
                        if x1.abs().max(x2.abs()) != h {
                            continue;
                        }
                        let s = x1 as f64 * a + x2 as f64 * b;
                        shell = shell.min((s - s.round()).abs());
                    }
                }
                if shell < best {
                    best = shell;
                    out.push(h as u64);
                }
            }
        }
    }
    out
}

#[test]
fn two_dimensional_records_match_float_scan() {
    let cases = [("sqrt:2,sqrt:3", [2f64.sqrt(), 3f64.sqrt()]), ("sqrt:5,sqrt:7", [5f64.sqrt(), 7f64.sqrt()])];
    for (s, th) in cases {
        let th_spec = spec(s);
        assert_eq!(heights(&enumerate_sim(&th_spec, 20_000, 128).unwrap()), f64_scan(RecordKind::Sim, &th, 20_000), "SIM {s}");
        assert_eq!(heights(&enumerate_lin(&th_spec, 60, 128, 10_000_000).unwrap()), f64_scan(RecordKind::Lin, &th, 60), "LIN {s}");
    }
}

#[test]
fn records_strictly_improve() {
    for name in ["sqrt2-sqrt3", "plastic", "cube-roots", "mixed"] {
        let th = dioph_core::corpus::resolve(name).unwrap();
        let l = enumerate_sim(&th, 5000, 128).unwrap();
        for w in l.records.windows(2) {
            assert!(w[0].height_t < w[1].height_t);
            assert!(w[1].err.upper() < w[0].err.lower(), "{name}: errors must separate");
        }
    }
}

#[test]
fn rational_theta_stops_at_relation() {
    let l = enumerate_sim(&spec("rat:1/2,rat:1/3"), 100, 64).unwrap();
    assert_eq!(l.records.last().unwrap().height_t, 6);
    assert!(l.records.last().unwrap().err.is_exact_zero());
}
