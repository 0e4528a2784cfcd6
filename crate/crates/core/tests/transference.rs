use dioph_core::certified::{CertifiedScalar, Dyadic};
use dioph_core::transference::{
    evaluate_inequalities, mm_poly_f, mm_poly_g, mm_root_lin, mm_root_sim, ordering_branch, parse_tuple, Branch,
    Provenance, TupleError, Verdict,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn bracket(s: &CertifiedScalar) -> (BigRational, BigRational) {
    let iv = s.interval_at(128).unwrap();
    (iv.lo().to_rational(), iv.hi().to_rational())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // the certified root is the largest real root, checked by Sturm counts
    #[test]
    fn lin_root_is_largest(n in 2u32..6, num in 0i64..4000) {
        let omega_hat = rat(n as i64 * 1000 + num, 1000);
        let r = mm_root_lin(&CertifiedScalar::from_rational(omega_hat.clone()), n, 128).unwrap();
        let f = mm_poly_f(&omega_hat, n);
        let (lo, hi) = bracket(&r);
        prop_assert_eq!(f.count_roots(&hi, &(&omega_hat + rat(10, 1))), 0);
        prop_assert!(f.count_roots(&(&lo - rat(1, 1 << 20)), &hi) >= 1);
    }

    #[test]
    fn sim_root_is_largest(n in 2u32..6, num in 0i64..1000) {
        let lambda_hat = rat(1000 + num * (n as i64 - 1), 1000 * n as i64);
        prop_assume!(lambda_hat < rat(1, 1));
        let r = mm_root_sim(&CertifiedScalar::from_rational(lambda_hat.clone()), n, 128).unwrap();
        let g = mm_poly_g(&lambda_hat, n);
        let (lo, hi) = bracket(&r);
        let far = (rat(1, 1) - &lambda_hat).recip() + rat(10, 1);
        prop_assert_eq!(g.count_roots(&hi, &far), 0);
        prop_assert!(g.count_roots(&(&lo - rat(1, 1 << 20)), &hi) >= 1);
    }

    // n = 2 tuples on the identity curve never violate it
    #[test]
    fn jarnik_curve(k in 1i64..500) {
        let omega_hat = rat(2000 + k * 7, 1000);
        let lambda_hat = rat(1, 1) - omega_hat.recip();
        let s = |r: &BigRational| format!("{}/{}", r.numer(), r.denom());
        let tuple = format!("2:{},{},inf,{}", s(&lambda_hat), s(&lambda_hat), s(&omega_hat));
        let t = parse_tuple(&tuple, Provenance::ExactInput).unwrap();
        let rep = evaluate_inequalities(&t, 128);
        prop_assert_eq!(rep.entry("jarnik_identity").unwrap().verdict, Verdict::Holds);
    }
}

#[test]
fn badly_approximable_tuple() {
    let t = parse_tuple("2:1/2,1/2,2,2", Provenance::ExactInput).unwrap();
    let rep = evaluate_inequalities(&t, 128);
    assert!(!rep.has_errors());
    assert!(rep.entries.iter().all(|e| matches!(e.verdict, Verdict::Holds | Verdict::NotApplicable)));
    assert_eq!(ordering_branch(&t, 128), Branch::AllEqual);
    assert_eq!(mm_root_lin(&t.omega_hat, 2, 128).unwrap().exact(), Some(&rat(1, 1)));
}

#[test]
fn trivial_relations_reject_exact_tuples() {
    assert!(matches!(parse_tuple("2:0.4,0.5,2,2", Provenance::ExactInput), Err(TupleError::TrivialRelation(_))));
    assert!(parse_tuple("2:0.4,0.5,2,2", Provenance::Estimated).is_ok());
    assert_eq!(parse_tuple("1:1,1,1,1", Provenance::ExactInput).unwrap_err(), TupleError::DimensionTooSmall);
    assert!(matches!(parse_tuple("2:1,1,1", Provenance::ExactInput), Err(TupleError::Parse(_))));
}

#[test]
fn dyadic_rational_round_trip() {
    let d = Dyadic::new(12345.into(), -7);
    assert_eq!(d.to_rational(), rat(12345, 128));
}
