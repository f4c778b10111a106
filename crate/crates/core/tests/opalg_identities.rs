use std::collections::BTreeMap;
use std::time::Instant;

use cobord_core::gdpr::{GdprVar, Side};
use cobord_core::opalg::{
    apply_g, apply_g_standard, verify_full_identity, verify_step_identity, OpalgError, OperatorExpr,
    RelationSystem, Sampling,
};
use cobord_core::{CoeffRing, Polynomial, VarSymbol};
use proptest::prelude::*;

#[test]
fn step_identity_up_to_eight() {
    let start = Instant::now();
    let s = Sampling::new(42);
    for n in 2..=8 {
        let r = verify_step_identity(n, &s).unwrap();
        assert!(r.pass, "step n={n}");
        assert_eq!(r.trials, 20);
    }
    eprintln!("step suite {:?}", start.elapsed());
}

#[test]
fn full_identity_up_to_five() {
    let start = Instant::now();
    let s = Sampling::new(42);
    for n in 1..=5 {
        for m in 1..=5 {
            let r = verify_full_identity(n, m, &s).unwrap();
            assert!(r.pass, "full ({n},{m})");
        }
    }
    eprintln!("full suite {:?}", start.elapsed());
}

#[test]
fn reports_are_reproducible() {
    let a = verify_full_identity(3, 2, &Sampling::new(9)).unwrap();
    let b = verify_full_identity(3, 2, &Sampling::new(9)).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.degree_bound > 0);
}

#[test]
fn false_conclusion_fails_under_sampling() {
    // cC is pinned to cA[1] + cA[2], so cC - cA[1] is not implied
    let z = CoeffRing::integers();
    let v = |s: &str| Polynomial::var(z.clone(), &s.parse::<VarSymbol>().unwrap());
    let system = RelationSystem {
        relations: vec![(VarSymbol::plain("cC"), v("cA[1]") + v("cA[2]") - v("cC"))],
        sampling: Sampling::new(42),
    };
    let (pass, _) = system.verify(&(v("cC") - v("cA[1]"))).unwrap();
    assert!(!pass);
    let bad = RelationSystem {
        relations: vec![(VarSymbol::plain("cC"), v("cB") - v("cC"))],
        sampling: Sampling::new(42),
    };
    assert!(bad.verify(&v("cC")).is_ok());
    let unresolved = RelationSystem {
        relations: vec![(VarSymbol::plain("cC"), v("cB") * v("cC") - v("cD")), (VarSymbol::plain("cD"), v("cD"))],
        sampling: Sampling::new(42),
    };
    assert!(matches!(unresolved.verify(&v("cC")), Err(OpalgError::Unresolved { .. })));
}

fn gdpr_var() -> impl Strategy<Value = GdprVar> {
    prop_oneof![
        (1u32..4).prop_map(GdprVar::X),
        (1u32..4).prop_map(GdprVar::Y),
        (1u32..4, 1u32..4).prop_map(|(p, k)| GdprVar::U(p, k)),
        (1u32..4, 1u32..4).prop_map(|(p, k)| GdprVar::V(p, k)),
    ]
}

fn gdpr_poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((-5i64..=5, prop::collection::vec(gdpr_var(), 0..3)), 0..4).prop_map(|terms| {
        let z = CoeffRing::integers();
        terms.into_iter().fold(Polynomial::zero(z.clone()), |acc, (c, vars)| {
            let mono = vars.iter().fold(Polynomial::integer(z.clone(), c), |m, v| m * v.poly());
            acc + mono
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn apply_g_is_multiplicative(s in gdpr_poly(), t in gdpr_poly()) {
        let st = apply_g_standard(&(&s * &t)).unwrap();
        let prod = apply_g_standard(&s).unwrap().into_poly() * apply_g_standard(&t).unwrap().into_poly();
        prop_assert_eq!(st.into_poly(), prod);
    }

    #[test]
    fn apply_g_is_additive(s in gdpr_poly(), t in gdpr_poly()) {
        let sum = apply_g_standard(&(&s + &t)).unwrap().into_poly();
        let parts = apply_g_standard(&s).unwrap().into_poly() + apply_g_standard(&t).unwrap().into_poly();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn operator_products_commute(s in gdpr_poly(), t in gdpr_poly()) {
        let a = apply_g_standard(&s).unwrap().into_poly();
        let b = apply_g_standard(&t).unwrap().into_poly();
        prop_assert_eq!(&a * &b, &b * &a);
    }
}

#[test]
fn custom_images_follow_the_homomorphism() {
    let z = CoeffRing::integers();
    let images: BTreeMap<_, _> = [
        (GdprVar::X(1), OperatorExpr::integer(3)),
        (GdprVar::U(1, 1), OperatorExpr::symbol(&VarSymbol::plain("t"))),
    ]
    .into();
    let g = GdprVar::X(1).poly() * GdprVar::X(1).poly() * GdprVar::U(1, 1).poly() + GdprVar::X(1).poly();
    let expected = Polynomial::var(z.clone(), &VarSymbol::plain("t")).scale_int(9) + Polynomial::integer(z, 3);
    assert_eq!(apply_g(&g, &images).unwrap().into_poly(), expected);
    assert_eq!(GdprVar::divisor(Side::Y, 2), GdprVar::Y(2));
}
