use fusionlab::constructors::{affine_a1, affine_ar, quantum_double, FiniteGroup};
use fusionlab::invariants::{
    enumerate_invariants, permutation_check, simple_current_invariant, trace_identity, verify_mi,
    ModularInvariant, PermutationCheck, DEFAULT_BUDGET,
};
use proptest::prelude::*;

mod common;
use common::{d_series, diag, exceptional, sorted};

#[test]
fn a1_invariants_are_the_ade_list() {
    for k in 1..=20u32 {
        let md = affine_a1(k).unwrap();
        let e = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
        assert!(e.complete, "k={k}");
        let got: Vec<_> = e.invariants.iter().map(|m| m.rows().to_vec()).collect();
        assert_eq!(sorted(got), common::a1_list(k), "k={k}");
    }
}

#[test]
fn e8_invariant_at_level_28() {
    let md = affine_a1(28).unwrap();
    let e = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
    assert!(e.complete);
    let got: Vec<_> = e.invariants.iter().map(|m| m.rows().to_vec()).collect();
    assert_eq!(sorted(got), sorted(vec![diag(28), d_series(28), exceptional(28)]));
}

#[test]
fn hand_written_matrices_verify() {
    for k in [10u32, 16, 28] {
        let md = affine_a1(k).unwrap();
        let r = verify_mi(&md, &exceptional(k)).unwrap();
        assert!(r.is_consistent(), "k={k}: {r:?}");
        let mut bad = exceptional(k);
        bad[1][1] += 1;
        assert!(!verify_mi(&md, &bad).unwrap().is_invariant());
    }
}

#[test]
fn simple_current_gives_d_series_for_even_level() {
    for k in 1..=24u32 {
        let md = affine_a1(k).unwrap();
        let sc = simple_current_invariant(&md, k as usize).unwrap();
        if k % 2 == 0 {
            assert_eq!(
                sc.invariant().map(|m| m.rows().to_vec()),
                Some(d_series(k)),
                "k={k}"
            );
            assert_eq!(sc.is_permutation, k % 4 == 2);
        } else {
            assert!(sc.invariant().is_none(), "k={k}");
        }
    }
}

#[test]
fn permutation_invariants_are_flagged() {
    let d = ModularInvariant::new_unchecked(d_series(6));
    assert_eq!(permutation_check(&d), PermutationCheck::Permutation);
    let d = ModularInvariant::new_unchecked(d_series(8));
    assert_eq!(permutation_check(&d), PermutationCheck::NotApplicable);
}

#[test]
fn a2_level_three_has_known_count() {
    // diagonal, charge conjugation and the Z3 extension, which is already
    // conjugation-symmetric at this level
    let md = affine_ar(2, 3).unwrap();
    let e = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
    assert!(e.complete);
    assert_eq!(e.invariants.len(), 3);
    let perms = e.invariants.iter().filter(|m| m.is_permutation()).count();
    assert_eq!(perms, 2);
    let ext = e.invariants.iter().find(|m| !m.is_permutation()).unwrap();
    assert_eq!(ext.rows().iter().flatten().max(), Some(&3));
    assert_eq!(ext.trace(), 6);
    for m in &e.invariants {
        assert!(verify_mi(&md, m.rows()).unwrap().is_consistent());
    }
}

#[test]
fn s3_double_has_48_invariants() {
    let md = quantum_double(&FiniteGroup::symmetric(3)).unwrap();
    let e = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
    assert!(e.complete);
    assert_eq!(e.invariants.len(), 48);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumerated_invariants_obey_every_rule(k in 1u32..=18) {
        let md = affine_a1(k).unwrap();
        let e = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
        for m in &e.invariants {
            let r = verify_mi(&md, m.rows()).unwrap();
            prop_assert!(r.is_consistent(), "k={} {:?}", k, r);
            for t in trace_identity(&md, m).unwrap() {
                prop_assert!(t.equal && t.trace >= 0, "k={} {:?}", k, t);
            }
        }
    }

    #[test]
    fn perturbed_invariants_fail(k in 2u32..=12, a in 0usize..13, b in 0usize..13) {
        let (a, b) = (a % (k as usize + 1), b % (k as usize + 1));
        let mut m = diag(k);
        m[a][b] += 1;
        prop_assert!(!verify_mi(&md_for(k), &m).unwrap().is_invariant());
    }
}

fn md_for(k: u32) -> fusionlab::modular_data::ModularData {
    affine_a1(k).unwrap()
}
