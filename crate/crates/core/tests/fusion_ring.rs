use fusionlab::constructors::*;
use fusionlab::fusion_ring::*;
use fusionlab::modular_data::ModularData;
use fusionlab::{Cyclo, CycloMatrix, IntMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

/// Verlinde's formula, written out directly.
fn verlinde(s: &CycloMatrix, a: usize, b: usize, c: usize) -> Cyclo {
    (0..s.rows())
        .map(|d| &(&(s.get(a, d) * s.get(b, d)) * &s.get(c, d).conj()) * &s.get(0, d).inv().unwrap())
        .sum()
}

fn zoo(pick: u32) -> ModularData {
    match pick % 6 {
        0 => affine_a1(1 + pick % 9).unwrap(),
        1 => affine_ar(2, 1 + pick % 2).unwrap(),
        2 => quantum_double(&FiniteGroup::cyclic(2 + (pick % 3) as usize)).unwrap(),
        3 => quantum_double(&FiniteGroup::symmetric(3)).unwrap(),
        4 => {
            lattice_data(&IntMatrix::from_rows(vec![vec![BigInt::from(2 * (1 + pick as i64 % 5))]]).unwrap())
                .unwrap()
        }
        _ => lattice_data(&root_lattice_a(2)).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reconstruction_round_trip(pick in 0u32..60) {
        let md = zoo(pick);
        let ring = md.fusion().unwrap();
        prop_assert!(verify_fusion_axioms(ring).passes());
        let rec = reconstruct_s(ring).unwrap();
        let s = rec.exact().expect("cyclotomic eigenvalues");
        let r = ring.rank();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    prop_assert_eq!(verlinde(s, a, b, c), Cyclo::from_rational(ring.n(a, b, c)));
                }
            }
        }
        // the reconstructed S is the original up to a permutation of columns
        let orig = md.s();
        for j in 0..r {
            let col: Vec<&Cyclo> = (0..r).map(|a| s.get(a, j)).collect();
            prop_assert!((0..r).any(|k| (0..r).all(|a| orig.get(a, k) == col[a])), "column {}", j);
        }
    }
}

#[test]
fn fusion_axioms_catch_broken_rings() {
    let ring = affine_a1(3).unwrap().fusion().unwrap().clone();
    assert!(verify_fusion_axioms(&ring).passes());
    let mut n = ring.tensor().to_vec();
    let r = ring.rank();
    // break associativity: 1×1 = 0 + 2 + 3
    n[(r + 1) * r + 3] = BigRational::from_integer(1.into());
    let bad = FusionRing::new_unchecked(ring.labels().to_vec(), 0, n);
    assert!(!verify_fusion_axioms(&bad).passes());
}

#[test]
fn rank_two_family_thresholds() {
    let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
    let zero = rank2_family(&q(0, 1)).unwrap();
    assert!(zero.t_exists && zero.finite_order_t);
    let one = rank2_family(&q(1, 1)).unwrap();
    assert!(one.t_exists && one.finite_order_t);
    let edge = rank2_family(&q(115, 100)).unwrap();
    assert!(edge.t_exists && !edge.finite_order_t, "1.15² < 4/3");
    let past = rank2_family(&q(116, 100)).unwrap();
    assert!(!past.t_exists, "1.16² > 4/3");
    assert!(rank2_family(&q(-1, 1)).is_err());
}

#[test]
fn json_round_trip() {
    let ring = quantum_double(&FiniteGroup::symmetric(3))
        .unwrap()
        .fusion()
        .unwrap()
        .clone();
    let j = serde_json::to_string(&ring.to_json()).unwrap();
    let back = FusionRing::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
    assert_eq!(back.tensor(), ring.tensor());
    assert_eq!(serde_json::to_string(&back.to_json()).unwrap(), j);
}

#[test]
fn a1_rings_are_self_dual() {
    for k in 1..=6 {
        let ring = affine_a1(k).unwrap().fusion().unwrap().clone();
        assert!(is_self_dual(&ring).unwrap().is_some(), "k={k}");
    }
}
