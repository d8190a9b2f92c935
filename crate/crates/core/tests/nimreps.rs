use fusionlab::constructors::{affine_a1, quantum_double, FiniteGroup};
use fusionlab::invariants::{enumerate_invariants, DEFAULT_BUDGET};
use fusionlab::nimreps::{
    canonical_form, fusion_graph, match_invariants, search_nimreps, search_nimreps_with_exponents,
    verify_nimrep, NimRep, SearchOptions,
};
use proptest::prelude::*;

mod common;
use common::{dynkin_a as a, dynkin_d as d, dynkin_e as e, iso, tadpole, Mat};

fn adjacency(rep: &NimRep) -> Mat {
    rep.matrix(1).to_vec()
}

#[test]
fn a1_atlas_pairs_invariants_with_ade_graphs() {
    for (k, expected) in [
        (4u32, vec![a(5), d(4)]),
        (10, vec![a(11), d(7), e(6)]),
        (16, vec![a(17), d(10), e(7)]),
        (28, vec![a(29), d(16), e(8)]),
    ] {
        let md = affine_a1(k).unwrap();
        let inv = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
        assert!(inv.complete);
        let mut reps = Vec::new();
        let mut dims: Vec<usize> = inv.invariants.iter().map(|m| m.trace() as usize).collect();
        dims.sort();
        dims.dedup();
        for dim in dims {
            let s = search_nimreps(&md, dim, &SearchOptions::default()).unwrap();
            assert!(s.complete, "k={k} dim={dim}");
            reps.extend(s.nimreps);
        }
        for r in &reps {
            assert!(verify_nimrep(&md, r).unwrap().is_valid());
        }
        let report = match_invariants(&md, &reps, &inv.invariants, false);
        assert!(report.unmatched_invariants.is_empty(), "k={k}");
        for (i, partners) in report.invariant_partners.iter().enumerate() {
            assert_eq!(partners.len(), 1, "k={k} invariant {i}");
            let g = adjacency(&reps[partners[0]]);
            assert!(expected.iter().any(|x| iso(x, &g)), "k={k}: {g:?}");
        }
        // every expected graph is realised by some matched NIM-rep
        for x in &expected {
            assert!(report
                .invariant_partners
                .iter()
                .any(|p| iso(x, &adjacency(&reps[p[0]]))));
        }
    }
}

#[test]
fn tadpoles_miss_the_top_exponent() {
    for k in [3u32, 5, 7] {
        let md = affine_a1(k).unwrap();
        let dim = (k as usize).div_ceil(2);
        let s = search_nimreps(&md, dim, &SearchOptions::default()).unwrap();
        assert!(s.complete);
        let tads: Vec<_> = s
            .nimreps
            .iter()
            .filter(|r| iso(&adjacency(r), &tadpole(dim)))
            .collect();
        assert_eq!(tads.len(), 1, "k={k}");
        let inv = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
        let report = match_invariants(&md, &s.nimreps, &inv.invariants, false);
        let idx = s.nimreps.iter().position(|r| r == tads[0]).unwrap();
        assert!(
            report.nimreps[idx].missing_mandatory.contains(&(k as usize)),
            "k={k}"
        );
        assert!(report.nimreps[idx].partners.is_empty());
        let strict = search_nimreps(
            &md,
            dim,
            &SearchOptions {
                strict_mandatory: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(strict.nimreps.iter().all(|r| !iso(&adjacency(r), &tadpole(dim))));
        assert!(strict.dropped_mandatory >= 1);
    }
}

#[test]
fn regular_representation_pairs_with_the_diagonal() {
    for k in [2u32, 5, 8] {
        let md = affine_a1(k).unwrap();
        let reg = NimRep::regular(md.fusion().unwrap()).unwrap();
        let rep = verify_nimrep(&md, &reg).unwrap();
        assert!(rep.is_valid());
        assert_eq!(rep.exponents, Some((0..=k as usize).collect()));
        let inv = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
        let report = match_invariants(&md, &[reg], &inv.invariants, false);
        let diag = inv
            .invariants
            .iter()
            .position(|m| {
                m.trace() == k as i64 + 1 && m.is_permutation() && (0..=k as usize).all(|a| m.get(a, a) == 1)
            })
            .unwrap();
        assert_eq!(report.invariant_partners[diag], vec![0]);
    }
}

#[test]
fn s3_double_has_invariants_without_nimreps() {
    let md = quantum_double(&FiniteGroup::symmetric(3)).unwrap();
    let inv = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
    let s = search_nimreps(&md, 2, &SearchOptions::default()).unwrap();
    assert!(s.complete);
    let trace_two: Vec<_> = inv
        .invariants
        .iter()
        .filter(|m| m.trace() == 2)
        .cloned()
        .collect();
    let report = match_invariants(&md, &s.nimreps, &trace_two, false);
    let unmatched: Vec<Vec<usize>> = report
        .unmatched_invariants
        .iter()
        .map(|&i| trace_two[i].exponents())
        .collect();
    assert!(unmatched.contains(&vec![0, 2]), "{unmatched:?}");
    assert!(unmatched.contains(&vec![0, 3]), "{unmatched:?}");
    for ex in [[0usize, 2], [0, 3]] {
        let t = search_nimreps_with_exponents(&md, &ex, &SearchOptions::default()).unwrap();
        assert!(t.complete && t.nimreps.is_empty(), "{ex:?}");
    }
}

#[test]
fn dot_output_is_deterministic() {
    let md = affine_a1(10).unwrap();
    let s = search_nimreps(&md, 6, &SearchOptions::default()).unwrap();
    let e6 = s.nimreps.iter().find(|r| iso(&adjacency(r), &e(6))).unwrap();
    let dot = fusion_graph(e6, 1).to_dot("E6");
    assert_eq!(dot, fusion_graph(e6, 1).to_dot("E6"));
    assert_eq!(dot.matches("dir=none").count(), 5);
    let again = search_nimreps(&md, 6, &SearchOptions::default()).unwrap();
    assert_eq!(again.nimreps, s.nimreps);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonical_form_ignores_relabelling(seed in any::<u64>(), k in 4u32..=8) {
        let md = affine_a1(k).unwrap();
        let reg = NimRep::regular(md.fusion().unwrap()).unwrap();
        let n = reg.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (x >> 33) as usize % (i + 1));
        }
        let p = reg.permuted(&perm);
        prop_assert_eq!(canonical_form(&reg.matrices).1, canonical_form(&p.matrices).1);
        prop_assert!(verify_nimrep(&md, &p).unwrap().is_valid());
    }
}
