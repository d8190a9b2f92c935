use fusionlab::constructors::affine_a1;
use fusionlab::linalg::{commutant_basis, smith_normal_form};
use fusionlab::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn int(rows: Vec<Vec<i64>>) -> IntMatrix {
    IntMatrix::from_rows(
        rows.into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect(),
    )
    .unwrap()
}

/// gcd of all k×k minors, by brute force over row/column subsets.
fn minor_gcd(m: &IntMatrix, k: usize) -> BigInt {
    let n = m.rows();
    let subsets: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|i| s >> i & 1 == 1).collect())
        .collect();
    let mut g = BigInt::zero();
    for rs in &subsets {
        for cs in &subsets {
            let sub = IntMatrix::from_fn(k, k, |i, j| m.get(rs[i], cs[j]).clone());
            g = g.gcd(&sub.det().unwrap());
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn smith_form_invariants(n in 1usize..4, entries in prop::collection::vec(-6i64..=6, 9)) {
        let g = IntMatrix::from_fn(n, n, |i, j| BigInt::from(entries[i * 3 + j]));
        prop_assume!(!g.det().unwrap().is_zero());
        let (u, d, v) = smith_normal_form(&g).unwrap();
        prop_assert_eq!(u.matmul(&g).unwrap().matmul(&v).unwrap(), d.clone());
        prop_assert!(d.is_diagonal());
        prop_assert_eq!(u.det().unwrap().abs(), BigInt::from(1));
        prop_assert_eq!(v.det().unwrap().abs(), BigInt::from(1));
        // d₁⋯d_k = gcd of k×k minors
        let mut prod = BigInt::from(1);
        for k in 1..=n {
            prop_assert!(d.get(k - 1, k - 1).is_positive());
            if k > 1 {
                prop_assert!((d.get(k - 1, k - 1) % d.get(k - 2, k - 2)).is_zero());
            }
            prod *= d.get(k - 1, k - 1);
            prop_assert_eq!(&prod, &minor_gcd(&g, k));
        }
    }

    #[test]
    fn kernel_vectors_are_annihilated(entries in prop::collection::vec(-4i64..=4, 12)) {
        let m = RatMatrix::from_fn(3, 4, |i, j| BigRational::from_integer(entries[i * 4 + j].into()));
        let ker = m.kernel();
        prop_assert_eq!(ker.len() + m.rank(), 4);
        for v in ker {
            prop_assert!(m.mul_vec(&v).unwrap().iter().all(Zero::is_zero));
        }
    }
}

#[test]
fn discriminant_of_a2() {
    let (_, d, _) = smith_normal_form(&int(vec![vec![2, -1], vec![-1, 2]])).unwrap();
    assert_eq!(d, int(vec![vec![1, 0], vec![0, 3]]));
}

/// Real dimension of {M real : MS = SM, MT = TM}, from the singular values
/// of the linear system.
fn numeric_commutant_dim(s: &fusionlab::CycloMatrix, t: &fusionlab::CycloMatrix) -> usize {
    let n = s.rows();
    let (s, t) = (s.to_c64(), t.to_c64());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for a in [&s, &t] {
        for i in 0..n {
            for j in 0..n {
                // (MA − AM)_ij = Σ_k M_ik A_kj − A_ik M_kj
                let mut re = vec![0.0; n * n];
                let mut im = vec![0.0; n * n];
                for k in 0..n {
                    re[i * n + k] += a.get(k, j).re;
                    im[i * n + k] += a.get(k, j).im;
                    re[k * n + j] -= a.get(i, k).re;
                    im[k * n + j] -= a.get(i, k).im;
                }
                rows.push(re);
                rows.push(im);
            }
        }
    }
    let m = nalgebra::DMatrix::from_fn(rows.len(), n * n, |i, j| rows[i][j]);
    let sv = m.svd(false, false).singular_values;
    n * n - sv.iter().filter(|&&x| x > 1e-8).count()
}

#[test]
fn commutant_matches_a_numeric_nullity() {
    for k in [1u32, 2, 4, 6, 10] {
        let md = affine_a1(k).unwrap();
        let t = md.t_matrix();
        let basis = commutant_basis(md.s(), &t).unwrap();
        for m in &basis {
            let c = fusionlab::CycloMatrix::from_rational(m);
            assert_eq!(c.matmul(md.s()).unwrap(), md.s().matmul(&c).unwrap());
            assert_eq!(c.matmul(&t).unwrap(), t.matmul(&c).unwrap());
        }
        let flat = RatMatrix::from_fn(basis.len(), md.rank() * md.rank(), |i, j| {
            basis[i].data()[j].clone()
        });
        assert_eq!(flat.rank(), basis.len(), "independent");
        assert_eq!(basis.len(), numeric_commutant_dim(md.s(), &t), "k={k}");
    }
}
