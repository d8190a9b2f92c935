use fusionlab::cyclotomic::euler_phi;
use fusionlab::Cyclo;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

/// Independent evaluation: Σ c_k e^{2πik/n} in floating point.
fn eval(n: u32, coeffs: &[i64]) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| Complex64::from_polar(c as f64, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .sum()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-8 * (1.0 + a.norm() + b.norm())
}

fn element() -> impl Strategy<Value = (u32, Vec<i64>)> {
    (1u32..=36).prop_flat_map(|n| (Just(n), prop::collection::vec(-5i64..=5, n as usize)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_operations_match_complex_values((n, a) in element(), (m, b) in element()) {
        let x = Cyclo::from_cyclic_i64(n, &a);
        let y = Cyclo::from_cyclic_i64(m, &b);
        let (ex, ey) = (eval(n, &a), eval(m, &b));
        prop_assert!(close((&x + &y).to_c64(), ex + ey));
        prop_assert!(close((&x * &y).to_c64(), ex * ey));
        prop_assert!(close((&x - &y).to_c64(), ex - ey));
        prop_assert!(close(x.conj().to_c64(), ex.conj()));
    }

    #[test]
    fn field_axioms((n, a) in element(), (m, b) in element(), (l, c) in element()) {
        let x = Cyclo::from_cyclic_i64(n, &a);
        let y = Cyclo::from_cyclic_i64(m, &b);
        let z = Cyclo::from_cyclic_i64(l, &c);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x + &Cyclo::zero(), x.clone());
        prop_assert_eq!(&x * &Cyclo::one(), x.clone());
        if !x.is_zero() {
            let inv = x.inv().unwrap();
            prop_assert!((&x * &inv).is_one());
            prop_assert!(close(inv.to_c64(), eval(n, &a).inv()));
        }
    }

    #[test]
    fn galois_is_a_ring_automorphism((n, a) in element(), (_, b) in element(), ell in 1i64..200) {
        let x = Cyclo::from_cyclic_i64(n, &a);
        let y = Cyclo::from_cyclic_i64(n, &b[..]);
        let big = x.conductor().max(y.conductor()).max(1) as i64;
        prop_assume!(num_integer::gcd(ell, 2 * big * n as i64) == 1);
        let g = |v: &Cyclo| v.galois(ell).unwrap();
        prop_assert_eq!(g(&(&x * &y)), &g(&x) * &g(&y));
        prop_assert_eq!(g(&(&x + &y)), &g(&x) + &g(&y));
        // σ_ℓ acts on ζ_n as ζ_n ↦ ζ_n^ℓ; checked against the float oracle
        let shifted: Vec<i64> = {
            let mut v = vec![0; n as usize];
            for (k, &c) in a.iter().enumerate() {
                v[(k as i64 * ell).rem_euclid(n as i64) as usize] += c;
            }
            v
        };
        prop_assert!(close(g(&x).to_c64(), eval(n, &shifted)));
    }

    #[test]
    fn canonical_form_is_conductor_independent((n, a) in element(), k in 1u32..4) {
        let x = Cyclo::from_cyclic_i64(n, &a);
        let lifted = x.lift(x.conductor().max(1) * k);
        prop_assert_eq!(&lifted, &x);
        prop_assert_eq!(lifted.minimal().conductor(), x.minimal().conductor());
    }

    #[test]
    fn real_sign_agrees_with_floats(p in -40i64..40, q in 1i64..40, r in 1i64..30) {
        // p/q + cos(2π/r), well away from 0 is decided the same way as in f64
        let x = &Cyclo::from_rational(&BigRational::new(p.into(), q.into()))
            + &Cyclo::cos_2pi(&BigRational::new(1.into(), r.into()));
        let f = p as f64 / q as f64 + (2.0 * std::f64::consts::PI / r as f64).cos();
        prop_assume!(f.abs() > 1e-9);
        prop_assert_eq!(x.is_positive_real(), f > 0.0);
    }
}

#[test]
fn roots_of_unity_have_the_right_order() {
    for n in 1..=30u32 {
        let z = Cyclo::zeta(n);
        assert!(z.pow(n as i64).unwrap().is_one());
        for d in 1..n {
            if n % d == 0 {
                assert!(!z.pow(d as i64).unwrap().is_one(), "ζ_{n}^{d}");
            }
        }
        let total: Cyclo = (0..n as i64).map(|k| Cyclo::zeta_pow(n, k)).sum();
        assert_eq!(total.is_zero(), n > 1);
    }
}

#[test]
fn sqrt_of_rationals_squares_back() {
    for (p, q) in [(2, 1), (3, 1), (5, 1), (7, 4), (4, 7), (1, 12), (8, 3)] {
        let v = BigRational::new(p.into(), q.into());
        let s = Cyclo::sqrt_rational(&v).unwrap();
        assert_eq!(&s * &s, Cyclo::from_rational(&v));
        assert!(s.is_positive_real());
    }
}

#[test]
fn phi_matches_counting() {
    for n in 1..=60u32 {
        let count = (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u32;
        assert_eq!(euler_phi(n), count);
    }
}
