//! Exact arithmetic in cyclotomic fields ℚ[ζₙ].
//!
//! An element is stored at a conductor `n` as a polynomial in ζₙ reduced
//! modulo the cyclotomic polynomial Φₙ (so of degree < φ(n)), with integer
//! numerators over one common positive denominator. Coefficients live in
//! machine words while they fit and silently move to big integers when an
//! operation would overflow.
//!
//! Binary operations lift both operands to the lcm of their conductors;
//! conductors are only minimised on request ([`Cyclo::minimal`]) and for
//! serialisation.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, OnceLock, RwLock};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::modp;
use crate::scalar::{Field, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("conductor must be positive")]
    ZeroConductor,
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{ell} is not coprime to the conductor {conductor}")]
    NotCoprime { ell: i64, conductor: u32 },
    #[error("number is not real")]
    NotReal,
    #[error("square root of a negative rational")]
    NegativeRadicand,
    #[error("radicand too large to factor")]
    RadicandTooLarge,
    #[error("zero denominator in a coefficient")]
    ZeroDenominator,
}

pub type Result<T> = std::result::Result<T, CycloError>;

/// Outcome of a certified sign computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RealSign {
    Negative,
    Zero,
    Positive,
}

// ---------------------------------------------------------------------------
// cyclotomic polynomials and small number theory

struct PhiPoly {
    deg: usize,
    /// nonzero coefficients of Φₙ below the leading term
    low: Vec<(usize, i64)>,
}

fn phi_poly(n: u32) -> Arc<PhiPoly> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<PhiPoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&n) {
        return p.clone();
    }
    let coeffs = cyclotomic_polynomial(n);
    let deg = coeffs.len() - 1;
    let low = coeffs[..deg]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    let p = Arc::new(PhiPoly { deg, low });
    cache.write().unwrap().insert(n, p.clone());
    p
}

/// Coefficients of Φₙ, constant term first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n > 0);
    // Φₙ = Π_{d|n} (x^{n/d} − 1)^{μ(d)}
    let mut num: Vec<i128> = vec![1];
    let mut dens = Vec::new();
    for d in divisors(n) {
        match mobius(d) {
            1 => num = mul_xm_minus_one(&num, (n / d) as usize),
            -1 => dens.push((n / d) as usize),
            _ => {}
        }
    }
    for m in dens {
        num = div_xm_minus_one(&num, m);
    }
    num.into_iter().map(|c| c as i64).collect()
}

fn mul_xm_minus_one(p: &[i128], m: usize) -> Vec<i128> {
    let mut out = vec![0; p.len() + m];
    for (i, &c) in p.iter().enumerate() {
        out[i + m] += c;
        out[i] -= c;
    }
    out
}

fn div_xm_minus_one(p: &[i128], m: usize) -> Vec<i128> {
    let mut r = p.to_vec();
    let mut q = vec![0; p.len() - m];
    for i in (m..p.len()).rev() {
        let c = r[i];
        q[i - m] = c;
        r[i] = 0;
        r[i - m] += c;
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mobius(n: u32) -> i32 {
    let f = prime_factors(n as u64);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u32) -> u32 {
    prime_factors(n as u64)
        .iter()
        .fold(n as u64, |acc, &(p, _)| acc / p * (p - 1)) as u32
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

// ---------------------------------------------------------------------------
// coefficient kernels, written once for machine and big integers

mod kernels {
    use super::*;

    pub(super) trait Coef: Clone + PartialEq + fmt::Debug {
        fn zero() -> Self;
        fn from_i64(v: i64) -> Self;
        fn is_zero(&self) -> bool;
        fn is_one(&self) -> bool;
        fn add(&self, o: &Self) -> Option<Self>;
        fn sub(&self, o: &Self) -> Option<Self>;
        fn mul(&self, o: &Self) -> Option<Self>;
        fn mul_i64(&self, k: i64) -> Option<Self>;
        fn gcd(&self, o: &Self) -> Self;
        fn div_exact(&self, o: &Self) -> Self;
    }

    impl Coef for i64 {
        fn zero() -> Self {
            0
        }
        fn from_i64(v: i64) -> Self {
            v
        }
        fn is_zero(&self) -> bool {
            *self == 0
        }
        fn is_one(&self) -> bool {
            *self == 1
        }
        fn add(&self, o: &Self) -> Option<Self> {
            self.checked_add(*o)
        }
        fn sub(&self, o: &Self) -> Option<Self> {
            self.checked_sub(*o)
        }
        fn mul(&self, o: &Self) -> Option<Self> {
            self.checked_mul(*o)
        }
        fn mul_i64(&self, k: i64) -> Option<Self> {
            self.checked_mul(k)
        }
        fn gcd(&self, o: &Self) -> Self {
            Integer::gcd(self, o)
        }
        fn div_exact(&self, o: &Self) -> Self {
            self / o
        }
    }

    impl Coef for BigInt {
        fn zero() -> Self {
            Zero::zero()
        }
        fn from_i64(v: i64) -> Self {
            v.into()
        }
        fn is_zero(&self) -> bool {
            Zero::is_zero(self)
        }
        fn is_one(&self) -> bool {
            One::is_one(self)
        }
        fn add(&self, o: &Self) -> Option<Self> {
            Some(self + o)
        }
        fn sub(&self, o: &Self) -> Option<Self> {
            Some(self - o)
        }
        fn mul(&self, o: &Self) -> Option<Self> {
            Some(self * o)
        }
        fn mul_i64(&self, k: i64) -> Option<Self> {
            Some(self * k)
        }
        fn gcd(&self, o: &Self) -> Self {
            Integer::gcd(self, o)
        }
        fn div_exact(&self, o: &Self) -> Self {
            self / o
        }
    }

    /// Reduce a polynomial in place modulo Φ, leaving exactly `deg` coefficients.
    pub(super) fn reduce_poly<C: Coef>(poly: &mut Vec<C>, phi: &PhiPoly) -> Option<()> {
        let d = phi.deg;
        for i in (d..poly.len()).rev() {
            if poly[i].is_zero() {
                continue;
            }
            let c = poly[i].clone();
            for &(j, a) in &phi.low {
                let t = i - d + j;
                poly[t] = poly[t].sub(&c.mul_i64(a)?)?;
            }
        }
        poly.resize(d, C::zero());
        Some(())
    }

    pub(super) fn normalize<C: Coef>(num: &mut [C], den: &mut C) {
        if num.iter().all(Coef::is_zero) {
            *den = C::from_i64(1);
            return;
        }
        let mut g = den.clone();
        for x in num.iter() {
            if g.is_one() {
                return;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if g.is_one() {
            return;
        }
        for x in num.iter_mut() {
            *x = x.div_exact(&g);
        }
        *den = den.div_exact(&g);
    }

    pub(super) fn mul_kernel<C: Coef>(
        a: &[C],
        da: &C,
        b: &[C],
        db: &C,
        phi: &PhiPoly,
    ) -> Option<(Vec<C>, C)> {
        let mut prod = vec![C::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = prod[i + j].add(&x.mul(y)?)?;
                }
            }
        }
        reduce_poly(&mut prod, phi)?;
        let mut den = da.mul(db)?;
        normalize(&mut prod, &mut den);
        Some((prod, den))
    }

    pub(super) fn add_kernel<C: Coef>(
        a: &[C],
        da: &C,
        b: &[C],
        db: &C,
        negate_b: bool,
    ) -> Option<(Vec<C>, C)> {
        let g = da.gcd(db);
        let fa = db.div_exact(&g);
        let fb = da.div_exact(&g);
        let mut den = da.mul(&fa)?;
        let mut num = Vec::with_capacity(a.len());
        for (x, y) in a.iter().zip(b) {
            let u = x.mul(&fa)?;
            let v = y.mul(&fb)?;
            num.push(if negate_b { u.sub(&v)? } else { u.add(&v)? });
        }
        normalize(&mut num, &mut den);
        Some((num, den))
    }

    /// Send ζₙ^j to ζₘ^{map(j)} and reduce modulo Φₘ.
    pub(super) fn remap_kernel<C: Coef>(
        a: &[C],
        len: usize,
        map: impl Fn(usize) -> usize,
        phi: &PhiPoly,
    ) -> Option<Vec<C>> {
        let mut out = vec![C::zero(); len.max(phi.deg)];
        for (j, x) in a.iter().enumerate() {
            if !x.is_zero() {
                let t = map(j);
                out[t] = out[t].add(x)?;
            }
        }
        reduce_poly(&mut out, phi)?;
        Some(out)
    }
}

use kernels::{add_kernel, mul_kernel, normalize, reduce_poly, remap_kernel};

// ---------------------------------------------------------------------------
// representation

#[derive(Clone, Debug)]
enum Repr {
    Small(Vec<i64>, i64),
    Big(Vec<BigInt>, BigInt),
}

impl Repr {
    fn big(&self) -> Cow<'_, (Vec<BigInt>, BigInt)> {
        match self {
            Repr::Small(n, d) => Cow::Owned((n.iter().map(|&x| x.into()).collect(), (*d).into())),
            Repr::Big(n, d) => Cow::Owned((n.clone(), d.clone())),
        }
    }

    fn from_big(num: Vec<BigInt>, den: BigInt) -> Repr {
        let small: Option<Vec<i64>> = num.iter().map(ToPrimitive::to_i64).collect();
        match (small, den.to_i64()) {
            (Some(n), Some(d)) => Repr::Small(n, d),
            _ => Repr::Big(num, den),
        }
    }

    fn len(&self) -> usize {
        match self {
            Repr::Small(n, _) => n.len(),
            Repr::Big(n, _) => n.len(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Repr::Small(n, _) => n.iter().all(|&x| x == 0),
            Repr::Big(n, _) => n.iter().all(Zero::is_zero),
        }
    }

    fn num_big(&self, i: usize) -> BigInt {
        match self {
            Repr::Small(n, _) => n[i].into(),
            Repr::Big(n, _) => n[i].clone(),
        }
    }

    fn den_big(&self) -> BigInt {
        match self {
            Repr::Small(_, d) => (*d).into(),
            Repr::Big(_, d) => d.clone(),
        }
    }

    fn is_nonzero_at(&self, i: usize) -> bool {
        match self {
            Repr::Small(n, _) => n[i] != 0,
            Repr::Big(n, _) => !n[i].is_zero(),
        }
    }
}

impl PartialEq for Repr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Repr::Small(a, da), Repr::Small(b, db)) => da == db && a == b,
            (Repr::Big(a, da), Repr::Big(b, db)) => da == db && a == b,
            // canonical demotion makes mixed representations distinct values
            _ => false,
        }
    }
}

/// Run a kernel on machine integers, falling back to big integers on
/// overflow.
macro_rules! dispatch {
    (($($r:expr),+), |$($v:ident),+| $body:expr) => {{
        let small = (|| {
            $(let $v = match $r { Repr::Small(n, d) => (n.as_slice(), d), _ => return None };)+
            let out: Option<(Vec<i64>, i64)> = $body;
            out
        })();
        match small {
            Some((n, d)) => Repr::Small(n, d),
            None => {
                $(let $v = $r.big();)+
                $(let $v = (&$v.0[..], &$v.1);)+
                let (n, d): (Vec<BigInt>, BigInt) = $body.expect("big integer kernels never overflow");
                Repr::from_big(n, d)
            }
        }
    }};
}

/// An element of a cyclotomic field.
#[derive(Clone)]
pub struct Cyclo {
    n: u32,
    repr: Repr,
}

impl Cyclo {
    fn from_repr(n: u32, repr: Repr) -> Cyclo {
        debug_assert_eq!(repr.len(), euler_phi(n) as usize);
        Cyclo { n, repr }
    }

    /// Build from coefficients of ζₙ⁰ … ζₙⁿ⁻¹.
    pub fn make(conductor: u32, coeffs: &[BigRational]) -> Result<Cyclo> {
        if conductor == 0 {
            return Err(CycloError::ZeroConductor);
        }
        if coeffs.len() != conductor as usize {
            return Err(CycloError::CoefficientCount {
                expected: conductor as usize,
                got: coeffs.len(),
            });
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num: Vec<BigInt> = coeffs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Ok(Cyclo::from_cyclic(conductor, num, den))
    }

    /// Build from integer coefficients of ζₙ^j, j < n, over a denominator.
    pub fn from_cyclic(n: u32, num: Vec<BigInt>, den: BigInt) -> Cyclo {
        assert!(n > 0 && !den.is_zero());
        let (num, den) = if den.is_negative() {
            (num.into_iter().map(|x| -x).collect(), -den)
        } else {
            (num, den)
        };
        let phi = phi_poly(n);
        let mut folded = vec![BigInt::zero(); (n as usize).max(phi.deg)];
        for (j, x) in num.into_iter().enumerate() {
            folded[j % n as usize] += x;
        }
        reduce_poly(&mut folded, &phi).unwrap();
        let mut den = den;
        normalize(&mut folded, &mut den);
        Cyclo::from_repr(n, Repr::from_big(folded, den))
    }

    /// Integer coefficients of ζₙ^j (indices taken mod n).
    pub fn from_cyclic_i64(n: u32, coeffs: &[i64]) -> Cyclo {
        let phi = phi_poly(n);
        let mut folded = vec![0i64; (n as usize).max(phi.deg)];
        let mut ok = true;
        for (j, &x) in coeffs.iter().enumerate() {
            let t = &mut folded[j % n as usize];
            match t.checked_add(x) {
                Some(v) => *t = v,
                None => ok = false,
            }
        }
        if ok && reduce_poly(&mut folded, &phi).is_some() {
            let mut den = 1;
            normalize(&mut folded, &mut den);
            return Cyclo::from_repr(n, Repr::Small(folded, den));
        }
        Cyclo::from_cyclic(n, coeffs.iter().map(|&x| x.into()).collect(), BigInt::one())
    }

    pub fn zero() -> Cyclo {
        Cyclo::from_repr(1, Repr::Small(vec![0], 1))
    }

    pub fn one() -> Cyclo {
        Cyclo::from_int(1)
    }

    pub fn from_int(v: i64) -> Cyclo {
        Cyclo::from_repr(1, Repr::Small(vec![v], 1))
    }

    pub fn from_rational(q: &BigRational) -> Cyclo {
        Cyclo::from_repr(1, Repr::from_big(vec![q.numer().clone()], q.denom().clone()))
    }

    /// ζₙ = e^{2πi/n}.
    pub fn zeta(n: u32) -> Cyclo {
        Cyclo::zeta_pow(n, 1)
    }

    /// ζₙ^k for any integer k.
    pub fn zeta_pow(n: u32, k: i64) -> Cyclo {
        let mut c = vec![0i64; n as usize];
        c[k.rem_euclid(n as i64) as usize] = 1;
        Cyclo::from_cyclic_i64(n, &c)
    }

    /// e^{2πi·q}.
    pub fn root_of_unity(q: &BigRational) -> Cyclo {
        let den = q.denom().to_u32().expect("root of unity order fits in u32");
        let num = q.numer().mod_floor(q.denom()).to_i64().unwrap();
        Cyclo::zeta_pow(den, num)
    }

    /// cos(2πq).
    pub fn cos_2pi(q: &BigRational) -> Cyclo {
        let z = Cyclo::root_of_unity(q);
        (&z + &z.conj()).scale(&BigRational::new(1.into(), 2.into()))
    }

    /// sin(2πq).
    pub fn sin_2pi(q: &BigRational) -> Cyclo {
        let z = Cyclo::root_of_unity(q);
        let minus_half_i = Cyclo::zeta_pow(4, 3).scale(&BigRational::new(1.into(), 2.into()));
        &(&z - &z.conj()) * &minus_half_i
    }

    /// The nonnegative square root of a nonnegative rational, built from
    /// quadratic Gauss sums.
    pub fn sqrt_rational(q: &BigRational) -> Result<Cyclo> {
        if q.is_negative() {
            return Err(CycloError::NegativeRadicand);
        }
        if q.is_zero() {
            return Ok(Cyclo::zero());
        }
        // √(a/b) = √(ab)/b
        let ab = (q.numer() * q.denom())
            .to_u64()
            .ok_or(CycloError::RadicandTooLarge)?;
        let mut out = Cyclo::from_rational(&BigRational::new(1.into(), q.denom().clone()));
        let mut square_part = 1u64;
        for (p, e) in prime_factors(ab) {
            square_part *= p.pow(e / 2);
            if e % 2 == 1 {
                out = &out * &sqrt_prime(p);
            }
        }
        Ok(out.scale_int(square_part as i64))
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    /// Coefficients of ζₙ⁰ … ζₙⁿ⁻¹ (the canonical ones, zero-padded).
    pub fn coeffs(&self) -> Vec<BigRational> {
        let den = self.repr.den_big();
        (0..self.n as usize)
            .map(|i| {
                if i < self.repr.len() {
                    BigRational::new(self.repr.num_big(i), den.clone())
                } else {
                    BigRational::zero()
                }
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.repr.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.to_rational().is_some_and(|q| q.is_one())
    }

    /// The value as a rational, if it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        if (1..self.repr.len()).any(|i| self.repr.is_nonzero_at(i)) {
            return None;
        }
        Some(BigRational::new(self.repr.num_big(0), self.repr.den_big()))
    }

    pub fn is_rational(&self) -> bool {
        (1..self.repr.len()).all(|i| !self.repr.is_nonzero_at(i))
    }

    /// Same value at conductor `m`, a multiple of the current one.
    pub fn lift(&self, m: u32) -> Cyclo {
        assert!(
            m.is_multiple_of(self.n),
            "conductor {} does not divide {}",
            self.n,
            m
        );
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let phi = phi_poly(m);
        let len = self.repr.len().saturating_sub(1) * step + 1;
        let repr = match &self.repr {
            Repr::Small(a, d) => match remap_kernel(a, len, |j| j * step, &phi) {
                Some(v) => Repr::Small(v, *d),
                None => {
                    let (a, d) = self.repr.big().into_owned();
                    Repr::from_big(remap_kernel(&a, len, |j| j * step, &phi).unwrap(), d)
                }
            },
            Repr::Big(a, d) => Repr::from_big(remap_kernel(a, len, |j| j * step, &phi).unwrap(), d.clone()),
        };
        Cyclo::from_repr(m, repr)
    }

    fn aligned<'a>(&'a self, other: &'a Cyclo) -> (u32, Cow<'a, Cyclo>, Cow<'a, Cyclo>) {
        if self.n == other.n {
            return (self.n, Cow::Borrowed(self), Cow::Borrowed(other));
        }
        let m = lcm(self.n, other.n);
        let a = if self.n == m {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(self.lift(m))
        };
        let b = if other.n == m {
            Cow::Borrowed(other)
        } else {
            Cow::Owned(other.lift(m))
        };
        (m, a, b)
    }

    fn add_sub(&self, other: &Cyclo, negate: bool) -> Cyclo {
        let (m, a, b) = self.aligned(other);
        let repr = dispatch!((&a.repr, &b.repr), |x, y| add_kernel(x.0, x.1, y.0, y.1, negate));
        Cyclo::from_repr(m, repr)
    }

    fn mul_impl(&self, other: &Cyclo) -> Cyclo {
        let (m, a, b) = self.aligned(other);
        let phi = phi_poly(m);
        let repr = dispatch!((&a.repr, &b.repr), |x, y| mul_kernel(x.0, x.1, y.0, y.1, &phi));
        Cyclo::from_repr(m, repr)
    }

    /// Multiply by a rational.
    pub fn scale(&self, q: &BigRational) -> Cyclo {
        let (num, den) = self.repr.big().into_owned();
        let mut num: Vec<BigInt> = num.into_iter().map(|x| x * q.numer()).collect();
        let mut den = den * q.denom();
        normalize(&mut num, &mut den);
        Cyclo::from_repr(self.n, Repr::from_big(num, den))
    }

    pub fn scale_int(&self, k: i64) -> Cyclo {
        if let Repr::Small(a, d) = &self.repr {
            let scaled: Option<Vec<i64>> = a.iter().map(|x| x.checked_mul(k)).collect();
            if let Some(mut v) = scaled {
                let mut d = *d;
                normalize(&mut v, &mut d);
                return Cyclo::from_repr(self.n, Repr::Small(v, d));
            }
        }
        self.scale(&BigRational::from_integer(k.into()))
    }

    /// Image under ζₙ ↦ ζₙ^ℓ.
    pub fn galois(&self, ell: i64) -> Result<Cyclo> {
        let n = self.n as i64;
        if ell.gcd(&n) != 1 {
            return Err(CycloError::NotCoprime {
                ell,
                conductor: self.n,
            });
        }
        Ok(self.galois_unchecked(ell.rem_euclid(n) as usize))
    }

    fn galois_unchecked(&self, ell: usize) -> Cyclo {
        let n = self.n as usize;
        if ell % n.max(1) == 1 % n.max(1) || self.is_rational() {
            return self.clone();
        }
        let phi = phi_poly(self.n);
        let map = |j: usize| (j * ell) % n;
        let repr = match &self.repr {
            Repr::Small(a, d) => match remap_kernel(a, n, map, &phi) {
                Some(v) => Repr::Small(v, *d),
                None => {
                    let (a, d) = self.repr.big().into_owned();
                    Repr::from_big(remap_kernel(&a, n, map, &phi).unwrap(), d)
                }
            },
            Repr::Big(a, d) => Repr::from_big(remap_kernel(a, n, map, &phi).unwrap(), d.clone()),
        };
        Cyclo::from_repr(self.n, repr)
    }

    /// Complex conjugate: ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> Cyclo {
        if self.n <= 2 {
            return self.clone();
        }
        self.galois_unchecked(self.n as usize - 1)
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    pub fn inv(&self) -> Result<Cyclo> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Cyclo::from_rational(&q.recip()));
        }
        if let Some(e) = self.root_of_unity_exponent() {
            return Ok(Cyclo::root_of_unity(&-e));
        }
        Ok(self.inv_modular().unwrap_or_else(|| self.inv_exact()))
    }

    /// x⁻¹ from multiplication-matrix solves modulo several primes, combined
    /// by CRT and rational reconstruction, and checked exactly.
    fn inv_modular(&self) -> Option<Cyclo> {
        let phi = phi_poly(self.n);
        let d = phi.deg;
        let (num, den) = self.repr.big().into_owned();
        let mut acc: Option<(Vec<BigInt>, BigInt)> = None;
        for &p in modp::PRIMES.iter() {
            // columns: x·ζʲ
            let mut col: Vec<u64> = num.iter().map(|c| modp::from_bigint(c, p)).collect();
            let mut mat = vec![vec![0u64; d]; d];
            for j in 0..d {
                for i in 0..d {
                    mat[i][j] = col[i];
                }
                let top = col[d - 1];
                col.rotate_right(1);
                col[0] = 0;
                for &(k, a) in &phi.low {
                    col[k] = modp::sub(col[k], modp::mul(top, modp::from_i64(a, p), p), p);
                }
            }
            let mut rhs = vec![0u64; d];
            rhs[0] = 1;
            let Some(sol) = modp::solve(&mat, &rhs, p) else {
                continue;
            };
            acc = Some(match acc {
                None => (sol.iter().map(|&v| BigInt::from(v)).collect(), BigInt::from(p)),
                Some((r, m)) => {
                    let r = r.iter().zip(&sol).map(|(a, &b)| modp::crt(a, &m, b, p)).collect();
                    (r, m * BigInt::from(p))
                }
            });
            let (r, m) = acc.as_ref().unwrap();
            let rec: Option<Vec<BigRational>> = r.iter().map(|v| modp::rational_reconstruct(v, m)).collect();
            if let Some(coeffs) = rec {
                let mut full = coeffs;
                full.resize(self.n as usize, BigRational::zero());
                let y = Cyclo::make(self.n, &full).ok()?;
                let y = y.scale(&BigRational::from_integer(den.clone()));
                if (&y * self).is_one() {
                    return Some(y);
                }
            }
        }
        None
    }

    fn inv_exact(&self) -> Cyclo {
        let phi = phi_poly(self.n);
        let d = phi.deg;
        let mut cols = Vec::with_capacity(d);
        let mut cur = self.clone();
        let z = Cyclo::zeta(self.n);
        for _ in 0..d {
            cols.push(cur.coeffs());
            cur = &cur * &z;
        }
        let a = crate::linalg::Matrix::from_fn(d, d, |i, j| cols[j][i].clone());
        let mut rhs = vec![BigRational::zero(); d];
        rhs[0] = BigRational::one();
        let sol = a.solve(&rhs).expect("nonzero element has an inverse");
        let mut full = sol;
        full.resize(self.n as usize, BigRational::zero());
        Cyclo::make(self.n, &full).unwrap()
    }

    pub fn pow(&self, e: i64) -> Result<Cyclo> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Cyclo::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// If the number is a root of unity e^{2πiq}, return q in [0, 1).
    pub fn root_of_unity_exponent(&self) -> Option<BigRational> {
        let z = self.to_c64();
        if (z.norm() - 1.0).abs() > 1e-6 {
            return None;
        }
        let order = lcm(self.n, 2) as i64;
        let t = z.arg() / std::f64::consts::TAU;
        let k = (t * order as f64).round() as i64;
        let q = BigRational::new(k.rem_euclid(order).into(), order.into());
        (Cyclo::root_of_unity(&q) == *self).then_some(q)
    }

    /// Same value at the smallest possible conductor (never ≡ 2 mod 4).
    pub fn minimal(&self) -> Cyclo {
        let mut cur = self.clone();
        'outer: loop {
            if cur.n == 1 {
                return cur;
            }
            for (p, _) in prime_factors(cur.n as u64) {
                if let Some(r) = cur.drop_prime(p as u32) {
                    cur = r;
                    continue 'outer;
                }
            }
            return cur;
        }
    }

    /// Express the number at conductor n/p if possible.
    fn drop_prime(&self, p: u32) -> Option<Cyclo> {
        let n = self.n;
        let m = n / p;
        let (num, den) = self.repr.big().into_owned();
        if m.is_multiple_of(p) {
            // x = Σ_r ζₙʳ Y_r(ζₙᵖ); x ∈ ℚ(ζₘ) iff Y_r = 0 for r ≠ 0
            let p = p as usize;
            if num.iter().enumerate().any(|(j, c)| j % p != 0 && !c.is_zero()) {
                return None;
            }
            let reduced: Vec<BigInt> = num.iter().step_by(p).cloned().collect();
            return Some(Cyclo::from_repr(m, Repr::from_big(reduced, den)));
        }
        if p == 2 {
            // ζ_{2m} = −ζₘ^{(m+1)/2}
            let h = m.div_ceil(2) as usize;
            let mut cyc = vec![BigInt::zero(); m as usize];
            for (j, c) in num.iter().enumerate() {
                let t = (j * h) % m as usize;
                if j % 2 == 0 {
                    cyc[t] += c;
                } else {
                    cyc[t] -= c;
                }
            }
            return Some(Cyclo::from_cyclic(m, cyc, den));
        }
        // p ∥ n, p odd: ζₙʲ = ζₘ^a ζₚ^b; ℚ(ζₙ) has basis {ζₚᵇ : 1 ≤ b < p} over ℚ(ζₘ)
        let (pi, mi) = (p as i64, m as i64);
        let m_inv_p = modp_inverse(mi, pi);
        let p_inv_m = if m == 1 { 0 } else { modp_inverse(pi, mi) };
        let mut parts = vec![vec![BigInt::zero(); m as usize]; p as usize];
        for (j, c) in num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = j as i64;
            let b = (j * m_inv_p).rem_euclid(pi) as usize;
            let a = if m == 1 {
                0
            } else {
                (j * p_inv_m).rem_euclid(mi) as usize
            };
            parts[b][a] += c;
        }
        let ys: Vec<Cyclo> = parts
            .into_iter()
            .map(|v| Cyclo::from_cyclic(m, v, BigInt::one()))
            .collect();
        let first = &ys[1] - &ys[0];
        if ys[2..].iter().any(|y| (y - &ys[0]) != first) {
            return None;
        }
        Some((-first).scale(&BigRational::new(1.into(), den)))
    }

    // -- numerics ----------------------------------------------------------

    /// Double-precision value in the embedding ζₙ ↦ e^{2πi/n}.
    pub fn to_c64(&self) -> Complex64 {
        let table = root_table(self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        match &self.repr {
            Repr::Small(a, d) => {
                for (x, z) in a.iter().zip(table.iter()) {
                    if *x != 0 {
                        acc += z * (*x as f64);
                    }
                }
                acc / (*d as f64)
            }
            Repr::Big(a, d) => {
                let scale = BigRational::new(BigInt::one(), d.clone());
                for (x, z) in a.iter().zip(table.iter()) {
                    if !x.is_zero() {
                        let v = (BigRational::from_integer(x.clone()) * &scale)
                            .to_f64()
                            .unwrap_or(f64::NAN);
                        acc += z * v;
                    }
                }
                acc
            }
        }
    }

    /// Real and imaginary parts to `bits` of working precision.
    pub fn to_bigfloat(&self, bits: usize) -> (BigFloat, BigFloat) {
        let (num, den) = self.repr.big().into_owned();
        let mut cc = Consts::new().expect("constant cache");
        let rm = RoundingMode::ToEven;
        let w = bits + 64;
        let (mut re, mut im) = (BigFloat::from_i64(0, w), BigFloat::from_i64(0, w));
        for (j, c) in num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (cs, sn) = root_bigfloat(j as i64, self.n, w, &mut cc);
            let cf = bigint_to_bigfloat(c, w, &mut cc);
            re = re.add(&cf.mul(&cs, w, rm), w, rm);
            im = im.add(&cf.mul(&sn, w, rm), w, rm);
        }
        let df = bigint_to_bigfloat(&den, w, &mut cc);
        (re.div(&df, w, rm), im.div(&df, w, rm))
    }

    /// Certified sign of a real element.
    pub fn real_sign(&self) -> Result<RealSign> {
        if !self.is_real() {
            return Err(CycloError::NotReal);
        }
        if self.is_zero() {
            return Ok(RealSign::Zero);
        }
        let (num, _den) = self.repr.big().into_owned();
        let mass: BigInt = num.iter().map(|c| c.abs()).sum();
        let terms = num.len() as f64;
        // fast path: double precision with a generous rounding bound
        if let Some(mf) = mass.to_f64() {
            let table = root_table(self.n);
            let s: f64 = num
                .iter()
                .zip(table.iter())
                .map(|(c, z)| c.to_f64().unwrap() * z.re)
                .sum();
            let bound = (terms + 64.0) * mf * 1e-15;
            if s.abs() > bound {
                return Ok(if s > 0.0 {
                    RealSign::Positive
                } else {
                    RealSign::Negative
                });
            }
        }
        let mut cc = Consts::new().expect("constant cache");
        let rm = RoundingMode::ToEven;
        let mass_bits = mass.bits() as i64;
        let mut w = 128 + mass_bits as usize;
        loop {
            let mut s = BigFloat::from_i64(0, w);
            for (j, c) in num.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (cs, _) = root_bigfloat(j as i64, self.n, w, &mut cc);
                s = s.add(&bigint_to_bigfloat(c, w, &mut cc).mul(&cs, w, rm), w, rm);
            }
            // |error| ≤ (terms + 22)·mass·2^{−w}
            let err_exp = (terms + 22.0).log2().ceil() as i64 + mass_bits - w as i64;
            if !s.is_zero() {
                if let Some(e) = s.exponent() {
                    if (e as i64) - 1 > err_exp {
                        return Ok(if s.is_positive() {
                            RealSign::Positive
                        } else {
                            RealSign::Negative
                        });
                    }
                }
            }
            w *= 2;
        }
    }

    /// Certified comparison of two real numbers.
    pub fn cmp_real(&self, other: &Cyclo) -> Result<std::cmp::Ordering> {
        Ok(match (self - other).real_sign()? {
            RealSign::Negative => std::cmp::Ordering::Less,
            RealSign::Zero => std::cmp::Ordering::Equal,
            RealSign::Positive => std::cmp::Ordering::Greater,
        })
    }

    pub fn is_positive_real(&self) -> bool {
        matches!(self.real_sign(), Ok(RealSign::Positive))
    }
}

fn modp_inverse(a: i64, m: i64) -> i64 {
    let e = a.extended_gcd(&m);
    assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

fn sqrt_prime(p: u64) -> Cyclo {
    if p == 2 {
        let z = Cyclo::zeta(8);
        return &z + &z.conj();
    }
    // quadratic Gauss sum g, with g² = (−1)^{(p−1)/2} p
    let mut c = vec![0i64; p as usize];
    for (a, slot) in c.iter_mut().enumerate().skip(1) {
        *slot = if modp::pow(a as u64, (p - 1) / 2, p) == 1 {
            1
        } else {
            -1
        };
    }
    let g = Cyclo::from_cyclic_i64(p as u32, &c);
    if p % 4 == 1 {
        g
    } else {
        &g * &Cyclo::zeta_pow(4, 3)
    }
}

fn root_table(n: u32) -> Arc<Vec<Complex64>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<Complex64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().unwrap().get(&n) {
        return t.clone();
    }
    let t: Arc<Vec<Complex64>> = Arc::new(
        (0..n)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
            .collect(),
    );
    cache.write().unwrap().insert(n, t.clone());
    t
}

fn bigint_to_bigfloat(v: &BigInt, w: usize, cc: &mut Consts) -> BigFloat {
    if let Some(x) = v.to_i64() {
        return BigFloat::from_i64(x, w);
    }
    BigFloat::parse(
        &v.to_string(),
        Radix::Dec,
        w.max(v.bits() as usize + 64),
        RoundingMode::ToEven,
        cc,
    )
}

/// cos and sin of 2πj/n at precision w.
fn root_bigfloat(j: i64, n: u32, w: usize, cc: &mut Consts) -> (BigFloat, BigFloat) {
    let rm = RoundingMode::ToEven;
    let j = j.rem_euclid(n as i64);
    let pi = cc.pi(w, rm);
    let x = pi
        .mul(&BigFloat::from_i64(2 * j, w), w, rm)
        .div(&BigFloat::from_i64(n as i64, w), w, rm);
    (x.cos(w, rm, cc), x.sin(w, rm, cc))
}

// ---------------------------------------------------------------------------
// trait plumbing

impl PartialEq for Cyclo {
    fn eq(&self, other: &Cyclo) -> bool {
        if self.n == other.n {
            return self.repr == other.repr;
        }
        let (_, a, b) = self.aligned(other);
        a.repr == b.repr
    }
}

impl Eq for Cyclo {}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = self.repr.den_big();
        let mut terms = Vec::new();
        for i in 0..self.repr.len() {
            let c = self.repr.num_big(i);
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c, den.clone());
            terms.push(if i == 0 {
                format!("{q}")
            } else {
                format!("{q}*z{}^{i}", self.n)
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Zero for Cyclo {
    fn zero() -> Self {
        Cyclo::zero()
    }
    fn is_zero(&self) -> bool {
        Cyclo::is_zero(self)
    }
}

impl One for Cyclo {
    fn one() -> Self {
        Cyclo::one()
    }
}

impl<'a> Add<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn add(self, o: &Cyclo) -> Cyclo {
        self.add_sub(o, false)
    }
}

impl<'a> Sub<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn sub(self, o: &Cyclo) -> Cyclo {
        self.add_sub(o, true)
    }
}

impl<'a> Mul<&'a Cyclo> for &'a Cyclo {
    type Output = Cyclo;
    fn mul(self, o: &Cyclo) -> Cyclo {
        self.mul_impl(o)
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        let repr = match &self.repr {
            Repr::Small(a, d) if a.iter().all(|&x| x != i64::MIN) => {
                Repr::Small(a.iter().map(|x| -x).collect(), *d)
            }
            _ => {
                let (a, d) = self.repr.big().into_owned();
                Repr::from_big(a.into_iter().map(|x| -x).collect(), d)
            }
        };
        Cyclo::from_repr(self.n, repr)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Cyclo {
            type Output = Cyclo;
            fn $m(self, o: Cyclo) -> Cyclo { (&self).$m(&o) }
        }
        impl $tr<&Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $m(self, o: &Cyclo) -> Cyclo { (&self).$m(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl Div<&Cyclo> for &Cyclo {
    type Output = Cyclo;
    /// Panics on division by zero; use [`Cyclo::inv`] to handle it.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Cyclo) -> Cyclo {
        self * &o.inv().expect("division by zero")
    }
}

impl AddAssign<&Cyclo> for Cyclo {
    fn add_assign(&mut self, o: &Cyclo) {
        *self = &*self + o;
    }
}

impl SubAssign<&Cyclo> for Cyclo {
    fn sub_assign(&mut self, o: &Cyclo) {
        *self = &*self - o;
    }
}

impl MulAssign<&Cyclo> for Cyclo {
    fn mul_assign(&mut self, o: &Cyclo) {
        *self = &*self * o;
    }
}

impl Sum for Cyclo {
    fn sum<I: Iterator<Item = Cyclo>>(iter: I) -> Cyclo {
        iter.fold(Cyclo::zero(), |a, b| &a + &b)
    }
}

impl<'a> Sum<&'a Cyclo> for Cyclo {
    fn sum<I: Iterator<Item = &'a Cyclo>>(iter: I) -> Cyclo {
        iter.fold(Cyclo::zero(), |a, b| &a + b)
    }
}

impl Product for Cyclo {
    fn product<I: Iterator<Item = Cyclo>>(iter: I) -> Cyclo {
        iter.fold(Cyclo::one(), |a, b| &a * &b)
    }
}

impl From<i64> for Cyclo {
    fn from(v: i64) -> Cyclo {
        Cyclo::from_int(v)
    }
}

impl From<&BigRational> for Cyclo {
    fn from(q: &BigRational) -> Cyclo {
        Cyclo::from_rational(q)
    }
}

impl Ring for Cyclo {
    fn conj(&self) -> Self {
        Cyclo::conj(self)
    }
}

impl Field for Cyclo {
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
}

// ---------------------------------------------------------------------------
// serialisation: {conductor, coeffs: [[num, den], ...]} at minimal conductor

/// An integer that serialises as a JSON number when it fits in 64 bits and as
/// a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    pub fn from_bigint(v: &BigInt) -> JsonInt {
        v.to_i64()
            .map_or_else(|| JsonInt::Big(v.to_string()), JsonInt::Small)
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        match self {
            JsonInt::Small(v) => Some((*v).into()),
            JsonInt::Big(s) => s.parse().ok(),
        }
    }
}

pub fn rational_to_json(q: &BigRational) -> [JsonInt; 2] {
    [JsonInt::from_bigint(q.numer()), JsonInt::from_bigint(q.denom())]
}

pub fn rational_from_json(v: &[JsonInt; 2]) -> Result<BigRational> {
    let n = v[0].to_bigint().ok_or(CycloError::ZeroDenominator)?;
    let d = v[1].to_bigint().ok_or(CycloError::ZeroDenominator)?;
    if d.is_zero() {
        return Err(CycloError::ZeroDenominator);
    }
    Ok(BigRational::new(n, d))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycloJson {
    pub conductor: u32,
    pub coeffs: Vec<[JsonInt; 2]>,
}

impl From<&Cyclo> for CycloJson {
    fn from(x: &Cyclo) -> CycloJson {
        let m = x.minimal();
        CycloJson {
            conductor: m.n,
            coeffs: m.coeffs().iter().map(rational_to_json).collect(),
        }
    }
}

impl TryFrom<&CycloJson> for Cyclo {
    type Error = CycloError;
    fn try_from(j: &CycloJson) -> Result<Cyclo> {
        let coeffs = j
            .coeffs
            .iter()
            .map(rational_from_json)
            .collect::<Result<Vec<_>>>()?;
        Cyclo::make(j.conductor, &coeffs)
    }
}

impl Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Cyclo, D::Error> {
        let j = CycloJson::deserialize(d)?;
        Cyclo::try_from(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        let p105 = cyclotomic_polynomial(105);
        assert_eq!(p105.len() - 1, 48);
        assert_eq!(p105[7], -2);
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Cyclo::make(4, &[q(0, 1), q(1, 1), q(0, 1), q(0, 1)]).unwrap();
        assert_eq!(&i * &i, Cyclo::from_int(-1));
        assert_eq!(Cyclo::make(1, &[q(3, 2)]).unwrap().to_rational(), Some(q(3, 2)));
        assert_eq!(Cyclo::make(0, &[]).unwrap_err(), CycloError::ZeroConductor);
    }

    #[test]
    fn conductor_reduction() {
        let mut c = vec![q(0, 1); 6];
        c[2] = q(1, 1);
        let a = Cyclo::make(6, &c).unwrap();
        let b = Cyclo::make(3, &[q(0, 1), q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.minimal().conductor(), 3);
        assert_eq!((&Cyclo::zeta(8) * &Cyclo::zeta(8)).minimal().conductor(), 4);
        let s = Cyclo::sqrt_rational(&q(3, 1)).unwrap();
        assert_eq!(s.minimal().conductor(), 12);
        let x = Cyclo::zeta(15).lift(60);
        assert_eq!(x.minimal().conductor(), 15);
        assert_eq!(Cyclo::zeta(7).lift(14).minimal().conductor(), 7);
    }

    #[test]
    fn vanishing_root_sum() {
        let s: Cyclo = (0..5).map(|k| Cyclo::zeta_pow(5, k)).sum();
        assert!(s.is_zero());
    }

    #[test]
    fn inverse_of_root() {
        assert_eq!(Cyclo::zeta(7).inv().unwrap(), Cyclo::zeta_pow(7, 6));
        let x = &Cyclo::zeta(7) + &Cyclo::from_int(2);
        assert!((&x * &x.inv().unwrap()).is_one());
        assert_eq!(Cyclo::zero().inv().unwrap_err(), CycloError::DivisionByZero);
    }

    #[test]
    fn square_roots() {
        for m in [2, 3, 5, 6, 7, 10, 11, 12, 13, 42] {
            let r = Cyclo::sqrt_rational(&q(m, 1)).unwrap();
            assert_eq!(&r * &r, Cyclo::from_int(m), "sqrt {m}");
            assert_eq!(r.real_sign().unwrap(), RealSign::Positive, "sqrt {m}");
        }
        let r = Cyclo::sqrt_rational(&q(2, 7)).unwrap();
        assert_eq!(&r * &r, Cyclo::from_rational(&q(2, 7)));
    }

    #[test]
    fn signs() {
        assert_eq!(Cyclo::zero().real_sign().unwrap(), RealSign::Zero);
        let z8 = Cyclo::zeta(8);
        assert_eq!((&z8 + &z8.conj()).real_sign().unwrap(), RealSign::Positive);
        let d = &Cyclo::sin_2pi(&q(1, 14)) - &Cyclo::sin_2pi(&q(2, 14));
        assert_eq!(d.real_sign().unwrap(), RealSign::Negative);
        assert_eq!(Cyclo::zeta(3).real_sign().unwrap_err(), CycloError::NotReal);
    }

    #[test]
    fn tiny_differences_are_certified() {
        // convergents p/q of √2 alternate around it; p² − 2q² decides the side
        let r2 = Cyclo::sqrt_rational(&q(2, 1)).unwrap();
        let (mut p, mut qq) = (BigInt::from(1), BigInt::from(1));
        for _ in 0..60 {
            let (np, nq) = (&p + &qq * 2, &p + &qq);
            p = np;
            qq = nq;
            let conv = BigRational::new(p.clone(), qq.clone());
            let expect = if &p * &p > &qq * &qq * 2 {
                RealSign::Negative
            } else {
                RealSign::Positive
            };
            assert_eq!((&r2 - &Cyclo::from_rational(&conv)).real_sign().unwrap(), expect);
        }
    }

    #[test]
    fn galois_and_conjugation() {
        let i = Cyclo::zeta(4);
        assert_eq!(i.conj(), -&i);
        assert_eq!(Cyclo::zeta(12).galois(5).unwrap(), Cyclo::zeta_pow(12, 5));
        assert!(Cyclo::zeta(12).galois(3).is_err());
        let r = Cyclo::from_rational(&q(5, 3));
        assert_eq!(r.galois(7).unwrap(), r);
    }

    #[test]
    fn root_of_unity_detection() {
        let z = Cyclo::zeta_pow(12, 7);
        assert_eq!(z.root_of_unity_exponent(), Some(q(7, 12)));
        assert_eq!((-&Cyclo::zeta(5)).root_of_unity_exponent(), Some(q(7, 10)));
        assert_eq!(Cyclo::from_int(2).root_of_unity_exponent(), None);
    }

    #[test]
    fn overflow_promotes_to_big() {
        let mut x = &Cyclo::zeta(7) + &Cyclo::from_int(3);
        for _ in 0..6 {
            x = &x * &x;
        }
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let back = Cyclo::try_from(&CycloJson::from(&x)).unwrap();
        assert_eq!(back, x);
    }
}
