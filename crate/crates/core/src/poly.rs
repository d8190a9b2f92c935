//! Univariate polynomials modulo word-sized primes, exact characteristic
//! polynomials, and recognition of the roots of an integer polynomial inside
//! a cyclotomic field.
//!
//! Root recognition works without lattice reduction. For a candidate
//! conductor L we take a prime p ≡ 1 (mod L), where every root splits, and
//! find the roots mod p. The Galois action of σ_k on those roots comes from
//! the Frobenius map x ↦ x^q mod f at primes q ≡ k (mod L), lifted to a
//! rational polynomial by CRT and reduced mod p. Knowing the image of a root
//! under every prime above p pins down its coefficients by a Vandermonde
//! solve. Every candidate root is checked exactly before it is returned.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{euler_phi, prime_factors, Cyclo};
use crate::modp::{self, add, inv, mul, sub};

// ---------------------------------------------------------------------------
// primes

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &b in &BASES {
        let mut x = pow_mod_u64(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_CEILING: u64 = 1 << 62;

/// Primes q ≡ k (mod m) below 2⁶², in decreasing order.
pub fn primes_congruent(k: u64, m: u64) -> impl Iterator<Item = u64> {
    let m = m.max(1);
    let k = k % m;
    let top = (PRIME_CEILING - 1 - k) / m;
    (0..top)
        .rev()
        .map(move |t| k + t * m)
        .filter(|&q| is_prime_u64(q))
}

// ---------------------------------------------------------------------------
// polynomials over F_p, constant term first, no trailing zeros

pub type PolyP = Vec<u64>;

fn trim(mut a: PolyP) -> PolyP {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn reduce_int_poly(f: &[BigInt], p: u64) -> PolyP {
    trim(f.iter().map(|c| modp::from_bigint(c, p)).collect())
}

pub fn pmul(a: &[u64], b: &[u64], p: u64) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add(out[i + j], mul(x, y, p), p);
        }
    }
    trim(out)
}

/// Remainder of a modulo b (b nonzero).
pub fn prem(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let li = inv(*b.last().unwrap(), p).unwrap();
    while r.len() > db {
        let c = mul(*r.last().unwrap(), li, p);
        let shift = r.len() - 1 - db;
        for (j, &y) in b.iter().enumerate() {
            r[shift + j] = sub(r[shift + j], mul(c, y, p), p);
        }
        r = trim(r);
    }
    r
}

pub fn pgcd(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let li = inv(l, p).unwrap();
        for x in a.iter_mut() {
            *x = mul(*x, li, p);
        }
    }
    a
}

/// base^e mod m.
pub fn ppowmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> PolyP {
    let mut r: PolyP = prem(&[1], m, p);
    let mut b = prem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            r = prem(&pmul(&r, &b, p), m, p);
        }
        b = prem(&pmul(&b, &b, p), m, p);
        e >>= 1;
    }
    r
}

fn pderiv(a: &[u64], p: u64) -> PolyP {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul(c, i as u64 % p, p))
            .collect(),
    )
}

pub fn peval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| add(mul(acc, x, p), c, p))
}

pub fn is_squarefree_mod(f: &[u64], p: u64) -> bool {
    f.len() >= 2 && pgcd(f, &pderiv(f, p), p).len() == 1
}

/// True if f (monic, squarefree mod p) has all its roots in F_p.
pub fn splits_mod(f: &[u64], p: u64) -> bool {
    let xp = ppowmod(&[0, 1], p, f, p);
    let x = prem(&[0, 1], f, p);
    xp == x
}

/// Roots of a monic squarefree polynomial that splits completely over F_p.
pub fn split_roots(f: &[u64], p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut seed = 0x9e37_79b9_7f4a_7c15_u64;
    split_into(trim(f.to_vec()), p, &mut seed, &mut out);
    out.sort_unstable();
    out
}

fn split_into(f: PolyP, p: u64, seed: &mut u64, out: &mut Vec<u64>) {
    match f.len() {
        0 | 1 => {}
        2 => {
            let r = mul(sub(0, f[0], p), inv(f[1], p).unwrap(), p);
            out.push(r);
        }
        _ => loop {
            *seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let delta = (*seed >> 2) % p;
            let h = ppowmod(&[delta, 1], (p - 1) / 2, &f, p);
            let mut hm1 = h.clone();
            if hm1.is_empty() {
                hm1.push(0);
            }
            hm1[0] = sub(hm1[0], 1, p);
            let g = pgcd(&f, &trim(hm1), p);
            if g.len() > 1 && g.len() < f.len() {
                let q = pdiv_exact(&f, &g, p);
                split_into(g, p, seed, out);
                split_into(q, p, seed, out);
                return;
            }
        },
    }
}

fn pdiv_exact(a: &[u64], b: &[u64], p: u64) -> PolyP {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let li = inv(*b.last().unwrap(), p).unwrap();
    let mut q = vec![0u64; a.len() - db];
    while r.len() > db {
        let c = mul(*r.last().unwrap(), li, p);
        let shift = r.len() - 1 - db;
        q[shift] = c;
        for (j, &y) in b.iter().enumerate() {
            r[shift + j] = sub(r[shift + j], mul(c, y, p), p);
        }
        r.pop();
    }
    trim(q)
}

// ---------------------------------------------------------------------------
// characteristic polynomials

/// Characteristic polynomial mod p via reduction to Hessenberg form.
pub fn charpoly_mod(a: &[Vec<u64>], p: u64) -> PolyP {
    let n = a.len();
    let mut h: Vec<Vec<u64>> = a.to_vec();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else {
            continue;
        };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let t = inv(h[m][m - 1], p).unwrap();
        for i in m + 1..n {
            let u = mul(h[i][m - 1], t, p);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                let v = h[m][j];
                h[i][j] = sub(h[i][j], mul(u, v, p), p);
            }
            for row in h.iter_mut() {
                let v = row[i];
                row[m] = add(row[m], mul(u, v, p), p);
            }
        }
    }
    // p_m(x) = (x − h_mm) p_{m−1} − Σ_i (Π subdiagonal) h_{m−i,m} p_{m−i−1}
    let mut polys: Vec<PolyP> = vec![vec![1]];
    for m in 0..n {
        let prev = &polys[m];
        let mut pm = vec![0u64; prev.len() + 1];
        for (j, &c) in prev.iter().enumerate() {
            pm[j + 1] = add(pm[j + 1], c, p);
            pm[j] = sub(pm[j], mul(h[m][m], c, p), p);
        }
        let mut t = 1u64;
        for i in 1..=m {
            t = mul(t, h[m - i + 1][m - i], p);
            let coef = mul(t, h[m - i][m], p);
            if coef == 0 {
                continue;
            }
            for (j, &c) in polys[m - i].iter().enumerate() {
                pm[j] = sub(pm[j], mul(coef, c, p), p);
            }
        }
        polys.push(pm);
    }
    polys.pop().unwrap()
}

/// Exact characteristic polynomial of an integer matrix, constant term
/// first. The number of primes is fixed in advance from the bound
/// |e_k| ≤ C(n,k)·ρᵏ on elementary symmetric functions of eigenvalues
/// bounded by the largest absolute row sum ρ.
pub fn charpoly_int(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = a.len();
    let rho = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
        .max()
        .unwrap_or_default();
    let bits = n as u64 * (rho + 1u32).bits() + 2;
    let mut modulus = BigInt::one();
    let mut res: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut primes = primes_congruent(1, 2);
    while modulus.bits() <= bits + 1 {
        let p = primes.next().expect("enough primes");
        let am: Vec<Vec<u64>> = a
            .iter()
            .map(|r| r.iter().map(|x| modp::from_bigint(x, p)).collect())
            .collect();
        let cp = charpoly_mod(&am, p);
        for (k, r) in res.iter_mut().enumerate() {
            let c = cp.get(k).copied().unwrap_or(0);
            *r = modp::crt(r, &modulus, c, p);
        }
        modulus *= p;
    }
    let half = &modulus / 2;
    res.into_iter()
        .map(|r| {
            let r = r.mod_floor(&modulus);
            if r > half {
                r - &modulus
            } else {
                r
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// cyclotomic root recognition

/// The multiplicative group (ℤ/L)^× with a generating set.
fn unit_group(l: u32) -> (Vec<u32>, Vec<u32>) {
    let units: Vec<u32> = (1..=l.max(1))
        .filter(|&k| k.gcd(&l) == 1)
        .map(|k| k % l.max(1))
        .collect();
    let mut gens = Vec::new();
    let mut span: Vec<u32> = vec![1 % l.max(1)];
    for &k in &units {
        if span.contains(&k) {
            continue;
        }
        gens.push(k);
        let mut frontier = span.clone();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = ((x as u64 * g as u64) % l as u64) as u32;
                if !span.contains(&y) {
                    span.push(y);
                    frontier.push(y);
                }
            }
        }
    }
    let mut units = units;
    units.sort_unstable();
    (units, gens)
}

/// A primitive L-th root of unity mod p (requires L | p − 1).
fn primitive_root_of_unity(l: u32, p: u64) -> u64 {
    let factors = prime_factors(l as u64);
    let mut a = 2u64;
    loop {
        let w = modp::pow(a, (p - 1) / l as u64, p);
        if factors.iter().all(|&(q, _)| modp::pow(w, l as u64 / q, p) != 1) {
            return w;
        }
        a += 1;
    }
}

/// The rational polynomial g with g(θ) = σ_k(θ) for every root θ of f,
/// assuming all roots lie in ℚ(ζ_L).
fn frobenius_poly(f: &[BigInt], k: u32, l: u32) -> Option<Vec<BigRational>> {
    let d = f.len() - 1;
    let mut modulus = BigInt::one();
    let mut res = vec![BigInt::zero(); d];
    let mut last: Option<Vec<BigRational>> = None;
    for (count, q) in primes_congruent(k as u64, l as u64).enumerate() {
        if count >= 96 {
            return None;
        }
        let fq = reduce_int_poly(f, q);
        if fq.len() != f.len() || !is_squarefree_mod(&fq, q) {
            continue;
        }
        let h = ppowmod(&[0, 1], q, &fq, q);
        for (j, r) in res.iter_mut().enumerate() {
            *r = modp::crt(r, &modulus, h.get(j).copied().unwrap_or(0), q);
        }
        modulus *= q;
        let rec: Option<Vec<BigRational>> = res
            .iter()
            .map(|x| modp::rational_reconstruct(x, &modulus))
            .collect();
        match (rec, &last) {
            (Some(g), Some(prev)) if &g == prev => return Some(g),
            (Some(g), _) => last = Some(g),
            (None, _) => last = None,
        }
    }
    None
}

/// All roots of the monic squarefree integer polynomial f, provided they lie
/// in ℚ(ζ_L) for some L produced by `conductors`. Returns the first such L
/// together with the roots, each at conductor L.
pub fn cyclotomic_roots(
    f: &[BigInt],
    conductors: impl IntoIterator<Item = u32>,
) -> Option<(u32, Vec<Cyclo>)> {
    assert!(f.last().is_some_and(|c| c.is_one()), "monic polynomial expected");
    if f.len() == 1 {
        return Some((1, Vec::new()));
    }
    for l in conductors {
        if l % 4 == 2 {
            continue;
        }
        // a prime p ≡ 1 (mod L) not dividing the discriminant must split f
        let mut tested = 0;
        let mut verdict = None;
        for p in primes_congruent(1, l as u64).take(64) {
            let fp = reduce_int_poly(f, p);
            if fp.len() != f.len() || !is_squarefree_mod(&fp, p) {
                continue;
            }
            if !splits_mod(&fp, p) {
                verdict = Some(false);
                break;
            }
            tested += 1;
            if tested == 2 {
                verdict = Some(true);
                break;
            }
        }
        if verdict != Some(true) {
            continue;
        }
        if let Some(roots) = recognize_at(f, l) {
            return Some((l, roots));
        }
    }
    None
}

fn recognize_at(f: &[BigInt], l: u32) -> Option<Vec<Cyclo>> {
    let phi = euler_phi(l) as usize;
    let p = primes_congruent(1, l as u64).take(64).find(|&p| {
        let fp = reduce_int_poly(f, p);
        fp.len() == f.len() && is_squarefree_mod(&fp, p)
    })?;
    let fp = reduce_int_poly(f, p);
    let roots = split_roots(&fp, p);
    if roots.len() != f.len() - 1 {
        return None;
    }
    let index_of = |v: u64| roots.binary_search(&v).ok();
    let (units, gens) = unit_group(l);

    // σ_g as a permutation of the roots mod p
    let mut gen_perms: Vec<Vec<usize>> = Vec::new();
    for &g in &gens {
        let poly = frobenius_poly(f, g, l)?;
        let gp: Option<Vec<u64>> = poly.iter().map(|c| modp::from_rational(c, p)).collect();
        let gp = gp?;
        let perm: Option<Vec<usize>> = roots.iter().map(|&r| index_of(peval(&gp, r, p))).collect();
        gen_perms.push(perm?);
    }
    // permutations for every unit, by closing under the generators
    let d = roots.len();
    let mut perms: Vec<Option<Vec<usize>>> = vec![None; l as usize];
    perms[(1 % l) as usize] = Some((0..d).collect());
    let mut frontier = vec![1 % l];
    while let Some(x) = frontier.pop() {
        let px = perms[x as usize].clone().unwrap();
        for (gi, &g) in gens.iter().enumerate() {
            let y = ((x as u64 * g as u64) % l as u64) as u32;
            let composed: Vec<usize> = px.iter().map(|&i| gen_perms[gi][i]).collect();
            match &perms[y as usize] {
                Some(existing) if existing != &composed => return None,
                Some(_) => {}
                None => {
                    perms[y as usize] = Some(composed);
                    frontier.push(y);
                }
            }
        }
    }

    // Vandermonde system: Σ_j c_j ω^{kj} = σ_k(θ) mod P
    let omega = primitive_root_of_unity(l, p);
    let vrows: Vec<Vec<u64>> = units
        .iter()
        .map(|&k| {
            let w = modp::pow(omega, k as u64, p);
            let mut row = Vec::with_capacity(phi);
            let mut x = 1u64;
            for _ in 0..phi {
                row.push(x);
                x = mul(x, w, p);
            }
            row
        })
        .collect();
    let vinv = inverse_mod(&vrows, p)?;
    let half = p / 2;
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let b: Vec<u64> = units
            .iter()
            .map(|&k| roots[perms[k as usize].as_ref().unwrap()[i]])
            .collect();
        let coeffs: Vec<BigInt> = vinv
            .iter()
            .map(|row| {
                let v = row.iter().zip(&b).fold(0, |s, (&x, &y)| add(s, mul(x, y, p), p));
                if v > half {
                    -BigInt::from(p - v)
                } else {
                    BigInt::from(v)
                }
            })
            .collect();
        let theta = Cyclo::from_cyclic(l, coeffs, BigInt::one());
        if !eval_int_poly(f, &theta).is_zero() {
            return None;
        }
        out.push(theta);
    }
    Some(out)
}

pub fn eval_int_poly(f: &[BigInt], x: &Cyclo) -> Cyclo {
    let mut acc = Cyclo::zero();
    for c in f.iter().rev() {
        acc = &(&acc * x) + &Cyclo::from_rational(&BigRational::from_integer(c.clone()));
    }
    acc
}

fn inverse_mod(a: &[Vec<u64>], p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| m[r][c] != 0)?;
        m.swap(c, piv);
        let s = inv(m[c][c], p)?;
        for x in m[c].iter_mut() {
            *x = mul(*x, s, p);
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == c || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = sub(*x, mul(f, y, p), p);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Product of (x − r) over the given roots, when the result is rational and
/// integral. Coefficients constant term first.
pub fn poly_from_roots(roots: &[Cyclo]) -> Option<Vec<BigInt>> {
    let mut coeffs = vec![Cyclo::one()];
    for r in roots {
        let mut next = vec![Cyclo::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] = &next[j + 1] + c;
            next[j] = &next[j] - &(c * r);
        }
        coeffs = next;
    }
    coeffs
        .iter()
        .map(|c| c.to_rational().filter(|q| q.is_integer()).map(|q| q.to_integer()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime_u64(modp::PRIMES[0]));
    }

    #[test]
    fn charpoly_of_companion() {
        // companion matrix of x³ − 2x + 5
        let m: Vec<Vec<BigInt>> = vec![
            vec![0.into(), 0.into(), (-5).into()],
            vec![1.into(), 0.into(), 2.into()],
            vec![0.into(), 1.into(), 0.into()],
        ];
        let cp = charpoly_int(&m);
        let want: Vec<BigInt> = [5, -2, 0, 1].iter().map(|&x: &i64| x.into()).collect();
        assert_eq!(cp, want);
    }

    #[test]
    fn recognizes_golden_ratio() {
        // x² − x − 1 has roots (1 ± √5)/2 in ℚ(ζ₅)
        let f: Vec<BigInt> = [-1, -1, 1].iter().map(|&x: &i64| x.into()).collect();
        let (l, roots) = cyclotomic_roots(&f, 1..=40).unwrap();
        assert_eq!(l, 5);
        assert_eq!(roots.len(), 2);
        let sum: Cyclo = roots.iter().sum();
        assert_eq!(sum, Cyclo::one());
    }

    #[test]
    fn recognizes_cos_2pi_over_7() {
        // minimal polynomial of 2cos(2π/7): x³ + x² − 2x − 1
        let f: Vec<BigInt> = [-1, -2, 1, 1].iter().map(|&x: &i64| x.into()).collect();
        let (l, roots) = cyclotomic_roots(&f, 1..=40).unwrap();
        assert_eq!(l, 7);
        let target = Cyclo::cos_2pi(&BigRational::new(1.into(), 7.into())).scale_int(2);
        assert!(roots.contains(&target));
    }

    #[test]
    fn irreducible_non_abelian_is_rejected() {
        // x³ − 2 has a non-abelian splitting field
        let f: Vec<BigInt> = [-2, 0, 0, 1].iter().map(|&x: &i64| x.into()).collect();
        assert!(cyclotomic_roots(&f, 1..=200).is_none());
    }
}
