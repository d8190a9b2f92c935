//! Word-sized prime fields, incremental row echelon forms and rational
//! reconstruction.
//!
//! Several exact computations (inverses in large cyclotomic fields,
//! commutant bases) are done modulo a prime first; the lifted answer is then
//! checked exactly over ℚ, so a bad prime can only cost time, never
//! correctness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Primes just below 2⁶², used in order.
pub const PRIMES: [u64; 6] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
];

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64, p: u64) -> Option<u64> {
    (a != 0).then(|| pow(a, p - 2, p))
}

pub fn from_i64(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

pub fn from_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.mod_floor(&BigInt::from(p));
    r.to_u64().expect("reduced residue fits")
}

/// Image of a rational, `None` when p divides the denominator.
pub fn from_rational(q: &BigRational, p: u64) -> Option<u64> {
    let d = from_bigint(q.denom(), p);
    inv(d, p).map(|di| mul(from_bigint(q.numer(), p), di, p))
}

/// Signed representative in (−p/2, p/2].
pub fn to_signed(a: u64, p: u64) -> i64 {
    if a > p / 2 {
        -((p - a) as i64)
    } else {
        a as i64
    }
}

/// Recover a/b from its residue modulo m, with |a|, b ≤ √(m/2).
pub fn rational_reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Combine residues `a mod m` and `b mod p` into a residue mod m·p.
pub fn crt(a: &BigInt, m: &BigInt, b: u64, p: u64) -> BigInt {
    let am = from_bigint(a, p);
    let mm = from_bigint(m, p);
    let k = mul(sub(b, am, p), inv(mm, p).expect("coprime moduli"), p);
    a + m * BigInt::from(k)
}

/// Row-reduced echelon form built one row at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    p: u64,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize, p: u64) -> Self {
        Echelon {
            p,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Reduce `row` against the current basis; returns true if it was
    /// independent (and has been added).
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        let p = self.p;
        debug_assert_eq!(row.len(), self.ncols);
        for (i, &pc) in self.pivots.iter().enumerate() {
            let f = row[pc];
            if f != 0 {
                let basis = &self.rows[i];
                for (x, &y) in row.iter_mut().zip(basis) {
                    if y != 0 {
                        *x = sub(*x, mul(f, y, p), p);
                    }
                }
            }
        }
        let Some(pc) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(row[pc], p).unwrap();
        for x in row.iter_mut() {
            *x = mul(*x, s, p);
        }
        // keep the form fully reduced
        for other in self.rows.iter_mut() {
            let f = other[pc];
            if f != 0 {
                for (x, &y) in other.iter_mut().zip(&row) {
                    if y != 0 {
                        *x = sub(*x, mul(f, y, p), p);
                    }
                }
            }
        }
        self.pivot_row[pc] = Some(self.rows.len());
        self.rows.push(row);
        self.pivots.push(pc);
        true
    }

    /// Columns without a pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_none()).collect()
    }

    /// Right kernel basis: one vector per free column, with a 1 there and 0
    /// in the other free columns.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![0; self.ncols];
                v[f] = 1;
                for (i, &pc) in self.pivots.iter().enumerate() {
                    v[pc] = sub(0, self.rows[i][f], p);
                }
                v
            })
            .collect()
    }
}

/// Solve a square system A·x = b modulo p; `None` if singular mod p.
pub fn solve(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = b.len();
    let mut ech = Echelon::new(n + 1, p);
    for (row, &rhs) in a.iter().zip(b) {
        let mut r = row.clone();
        r.push(rhs);
        ech.insert(r);
    }
    if ech.rank() != n || ech.pivots.contains(&n) {
        return None;
    }
    let mut x = vec![0; n];
    for (i, &pc) in ech.pivots.iter().enumerate() {
        x[pc] = ech.rows[i][n];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruct_small_fraction() {
        let p = PRIMES[0];
        let q = BigRational::new((-7).into(), 13.into());
        let r = from_rational(&q, p).unwrap();
        let back = rational_reconstruct(&BigInt::from(r), &BigInt::from(p)).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn echelon_kernel_annihilates() {
        let p = PRIMES[1];
        let mut e = Echelon::new(3, p);
        e.insert(vec![1, 2, 3]);
        e.insert(vec![2, 4, 6]);
        e.insert(vec![0, 1, 1]);
        assert_eq!(e.rank(), 2);
        let k = e.kernel();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        let dot = |r: [u64; 3]| (0..3).fold(0, |s, i| add(s, mul(r[i], v[i], p), p));
        assert_eq!(dot([1, 2, 3]), 0);
        assert_eq!(dot([0, 1, 1]), 0);
    }

    #[test]
    fn crt_combines() {
        let (p, q) = (PRIMES[0], PRIMES[1]);
        let x = BigInt::from(123456789_i64) * BigInt::from(987654321_i64) * 1000;
        let a = BigInt::from(from_bigint(&x, p));
        let c = crt(&a, &BigInt::from(p), from_bigint(&x, q), q);
        assert_eq!(c, x);
    }
}
