//! Dense matrices over exact (or floating) scalars: products, adjoints,
//! elimination, Smith normal form and commutant bases.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cyclotomic::{lcm, Cyclo};
use crate::modp;
use crate::scalar::{Field, Ring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}x{1} against {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("matrix data has {got} entries, expected {expected}")]
    DataLength { expected: usize, got: usize },
    #[error("matrix must be square")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("commutant element with irrational entries")]
    Irrational,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<T: Clone> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::DataLength {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::DataLength { expected: c, got: 0 });
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Reorder rows and columns: entry (i, j) becomes self[p(i), q(j)].
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }
}

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(d: &[T]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(self.rows, self.cols, other.rows, other.cols));
        }
        let mut out = Matrix::<T>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j).clone() + a.clone() * b.clone();
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::Shape(self.rows, self.cols, other.rows, other.cols));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(LinalgError::Shape(self.rows, self.cols, v.len(), 1));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }
}

impl<T: Field> Matrix<T> {
    /// Reduced row echelon form and pivot columns.
    ///
    /// Pivots are chosen by [`Field::pivot_weight`]: the first nonzero entry
    /// for exact scalars. One inversion per pivot; everything else is
    /// multiplication.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<(usize, f64)> = None;
            for i in r..m.rows {
                if let Some(w) = m.get(i, c).pivot_weight() {
                    if best.is_none_or(|(_, bw)| w > bw) {
                        best = Some((i, w));
                    }
                }
            }
            let Some((pi, _)) = best else { continue };
            m.swap_rows(r, pi);
            let inv = m.get(r, c).try_inv().expect("pivot is invertible");
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let b = m.get(r, j);
                    if !b.is_zero() {
                        let v = m.get(i, j).clone() - f.clone() * b.clone();
                        m.set(i, j, v);
                    }
                }
                m.set(i, c, T::zero());
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// Solve a square system; `None` when singular.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.rows;
        if !self.is_square() || b.len() != n {
            return None;
        }
        let aug = Matrix::from_fn(n, n + 1, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.contains(&n) {
            return None;
        }
        Some((0..n).map(|i| r.get(i, n).clone()).collect())
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinalgError::Singular);
        }
        Ok(Matrix::from_fn(n, n, |i, j| r.get(i, j + n).clone()))
    }
}

pub type CycloMatrix = Matrix<Cyclo>;
pub type RatMatrix = Matrix<BigRational>;
pub type IntMatrix = Matrix<BigInt>;

impl CycloMatrix {
    /// Lift every entry to one conductor (the lcm of all entries').
    pub fn common_conductor(&self) -> (u32, CycloMatrix) {
        let l = self.data.iter().fold(1, |acc, x| lcm(acc, x.conductor()));
        (l, self.map(|x| x.lift(l)))
    }

    pub fn from_rational(m: &RatMatrix) -> CycloMatrix {
        m.map(Cyclo::from_rational)
    }

    pub fn to_c64(&self) -> Matrix<num_complex::Complex64> {
        self.map(Cyclo::to_c64)
    }
}

impl IntMatrix {
    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Result<Self> {
        Matrix::new(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| BigRational::from_integer(x.clone()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return Ok(BigInt::zero());
                };
                m.swap_rows_int(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        Ok(sign * m.get(n - 1, n - 1).clone())
    }

    fn swap_rows_int(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl RatMatrix {
    /// Entries as integers, if they all are.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        self.data
            .iter()
            .all(|q| q.is_integer())
            .then(|| self.map(|q| q.numer().clone()))
    }
}

/// Smith normal form: unimodular U, V with U·G·V = D diagonal and
/// d₁ | d₂ | … , all dᵢ > 0.
pub fn smith_normal_form(g: &IntMatrix) -> Result<(IntMatrix, IntMatrix, IntMatrix)> {
    if !g.is_square() {
        return Err(LinalgError::NotSquare);
    }
    let n = g.rows;
    let mut a = g.clone();
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);

    let row_op = |m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        for j in 0..m.cols {
            let x = m.get(dst, j) - q * m.get(src, j);
            m.set(dst, j, x);
        }
    };
    let col_op = |m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        for i in 0..m.rows {
            let x = m.get(i, dst) - q * m.get(i, src);
            m.set(i, dst, x);
        }
    };
    let swap_cols = |m: &mut IntMatrix, x: usize, y: usize| {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + x, i * m.cols + y);
        }
    };

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    let x = a.get(i, j);
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return Err(LinalgError::Singular);
            };
            a.swap_rows_int(t, bi);
            u.swap_rows_int(t, bi);
            swap_cols(&mut a, t, bj);
            swap_cols(&mut v, t, bj);

            let mut clean = true;
            for i in t + 1..n {
                let q = a.get(i, t) / a.get(t, t);
                if !q.is_zero() {
                    row_op(&mut a, i, t, &q);
                    row_op(&mut u, i, t, &q);
                }
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let q = a.get(t, j) / a.get(t, t);
                if !q.is_zero() {
                    col_op(&mut a, j, t, &q);
                    col_op(&mut v, j, t, &q);
                }
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let p = a.get(t, t).clone();
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let m1 = -BigInt::one();
                    row_op(&mut a, t, i, &m1);
                    row_op(&mut u, t, i, &m1);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            for j in 0..n {
                let x = -a.get(t, j);
                a.set(t, j, x);
                let y = -u.get(t, j);
                u.set(t, j, y);
            }
        }
    }
    Ok((u, a, v))
}

// ---------------------------------------------------------------------------
// commutants

/// Unknown positions of M that a commutant element may use, row-major.
#[derive(Clone, Debug)]
pub struct CommutantPattern {
    pub allowed: Vec<bool>,
}

/// A rational basis of {M : M·A = A·M for every A in `mats`}.
///
/// Diagonal matrices in `mats` only restrict which entries of M may be
/// nonzero; the remaining conditions are expanded over the power basis of a
/// common cyclotomic field into rational equations. Those are eliminated
/// modulo a prime (stopping early once the rank stalls), the kernel is lifted
/// by rational reconstruction, and every lifted element is checked exactly.
/// Since the rank modulo p never exceeds the rank over ℚ, a fully verified
/// lift is a basis.
pub fn commutant_basis(s: &CycloMatrix, t: &CycloMatrix) -> Result<Vec<RatMatrix>> {
    commutant_basis_of(&[s, t], None)
}

pub fn commutant_basis_of(
    mats: &[&CycloMatrix],
    pattern: Option<&CommutantPattern>,
) -> Result<Vec<RatMatrix>> {
    let n = mats.first().map_or(0, |m| m.rows);
    for m in mats {
        if !m.is_square() || m.rows != n {
            return Err(LinalgError::Shape(m.rows, m.cols, n, n));
        }
    }
    let mut allowed = pattern.map_or_else(|| vec![true; n * n], |p| p.allowed.clone());
    let mut dense: Vec<&CycloMatrix> = Vec::new();
    for m in mats {
        if m.is_diagonal() {
            for a in 0..n {
                for b in 0..n {
                    if m.get(a, a) != m.get(b, b) {
                        allowed[a * n + b] = false;
                    }
                }
            }
        } else {
            dense.push(m);
        }
    }
    let unknowns: Vec<(usize, usize)> = (0..n * n)
        .filter(|&i| allowed[i])
        .map(|i| (i / n, i % n))
        .collect();
    let index: Vec<Option<usize>> = {
        let mut idx = vec![None; n * n];
        for (k, &(a, b)) in unknowns.iter().enumerate() {
            idx[a * n + b] = Some(k);
        }
        idx
    };
    let to_matrix = |v: &[BigRational]| {
        let mut m = RatMatrix::zeros(n, n);
        for (k, &(a, b)) in unknowns.iter().enumerate() {
            m.set(a, b, v[k].clone());
        }
        m
    };
    if unknowns.is_empty() {
        return Ok(Vec::new());
    }
    if dense.is_empty() {
        return Ok(unknowns
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let mut v = vec![BigRational::zero(); unknowns.len()];
                v[k] = BigRational::one();
                to_matrix(&v)
            })
            .collect());
    }

    let system = EquationSystem::new(&dense, n, &index, unknowns.len());
    let verify = |basis: &[RatMatrix]| basis.iter().all(|m| dense.iter().all(|a| commutes_exactly(m, a)));

    let mut acc: Option<(Vec<usize>, Vec<BigInt>, BigInt)> = None;
    for &p in modp::PRIMES.iter() {
        let Some((free, kernel)) = system.kernel_mod(p, |free, ker| {
            let basis = reconstruct_basis(ker, p, None)?;
            let mats: Vec<RatMatrix> = basis.iter().map(|v| to_matrix(v)).collect();
            let _ = free;
            verify(&mats).then_some(mats)
        }) else {
            continue;
        };
        match kernel {
            KernelOutcome::Verified(mats) => return Ok(mats),
            KernelOutcome::Residues(ker) => {
                // combine with earlier primes when the pivot structure agrees
                let (res, modulus) = match acc.take() {
                    Some((f, r, m)) if f == free => {
                        let r = r
                            .iter()
                            .zip(&ker)
                            .map(|(x, y)| modp::crt(x, &m, *y, p))
                            .collect::<Vec<_>>();
                        (r, m * BigInt::from(p))
                    }
                    _ => (ker.iter().map(|&x| BigInt::from(x)).collect(), BigInt::from(p)),
                };
                let width = unknowns.len();
                let rec: Option<Vec<BigRational>> = res
                    .iter()
                    .map(|x| modp::rational_reconstruct(x, &modulus))
                    .collect();
                if let Some(flat) = rec {
                    let mats: Vec<RatMatrix> = flat.chunks(width).map(&to_matrix).collect();
                    if verify(&mats) {
                        return Ok(mats);
                    }
                }
                acc = Some((free, res, modulus));
            }
        }
    }
    // exact fallback
    let rows = system.exact_rows();
    let a = RatMatrix::from_rows(rows)?;
    let ker = a.kernel();
    let mats: Vec<RatMatrix> = ker.iter().map(|v| to_matrix(v)).collect();
    Ok(mats)
}

enum KernelOutcome {
    Verified(Vec<RatMatrix>),
    Residues(Vec<u64>),
}

/// The linear conditions (M·A − A·M)_{ab} = 0, kept as cyclotomic
/// coefficient rows over a common conductor.
struct EquationSystem {
    nu: usize,
    deg: usize,
    /// per equation: list of (unknown, coefficient vector in the power basis)
    eqs: Vec<Vec<(usize, Vec<BigRational>)>>,
}

impl EquationSystem {
    fn new(dense: &[&CycloMatrix], n: usize, index: &[Option<usize>], nu: usize) -> Self {
        let l = dense
            .iter()
            .flat_map(|m| m.data.iter())
            .fold(1, |acc, x| lcm(acc, x.conductor()));
        let deg = crate::cyclotomic::euler_phi(l) as usize;
        let mut eqs = Vec::new();
        for m in dense {
            let coeffs: Vec<Vec<BigRational>> = m
                .data
                .iter()
                .map(|x| x.lift(l).coeffs().into_iter().take(deg).collect())
                .collect();
            // (MA − AM)_ab = Σ_c M_ac A_cb − Σ_c A_ac M_cb
            let mut order: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
            deterministic_shuffle(&mut order);
            for (a, b) in order {
                let mut terms: Vec<(usize, Vec<BigRational>)> = Vec::new();
                let mut push = |u: usize, v: &Vec<BigRational>, neg: bool| {
                    if v.iter().all(Zero::is_zero) {
                        return;
                    }
                    let v: Vec<BigRational> = if neg {
                        v.iter().map(|x| -x).collect()
                    } else {
                        v.clone()
                    };
                    match terms.iter_mut().find(|(k, _)| *k == u) {
                        Some((_, w)) => {
                            for (x, y) in w.iter_mut().zip(v) {
                                *x += y;
                            }
                        }
                        None => terms.push((u, v)),
                    }
                };
                for c in 0..n {
                    if let Some(u) = index[a * n + c] {
                        push(u, &coeffs[c * n + b], false);
                    }
                    if let Some(u) = index[c * n + b] {
                        push(u, &coeffs[a * n + c], true);
                    }
                }
                terms.retain(|(_, v)| v.iter().any(|x| !x.is_zero()));
                if !terms.is_empty() {
                    eqs.push(terms);
                }
            }
        }
        EquationSystem { nu, deg, eqs }
    }

    fn exact_rows(&self) -> Vec<Vec<BigRational>> {
        let mut rows = Vec::new();
        for eq in &self.eqs {
            for k in 0..self.deg {
                let mut row = vec![BigRational::zero(); self.nu];
                for (u, v) in eq {
                    row[*u] = v[k].clone();
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
        if rows.is_empty() {
            rows.push(vec![BigRational::zero(); self.nu]);
        }
        rows
    }

    /// Eliminate modulo p. `attempt` is tried whenever the rank stalls; it
    /// returns verified matrices to stop early.
    fn kernel_mod(
        &self,
        p: u64,
        attempt: impl Fn(&[usize], &[Vec<u64>]) -> Option<Vec<RatMatrix>>,
    ) -> Option<(Vec<usize>, KernelOutcome)> {
        // reduce coefficient vectors mod p
        let mut eqs_p = Vec::with_capacity(self.eqs.len());
        for eq in &self.eqs {
            let mut terms = Vec::with_capacity(eq.len());
            for (u, v) in eq {
                let r: Option<Vec<u64>> = v.iter().map(|q| modp::from_rational(q, p)).collect();
                terms.push((*u, r?));
            }
            eqs_p.push(terms);
        }
        let mut ech = modp::Echelon::new(self.nu, p);
        let patience = 8 + self.nu / 4;
        let mut stall = 0;
        let mut tried_at = usize::MAX;
        let mut seed = 0x9e3779b97f4a7c15u64;
        for terms in &eqs_p {
            let before = ech.rank();
            // two random combinations of the basis rows, then the rows
            // themselves only if those were independent
            let mut independent = false;
            for _ in 0..2 {
                let w: Vec<u64> = (0..self.deg).map(|_| splitmix(&mut seed) % p).collect();
                let mut row = vec![0u64; self.nu];
                for (u, v) in terms {
                    let mut s = 0;
                    for (x, y) in v.iter().zip(&w) {
                        if *x != 0 {
                            s = modp::add(s, modp::mul(*x, *y, p), p);
                        }
                    }
                    row[*u] = s;
                }
                independent |= ech.insert(row);
            }
            if independent {
                for k in 0..self.deg {
                    let mut row = vec![0u64; self.nu];
                    let mut any = false;
                    for (u, v) in terms {
                        row[*u] = v[k];
                        any |= v[k] != 0;
                    }
                    if any {
                        ech.insert(row);
                    }
                }
            }
            if ech.rank() == self.nu {
                return Some((Vec::new(), KernelOutcome::Verified(Vec::new())));
            }
            if ech.rank() == before {
                stall += 1;
            } else {
                stall = 0;
            }
            if stall >= patience && tried_at != ech.rank() {
                tried_at = ech.rank();
                let ker = ech.kernel();
                if let Some(m) = attempt(&ech.free_columns(), &ker) {
                    return Some((ech.free_columns(), KernelOutcome::Verified(m)));
                }
            }
        }
        let ker = ech.kernel();
        if let Some(m) = attempt(&ech.free_columns(), &ker) {
            return Some((ech.free_columns(), KernelOutcome::Verified(m)));
        }
        Some((
            ech.free_columns(),
            KernelOutcome::Residues(ker.into_iter().flatten().collect()),
        ))
    }
}

fn reconstruct_basis(ker: &[Vec<u64>], p: u64, _hint: Option<()>) -> Option<Vec<Vec<BigRational>>> {
    let m = BigInt::from(p);
    ker.iter()
        .map(|v| {
            v.iter()
                .map(|&x| modp::rational_reconstruct(&BigInt::from(x), &m))
                .collect()
        })
        .collect()
}

fn commutes_exactly(m: &RatMatrix, a: &CycloMatrix) -> bool {
    let n = m.rows;
    let rows: Vec<Vec<(usize, &BigRational)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| !m.get(i, j).is_zero())
                .map(|j| (j, m.get(i, j)))
                .collect()
        })
        .collect();
    let cols: Vec<Vec<(usize, &BigRational)>> = (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| !m.get(i, j).is_zero())
                .map(|i| (i, m.get(i, j)))
                .collect()
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            let mut d = Cyclo::zero();
            for &(c, q) in &rows[i] {
                d = &d + &a.get(c, j).scale(q);
            }
            for &(c, q) in &cols[j] {
                d = &d - &a.get(i, c).scale(q);
            }
            if !d.is_zero() {
                return false;
            }
        }
    }
    true
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn deterministic_shuffle<T>(v: &mut [T]) {
    let mut s = 0x2545f4914f6cdd1du64;
    for i in (1..v.len()).rev() {
        let j = (splitmix(&mut s) % (i as u64 + 1)) as usize;
        v.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn snf_examples() {
        let g = IntMatrix::from_i64(2, 2, &[2, -1, -1, 2]).unwrap();
        let (u, d, v) = smith_normal_form(&g).unwrap();
        assert_eq!(d, IntMatrix::from_i64(2, 2, &[1, 0, 0, 3]).unwrap());
        assert_eq!(u.matmul(&g).unwrap().matmul(&v).unwrap(), d);
        let g = IntMatrix::from_i64(1, 1, &[7]).unwrap();
        assert_eq!(smith_normal_form(&g).unwrap().1, g);
        let s = IntMatrix::from_i64(2, 2, &[1, 2, 2, 4]).unwrap();
        assert_eq!(smith_normal_form(&s).unwrap_err(), LinalgError::Singular);
    }

    #[test]
    fn kernel_and_rank() {
        let z = RatMatrix::zeros(2, 2);
        assert_eq!(z.kernel().len(), 2);
        assert!(RatMatrix::identity(3).kernel().is_empty());
        let a = Matrix::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]).unwrap();
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert_eq!(a.rank() + k.len(), 2);
        assert!(a.mul_vec(&k[0]).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn shape_errors() {
        let a = RatMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(LinalgError::Shape(..))));
    }

    #[test]
    fn determinant() {
        let g = IntMatrix::from_i64(3, 3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]).unwrap();
        assert_eq!(g.det().unwrap(), BigInt::from(4));
    }
}
