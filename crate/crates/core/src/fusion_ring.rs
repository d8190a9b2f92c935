//! Fusion rings: structure-constant tensors with an identity and an
//! involution, their axioms, the unitary matrix diagonalising them, duals,
//! the rank-two and quadratic-field families, and fusion homomorphisms.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::{lcm, rational_from_json, rational_to_json, Cyclo, CycloError, JsonInt, RealSign};
use crate::linalg::{CycloMatrix, Matrix, RatMatrix};
use crate::poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FusionError {
    #[error("structure constants must have length {expected}, got {got}")]
    TensorShape { expected: usize, got: usize },
    #[error("identity index {0} out of range")]
    Identity(usize),
    #[error("label {0} has no dual (no b with N_ab^1 = 1)")]
    NoDual(usize),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("the fusion matrices do not have distinct joint eigenvalues")]
    Degenerate,
    #[error("exact data required: {0}")]
    NotExact(String),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

pub type Result<T> = std::result::Result<T, FusionError>;

/// A commutative fusion ring on a finite labelled basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRing {
    labels: Vec<String>,
    identity: usize,
    star: Vec<usize>,
    /// N_ab^c at index (a·r + b)·r + c
    n: Vec<BigRational>,
}

impl FusionRing {
    /// Build from a full tensor; the involution is read off from N_ab^1.
    pub fn new(labels: Vec<String>, identity: usize, n: Vec<BigRational>) -> Result<FusionRing> {
        let r = labels.len();
        if n.len() != r * r * r {
            return Err(FusionError::TensorShape {
                expected: r * r * r,
                got: n.len(),
            });
        }
        if identity >= r {
            return Err(FusionError::Identity(identity));
        }
        let star = (0..r)
            .map(|a| {
                (0..r)
                    .find(|&b| n[(a * r + b) * r + identity].is_one())
                    .ok_or(FusionError::NoDual(a))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FusionRing {
            labels,
            identity,
            star,
            n,
        })
    }

    /// Like [`FusionRing::new`] but tolerant of tensors without a dual for
    /// some label (those map to themselves); used for data whose axioms are
    /// still to be checked.
    pub fn new_unchecked(labels: Vec<String>, identity: usize, n: Vec<BigRational>) -> FusionRing {
        let r = labels.len();
        assert_eq!(n.len(), r * r * r);
        let star = (0..r)
            .map(|a| {
                (0..r)
                    .find(|&b| n[(a * r + b) * r + identity].is_one())
                    .unwrap_or(a)
            })
            .collect();
        FusionRing {
            labels,
            identity,
            star,
            n,
        }
    }

    pub fn from_fn(
        labels: Vec<String>,
        identity: usize,
        f: impl Fn(usize, usize, usize) -> i64,
    ) -> Result<FusionRing> {
        let r = labels.len();
        let mut n = Vec::with_capacity(r * r * r);
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    n.push(BigRational::from_integer(f(a, b, c).into()));
                }
            }
        }
        FusionRing::new(labels, identity, n)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn star(&self) -> &[usize] {
        &self.star
    }

    pub fn n(&self, a: usize, b: usize, c: usize) -> &BigRational {
        let r = self.rank();
        &self.n[(a * r + b) * r + c]
    }

    pub fn tensor(&self) -> &[BigRational] {
        &self.n
    }

    /// The fusion matrix (N_a)_{bc} = N_ab^c.
    pub fn matrix(&self, a: usize) -> RatMatrix {
        let r = self.rank();
        Matrix::from_fn(r, r, |b, c| self.n(a, b, c).clone())
    }

    pub fn is_integral(&self) -> bool {
        self.n.iter().all(|q| q.is_integer())
    }

    /// Structure constants as machine integers, when they all are.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.n
            .iter()
            .map(|q| if q.is_integer() { q.numer().to_i64() } else { None })
            .collect()
    }

    /// Labels j with j·j* = 1.
    pub fn units(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&j| {
                let r = self.rank();
                let s = self.star[j];
                (0..r).all(|c| {
                    let v = self.n(j, s, c);
                    if c == self.identity {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
            .collect()
    }

    /// The permutation b ↦ j·b for a unit j.
    pub fn unit_permutation(&self, j: usize) -> Option<Vec<usize>> {
        let r = self.rank();
        (0..r)
            .map(|b| {
                let mut hits = (0..r).filter(|&c| !self.n(j, b, c).is_zero());
                let c = hits.next()?;
                (hits.next().is_none() && self.n(j, b, c).is_one()).then_some(c)
            })
            .collect()
    }

    pub fn to_json(&self) -> FusionRingJson {
        let r = self.rank();
        FusionRingJson {
            labels: self.labels.clone(),
            identity: self.identity,
            star: self.star.clone(),
            n: (0..r)
                .map(|a| {
                    (0..r)
                        .map(|b| {
                            (0..r)
                                .filter(|&c| !self.n(a, b, c).is_zero())
                                .map(|c| (c, rational_to_json(self.n(a, b, c))))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &FusionRingJson) -> Result<FusionRing> {
        let r = j.labels.len();
        if j.n.len() != r || j.n.iter().any(|row| row.len() != r) {
            return Err(FusionError::TensorShape {
                expected: r * r,
                got: j.n.iter().map(Vec::len).sum(),
            });
        }
        let mut n = vec![BigRational::zero(); r * r * r];
        for (a, row) in j.n.iter().enumerate() {
            for (b, entries) in row.iter().enumerate() {
                for (c, v) in entries {
                    if *c >= r {
                        return Err(FusionError::TensorShape { expected: r, got: *c });
                    }
                    n[(a * r + b) * r + c] = rational_from_json(v)?;
                }
            }
        }
        let ring = FusionRing::new(j.labels.clone(), j.identity, n)?;
        if ring.star != j.star {
            return Err(FusionError::Parameter("star does not match N_ab^1".into()));
        }
        Ok(ring)
    }
}

/// JSON form: `n[a][b]` lists the nonzero `[c, [num, den]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionRingJson {
    pub labels: Vec<String>,
    pub identity: usize,
    pub star: Vec<usize>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<Vec<(usize, [JsonInt; 2])>>>,
}

// ---------------------------------------------------------------------------
// axioms

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FusionAxiom {
    /// N_ab^c ≥ 0
    Nonnegative,
    /// a ↦ a* is an involutive automorphism stabilising the basis
    Involution,
    /// N_ab^1 = δ_{b,a*}
    IdentityPairing,
    /// N_1a^b = δ_ab
    Unit,
    Commutative,
    Associative,
    /// N_xy^z = N_{xz*}^{y*}
    Frobenius,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionViolation {
    pub axiom: FusionAxiom,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionReport {
    pub violations: Vec<FusionViolation>,
    pub integral: bool,
}

impl FusionReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, axiom: FusionAxiom) -> bool {
        self.violations.iter().any(|v| v.axiom == axiom)
    }
}

/// Check the fusion-ring axioms, recording the first witness of each failure.
pub fn verify_fusion_axioms(ring: &FusionRing) -> FusionReport {
    let r = ring.rank();
    let one = ring.identity;
    let mut violations: Vec<FusionViolation> = Vec::new();
    let mut record = |axiom: FusionAxiom, witness: Vec<usize>| {
        if !violations.iter().any(|v| v.axiom == axiom) {
            violations.push(FusionViolation { axiom, witness });
        }
    };
    let star = &ring.star;
    for a in 0..r {
        if star[star[a]] != a {
            record(FusionAxiom::Involution, vec![a]);
        }
        for b in 0..r {
            let want_pair = b == star[a];
            if ring.n(a, b, one).is_one() != want_pair || (!want_pair && !ring.n(a, b, one).is_zero()) {
                record(FusionAxiom::IdentityPairing, vec![a, b]);
            }
            let want_unit = if a == b {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            if ring.n(one, a, b) != &want_unit {
                record(FusionAxiom::Unit, vec![a, b]);
            }
            for c in 0..r {
                let v = ring.n(a, b, c);
                if v.is_negative() {
                    record(FusionAxiom::Nonnegative, vec![a, b, c]);
                }
                if v != ring.n(b, a, c) {
                    record(FusionAxiom::Commutative, vec![a, b, c]);
                }
                if v != ring.n(star[a], star[b], star[c]) {
                    record(FusionAxiom::Involution, vec![a, b, c]);
                }
                if v != ring.n(a, star[c], star[b]) {
                    record(FusionAxiom::Frobenius, vec![a, b, c]);
                }
            }
        }
    }
    if let Some(w) = associativity_witness(ring) {
        record(FusionAxiom::Associative, w);
    }
    FusionReport {
        violations,
        integral: ring.is_integral(),
    }
}

/// (ab)c = a(bc) on basis elements: Σ_e N_ab^e N_ec^d = Σ_e N_bc^e N_ae^d.
fn associativity_witness(ring: &FusionRing) -> Option<Vec<usize>> {
    let r = ring.rank();
    if let Some(n) = ring.to_i64() {
        let at = |a: usize, b: usize, c: usize| n[(a * r + b) * r + c] as i128;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for d in 0..r {
                        let lhs: i128 = (0..r).map(|e| at(a, b, e) * at(e, c, d)).sum();
                        let rhs: i128 = (0..r).map(|e| at(b, c, e) * at(a, e, d)).sum();
                        if lhs != rhs {
                            return Some(vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        return None;
    }
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for d in 0..r {
                    let lhs: BigRational = (0..r).map(|e| ring.n(a, b, e) * ring.n(e, c, d)).sum();
                    let rhs: BigRational = (0..r).map(|e| ring.n(b, c, e) * ring.n(a, e, d)).sum();
                    if lhs != rhs {
                        return Some(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// the diagonalising matrix

/// S recovered from a fusion ring: columns are the joint eigenvectors of the
/// fusion matrices, normalised with positive entries in the identity row.
#[derive(Clone, Debug)]
pub enum ReconstructedS {
    /// Exact S together with the eigenvalue table ℓ_i(a) = S_ai / S_1i.
    Exact {
        s: CycloMatrix,
        eigenvalues: CycloMatrix,
    },
    /// The eigenvalues could not be placed in a cyclotomic field within the
    /// search limits; this S is numeric and must not feed exact pipelines.
    Numeric { s: Matrix<Complex64> },
}

impl ReconstructedS {
    pub fn exact(&self) -> Option<&CycloMatrix> {
        match self {
            ReconstructedS::Exact { s, .. } => Some(s),
            ReconstructedS::Numeric { .. } => None,
        }
    }

    pub fn to_c64(&self) -> Matrix<Complex64> {
        match self {
            ReconstructedS::Exact { s, .. } => s.to_c64(),
            ReconstructedS::Numeric { s } => s.clone(),
        }
    }
}

/// Largest conductor tried when recognising eigenvalues.
const EIGEN_CONDUCTOR_CAP: u32 = 2048;
/// Largest conductor tried when recognising the column norms.
const NORM_CONDUCTOR_CAP: u32 = 4096;

/// The unitary S with S_{1i} > 0 and S_{a1} > 0 satisfying Verlinde's
/// formula for `ring`. Columns are sorted by their eigenvalue lists,
/// largest first (so the Perron–Frobenius column comes first).
pub fn reconstruct_s(ring: &FusionRing) -> Result<ReconstructedS> {
    match reconstruct_exact(ring)? {
        Some((s, eigenvalues)) => Ok(ReconstructedS::Exact { s, eigenvalues }),
        None => Ok(ReconstructedS::Numeric {
            s: reconstruct_numeric(ring)?,
        }),
    }
}

fn small_coefficients(r: usize, attempt: usize) -> Vec<i64> {
    // deterministic, varied small weights
    let mut x = 0x2545_f491_4f6c_dd1d_u64.wrapping_add(attempt as u64 * 0x9e37_79b9);
    (0..r)
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            1 + (x % 7) as i64
        })
        .collect()
}

fn reconstruct_exact(ring: &FusionRing) -> Result<Option<(CycloMatrix, CycloMatrix)>> {
    let r = ring.rank();
    let one = ring.identity;
    let den = ring
        .tensor()
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mats: Vec<RatMatrix> = (0..r).map(|a| ring.matrix(a)).collect();

    // a generic element X with distinct eigenvalues, scaled to be integral
    let mut found = None;
    for attempt in 0..12 {
        let w = small_coefficients(r, attempt);
        let x = Matrix::from_fn(r, r, |i, j| {
            let v: BigRational = (0..r)
                .map(|a| mats[a].get(i, j) * BigRational::from_integer(w[a].into()))
                .sum();
            (v * BigRational::from_integer(den.clone())).to_integer()
        });
        let rows: Vec<Vec<BigInt>> = (0..r).map(|i| x.row(i).to_vec()).collect();
        let cp = poly::charpoly_int(&rows);
        let p = crate::modp::PRIMES[2];
        if poly::is_squarefree_mod(&poly::reduce_int_poly(&cp, p), p) || r == 1 {
            found = Some((x, cp));
            break;
        }
    }
    let Some((x, cp)) = found else {
        return Err(FusionError::Degenerate);
    };

    // coordinates of X^j, j < r (the identity row of the regular representation)
    let xr = x.map(|v| BigRational::from_integer(v.clone()));
    let mut powers: Vec<Vec<BigRational>> = Vec::with_capacity(r);
    let mut cur: Vec<BigRational> = (0..r)
        .map(|c| {
            if c == one {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    for _ in 0..r {
        let next: Vec<BigRational> = (0..r)
            .map(|c| (0..r).map(|b| &cur[b] * xr.get(b, c)).sum())
            .collect();
        powers.push(std::mem::replace(&mut cur, next));
    }
    // e_a = Σ_j β_aj · coords(X^j)
    let w = Matrix::from_fn(r, r, |j, c| powers[j][c].clone());
    let Ok(beta) = w.inverse() else {
        return Err(FusionError::Degenerate);
    };

    let Some((_, thetas)) = poly::cyclotomic_roots(&cp, 1..=EIGEN_CONDUCTOR_CAP) else {
        return Ok(None);
    };
    // ℓ_i(a) = Σ_j β_aj θ_i^j
    let columns: Vec<Vec<Cyclo>> = thetas
        .iter()
        .map(|t| {
            let mut pw = Vec::with_capacity(r);
            let mut acc = Cyclo::one();
            for _ in 0..r {
                pw.push(acc.clone());
                acc = &acc * t;
            }
            (0..r)
                .map(|a| {
                    let mut s = Cyclo::zero();
                    for (j, p) in pw.iter().enumerate() {
                        let b = beta.get(a, j);
                        if !b.is_zero() {
                            s += &p.scale(b);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();

    // column norms u_i = Σ_a |ℓ_i(a)|², then S_1i = 1/√u_i
    let norms: Vec<Cyclo> = columns
        .iter()
        .map(|col| col.iter().map(|l| l * &l.conj()).sum())
        .collect();
    let mut distinct: Vec<Cyclo> = Vec::new();
    for u in &norms {
        if !distinct.contains(u) {
            distinct.push(u.clone());
        }
    }
    let scale = distinct.iter().fold(BigInt::one(), |acc, u| {
        u.coeffs().iter().fold(acc, |acc, q| acc.lcm(q.denom()))
    });
    let scale_c = Cyclo::from_rational(&BigRational::from_integer(scale.clone()));
    // roots of Π (y² − scale²·u): y = scale·√u
    let mut sq_roots: Vec<Cyclo> = Vec::new();
    for u in &distinct {
        let v = &(&scale_c * &scale_c) * u;
        sq_roots.push(v);
    }
    let g = {
        let inner = poly::poly_from_roots(&sq_roots);
        let Some(inner) = inner else {
            return Ok(None);
        };
        // substitute y² for x
        let mut g = vec![BigInt::zero(); 2 * inner.len() - 1];
        for (j, c) in inner.into_iter().enumerate() {
            g[2 * j] = c;
        }
        g
    };
    let base = distinct
        .iter()
        .fold(1u32, |acc, u| lcm(acc, u.minimal().conductor()));
    let candidates = (1..=NORM_CONDUCTOR_CAP / base).map(|m| m * base);
    let Some((_, roots)) = poly::cyclotomic_roots(&g, candidates) else {
        return Ok(None);
    };
    let inv_scale = BigRational::new(BigInt::one(), scale);
    let mut s_cols: Vec<Vec<Cyclo>> = Vec::with_capacity(r);
    for (col, u) in columns.iter().zip(&norms) {
        let target = &(&scale_c * &scale_c) * u;
        let y = roots
            .iter()
            .find(|y| (*y * *y) == target && y.real_sign() == Ok(RealSign::Positive));
        let Some(y) = y else {
            return Ok(None);
        };
        let sqrt_u = y.scale(&inv_scale);
        let s1 = sqrt_u.inv()?;
        s_cols.push(col.iter().map(|l| l * &s1).collect());
    }

    // canonical column order: eigenvalue lists, largest first
    let mut order: Vec<usize> = (0..r).collect();
    let numeric: Vec<Vec<Complex64>> = columns
        .iter()
        .map(|c| c.iter().map(Cyclo::to_c64).collect())
        .collect();
    order.sort_by(|&i, &j| compare_columns(&numeric[i], &numeric[j], one).reverse());
    let s = Matrix::from_fn(r, r, |a, i| s_cols[order[i]][a].clone());
    let eig = Matrix::from_fn(r, r, |a, i| columns[order[i]][a].clone());

    if !certify_s(ring, &s, &eig) {
        return Ok(None);
    }
    Ok(Some((s, eig)))
}

/// Lexicographic comparison of eigenvalue lists (identity row first), real
/// part before imaginary part, with a tolerance for numerically equal
/// entries.
fn compare_columns(x: &[Complex64], y: &[Complex64], one: usize) -> Ordering {
    let idx = std::iter::once(one).chain((0..x.len()).filter(|&a| a != one));
    for a in idx {
        for (u, v) in [(x[a].re, y[a].re), (x[a].im, y[a].im)] {
            if (u - v).abs() > 1e-9 {
                return u.partial_cmp(&v).unwrap_or(Ordering::Equal);
            }
        }
    }
    Ordering::Equal
}

/// Exact certificate: S unitary, N_a S = S·diag(ℓ(a)), ℓ_i(a) = S_ai/S_1i,
/// positive identity row and positive first column.
fn certify_s(ring: &FusionRing, s: &CycloMatrix, eig: &CycloMatrix) -> bool {
    let r = ring.rank();
    let one = ring.identity;
    let Ok(prod) = s.matmul(&s.dagger()) else {
        return false;
    };
    if !prod.is_identity() {
        return false;
    }
    for i in 0..r {
        if s.get(one, i).real_sign() != Ok(RealSign::Positive)
            || s.get(i, 0).real_sign() != Ok(RealSign::Positive)
        {
            return false;
        }
        for a in 0..r {
            if &(s.get(one, i) * eig.get(a, i)) != s.get(a, i) {
                return false;
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            for i in 0..r {
                let mut lhs = Cyclo::zero();
                for c in 0..r {
                    let n = ring.n(a, b, c);
                    if !n.is_zero() {
                        lhs += &s.get(c, i).scale(n);
                    }
                }
                if lhs != eig.get(a, i) * s.get(b, i) {
                    return false;
                }
            }
        }
    }
    true
}

/// Joint eigenvectors from a random Hermitian combination of the fusion
/// matrices.
fn reconstruct_numeric(ring: &FusionRing) -> Result<Matrix<Complex64>> {
    let r = ring.rank();
    let one = ring.identity;
    let mats: Vec<DMatrix<f64>> = (0..r)
        .map(|a| DMatrix::from_fn(r, r, |b, c| ring.n(a, b, c).to_f64().unwrap_or(f64::NAN)))
        .collect();
    let w = small_coefficients(r, 99);
    let v = small_coefficients(r, 7);
    let h = DMatrix::from_fn(r, r, |i, j| {
        let mut z = Complex64::new(0.0, 0.0);
        for a in 0..r {
            let sym = mats[a][(i, j)] + mats[a][(j, i)];
            let anti = mats[a][(i, j)] - mats[a][(j, i)];
            z += Complex64::new(w[a] as f64 * sym, v[a] as f64 * anti * 0.37);
        }
        z
    });
    let eig = SymmetricEigen::new(h);
    let vecs = eig.eigenvectors;
    // the matrix acting on the left is the regular representation, whose
    // eigenvectors are the columns of S up to phase
    let mut cols: Vec<Vec<Complex64>> = (0..r)
        .map(|i| {
            let col: Vec<Complex64> = (0..r).map(|a| vecs[(a, i)]).collect();
            let ph = col[one] / col[one].norm();
            col.iter().map(|z| z / ph).collect()
        })
        .collect();
    let eigen = |c: &Vec<Complex64>| c.iter().map(|z| z / c[one]).collect::<Vec<_>>();
    cols.sort_by(|x, y| compare_columns(&eigen(x), &eigen(y), one).reverse());
    let out = Matrix::from_fn(r, r, |a, i| cols[i][a]);
    if out.data().iter().any(|z| !z.re.is_finite()) {
        return Err(FusionError::Degenerate);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// duality

/// Structure constants N̂_ij^k = Σ_a S_ai S_aj conj(S_ak) / S_a1 of the dual
/// ring (Verlinde's formula with S transposed).
#[derive(Clone, Debug)]
pub struct DualRing {
    pub rank: usize,
    /// index (i·r + j)·r + k
    pub n: Vec<Cyclo>,
}

impl DualRing {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Cyclo {
        &self.n[(i * self.rank + j) * self.rank + k]
    }

    /// All constants real (always the case for unitary S).
    pub fn is_real(&self) -> bool {
        self.n.iter().all(Cyclo::is_real)
    }

    /// The dual as a fusion ring when all its constants are rational.
    pub fn to_fusion_ring(&self, labels: Vec<String>) -> Option<FusionRing> {
        let n: Option<Vec<BigRational>> = self.n.iter().map(Cyclo::to_rational).collect();
        FusionRing::new(labels, 0, n?).ok()
    }
}

pub fn dual_ring(s: &CycloMatrix) -> Result<DualRing> {
    let r = s.rows();
    let inv_first: Vec<Cyclo> = (0..r)
        .map(|a| s.get(a, 0).inv())
        .collect::<std::result::Result<_, _>>()?;
    let mut n = Vec::with_capacity(r * r * r);
    for i in 0..r {
        for j in 0..r {
            let w: Vec<Cyclo> = (0..r)
                .map(|a| &(s.get(a, i) * s.get(a, j)) * &inv_first[a])
                .collect();
            for k in 0..r {
                n.push((0..r).map(|a| &w[a] * &s.get(a, k).conj()).sum());
            }
        }
    }
    Ok(DualRing { rank: r, n })
}

/// Bijections ι, ι′ from labels to columns with S_{a,ι′b} = S_{b,ιa}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfDuality {
    pub iota: Vec<usize>,
    pub iota_prime: Vec<usize>,
}

/// Search for a self-duality of the ring, using its reconstructed S.
pub fn is_self_dual(ring: &FusionRing) -> Result<Option<SelfDuality>> {
    let rec = reconstruct_s(ring)?;
    Ok(self_duality_of(&rec))
}

pub fn self_duality_of(rec: &ReconstructedS) -> Option<SelfDuality> {
    let num = rec.to_c64();
    let r = num.rows();
    let close = |x: Complex64, y: Complex64| (x - y).norm() < 1e-8;
    let mut iota = vec![usize::MAX; r];
    let mut iota_p = vec![usize::MAX; r];
    let mut used = vec![false; r];
    let mut used_p = vec![false; r];

    fn search(
        a: usize,
        r: usize,
        num: &Matrix<Complex64>,
        close: &dyn Fn(Complex64, Complex64) -> bool,
        iota: &mut Vec<usize>,
        iota_p: &mut Vec<usize>,
        used: &mut Vec<bool>,
        used_p: &mut Vec<bool>,
        exact: Option<&CycloMatrix>,
    ) -> bool {
        if a == r {
            // exact confirmation when available
            return exact
                .is_none_or(|s| (0..r).all(|x| (0..r).all(|y| s.get(x, iota_p[y]) == s.get(y, iota[x]))));
        }
        for i in 0..r {
            if used[i] {
                continue;
            }
            for ip in 0..r {
                if used_p[ip] {
                    continue;
                }
                iota[a] = i;
                iota_p[a] = ip;
                // S_{x,ι′a} = S_{a,ιx} and S_{a,ι′y} = S_{y,ιa} for assigned x, y ≤ a
                let ok = (0..=a).all(|x| {
                    close(*num.get(x, iota_p[a]), *num.get(a, iota[x]))
                        && close(*num.get(a, iota_p[x]), *num.get(x, iota[a]))
                });
                if ok {
                    used[i] = true;
                    used_p[ip] = true;
                    if search(a + 1, r, num, close, iota, iota_p, used, used_p, exact) {
                        return true;
                    }
                    used[i] = false;
                    used_p[ip] = false;
                }
            }
        }
        iota[a] = usize::MAX;
        iota_p[a] = usize::MAX;
        false
    }

    search(
        0,
        r,
        &num,
        &close,
        &mut iota,
        &mut iota_p,
        &mut used,
        &mut used_p,
        rec.exact(),
    )
    .then_some(SelfDuality {
        iota,
        iota_prime: iota_p,
    })
}

// ---------------------------------------------------------------------------
// families

/// The rank-two ring {1, x} with x² = 1 + r·x, and what is known about
/// completing it to modular data.
#[derive(Clone, Debug)]
pub struct RankTwo {
    pub ring: FusionRing,
    /// A diagonal unitary T with (ST)³ = S² exists (0 ≤ r ≤ 2/√3, decided
    /// exactly as r² ≤ 4/3).
    pub t_exists: bool,
    /// Such a T can be chosen of finite order (r ∈ {0, 1}).
    pub finite_order_t: bool,
}

pub fn rank2_family(r: &BigRational) -> Result<RankTwo> {
    if r.is_negative() {
        return Err(FusionError::Parameter(format!("r = {r} must be nonnegative")));
    }
    let labels = vec!["1".to_string(), "x".to_string()];
    let mut n = vec![BigRational::zero(); 8];
    let idx = |a: usize, b: usize, c: usize| (a * 2 + b) * 2 + c;
    n[idx(0, 0, 0)] = BigRational::one();
    n[idx(0, 1, 1)] = BigRational::one();
    n[idx(1, 0, 1)] = BigRational::one();
    n[idx(1, 1, 0)] = BigRational::one();
    n[idx(1, 1, 1)] = r.clone();
    let ring = FusionRing::new(labels, 0, n)?;
    let t_exists = r * r <= BigRational::new(4.into(), 3.into());
    let finite_order_t = r.is_zero() || r.is_one();
    Ok(RankTwo {
        ring,
        t_exists,
        finite_order_t,
    })
}

/// The two-dimensional ring spanned by 1 and x = b/a + √N/a inside
/// ℚ(ζ_{4N}); x² = 1 + (2b/a)·x. Returns the ring and the values of the
/// basis elements.
pub fn quadratic_field_ring(big_n: u64, a: u64, b: u64) -> Result<(FusionRing, [Cyclo; 2])> {
    if a == 0 || b == 0 || big_n != a * a + b * b {
        return Err(FusionError::Parameter(format!(
            "need N = a² + b² with a, b > 0 (N={big_n}, a={a}, b={b})"
        )));
    }
    let root = (big_n as f64).sqrt().round() as u64;
    if root * root == big_n {
        return Err(FusionError::Parameter(format!("N = {big_n} is a perfect square")));
    }
    let sqrt_n = Cyclo::sqrt_rational(&BigRational::from_integer(big_n.into()))?;
    let ra = BigRational::from_integer(a.into());
    let x = &Cyclo::from_rational(&BigRational::new(b.into(), a.into())) + &sqrt_n.scale(&ra.recip());
    let r = BigRational::new((2 * b).into(), a.into());
    // x² = 1 + r·x holds exactly
    debug_assert_eq!(&x * &x, &Cyclo::one() + &x.scale(&r));
    let ring = rank2_family(&r)?.ring;
    Ok((ring, [Cyclo::one(), x]))
}

// ---------------------------------------------------------------------------
// fusion homomorphisms

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomReport {
    /// π(a)π(b) = Σ_c N_ab^c π(c) fails at (a, b)
    pub not_multiplicative: Option<(usize, usize)>,
    pub identity_preserved: bool,
    /// a with π(a*) ≠ π(a)*
    pub star_violation: Option<usize>,
    /// a unit sent to a non-unit
    pub unit_violation: Option<usize>,
    /// the dual map π′ (columns of the target to columns of the source)
    pub pi_prime: Option<Vec<usize>>,
    /// pairs a ≠ b with π a = π b but b not of the form J a
    pub fiber_violation: Option<(usize, usize)>,
    pub surjective: bool,
    /// S′_{πa,b′} = √|ker π|·S_{a,π′b′}, checked when π is surjective
    pub surjective_relation: Option<bool>,
}

impl HomReport {
    pub fn is_homomorphism(&self) -> bool {
        self.not_multiplicative.is_none()
            && self.identity_preserved
            && self.star_violation.is_none()
            && self.unit_violation.is_none()
    }
}

/// Check that `pi` (labels of `src` to labels of `dst`) is a fusion
/// homomorphism, together with the standard consequences. `s_src`, `s_dst`
/// are the unitary matrices of the two rings (rows labels, first column the
/// Perron–Frobenius one).
pub fn verify_fusion_hom(
    pi: &[usize],
    src: &FusionRing,
    s_src: &CycloMatrix,
    dst: &FusionRing,
    s_dst: &CycloMatrix,
) -> HomReport {
    let r = src.rank();
    let r2 = dst.rank();
    let mut rep = HomReport {
        identity_preserved: pi.get(src.identity) == Some(&dst.identity),
        ..Default::default()
    };
    if pi.len() != r || pi.iter().any(|&x| x >= r2) {
        rep.not_multiplicative = Some((usize::MAX, usize::MAX));
        return rep;
    }
    'mult: for a in 0..r {
        for b in 0..r {
            for e in 0..r2 {
                let pushed: BigRational = (0..r)
                    .filter(|&c| pi[c] == e)
                    .map(|c| src.n(a, b, c).clone())
                    .sum();
                if &pushed != dst.n(pi[a], pi[b], e) {
                    rep.not_multiplicative = Some((a, b));
                    break 'mult;
                }
            }
        }
    }
    rep.star_violation = (0..r).find(|&a| pi[src.star[a]] != dst.star[pi[a]]);
    let dst_units = dst.units();
    let src_units = src.units();
    rep.unit_violation = src_units.iter().copied().find(|j| !dst_units.contains(&pi[*j]));

    // π′: for each column b′ the column b with matching character ratios
    let ratio =
        |s: &CycloMatrix, one: usize, a: usize, col: usize| s.get(a, col) * &s.get(one, col).inv().unwrap();
    let src_num = s_src.to_c64();
    let dst_num = s_dst.to_c64();
    let pi_prime: Option<Vec<usize>> = (0..r2)
        .map(|bp| {
            (0..r).find(|&b| {
                let numeric_ok = (0..r).all(|a| {
                    let x = dst_num.get(pi[a], bp) / dst_num.get(dst.identity, bp);
                    let y = src_num.get(a, b) / src_num.get(src.identity, b);
                    (x - y).norm() < 1e-8
                });
                numeric_ok
                    && (0..r)
                        .all(|a| ratio(s_dst, dst.identity, pi[a], bp) == ratio(s_src, src.identity, a, b))
            })
        })
        .collect();
    rep.pi_prime = pi_prime.clone();

    // fibres are unit orbits
    'fib: for a in 0..r {
        for b in a + 1..r {
            if pi[a] != pi[b] {
                continue;
            }
            let ok = src_units.iter().any(|&j| {
                src.unit_permutation(j).is_some_and(|jp| {
                    jp[a] == b
                        && (0..r).all(|d| pi[jp[d]] == pi[d])
                        && (j == src.identity || (0..r).all(|d| jp[d] != d))
                })
            });
            if !ok {
                rep.fiber_violation = Some((a, b));
                break 'fib;
            }
        }
    }

    let mut image: Vec<usize> = pi.to_vec();
    image.sort_unstable();
    image.dedup();
    rep.surjective = image.len() == r2;
    if rep.surjective {
        if let Some(pp) = &pi_prime {
            let kernel = pi.iter().filter(|&&x| x == dst.identity).count();
            let root = Cyclo::sqrt_rational(&BigRational::from_integer(kernel.into())).ok();
            rep.surjective_relation = root.map(|k| {
                (0..r).all(|a| (0..r2).all(|bp| s_dst.get(pi[a], bp) == &(&k * s_src.get(a, pp[bp]))))
            });
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// field decomposition

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisOrbit {
    /// columns of the reconstructed S in this orbit
    pub columns: Vec<usize>,
    /// degree over ℚ of the field generated by S_ai/S_1i, i in the orbit
    pub degree: usize,
}

/// Galois orbits of the columns of the exact eigenvalue table; the ring
/// ⊗ ℚ is the direct sum of the corresponding fields.
pub fn field_decomposition(rec: &ReconstructedS) -> Result<Vec<GaloisOrbit>> {
    let ReconstructedS::Exact { eigenvalues, .. } = rec else {
        return Err(FusionError::NotExact(
            "field decomposition needs an exact S".into(),
        ));
    };
    let r = eigenvalues.rows();
    let (l, eig) = eigenvalues.common_conductor();
    let col = |i: usize| -> Vec<Cyclo> { (0..r).map(|a| eig.get(a, i).clone()).collect() };
    let cols: Vec<Vec<Cyclo>> = (0..r).map(col).collect();
    let units: Vec<i64> = (1..=l.max(1) as i64)
        .filter(|k| k.gcd(&(l as i64)) == 1)
        .collect();
    let mut orbit_of = vec![usize::MAX; r];
    let mut orbits: Vec<GaloisOrbit> = Vec::new();
    for i in 0..r {
        if orbit_of[i] != usize::MAX {
            continue;
        }
        let mut members = vec![i];
        for &k in &units {
            let image: Vec<Cyclo> = cols[i]
                .iter()
                .map(|x| x.galois(k))
                .collect::<std::result::Result<_, _>>()?;
            if let Some(j) = (0..r).find(|&j| cols[j] == image) {
                if !members.contains(&j) {
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        for &m in &members {
            orbit_of[m] = orbits.len();
        }
        orbits.push(GaloisOrbit {
            degree: members.len(),
            columns: members,
        });
    }
    Ok(orbits)
}
