//! Modular data from even lattices, affine algebras A_r^(1), quantum
//! doubles of finite groups, and two nonunitary rank-three fixtures.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::cyclotomic::{Cyclo, CycloError, RealSign};
use crate::linalg::{smith_normal_form, CycloMatrix, IntMatrix, LinalgError, Matrix};
use crate::modular_data::{ModularData, ModularError};
use crate::poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("Gram matrix must be square and symmetric")]
    NotSymmetric,
    #[error("lattice is not even (diagonal entry {0} is odd)")]
    NotEven(usize),
    #[error("Gram matrix is not positive definite")]
    NotPositive,
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("not a group: {0}")]
    NotGroup(String),
    #[error("character table computation failed: {0}")]
    CharacterTable(String),
    #[error("unknown fixture '{0}'")]
    UnknownFixture(String),
    #[error("only the trivial 3-cocycle is supported")]
    Twist,
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Modular(#[from] ModularError),
}

pub type Result<T> = std::result::Result<T, ConstructError>;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

// ---------------------------------------------------------------------------
// lattices

/// Data of the even lattice with the given Gram matrix: labels are the
/// classes of Λ*/Λ (coordinates in its invariant-factor decomposition),
/// S_ab = e^{−2πi a·b}/√|Λ*/Λ| and T_a = e^{πi a·a − nπi/12}.
pub fn lattice_data(gram: &IntMatrix) -> Result<ModularData> {
    let n = gram.rows();
    if !gram.is_square() || !gram.is_symmetric() {
        return Err(ConstructError::NotSymmetric);
    }
    for i in 0..n {
        if gram.get(i, i).is_odd() {
            return Err(ConstructError::NotEven(i));
        }
    }
    for m in 1..=n {
        let minor = Matrix::from_fn(m, m, |i, j| gram.get(i, j).clone());
        if !minor.det()?.is_positive() {
            return Err(ConstructError::NotPositive);
        }
    }
    let (u, d, _v) = smith_normal_form(gram)?;
    let u_inv = u.to_rational().inverse()?;
    let g_inv = gram.to_rational().inverse()?;
    let factors: Vec<(usize, i64)> = (0..n)
        .map(|i| (i, d.get(i, i).abs().to_i64().expect("small discriminant")))
        .filter(|&(_, di)| di > 1)
        .collect();
    let size: i64 = factors.iter().map(|&(_, d)| d).product();
    if size > 4096 {
        return Err(ConstructError::Cap(format!("discriminant group of order {size}")));
    }
    // all classes c, lexicographic
    let mut classes: Vec<Vec<i64>> = vec![vec![]];
    for &(_, di) in &factors {
        classes = classes
            .into_iter()
            .flat_map(|c| {
                (0..di).map(move |x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }
    let reps: Vec<Vec<BigRational>> = classes
        .iter()
        .map(|c| {
            let mut full = vec![BigRational::zero(); n];
            for (&(i, _), &x) in factors.iter().zip(c) {
                full[i] = BigRational::from_integer(x.into());
            }
            u_inv.mul_vec(&full).expect("shape")
        })
        .collect();
    let dot = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        let gb = g_inv.mul_vec(b).expect("shape");
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    };
    let r = classes.len();
    let norm = Cyclo::sqrt_rational(&q(1, size))?;
    let mut s = Vec::with_capacity(r * r);
    for a in &reps {
        for b in &reps {
            s.push(&Cyclo::root_of_unity(&frac(&-dot(a, b))) * &norm);
        }
    }
    let shift = q(n as i64, 24);
    let t: Vec<BigRational> = reps
        .iter()
        .map(|a| dot(a, a) / BigRational::from_integer(2.into()) - &shift)
        .collect();
    let labels = classes
        .iter()
        .map(|c| {
            if c.is_empty() {
                "0".to_string()
            } else {
                c.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
            }
        })
        .collect();
    Ok(ModularData::new(
        labels,
        Matrix::new(r, r, s)?,
        t,
        format!("lattice:{}", gram_string(gram)),
    )?)
}

fn gram_string(g: &IntMatrix) -> String {
    let rows: Vec<String> = (0..g.rows())
        .map(|i| {
            format!(
                "[{}]",
                g.row(i)
                    .iter()
                    .map(BigInt::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    format!("[{}]", rows.join(","))
}

pub fn root_lattice_a(r: usize) -> IntMatrix {
    Matrix::from_fn(r, r, |i, j| {
        BigInt::from(match i.abs_diff(j) {
            0 => 2,
            1 => -1,
            _ => 0,
        })
    })
}

/// Cartan matrix of E₈ (Bourbaki labelling).
pub fn root_lattice_e8() -> IntMatrix {
    let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
    Matrix::from_fn(8, 8, |i, j| {
        BigInt::from(if i == j {
            2
        } else if edges.contains(&(i.min(j), i.max(j))) {
            -1
        } else {
            0
        })
    })
}

// ---------------------------------------------------------------------------
// affine A_r

/// Level-k dominant weights of A_r^(1) as Dynkin labels (λ₁, …, λ_r),
/// lexicographic, identity first.
pub fn dominant_weights(r: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(r: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(r, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(r, k, &mut Vec::new(), &mut out);
    out
}

pub fn weight_label(w: &[u32]) -> String {
    w.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// λ+ρ in orthogonal coordinates of ℝ^{r+1}, last coordinate 0.
fn shifted_eps(w: &[u32]) -> Vec<i64> {
    let r = w.len();
    let mut x = vec![0i64; r + 1];
    for i in (0..r).rev() {
        x[i] = x[i + 1] + w[i] as i64 + 1;
    }
    x
}

/// Inner product on the A_r weight space, times r+1.
fn inner_scaled(x: &[i64], y: &[i64]) -> i64 {
    let m = x.len() as i64;
    m * x.iter().zip(y).map(|(a, b)| a * b).sum::<i64>() - x.iter().sum::<i64>() * y.iter().sum::<i64>()
}

fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, sign: &mut i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if k <= 1 {
            out.push((p.clone(), *sign));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, p, sign, out);
            if k.is_multiple_of(2) {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heap(k - 1, p, sign, out);
    }
    let mut sign = 1;
    heap(n, &mut p, &mut sign, &mut out);
    out
}

/// Largest (r+1)!·|P_+^k|² handled by [`affine_ar`].
pub const AFFINE_CAP: u64 = 200_000_000;

/// A_r^(1) at level k: S_λμ = α′ Σ_w det(w) e^{−2πi (w(λ+ρ)|μ+ρ)/κ},
/// κ = k + r + 1, with α′ fixed by unitarity and S_00 > 0, and
/// T_λ = e^{2πi(|λ+ρ|²/2κ − r(r+2)/24)}.
pub fn affine_ar(r: usize, k: u32) -> Result<ModularData> {
    if r < 1 || k < 1 {
        return Err(ConstructError::Parameter(format!(
            "need r ≥ 1 and k ≥ 1 (r={r}, k={k})"
        )));
    }
    let weights = dominant_weights(r, k);
    let np = weights.len() as u64;
    let fact: u64 = (1..=r as u64 + 1).product();
    if fact.saturating_mul(np * np) > AFFINE_CAP {
        return Err(ConstructError::Cap(format!(
            "A_{r} level {k}: {} Weyl terms",
            fact.saturating_mul(np * np)
        )));
    }
    let kappa = k as i64 + r as i64 + 1;
    let m = (r as i64 + 1) * kappa;
    let eps: Vec<Vec<i64>> = weights.iter().map(|w| shifted_eps(w)).collect();
    let perms = permutations_with_sign(r + 1);
    let raw = |a: usize, b: usize| -> Cyclo {
        let x = &eps[a];
        let y = &eps[b];
        let sx: i64 = x.iter().sum();
        let sy: i64 = y.iter().sum();
        let mut counts = vec![BigInt::zero(); m as usize];
        for (p, sign) in &perms {
            let dot: i64 = (0..=r).map(|i| x[p[i]] * y[i]).sum();
            // −(w x|y)·(r+1) = −(r+1)Σ x_{w i} y_i + (Σx)(Σy), in units of 1/m
            let e = (-(r as i64 + 1) * dot + sx * sy).rem_euclid(m);
            counts[e as usize] += *sign;
        }
        Cyclo::from_cyclic(m as u32, counts, BigInt::one())
    };
    let nw = weights.len();
    let x00 = raw(0, 0);
    // |α′|² from unitarity: 1/(X X†)_00
    let row0: Vec<Cyclo> = (0..nw).map(|b| raw(0, b)).collect();
    let g: Cyclo = row0.iter().map(|x| x * &x.conj()).sum();
    let g = g
        .to_rational()
        .ok_or_else(|| ConstructError::Parameter("normalisation is not rational".into()))?;
    let modulus = Cyclo::sqrt_rational(&g.recip())?;
    // phase making S_00 positive
    let z = x00.to_c64();
    let order = 4 * m;
    let j = ((-z.arg() / std::f64::consts::TAU) * order as f64).round() as i64;
    let phase = Cyclo::root_of_unity(&frac(&q(j, order)));
    let alpha = &phase * &modulus;
    if (&alpha * &x00).real_sign() != Ok(RealSign::Positive) {
        return Err(ConstructError::Parameter("no phase makes S_00 positive".into()));
    }
    let mut s = Vec::with_capacity(nw * nw);
    let mut cache: HashMap<(usize, usize), Cyclo> = HashMap::new();
    for a in 0..nw {
        for b in 0..nw {
            let v = if b < a {
                cache[&(b, a)].clone()
            } else {
                let v = &alpha * &raw(a, b);
                cache.insert((a, b), v.clone());
                v
            };
            s.push(v);
        }
    }
    let shift = q(r as i64 * (r as i64 + 2), 24);
    let t: Vec<BigRational> = eps
        .iter()
        .map(|x| q(inner_scaled(x, x), 2 * kappa * (r as i64 + 1)) - &shift)
        .collect();
    let labels = weights.iter().map(|w| weight_label(w)).collect();
    Ok(ModularData::new(
        labels,
        Matrix::new(nw, nw, s)?,
        t,
        format!("affine:A,{r},{k}"),
    )?)
}

/// A₁^(1) at level k: S_ab = √(2/(k+2)) sin(π(a+1)(b+1)/(k+2)),
/// T_a = e^{2πi((a+1)²/4(k+2) − 1/8)}.
pub fn affine_a1(k: u32) -> Result<ModularData> {
    if k < 1 {
        return Err(ConstructError::Parameter("level must be at least 1".into()));
    }
    let n = k as i64 + 2;
    let norm = Cyclo::sqrt_rational(&q(2, n))?;
    let r = k as usize + 1;
    let mut s = Vec::with_capacity(r * r);
    for a in 0..r as i64 {
        for b in 0..r as i64 {
            s.push(&norm * &Cyclo::sin_2pi(&q((a + 1) * (b + 1), 2 * n)));
        }
    }
    let t = (0..r as i64)
        .map(|a| q((a + 1) * (a + 1), 4 * n) - q(1, 8))
        .collect();
    let labels = (0..r).map(|a| a.to_string()).collect();
    Ok(ModularData::new(
        labels,
        Matrix::new(r, r, s)?,
        t,
        format!("affine:A,1,{k}"),
    )?)
}

/// The closed form N_ab^c = 1 iff |a−b| ≤ c ≤ min(a+b, 2k−a−b) and
/// a+b+c is even.
pub fn a1_fusion(k: u32, a: u32, b: u32, c: u32) -> u32 {
    let (a, b, c, k) = (a as i64, b as i64, c as i64, k as i64);
    u32::from((a - b).abs() <= c && c <= (a + b).min(2 * k - a - b) && (a + b + c) % 2 == 0)
}

// ---------------------------------------------------------------------------
// Kac–Walton

fn to_partition(w: &[u32]) -> Vec<u32> {
    let mut p = vec![0u32; w.len()];
    let mut acc = 0;
    for i in (0..w.len()).rev() {
        acc += w[i];
        p[i] = acc;
    }
    p
}

/// Littlewood–Richardson coefficients c^ν_{λμ} for partitions with at most
/// `max_rows` rows.
pub fn littlewood_richardson(lam: &[u32], mu: &[u32], max_rows: usize) -> BTreeMap<Vec<u32>, u64> {
    let mut shape = vec![0u32; max_rows];
    for (i, &x) in lam.iter().enumerate() {
        if x > 0 {
            if i >= max_rows {
                return BTreeMap::new();
            }
            shape[i] = x;
        }
    }
    let mu: Vec<u32> = mu.iter().copied().filter(|&x| x > 0).collect();
    let mut out = BTreeMap::new();
    // counts[i][j]: boxes labelled i in row j
    let mut counts = vec![vec![0u32; max_rows]; mu.len()];
    lr_label(0, &mu, &mut shape, &mut counts, &mut out);
    out
}

fn lr_label(
    i: usize,
    mu: &[u32],
    shape: &mut Vec<u32>,
    counts: &mut Vec<Vec<u32>>,
    out: &mut BTreeMap<Vec<u32>, u64>,
) {
    if i == mu.len() {
        *out.entry(shape.clone()).or_insert(0) += 1;
        return;
    }
    let old = shape.clone();
    place_row(i, 0, mu[i], mu, &old, shape, counts, out);
}

#[allow(clippy::too_many_arguments)]
fn place_row(
    i: usize,
    row: usize,
    left: u32,
    mu: &[u32],
    old: &[u32],
    shape: &mut Vec<u32>,
    counts: &mut Vec<Vec<u32>>,
    out: &mut BTreeMap<Vec<u32>, u64>,
) {
    let rows = shape.len();
    if left == 0 {
        lr_label(i + 1, mu, shape, counts, out);
        return;
    }
    if row == rows {
        return;
    }
    // horizontal strip: new row length ≤ old length of the row above
    let cap = if row == 0 {
        left
    } else {
        (old[row - 1] - old[row]).min(left)
    };
    // lattice condition: #i in rows ≤ row does not exceed #(i−1) in rows < row
    let placed_before: u32 = counts[i][..row].iter().sum();
    let lattice_cap = if i == 0 {
        u32::MAX
    } else {
        let prev: u32 = counts[i - 1][..row].iter().sum();
        prev.saturating_sub(placed_before)
    };
    let cap = cap.min(lattice_cap);
    for x in (0..=cap).rev() {
        shape[row] = old[row] + x;
        counts[i][row] = x;
        place_row(i, row + 1, left - x, mu, old, shape, counts, out);
    }
    shape[row] = old[row];
    counts[i][row] = 0;
}

/// Bring λ+ρ (orthogonal coordinates) into the level-k fundamental alcove
/// by the shifted affine Weyl action; returns the Dynkin labels and the
/// sign, or `None` for weights fixed by a reflection.
fn affine_fold(mut x: Vec<i64>, kappa: i64) -> Option<(Vec<u32>, i64)> {
    let n = x.len();
    let mut sign = 1i64;
    loop {
        // sort descending, tracking parity
        for i in 1..n {
            let mut j = i;
            while j > 0 && x[j - 1] < x[j] {
                x.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if (1..n).any(|i| x[i - 1] == x[i]) {
            return None;
        }
        let width = x[0] - x[n - 1];
        if width == kappa {
            return None;
        }
        if width < kappa {
            break;
        }
        let (a, b) = (x[0], x[n - 1]);
        x[0] = b + kappa;
        x[n - 1] = a - kappa;
        sign = -sign;
    }
    let labels = (0..n - 1).map(|i| (x[i] - x[i + 1] - 1) as u32).collect();
    Some((labels, sign))
}

/// Level-k fusion λ ⊗ μ of A_r^(1): Littlewood–Richardson products folded
/// by the affine Weyl group. Returns (ν, N_λμ^ν) for ν with nonzero
/// coefficient, ordered as [`dominant_weights`].
pub fn kac_walton(r: usize, k: u32, lam: &[u32], mu: &[u32]) -> Result<Vec<(Vec<u32>, i64)>> {
    let ok = |w: &[u32]| w.len() == r && w.iter().sum::<u32>() <= k;
    if !ok(lam) || !ok(mu) {
        return Err(ConstructError::Parameter(format!(
            "weights must be level-{k} dominant weights of A_{r}"
        )));
    }
    let kappa = k as i64 + r as i64 + 1;
    let prod = littlewood_richardson(&to_partition(lam), &to_partition(mu), r + 1);
    let mut acc: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
    for (nu, mult) in prod {
        let dynkin: Vec<u32> = (0..r).map(|i| nu[i] - nu[i + 1]).collect();
        if let Some((folded, sign)) = affine_fold(shifted_eps(&dynkin), kappa) {
            *acc.entry(folded).or_insert(0) += sign * mult as i64;
        }
    }
    let order = dominant_weights(r, k);
    Ok(order
        .into_iter()
        .filter_map(|w| acc.get(&w).filter(|&&v| v != 0).map(|&v| (w, v)))
        .collect())
}

// ---------------------------------------------------------------------------
// finite groups

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    /// table[a][b] = a·b; element 0 is the identity
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

/// Largest group accepted by [`quantum_double`].
pub const GROUP_CAP: usize = 200;

impl FiniteGroup {
    /// From a multiplication table; elements are relabelled so that the
    /// identity comes first.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0
            || table
                .iter()
                .any(|row| row.len() != n || row.iter().any(|&x| x >= n))
        {
            return Err(ConstructError::NotGroup("table is not square".into()));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| ConstructError::NotGroup("no identity".into()))?;
        // relabel: swap e and 0
        let relabel = |x: usize| {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let t: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| relabel(table[relabel(a)][relabel(b)])).collect())
            .collect();
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            let mut seen = vec![false; n];
            for b in 0..n {
                if std::mem::replace(&mut seen[t[a][b]], true) {
                    return Err(ConstructError::NotGroup(format!("row {a} is not a permutation")));
                }
                if t[a][b] == 0 {
                    inverse[a] = b;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if t[t[a][b]][c] != t[a][t[b][c]] {
                        return Err(ConstructError::NotGroup(format!("({a}{b}){c} ≠ {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { table: t, inverse })
    }

    /// The group generated by permutations (images of 0..m), elements in
    /// breadth-first order from the identity.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<FiniteGroup> {
        let m = gens.first().map_or(0, Vec::len);
        if gens.iter().any(|g| {
            let mut s = g.clone();
            s.sort_unstable();
            g.len() != m || s != (0..m).collect::<Vec<_>>()
        }) {
            return Err(ConstructError::NotGroup(
                "generators must be permutations of one set".into(),
            ));
        }
        let id: Vec<usize> = (0..m).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let h: Vec<usize> = (0..m).map(|x| g[elems[i][x]]).collect();
                if !index.contains_key(&h) {
                    if elems.len() >= GROUP_CAP * 8 {
                        return Err(ConstructError::Cap("generated group too large".into()));
                    }
                    index.insert(h.clone(), elems.len());
                    elems.push(h);
                }
            }
            i += 1;
        }
        // (a·b)(x) = a(b(x))
        let table = elems
            .iter()
            .map(|a| {
                elems
                    .iter()
                    .map(|b| index[&(0..m).map(|x| a[b[x]]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        FiniteGroup::from_table(table)
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        FiniteGroup::from_table((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
            .expect("cyclic")
    }

    /// The dihedral group of order 2m.
    pub fn dihedral(m: usize) -> FiniteGroup {
        let rot: Vec<usize> = (0..m).map(|i| (i + 1) % m).collect();
        let refl: Vec<usize> = (0..m).map(|i| (m - i) % m).collect();
        FiniteGroup::from_permutations(&[rot, refl]).expect("dihedral")
    }

    pub fn symmetric(n: usize) -> FiniteGroup {
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut swap: Vec<usize> = (0..n).collect();
        if n > 1 {
            swap.swap(0, 1);
        }
        FiniteGroup::from_permutations(&[cycle, swap]).expect("symmetric")
    }

    /// The quaternion group of order 8, as permutations of itself.
    pub fn quaternion() -> FiniteGroup {
        // left multiplication by i and j on (1, i, j, k, −1, −i, −j, −k)
        let i = vec![1, 4, 3, 6, 5, 0, 7, 2];
        let j = vec![2, 7, 4, 1, 6, 3, 0, 5];
        FiniteGroup::from_permutations(&[i, j]).expect("quaternion")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Conjugacy classes, each sorted, ordered by smallest element.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        classes_within(self, &(0..self.order()).collect::<Vec<_>>())
    }

    pub fn centre(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&z| (0..self.order()).all(|g| self.mul(z, g) == self.mul(g, z)))
            .collect()
    }

    /// Order of the commutator subgroup G′.
    pub fn derived_order(&self) -> usize {
        let n = self.order();
        let mut inside = vec![false; n];
        inside[0] = true;
        let mut elems = vec![0];
        for a in 0..n {
            for b in 0..n {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                if !inside[c] {
                    inside[c] = true;
                    elems.push(c);
                }
            }
        }
        // close under products
        let mut i = 0;
        while i < elems.len() {
            for j in 0..elems.len() {
                let c = self.mul(elems[i], elems[j]);
                if !inside[c] {
                    inside[c] = true;
                    elems.push(c);
                }
            }
            i += 1;
        }
        elems.len()
    }
}

/// Conjugacy classes of the subgroup `sub` (sorted list containing 0).
fn classes_within(g: &FiniteGroup, sub: &[usize]) -> Vec<Vec<usize>> {
    let mut seen: HashMap<usize, ()> = HashMap::new();
    let mut out = Vec::new();
    for &x in sub {
        if seen.contains_key(&x) {
            continue;
        }
        let mut cls: Vec<usize> = sub.iter().map(|&h| g.conj(h, x)).collect();
        cls.sort_unstable();
        cls.dedup();
        for &c in &cls {
            seen.insert(c, ());
        }
        out.push(cls);
    }
    out
}

/// Irreducible characters of a subgroup, as values on its classes.
#[derive(Clone, Debug)]
struct CharacterTable {
    /// chars[χ][class]
    chars: Vec<Vec<Cyclo>>,
    class_of: HashMap<usize, usize>,
}

impl CharacterTable {
    fn value(&self, chi: usize, x: usize) -> &Cyclo {
        &self.chars[chi][self.class_of[&x]]
    }
}

/// Burnside's method: central characters are the joint eigenvectors of the
/// class-multiplication matrices.
fn character_table(g: &FiniteGroup, sub: &[usize]) -> Result<CharacterTable> {
    let classes = classes_within(g, sub);
    let k = classes.len();
    let class_of: HashMap<usize, usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&x| (x, i)))
        .collect();
    let order = sub.len();
    let exponent = sub.iter().fold(1usize, |acc, &x| acc.lcm(&g.element_order(x)));
    // A_j[i][l] = #{(x, y) ∈ K_j × K_i : x y = rep_l}
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut a = vec![vec![vec![0i64; k]; k]; k];
    for (j, kj) in classes.iter().enumerate() {
        for &x in kj {
            for (l, &rl) in reps.iter().enumerate() {
                let y = g.mul(g.inv(x), rl);
                if let Some(&i) = class_of.get(&y) {
                    a[j][i][l] += 1;
                }
            }
        }
    }
    let p = crate::modp::PRIMES[1];
    let mut chosen = None;
    for attempt in 0..20i64 {
        let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ (attempt as u64 + 1).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        let w: Vec<i64> = (0..k)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                1 + (state % 97) as i64
            })
            .collect();
        let m: Vec<Vec<BigInt>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|l| BigInt::from((0..k).map(|j| w[j] * a[j][i][l]).sum::<i64>()))
                    .collect()
            })
            .collect();
        let cp = poly::charpoly_int(&m);
        if k == 1 || poly::is_squarefree_mod(&poly::reduce_int_poly(&cp, p), p) {
            chosen = Some((m, cp));
            break;
        }
    }
    let (m, cp) =
        chosen.ok_or_else(|| ConstructError::CharacterTable("no separating class combination".into()))?;
    let mut conductors = vec![exponent as u32];
    if exponent % 4 == 2 {
        conductors.push(exponent as u32 / 2);
    }
    let (_, roots) = poly::cyclotomic_roots(&cp, conductors)
        .ok_or_else(|| ConstructError::CharacterTable("eigenvalues not recognised".into()))?;
    let mq: CycloMatrix = Matrix::from_fn(k, k, |i, l| {
        Cyclo::from_rational(&BigRational::from_integer(m[i][l].clone()))
    });
    let identity_class = class_of[&0];
    let mut chars = Vec::with_capacity(k);
    for theta in &roots {
        let shifted = mq.sub(&Matrix::identity(k).scale(theta))?;
        let ker = shifted.kernel();
        if ker.len() != 1 {
            return Err(ConstructError::CharacterTable("eigenspace is not a line".into()));
        }
        let v = &ker[0];
        let norm = v[identity_class].inv()?;
        let omega: Vec<Cyclo> = v.iter().map(|x| x * &norm).collect();
        // χ(1)² Σ_j |ω_j|²/|K_j| = |H|
        let s: Cyclo = (0..k)
            .map(|j| (&omega[j] * &omega[j].conj()).scale(&q(1, classes[j].len() as i64)))
            .sum();
        let s = s
            .to_rational()
            .ok_or_else(|| ConstructError::CharacterTable("irrational norm".into()))?;
        let deg2 = BigRational::from_integer(order.into()) / s;
        let deg = deg2.to_integer().sqrt();
        if BigRational::from_integer(&deg * &deg) != deg2 {
            return Err(ConstructError::CharacterTable("degree is not an integer".into()));
        }
        let degq = BigRational::from_integer(deg);
        chars.push(
            (0..k)
                .map(|j| omega[j].scale(&(&degq / BigRational::from_integer(classes[j].len().into()))))
                .collect::<Vec<Cyclo>>(),
        );
    }
    // trivial first, then by degree, then by numeric values (descending)
    let key = |c: &Vec<Cyclo>| -> Vec<Complex64> { c.iter().map(Cyclo::to_c64).collect() };
    chars.sort_by(|x, y| {
        let (kx, ky) = (key(x), key(y));
        let trivial = |v: &[Complex64]| v.iter().all(|z| (z - 1.0).norm() < 1e-9);
        trivial(&ky)
            .cmp(&trivial(&kx))
            .then(kx[identity_class].re.partial_cmp(&ky[identity_class].re).unwrap())
            .then_with(|| {
                for (a, b) in kx.iter().zip(&ky) {
                    for (u, v) in [(a.re, b.re), (a.im, b.im)] {
                        if (u - v).abs() > 1e-9 {
                            return v.partial_cmp(&u).unwrap();
                        }
                    }
                }
                std::cmp::Ordering::Equal
            })
    });
    // column orthogonality
    for i in 0..k {
        for j in 0..k {
            let v: Cyclo = chars.iter().map(|c| &c[i] * &c[j].conj()).sum();
            let want = if i == j {
                (order / classes[i].len()) as i64
            } else {
                0
            };
            if v != Cyclo::from_int(want) {
                return Err(ConstructError::CharacterTable(
                    "column orthogonality fails".into(),
                ));
            }
        }
    }
    Ok(CharacterTable { chars, class_of })
}

/// Twisting 3-cocycle of a quantum double; only the trivial one is
/// supported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Twist {
    #[default]
    Trivial,
}

/// Quantum double of G: labels (a, χ) with a a class representative and χ
/// an irreducible character of C_G(a);
/// S = Σ_{g ∈ G(a,a′)} conj(χ′(g⁻¹ag)) conj(χ(ga′g⁻¹)) / (|C(a)||C(a′)|),
/// T = χ(a)/χ(e).
pub fn quantum_double(g: &FiniteGroup) -> Result<ModularData> {
    quantum_double_twisted(g, Twist::Trivial)
}

pub fn quantum_double_twisted(g: &FiniteGroup, twist: Twist) -> Result<ModularData> {
    let Twist::Trivial = twist;
    let n = g.order();
    if n > GROUP_CAP {
        return Err(ConstructError::Cap(format!(
            "group of order {n} exceeds {GROUP_CAP}"
        )));
    }
    let classes = g.classes();
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let centralizers: Vec<Vec<usize>> = reps
        .iter()
        .map(|&a| (0..n).filter(|&h| g.mul(h, a) == g.mul(a, h)).collect())
        .collect();
    let tables: Vec<CharacterTable> = centralizers
        .iter()
        .map(|c| character_table(g, c))
        .collect::<Result<_>>()?;
    let mut labels = Vec::new();
    let mut index = Vec::new();
    for (ci, &a) in reps.iter().enumerate() {
        for chi in 0..tables[ci].chars.len() {
            labels.push(format!("{a}:{chi}"));
            index.push((ci, chi));
        }
    }
    let r = labels.len();
    let mut s = vec![Cyclo::zero(); r * r];
    let offsets: Vec<usize> = {
        let mut o = vec![0];
        for t in &tables {
            o.push(o.last().unwrap() + t.chars.len());
        }
        o
    };
    for (ca, &a) in reps.iter().enumerate() {
        for (cb, &b) in reps.iter().enumerate() {
            // counts over g ∈ G(a, b) of (class of g⁻¹ag in C(b), class of gbg⁻¹ in C(a))
            let mut counts: HashMap<(usize, usize), i64> = HashMap::new();
            for h in 0..n {
                let hb = g.conj(h, b);
                if g.mul(a, hb) != g.mul(hb, a) {
                    continue;
                }
                let ha = g.conj(g.inv(h), a);
                let key = (tables[cb].class_of[&ha], tables[ca].class_of[&hb]);
                *counts.entry(key).or_insert(0) += 1;
            }
            let denom = q(1, (centralizers[ca].len() * centralizers[cb].len()) as i64);
            for chi in 0..tables[ca].chars.len() {
                for chip in 0..tables[cb].chars.len() {
                    let mut acc = Cyclo::zero();
                    for (&(k1, k2), &cnt) in &counts {
                        let term = &tables[cb].chars[chip][k1].conj() * &tables[ca].chars[chi][k2].conj();
                        acc += &term.scale_int(cnt);
                    }
                    s[(offsets[ca] + chi) * r + offsets[cb] + chip] = acc.scale(&denom);
                }
            }
        }
    }
    let mut t = Vec::with_capacity(r);
    for &(ci, chi) in &index {
        let tab = &tables[ci];
        let ratio = tab.value(chi, reps[ci]) * &tab.value(chi, 0).inv()?;
        t.push(
            ratio
                .root_of_unity_exponent()
                .ok_or_else(|| ConstructError::CharacterTable("χ(a)/χ(e) is not a root of unity".into()))?,
        );
    }
    Ok(ModularData::new(
        labels,
        Matrix::new(r, r, s)?,
        t,
        format!("double:order{n}"),
    )?)
}

// ---------------------------------------------------------------------------
// fixtures

/// Names accepted by [`fixture`].
pub const FIXTURES: [&str; 2] = ["m27", "m27-reconstructed"];

fn sin_pi7(k: i64) -> Cyclo {
    Cyclo::sin_2pi(&q(k, 14))
}

/// Rank-three nonunitary fixtures built from (2/√7) sin(kπ/7):
/// `m27` is the S, T of the c = −68/7 minimal model (first column not
/// positive); `m27-reconstructed` is the S that fusion-ring reconstruction
/// associates to it, with the T it is usually paired with.
pub fn fixture(name: &str) -> Result<ModularData> {
    let c = Cyclo::sqrt_rational(&q(4, 7))?;
    let e = |k: i64| &c * &sin_pi7(k);
    let (rows, t): (Vec<Vec<Cyclo>>, Vec<BigRational>) = match name {
        "m27" => (
            vec![
                vec![e(2), -e(3), e(1)],
                vec![-e(3), -e(1), e(2)],
                vec![e(1), e(2), e(3)],
            ],
            vec![q(17, 42), q(5, 42), q(-1, 42)],
        ),
        "m27-reconstructed" => (
            vec![
                vec![e(1), e(2), e(3)],
                vec![e(2), -e(3), e(1)],
                vec![e(3), e(1), -e(2)],
            ],
            vec![q(1, 42), q(-17, 42), q(-5, 42)],
        ),
        _ => return Err(ConstructError::UnknownFixture(name.to_string())),
    };
    let labels = vec!["0".into(), "1".into(), "2".into()];
    Ok(ModularData::new(
        labels,
        Matrix::from_rows(rows)?,
        t,
        format!("fixture:{name}"),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lr_of_boxes() {
        // □ ⊗ □ = (2) + (1,1)
        let p = littlewood_richardson(&[1], &[1], 3);
        assert_eq!(p.len(), 2);
        // (2,1) ⊗ (2,1) in GL3 has (3,2,1) with multiplicity 2
        let p = littlewood_richardson(&[2, 1], &[2, 1], 3);
        assert_eq!(p[&vec![3, 2, 1]], 2);
    }

    #[test]
    fn z2_double_has_four_labels() {
        let md = quantum_double(&FiniteGroup::cyclic(2)).unwrap();
        assert_eq!(md.rank(), 4);
        assert_eq!(md.s().get(0, 0), &Cyclo::from_rational(&q(1, 2)));
    }

    #[test]
    fn group_builders() {
        assert_eq!(FiniteGroup::symmetric(3).order(), 6);
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        let q8 = FiniteGroup::quaternion();
        assert_eq!(q8.order(), 8);
        assert_eq!(q8.centre().len(), 2);
        assert_eq!(q8.derived_order(), 2);
    }

    fn all_axioms(md: &ModularData) {
        let rep = crate::modular_data::verify_axioms(md, &crate::modular_data::AxiomOptions::all());
        for r in &rep.results {
            assert!(
                !matches!(r.verdict, crate::modular_data::Verdict::Fail { .. }),
                "{}: {:?}",
                md.provenance(),
                r
            );
        }
    }

    #[test]
    fn scratch_all_constructions() {
        for k in 1..=4 {
            let a = affine_a1(k).unwrap();
            all_axioms(&a);
            let b = affine_ar(1, k).unwrap();
            assert_eq!(a.s(), b.s());
            assert_eq!(a.t_exponents(), b.t_exponents());
        }
        for k in 1..=2 {
            let md = affine_ar(2, k).unwrap();
            all_axioms(&md);
            let f = md.fusion().unwrap();
            let w = dominant_weights(2, k);
            for (i, a) in w.iter().enumerate() {
                for (j, b) in w.iter().enumerate() {
                    let kw = kac_walton(2, k, a, b).unwrap();
                    for (l, c) in w.iter().enumerate() {
                        let want = kw.iter().find(|(x, _)| x == c).map_or(0, |p| p.1);
                        assert_eq!(
                            f.n(i, j, l),
                            &BigRational::from_integer(want.into()),
                            "{a:?} {b:?} {c:?}"
                        );
                    }
                }
            }
        }
        all_axioms(&lattice_data(&root_lattice_a(2)).unwrap());
        all_axioms(&lattice_data(&root_lattice_e8()).unwrap());
        for g in [
            FiniteGroup::cyclic(3),
            FiniteGroup::symmetric(3),
            FiniteGroup::quaternion(),
            FiniteGroup::dihedral(4),
        ] {
            all_axioms(&quantum_double(&g).unwrap());
        }
    }
}
