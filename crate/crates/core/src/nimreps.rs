//! NIM-reps: nonnegative integer representations a ↦ 𝒩_a of a fusion ring
//! with 𝒩₀ = I and 𝒩_aᵗ = 𝒩_{Ca}. Verification, exponents, exhaustive
//! search at fixed dimension, pairing with modular invariants, and fusion
//! graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclotomic::Cyclo;
use crate::fusion_ring::FusionRing;
use crate::invariants::ModularInvariant;
use crate::modular_data::{charge_conjugation, galois_action, ModularData, ModularError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NimRepError {
    #[error("expected {expected} matrices of equal square size")]
    Shape { expected: usize },
    #[error("data is not unitary with positive first column; q-dimensions are undefined")]
    NotUnitary,
    #[error(transparent)]
    Modular(#[from] ModularError),
}

pub type Result<T> = std::result::Result<T, NimRepError>;

type Mat = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NimRep {
    /// one dim×dim matrix per label
    pub matrices: Vec<Mat>,
}

impl NimRep {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, Vec::len)
    }

    pub fn matrix(&self, a: usize) -> &Mat {
        &self.matrices[a]
    }

    /// a ↦ N_a, (N_a)_{bc} = N_ab^c.
    pub fn regular(ring: &FusionRing) -> Option<NimRep> {
        let r = ring.rank();
        let mut matrices = Vec::with_capacity(r);
        for a in 0..r {
            let mut m = vec![vec![0; r]; r];
            for b in 0..r {
                for c in 0..r {
                    let v = ring.n(a, b, c);
                    if !v.is_integer() {
                        return None;
                    }
                    m[b][c] = v.to_integer().to_i64()?;
                }
            }
            matrices.push(m);
        }
        Some(NimRep { matrices })
    }

    pub fn transposed(&self) -> NimRep {
        NimRep {
            matrices: self.matrices.iter().map(transpose).collect(),
        }
    }

    /// Simultaneous relabelling: new index i is old index `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> NimRep {
        NimRep {
            matrices: self.matrices.iter().map(|m| permute(m, perm)).collect(),
        }
    }
}

fn transpose(m: &Mat) -> Mat {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

fn permute(m: &Mat, perm: &[usize]) -> Mat {
    let n = perm.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[perm[i]][perm[j]]).collect())
        .collect()
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            if x != 0 {
                for j in 0..n {
                    c[i][j] += x * b[k][j];
                }
            }
        }
    }
    c
}

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// verification and exponents

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NimRepReport {
    pub dim: usize,
    pub nonnegative: bool,
    pub identity: bool,
    /// 𝒩_aᵗ = 𝒩_{Ca}
    pub transpose: bool,
    /// first (a, b) with 𝒩_a𝒩_b ≠ Σ_c N_ab^c 𝒩_c
    pub representation_violation: Option<(usize, usize)>,
    /// exponents ℰ, ascending with multiplicity, when they are well defined
    pub exponents: Option<Vec<usize>>,
    /// 0 ∈ ℰ exactly once
    pub irreducible: bool,
    /// every charpoly(𝒩_a) vanishes at the q-dimension S_a0/S₀₀
    pub pf_certified: bool,
}

impl NimRepReport {
    pub fn is_valid(&self) -> bool {
        self.nonnegative
            && self.identity
            && self.transpose
            && self.representation_violation.is_none()
            && self.exponents.is_some()
    }
}

/// Multiplicities of the characters b in a representation, from the traces:
/// mult(b) = S_0b Σ_a conj(S_ab) Tr 𝒩_a. `None` if some multiplicity is not
/// a nonnegative integer.
pub fn exponents_from_traces(md: &ModularData, traces: &[i64]) -> Option<Vec<usize>> {
    let s = md.s();
    let r = md.rank();
    let mut out = Vec::new();
    for b in 0..r {
        let sum: Cyclo = (0..r)
            .filter(|&a| traces[a] != 0)
            .map(|a| s.get(a, b).conj().scale_int(traces[a]))
            .sum();
        let m = (&sum * s.get(0, b)).to_rational()?;
        if !m.is_integer() || m < BigRational::zero() {
            return None;
        }
        let k = m.to_integer().to_usize()?;
        out.extend(std::iter::repeat_n(b, k));
    }
    Some(out)
}

pub fn nimrep_exponents(md: &ModularData, rep: &NimRep) -> Option<Vec<usize>> {
    let traces: Vec<i64> = rep
        .matrices
        .iter()
        .map(|m| (0..m.len()).map(|i| m[i][i]).sum())
        .collect();
    let ex = exponents_from_traces(md, &traces)?;
    (ex.len() == rep.dim()).then_some(ex)
}

fn charpoly_at(m: &Mat, x: &Cyclo) -> Cyclo {
    let big: Vec<Vec<num_bigint::BigInt>> = m.iter().map(|r| r.iter().map(|&v| v.into()).collect()).collect();
    let cp = crate::poly::charpoly_int(&big);
    let mut acc = Cyclo::zero();
    for c in cp.iter().rev() {
        acc = &(&acc * x) + &Cyclo::from_rational(&BigRational::from_integer(c.clone()));
    }
    acc
}

pub fn verify_nimrep(md: &ModularData, rep: &NimRep) -> Result<NimRepReport> {
    let r = md.rank();
    let dim = rep.dim();
    if rep.matrices.len() != r
        || rep
            .matrices
            .iter()
            .any(|m| m.len() != dim || m.iter().any(|row| row.len() != dim))
    {
        return Err(NimRepError::Shape { expected: r });
    }
    let ring = md.fusion()?;
    let conj = charge_conjugation(md)?;
    let m = &rep.matrices;
    let nonnegative = m.iter().flatten().flatten().all(|&x| x >= 0);
    let identity = m[0] == self::identity(dim);
    let transpose = (0..r).all(|a| self::transpose(&m[a]) == m[conj[a]]);
    let ints = ring.to_i64();
    let mut representation_violation = None;
    'outer: for a in 0..r {
        for b in a..r {
            let lhs = matmul(&m[a], &m[b]);
            let mut rhs = vec![vec![0i64; dim]; dim];
            for c in 0..r {
                let k = match &ints {
                    Some(n) => n[(a * r + b) * r + c],
                    None => {
                        representation_violation = Some((a, b));
                        break 'outer;
                    }
                };
                if k != 0 {
                    for i in 0..dim {
                        for j in 0..dim {
                            rhs[i][j] += k * m[c][i][j];
                        }
                    }
                }
            }
            if lhs != rhs {
                representation_violation = Some((a, b));
                break 'outer;
            }
        }
    }
    let exponents = nimrep_exponents(md, rep);
    let irreducible = exponents
        .as_ref()
        .is_some_and(|e| e.iter().filter(|&&b| b == 0).count() == 1);
    let s = md.s();
    let pf_certified = exponents.is_some()
        && (0..r).all(|a| {
            s.get(0, 0)
                .inv()
                .map(|i0| charpoly_at(&m[a], &(s.get(a, 0) * &i0)).is_zero())
                .unwrap_or(false)
        });
    Ok(NimRepReport {
        dim,
        nonnegative,
        identity,
        transpose,
        representation_violation,
        exponents,
        irreducible,
        pf_certified,
    })
}

/// Labels a with T_bb = T_cc ⇒ S_ab conj(S_ac) ≥ 0 for all b, c; such a lie
/// in the exponents of every modular invariant.
pub fn mandatory_exponents(md: &ModularData) -> Vec<usize> {
    let r = md.rank();
    let s = md.s();
    let t = md.t_exponents();
    (0..r)
        .filter(|&a| {
            (0..r).all(|b| {
                (0..r).all(|c| {
                    if t[b] != t[c] {
                        return true;
                    }
                    let v = s.get(a, b) * &s.get(a, c).conj();
                    v.is_zero() || v.is_positive_real()
                })
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// canonical forms

fn refine(mats: &[&Mat], colors: &mut Vec<usize>) {
    let n = colors.len();
    loop {
        let sigs: Vec<(usize, Vec<(usize, Vec<(i64, i64)>)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(usize, Vec<(i64, i64)>)> = (0..n)
                    .map(|u| {
                        (
                            colors[u],
                            mats.iter().map(|m| (m[v][u], m[u][v])).collect::<Vec<_>>(),
                        )
                    })
                    .filter(|(_, e)| e.iter().any(|&(x, y)| x != 0 || y != 0))
                    .collect();
                nb.sort();
                (colors[v], nb)
            })
            .collect();
        let distinct: BTreeSet<_> = sigs.iter().collect();
        let index: BTreeMap<_, usize> = distinct.into_iter().enumerate().map(|(i, s)| (s, i)).collect();
        let new: Vec<usize> = sigs.iter().map(|s| index[s]).collect();
        let before = colors.iter().collect::<BTreeSet<_>>().len();
        let after = index.len();
        *colors = new;
        if after == before {
            return;
        }
    }
}

fn canon_search(mats: &[&Mat], colors: Vec<usize>, best: &mut Option<(Vec<Mat>, Vec<usize>)>) {
    let mut colors = colors;
    refine(mats, &mut colors);
    let n = colors.len();
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        cells.entry(colors[v]).or_default().push(v);
    }
    match cells.values().find(|c| c.len() > 1) {
        None => {
            let mut perm = vec![0; n];
            for v in 0..n {
                perm[colors[v]] = v;
            }
            let key: Vec<Mat> = mats.iter().map(|m| permute(m, &perm)).collect();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                *best = Some((key, perm));
            }
        }
        Some(cell) => {
            let cell = cell.clone();
            for &v in &cell {
                // split v off its cell: shift colours to keep them dense
                let c = colors[v];
                let next: Vec<usize> = colors
                    .iter()
                    .enumerate()
                    .map(|(u, &x)| if x > c || (x == c && u != v) { x + 1 } else { x })
                    .collect();
                canon_search(mats, next, best);
            }
        }
    }
}

/// Canonical simultaneous relabelling of a tuple of square matrices:
/// returns the permutation (new index ↦ old index) and the relabelled
/// matrices. Isomorphic tuples give identical results.
pub fn canonical_form(mats: &[Mat]) -> (Vec<usize>, Vec<Mat>) {
    let n = mats.first().map_or(0, Vec::len);
    if n == 0 {
        return (Vec::new(), mats.to_vec());
    }
    let refs: Vec<&Mat> = mats.iter().collect();
    let mut best = None;
    canon_search(&refs, vec![0; n], &mut best);
    let (key, perm) = best.expect("at least one leaf");
    (perm, key)
}

// ---------------------------------------------------------------------------
// search

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOptions {
    /// cap on partial structures examined
    pub budget: u64,
    /// drop NIM-reps missing a mandatory exponent instead of flagging them
    pub strict_mandatory: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 2_000_000,
            strict_mandatory: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NimSearch {
    pub dim: usize,
    /// irreducible NIM-reps, one per equivalence class, canonical and sorted
    pub nimreps: Vec<NimRep>,
    pub exponents: Vec<Vec<usize>>,
    /// false if the budget ran out
    pub complete: bool,
    pub nodes: u64,
    pub budget: u64,
    /// labels whose matrices are searched; the rest follow from fusion
    pub generators: Vec<usize>,
    /// exponent multiset the search was restricted to, if any
    pub target: Option<Vec<usize>>,
    /// NIM-reps dropped by the strict mandatory-exponent rule
    pub dropped_mandatory: usize,
}

/// How every basis element of the fusion algebra is obtained from words in
/// the generators.
struct Words {
    /// word k = word parent[k].0 times generator parent[k].1 (index into the
    /// extended generator list: gens followed by their conjugates)
    parent: Vec<Option<(usize, usize)>>,
    /// label a = Σ_k coeff[a][k] word_k
    coeff: Vec<Vec<BigRational>>,
}

/// Words spanning the fusion algebra, or `Err(dim)` with the dimension of
/// the span reached.
fn fusion_algebra_words(
    ring: &FusionRing,
    conj: &[usize],
    gens: &[usize],
) -> std::result::Result<Words, usize> {
    let r = ring.rank();
    let mult = |x: &[BigRational], g: usize| -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); r];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (c, o) in out.iter_mut().enumerate() {
                let n = ring.n(a, g, c);
                if !n.is_zero() {
                    *o += xa * n;
                }
            }
        }
        out
    };
    let ext: Vec<usize> = gens
        .iter()
        .copied()
        .chain(gens.iter().map(|&g| conj[g]))
        .collect();
    let mut unit = vec![BigRational::zero(); r];
    unit[0] = BigRational::one();
    let mut words: Vec<Vec<BigRational>> = vec![unit];
    let mut parent = vec![None];
    // reduced echelon basis over the words found so far
    let mut ech: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new(); // (pivot, vec, combo over words)
    let reduce = |ech: &Vec<(usize, Vec<BigRational>, Vec<BigRational>)>, v: &[BigRational], nw: usize| {
        let mut v = v.to_vec();
        let mut combo = vec![BigRational::zero(); nw];
        for (p, row, c) in ech {
            let f = v[*p].clone();
            if !f.is_zero() {
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &f * y;
                }
                for (x, y) in combo.iter_mut().zip(c) {
                    *x -= &f * y;
                }
            }
        }
        (v, combo)
    };
    let add = |ech: &mut Vec<(usize, Vec<BigRational>, Vec<BigRational>)>,
               v: &[BigRational],
               k: usize,
               nw: usize|
     -> bool {
        let (mut v, mut combo) = reduce(ech, v, nw);
        combo.resize(nw, BigRational::zero());
        combo[k] += BigRational::one();
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let s = v[p].recip();
        for x in v.iter_mut() {
            *x *= &s;
        }
        for x in combo.iter_mut() {
            *x *= &s;
        }
        for (_, row, c) in ech.iter_mut() {
            let f = row[p].clone();
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&v) {
                    *x -= &f * y;
                }
                c.resize(nw, BigRational::zero());
                for (x, y) in c.iter_mut().zip(&combo) {
                    *x -= &f * y;
                }
            }
        }
        ech.push((p, v, combo));
        true
    };
    add(&mut ech, &words[0].clone(), 0, 1);
    let mut i = 0;
    while i < words.len() && ech.len() < r {
        for (gi, &g) in ext.iter().enumerate() {
            let w = mult(&words[i], g);
            let k = words.len();
            if add(&mut ech, &w, k, k + 1) {
                words.push(w);
                parent.push(Some((i, gi)));
            }
        }
        i += 1;
    }
    if ech.len() < r {
        return Err(ech.len());
    }
    let nw = words.len();
    // express each label: solve e_a = Σ combo
    let coeff = (0..r)
        .map(|a| {
            let mut e = vec![BigRational::zero(); r];
            e[a] = BigRational::one();
            let (rest, combo) = reduce(&ech, &e, nw);
            debug_assert!(rest.iter().all(Zero::is_zero));
            let mut c: Vec<BigRational> = combo.into_iter().map(|x| -x).collect();
            c.resize(nw, BigRational::zero());
            c
        })
        .collect();
    Ok(Words { parent, coeff })
}

/// Smallest set of labels (by q-dimension, then index) whose fusion
/// matrices, with those of their conjugates, generate the fusion algebra.
pub fn choose_generators(ring: &FusionRing, conj: &[usize], qdims: &[f64]) -> Vec<usize> {
    let r = ring.rank();
    let mut order: Vec<usize> = (1..r).collect();
    order.sort_by(|&a, &b| qdims[a].partial_cmp(&qdims[b]).unwrap().then(a.cmp(&b)));
    // a single label whose matrix has distinct eigenvalues generates alone
    for &a in &order {
        if fusion_algebra_words(ring, conj, &[a]).is_ok() {
            return vec![a];
        }
    }
    let mut gens: Vec<usize> = Vec::new();
    let mut reached = 1;
    for &a in &order {
        if gens.contains(&conj[a]) {
            continue;
        }
        let mut with = gens.clone();
        with.push(a);
        match fusion_algebra_words(ring, conj, &with) {
            Ok(_) => return with,
            Err(d) if d > reached => {
                gens = with;
                reached = d;
            }
            Err(_) => {}
        }
    }
    gens
}

/// Per-generator data for the search.
struct GenInfo {
    label: usize,
    symmetric: bool,
    unit: bool,
    max_entry: i64,
    /// ‖𝒩_g‖ = q-dimension
    norm: f64,
}

struct Target {
    traces: Vec<i64>,
    /// Tr(𝒩_g 𝒩_hᵗ) for generator pairs
    gram: Vec<Vec<i64>>,
}

/// Marks entries not chosen yet while every label is searched.
const UNSET: i64 = -1;

/// Fusion rules used for the partial product inequalities when every label
/// is searched: Σ_z (𝒩_a)_{xz}(𝒩_b)_{zy} = Σ_c N_ab^c (𝒩_c)_{xy}, where the
/// left side only grows as entries and states are added and unset entries
/// on the right are bounded by ⌊d_c⌋.
struct ProductRules {
    rank: usize,
    n: Vec<i64>,
    /// label ↦ (searched index, transposed); `None` for the identity
    source: Vec<Option<(usize, bool)>>,
    bound: Vec<i64>,
    /// c ↦ pairs (a, b) with N_ab^c ≠ 0
    producing: Vec<Vec<(usize, usize)>>,
}

impl ProductRules {
    fn entry(&self, cur: &[Mat], a: usize, x: usize, y: usize) -> i64 {
        match self.source[a] {
            None => i64::from(x == y),
            Some((g, false)) => cur[g][x][y],
            Some((g, true)) => cur[g][y][x],
        }
    }

    fn check(&self, cur: &[Mat], a: usize, b: usize, x: usize, y: usize, m: usize) -> bool {
        let r = self.rank;
        let lhs: i64 = (0..m)
            .map(|z| self.entry(cur, a, x, z).max(0) * self.entry(cur, b, z, y).max(0))
            .sum();
        let mut rhs = 0;
        for c in 0..r {
            let k = self.n[(a * r + b) * r + c];
            if k != 0 {
                let v = self.entry(cur, c, x, y);
                rhs += k * if v == UNSET { self.bound[c] } else { v };
            }
        }
        lhs <= rhs
    }

    /// Inequalities affected by a change of label c at (x, y).
    fn holds_after(&self, cur: &[Mat], m: usize, c: usize, x: usize, y: usize) -> bool {
        let r = self.rank;
        for o in 1..r {
            for u in 0..m {
                if !self.check(cur, c, o, x, u, m) || !self.check(cur, o, c, u, y, m) {
                    return false;
                }
            }
        }
        self.producing[c]
            .iter()
            .all(|&(a, b)| self.check(cur, a, b, x, y, m))
    }
}

struct Engine<'a> {
    md: &'a ModularData,
    gens: Vec<GenInfo>,
    rules: Option<ProductRules>,
    words: Words,
    conj: Vec<usize>,
    target: Option<Target>,
    budget: u64,
    nodes: u64,
    exhausted: bool,
}

fn spectral_norm(m: &Mat, k: usize) -> f64 {
    let d = DMatrix::from_fn(k, k, |i, j| m[i][j] as f64);
    d.singular_values().iter().cloned().fold(0.0, f64::max)
}

impl Engine<'_> {
    /// All ways to attach a new boundary state k to a partial structure.
    fn extensions(&mut self, state: &[Mat], k: usize) -> Vec<Vec<Mat>> {
        // entries to choose: per generator, (k, j) and (j, k) for j < k (one
        // of them if symmetric) and the diagonal
        let mut slots = Vec::new();
        if self.rules.is_some() {
            for g in 0..self.gens.len() {
                slots.push((g, k, k));
            }
            for j in 0..k {
                for (g, info) in self.gens.iter().enumerate() {
                    slots.push((g, k, j));
                    if !info.symmetric {
                        slots.push((g, j, k));
                    }
                }
            }
        } else {
            for (g, info) in self.gens.iter().enumerate() {
                for j in 0..k {
                    slots.push((g, k, j));
                    if !info.symmetric {
                        slots.push((g, j, k));
                    }
                }
                slots.push((g, k, k));
            }
        }
        let fresh = if self.rules.is_some() { UNSET } else { 0 };
        let mut grown: Vec<Mat> = state
            .iter()
            .map(|m| {
                let mut g = vec![vec![fresh; k + 1]; k + 1];
                for i in 0..k {
                    g[i][..k].copy_from_slice(&m[i][..k]);
                }
                g
            })
            .collect();
        let mut out = Vec::new();
        self.fill(&slots, 0, &mut grown, k, &mut out);
        out
    }

    fn fill(
        &mut self,
        slots: &[(usize, usize, usize)],
        idx: usize,
        cur: &mut Vec<Mat>,
        k: usize,
        out: &mut Vec<Vec<Mat>>,
    ) {
        if self.exhausted {
            return;
        }
        if idx == slots.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            if self.accept(cur, k + 1) {
                out.push(cur.clone());
            }
            return;
        }
        let (g, i, j) = slots[idx];
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let info = &self.gens[g];
        let sym = info.symmetric;
        let unit = info.unit;
        let max = info.max_entry;
        let norm2 = (info.norm * info.norm + 1e-9).floor() as i64;
        for v in 0..=max {
            cur[g][i][j] = v;
            if sym {
                cur[g][j][i] = v;
            }
            // row/column squared norms bounded by ‖𝒩_g‖²
            let row: i64 = cur[g][i].iter().map(|&x| x.max(0).pow(2)).sum();
            let col: i64 = (0..=k).map(|t| cur[g][t][j].max(0).pow(2)).sum();
            if row > norm2 || col > norm2 {
                break;
            }
            if unit
                && (cur[g][i].iter().filter(|&&x| x > 0).count() > 1
                    || (0..=k).filter(|&t| cur[g][t][j] > 0).count() > 1)
            {
                break;
            }
            if let Some(t) = &self.target {
                let label = self.gens[g].label;
                let tr: i64 = (0..=k).map(|t| cur[g][t][t].max(0)).sum();
                let sq: i64 = cur[g].iter().flatten().map(|&x| x.max(0).pow(2)).sum();
                if tr > t.traces[label] || sq > t.gram[g][g] {
                    break;
                }
            }
            if let Some(p) = &self.rules {
                let label = self.gens[g].label;
                let other = if sym {
                    (label, j, i)
                } else {
                    (self.conj[label], j, i)
                };
                if !p.holds_after(cur, k + 1, label, i, j)
                    || !p.holds_after(cur, k + 1, other.0, other.1, other.2)
                {
                    // the left sides grow with v
                    continue;
                }
            }
            self.fill(slots, idx + 1, cur, k, out);
        }
        let reset = if self.rules.is_some() { UNSET } else { 0 };
        cur[g][i][j] = reset;
        if sym {
            cur[g][j][i] = reset;
        }
    }

    /// Hereditary checks on a partial structure of size n.
    fn accept(&self, mats: &[Mat], n: usize) -> bool {
        let k = n - 1;
        // connected: the new state touches an earlier one
        if k > 0 && !mats.iter().any(|m| (0..k).any(|j| m[k][j] != 0 || m[j][k] != 0)) {
            return false;
        }
        for (g, info) in self.gens.iter().enumerate() {
            if spectral_norm(&mats[g], n) > info.norm + 1e-9 {
                return false;
            }
        }
        if let Some(t) = &self.target {
            for (g, info) in self.gens.iter().enumerate() {
                let tr: i64 = (0..n).map(|i| mats[g][i][i]).sum();
                if tr > t.traces[info.label] {
                    return false;
                }
                for h in 0..self.gens.len() {
                    let ip: i64 = (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .map(|(i, j)| mats[g][i][j] * mats[h][i][j])
                        .sum();
                    if ip > t.gram[g][h] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Complete a full generator assignment to a NIM-rep, if possible.
    fn complete(&self, mats: &[Mat]) -> Option<NimRep> {
        let n = mats[0].len();
        let ng = self.gens.len();
        let ext: Vec<Mat> = mats.iter().cloned().chain(mats.iter().map(transpose)).collect();
        if let Some(t) = &self.target {
            for (g, info) in self.gens.iter().enumerate() {
                let tr: i64 = (0..n).map(|i| mats[g][i][i]).sum();
                if tr != t.traces[info.label] {
                    return None;
                }
                for h in 0..ng {
                    let ip: i64 = (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .map(|(i, j)| mats[g][i][j] * mats[h][i][j])
                        .sum();
                    if ip != t.gram[g][h] {
                        return None;
                    }
                }
            }
        }
        // generators must commute
        for a in 0..ext.len() {
            for b in a + 1..ext.len() {
                if matmul(&ext[a], &ext[b]) != matmul(&ext[b], &ext[a]) {
                    return None;
                }
            }
        }
        let mut word_mats: Vec<Mat> = vec![identity(n)];
        for p in self.words.parent.iter().skip(1) {
            let (w, g) = p.expect("non-root words have parents");
            let m = matmul(&word_mats[w], &ext[g]);
            if m.iter().flatten().any(|x| x.abs() > 1 << 40) {
                return None;
            }
            word_mats.push(m);
        }
        let r = self.md.rank();
        let mut matrices = Vec::with_capacity(r);
        for a in 0..r {
            let mut acc = vec![vec![BigRational::zero(); n]; n];
            for (k, c) in self.words.coeff[a].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        if word_mats[k][i][j] != 0 {
                            acc[i][j] += c * BigRational::from_integer(word_mats[k][i][j].into());
                        }
                    }
                }
            }
            let mut m = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let v = &acc[i][j];
                    if !v.is_integer() || v < &BigRational::zero() {
                        return None;
                    }
                    m[i][j] = v.to_integer().to_i64()?;
                }
            }
            matrices.push(m);
        }
        let rep = NimRep { matrices };
        let _ = &self.conj;
        let report = verify_nimrep(self.md, &rep).ok()?;
        (report.is_valid() && report.irreducible).then_some(rep)
    }
}

fn qdims(md: &ModularData) -> Result<Vec<f64>> {
    let s = md.s().to_c64();
    let s00 = s.get(0, 0).re;
    if s00 <= 0.0 || (0..md.rank()).any(|a| s.get(a, 0).re <= 0.0 || s.get(a, 0).im.abs() > 1e-9) {
        return Err(NimRepError::NotUnitary);
    }
    Ok((0..md.rank()).map(|a| s.get(a, 0).re / s00).collect())
}

fn run_search(
    md: &ModularData,
    dim: usize,
    target: Option<Vec<usize>>,
    opts: &SearchOptions,
) -> Result<NimSearch> {
    let ring = md.fusion()?;
    let conj = charge_conjugation(md)?;
    let q = qdims(md)?;
    let mut gens = choose_generators(ring, &conj, &q);
    let mut rules = None;
    if gens.len() > 1 {
        // several generators: search every label and prune with the fusion rules
        gens = (1..md.rank()).filter(|&a| a <= conj[a]).collect();
        let mut source = vec![None; md.rank()];
        for (i, &g) in gens.iter().enumerate() {
            source[g] = Some((i, false));
            if conj[g] != g {
                source[conj[g]] = Some((i, true));
            }
        }
        let bound = q.iter().map(|d| (d + 1e-9).floor() as i64).collect();
        let r = md.rank();
        rules = ring.to_i64().map(|n| {
            let producing = (0..r)
                .map(|c| {
                    (1..r)
                        .flat_map(|a| (1..r).map(move |b| (a, b)))
                        .filter(|&(a, b)| n[(a * r + b) * r + c] != 0)
                        .collect()
                })
                .collect();
            ProductRules {
                rank: r,
                n,
                source,
                bound,
                producing,
            }
        });
    }
    let words = fusion_algebra_words(ring, &conj, &gens).expect("the full label set generates");
    let infos: Vec<GenInfo> = gens
        .iter()
        .map(|&g| GenInfo {
            label: g,
            symmetric: conj[g] == g,
            unit: (q[g] - 1.0).abs() < 1e-9,
            max_entry: (q[g] + 1e-9).floor() as i64,
            norm: q[g],
        })
        .collect();
    let tgt = target.as_ref().map(|ex| {
        let s = md.s();
        let ratio = |a: usize, b: usize| s.get(a, b) * &s.get(0, b).inv().expect("unitary");
        let traces: Vec<i64> = (0..md.rank())
            .map(|a| {
                let v: Cyclo = ex.iter().map(|&b| ratio(a, b)).sum();
                v.to_rational()
                    .filter(|x| x.is_integer())
                    .map_or(-1, |x| x.to_integer().to_i64().unwrap_or(-1))
            })
            .collect();
        let gram: Vec<Vec<i64>> = gens
            .iter()
            .map(|&g| {
                gens.iter()
                    .map(|&h| {
                        let v: Cyclo = ex.iter().map(|&b| &ratio(g, b) * &ratio(h, b).conj()).sum();
                        v.to_rational()
                            .filter(|x| x.is_integer())
                            .map_or(-1, |x| x.to_integer().to_i64().unwrap_or(-1))
                    })
                    .collect()
            })
            .collect();
        Target { traces, gram }
    });
    let mut engine = Engine {
        md,
        gens: infos,
        rules,
        words,
        conj: conj.clone(),
        target: tgt,
        budget: opts.budget,
        nodes: 0,
        exhausted: false,
    };
    let infeasible = engine
        .target
        .as_ref()
        .is_some_and(|t| t.traces.iter().any(|&x| x < 0) || t.gram.iter().flatten().any(|&x| x < 0));
    let mut level: BTreeMap<Vec<Mat>, ()> = BTreeMap::new();
    if dim > 0 && !infeasible {
        level.insert(vec![Vec::new(); engine.gens.len()], ());
        for k in 0..dim {
            let mut next: BTreeMap<Vec<Mat>, ()> = BTreeMap::new();
            for state in level.keys() {
                for ext in engine.extensions(state, k) {
                    let (_, key) = canonical_form(&ext);
                    next.insert(key, ());
                }
                if engine.exhausted {
                    break;
                }
            }
            level = next;
            if engine.exhausted {
                break;
            }
        }
    }
    let mut found: BTreeSet<NimRep> = BTreeSet::new();
    if !engine.exhausted && dim > 0 && !infeasible {
        for state in level.keys() {
            if let Some(rep) = engine.complete(state) {
                let (perm, _) = canonical_form(&rep.matrices);
                found.insert(rep.permuted(&perm));
            }
        }
    }
    let mandatory = mandatory_exponents(md);
    let mut nimreps = Vec::new();
    let mut exponents = Vec::new();
    let mut dropped_mandatory = 0;
    for rep in found {
        let ex = nimrep_exponents(md, &rep).expect("verified");
        if let Some(t) = &target {
            if &ex != t {
                continue;
            }
        }
        if opts.strict_mandatory && mandatory.iter().any(|a| !ex.contains(a)) {
            dropped_mandatory += 1;
            continue;
        }
        nimreps.push(rep);
        exponents.push(ex);
    }
    Ok(NimSearch {
        dim,
        nimreps,
        exponents,
        complete: !engine.exhausted,
        nodes: engine.nodes,
        budget: opts.budget,
        generators: gens,
        target,
        dropped_mandatory,
    })
}

/// All irreducible NIM-reps of dimension `dim`, up to simultaneous
/// relabelling of boundary states.
pub fn search_nimreps(md: &ModularData, dim: usize, opts: &SearchOptions) -> Result<NimSearch> {
    run_search(md, dim, None, opts)
}

/// NIM-reps with the given exponent multiset (dimension = its size). The
/// known traces Tr 𝒩_a and Tr 𝒩_g𝒩_hᵗ prune the search.
pub fn search_nimreps_with_exponents(
    md: &ModularData,
    exponents: &[usize],
    opts: &SearchOptions,
) -> Result<NimSearch> {
    let mut ex = exponents.to_vec();
    ex.sort_unstable();
    run_search(md, ex.len(), Some(ex), opts)
}

/// Whether a multiset could be the exponents of a NIM-rep: closed under
/// conjugation and Galois, 0 exactly once, traces nonnegative integers.
pub fn admissible_exponents(md: &ModularData, ex: &[usize]) -> bool {
    let Ok(conj) = charge_conjugation(md) else {
        return false;
    };
    let count = |v: &[usize]| {
        let mut m = BTreeMap::new();
        for &x in v {
            *m.entry(x).or_insert(0usize) += 1;
        }
        m
    };
    let base = count(ex);
    if base.get(&0) != Some(&1) {
        return false;
    }
    let mapped: Vec<usize> = ex.iter().map(|&b| conj[b]).collect();
    if count(&mapped) != base {
        return false;
    }
    if let Ok(action) = galois_action(md) {
        for g in &action {
            let img: Vec<usize> = ex.iter().map(|&b| g.perm[b]).collect();
            if count(&img) != base {
                return false;
            }
        }
    }
    let s = md.s();
    (0..md.rank()).all(|a| {
        let v: Cyclo = ex
            .iter()
            .map(|&b| s.get(a, b) * &s.get(0, b).inv().expect("nonzero"))
            .sum();
        v.to_rational()
            .is_some_and(|x| x.is_integer() && x >= BigRational::zero())
    })
}

// ---------------------------------------------------------------------------
// matching

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NimRepStatus {
    pub exponents: Vec<usize>,
    /// Tr 𝒩_a ∈ ℤ≥0 and equals Σ_{b∈ℰ} S_ab/S_0b
    pub traces_ok: bool,
    /// mandatory exponents absent from ℰ
    pub missing_mandatory: Vec<usize>,
    /// indices of invariants with the same exponents
    pub partners: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub mandatory: Vec<usize>,
    /// per invariant: indices of NIM-reps with ℰ_M = ℰ(𝒩)
    pub invariant_partners: Vec<Vec<usize>>,
    pub nimreps: Vec<NimRepStatus>,
    pub unmatched_invariants: Vec<usize>,
    pub unmatched_nimreps: Vec<usize>,
    /// NIM-reps excluded in strict mode
    pub rejected_mandatory: Vec<usize>,
}

/// Pair invariants and NIM-reps by exponent multisets. NIM-reps missing a
/// mandatory exponent are flagged, or excluded when `strict`.
pub fn match_invariants(
    md: &ModularData,
    nimreps: &[NimRep],
    invariants: &[ModularInvariant],
    strict: bool,
) -> MatchReport {
    let mandatory = mandatory_exponents(md);
    let s = md.s();
    let mut statuses: Vec<NimRepStatus> = nimreps
        .iter()
        .map(|rep| {
            let exponents = nimrep_exponents(md, rep).unwrap_or_default();
            let traces_ok = (0..md.rank()).all(|a| {
                let tr: i64 = (0..rep.dim()).map(|i| rep.matrices[a][i][i]).sum();
                let v: Cyclo = exponents
                    .iter()
                    .map(|&b| s.get(a, b) * &s.get(0, b).inv().expect("nonzero"))
                    .sum();
                tr >= 0 && v == Cyclo::from_int(tr)
            });
            let missing_mandatory = mandatory
                .iter()
                .copied()
                .filter(|a| !exponents.contains(a))
                .collect();
            NimRepStatus {
                exponents,
                traces_ok,
                missing_mandatory,
                partners: Vec::new(),
            }
        })
        .collect();
    let rejected_mandatory: Vec<usize> = if strict {
        (0..nimreps.len())
            .filter(|&i| !statuses[i].missing_mandatory.is_empty())
            .collect()
    } else {
        Vec::new()
    };
    let mut invariant_partners = Vec::with_capacity(invariants.len());
    for (mi, m) in invariants.iter().enumerate() {
        let ex = m.exponents();
        let partners: Vec<usize> = (0..nimreps.len())
            .filter(|i| !rejected_mandatory.contains(i) && statuses[*i].exponents == ex)
            .collect();
        for &p in &partners {
            statuses[p].partners.push(mi);
        }
        invariant_partners.push(partners);
    }
    let unmatched_invariants = (0..invariants.len())
        .filter(|&i| invariant_partners[i].is_empty())
        .collect();
    let unmatched_nimreps = (0..nimreps.len())
        .filter(|&i| statuses[i].partners.is_empty())
        .collect();
    MatchReport {
        mandatory,
        invariant_partners,
        nimreps: statuses,
        unmatched_invariants,
        unmatched_nimreps,
        rejected_mandatory,
    }
}

// ---------------------------------------------------------------------------
// fusion graphs

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FusionGraph {
    pub nodes: usize,
    /// (α, β, multiplicity) with α ≤ β, from paired arrows and loops
    pub undirected: Vec<(usize, usize, i64)>,
    /// unpaired arrows α → β
    pub directed: Vec<(usize, usize, i64)>,
}

/// (𝒩_a)_{αβ} arrows α → β, with each pair α → β, β → α merged into one
/// undirected edge.
pub fn fusion_graph(rep: &NimRep, a: usize) -> FusionGraph {
    let m = &rep.matrices[a];
    let n = m.len();
    let mut undirected = Vec::new();
    let mut directed = Vec::new();
    for i in 0..n {
        if m[i][i] != 0 {
            undirected.push((i, i, m[i][i]));
        }
        for j in i + 1..n {
            let both = m[i][j].min(m[j][i]);
            if both > 0 {
                undirected.push((i, j, both));
            }
            if m[i][j] > both {
                directed.push((i, j, m[i][j] - both));
            }
            if m[j][i] > both {
                directed.push((j, i, m[j][i] - both));
            }
        }
    }
    directed.sort_unstable();
    FusionGraph {
        nodes: n,
        undirected,
        directed,
    }
}

impl FusionGraph {
    /// Symmetric adjacency matrix of the undirected part.
    pub fn adjacency(&self) -> Mat {
        let mut m = vec![vec![0; self.nodes]; self.nodes];
        for &(i, j, k) in &self.undirected {
            m[i][j] = k;
            m[j][i] = k;
        }
        m
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{name}\" {{");
        for v in 0..self.nodes {
            let _ = writeln!(s, "  n{v} [label=\"{v}\"];");
        }
        for &(i, j, k) in &self.undirected {
            for _ in 0..k {
                let _ = writeln!(s, "  n{i} -> n{j} [dir=none];");
            }
        }
        for &(i, j, k) in &self.directed {
            for _ in 0..k {
                let _ = writeln!(s, "  n{i} -> n{j};");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Adjacency matrices of the simply-laced Dynkin diagrams, for comparison.
pub fn dynkin_adjacency(series: char, n: usize) -> Option<Mat> {
    let mut m = vec![vec![0i64; n]; n];
    let mut edge = |i: usize, j: usize| {
        m[i][j] = 1;
        m[j][i] = 1;
    };
    match (series, n) {
        ('A', n) if n >= 1 => (1..n).for_each(|i| edge(i - 1, i)),
        ('D', n) if n >= 4 => {
            (1..n - 1).for_each(|i| edge(i - 1, i));
            edge(n - 3, n - 1);
        }
        ('E', 6..=8) => {
            (1..n - 1).for_each(|i| edge(i - 1, i));
            edge(2, n - 1);
        }
        ('T', n) if n >= 1 => {
            (1..n).for_each(|i| edge(i - 1, i));
            m[n - 1][n - 1] = 1;
        }
        _ => return None,
    }
    Some(m)
}

/// Whether two adjacency matrices describe isomorphic graphs.
pub fn isomorphic(a: &Mat, b: &Mat) -> bool {
    a.len() == b.len()
        && canonical_form(std::slice::from_ref(a)).1 == canonical_form(std::slice::from_ref(b)).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::affine_a1;

    #[test]
    fn regular_rep_is_valid() {
        let md = affine_a1(4).unwrap();
        let rep = NimRep::regular(md.fusion().unwrap()).unwrap();
        let r = verify_nimrep(&md, &rep).unwrap();
        assert!(r.is_valid() && r.irreducible && r.pf_certified);
        assert_eq!(r.exponents.unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn a1_level_ten_dim_six_is_e6() {
        let md = affine_a1(10).unwrap();
        let found = search_nimreps(&md, 6, &SearchOptions::default()).unwrap();
        assert!(found.complete);
        assert_eq!(found.exponents, vec![vec![0, 3, 4, 6, 7, 10]]);
        let g = fusion_graph(&found.nimreps[0], 1);
        assert!(g.directed.is_empty());
        assert!(isomorphic(&g.adjacency(), &dynkin_adjacency('E', 6).unwrap()));
    }

    #[test]
    fn a1_level_five_dim_three_is_tadpole() {
        let md = affine_a1(5).unwrap();
        let found = search_nimreps(&md, 3, &SearchOptions::default()).unwrap();
        assert_eq!(found.nimreps.len(), 1);
        let g = fusion_graph(&found.nimreps[0], 1);
        assert!(isomorphic(&g.adjacency(), &dynkin_adjacency('T', 3).unwrap()));
        // the unit label 5 is mandatory but absent
        assert!(mandatory_exponents(&md).contains(&5));
        let strict = search_nimreps(
            &md,
            3,
            &SearchOptions {
                strict_mandatory: true,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert!(strict.nimreps.is_empty());
        assert_eq!(strict.dropped_mandatory, 1);
    }

    #[test]
    fn canonical_form_is_invariant() {
        let m: Mat = vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, 1, 1]];
        let p = permute(&m, &[2, 0, 1]);
        assert_eq!(canonical_form(&[m]).1, canonical_form(&[p]).1);
    }
}
