//! Modular invariants: nonnegative integer matrices M with M₀₀ = 1
//! commuting with S and T. Verification with the standard selection rules,
//! simple-current invariants, and exhaustive enumeration in the commutant.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{Cyclo, CycloError};
use crate::linalg::{
    commutant_basis_of, CommutantPattern, CycloMatrix, IntMatrix, LinalgError, Matrix, RatMatrix,
};
use crate::modular_data::{find_units, galois_action, Centre, GaloisData, ModularData, ModularError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("matrix is {rows}×{cols}, data has rank {rank}")]
    Shape { rows: usize, cols: usize, rank: usize },
    #[error("label {0} is not a unit")]
    NotUnit(usize),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

pub type Result<T> = std::result::Result<T, InvariantError>;

/// A verified modular invariant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModularInvariant {
    m: Vec<Vec<i64>>,
}

impl ModularInvariant {
    /// Wrap a matrix without checking it; see [`verify_mi`].
    pub fn new_unchecked(m: Vec<Vec<i64>>) -> Self {
        ModularInvariant { m }
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.m[a][b]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn to_int_matrix(&self) -> IntMatrix {
        let n = self.rank();
        Matrix::from_fn(n, n, |a, b| BigInt::from(self.m[a][b]))
    }

    pub fn trace(&self) -> i64 {
        (0..self.rank()).map(|a| self.m[a][a]).sum()
    }

    /// Exponents: a repeated M_aa times, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        (0..self.rank())
            .flat_map(|a| std::iter::repeat_n(a, self.m[a][a].max(0) as usize))
            .collect()
    }

    pub fn is_permutation(&self) -> bool {
        let n = self.rank();
        (0..n).all(|a| {
            self.m[a].iter().all(|&x| x == 0 || x == 1)
                && self.m[a].iter().sum::<i64>() == 1
                && (0..n).map(|b| self.m[b][a]).sum::<i64>() == 1
        })
    }

    /// M ↦ P M Q for permutations given as images.
    pub fn permuted(&self, left: &[usize], right: &[usize]) -> ModularInvariant {
        let n = self.rank();
        let mut m = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                m[left[a]][right[b]] = self.m[a][b];
            }
        }
        ModularInvariant { m }
    }

    /// The partition function Σ M_ab χ_a χ̄_b, grouping rows with identical
    /// content: |χ₀+χ₆|² + …
    pub fn render(&self, labels: &[String]) -> String {
        let n = self.rank();
        let chi = |set: &[(usize, i64)]| -> String {
            set.iter()
                .map(|&(a, c)| {
                    if c == 1 {
                        format!("χ{}", labels[a])
                    } else {
                        format!("{c}χ{}", labels[a])
                    }
                })
                .collect::<Vec<_>>()
                .join("+")
        };
        let mut groups: Vec<(Vec<usize>, &Vec<i64>)> = Vec::new();
        for a in 0..n {
            if self.m[a].iter().all(|&x| x == 0) {
                continue;
            }
            match groups.iter_mut().find(|(_, row)| **row == self.m[a]) {
                Some((rows, _)) => rows.push(a),
                None => groups.push((vec![a], &self.m[a])),
            }
        }
        let mut terms = Vec::new();
        for (rows, row) in groups {
            let right: Vec<(usize, i64)> = (0..n).filter(|&b| row[b] != 0).map(|b| (b, row[b])).collect();
            let left: Vec<(usize, i64)> = rows.iter().map(|&a| (a, 1)).collect();
            let support: Vec<usize> = right.iter().map(|p| p.0).collect();
            let c = right[0].1;
            if support == rows && right.iter().all(|p| p.1 == c) {
                let pre = if c == 1 { String::new() } else { c.to_string() };
                terms.push(format!("{pre}|{}|²", chi(&left)));
            } else {
                let wrap = |s: String, k: usize| if k > 1 { format!("({s})") } else { s };
                terms.push(format!(
                    "{}·conj{}",
                    wrap(chi(&left), left.len()),
                    format_args!("({})", chi(&right))
                ));
            }
        }
        terms.join(" + ")
    }
}

impl Serialize for ModularInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for ModularInvariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(ModularInvariant {
            m: Vec::deserialize(d)?,
        })
    }
}

// ---------------------------------------------------------------------------
// verification

/// Outcome of [`verify_mi`]. The first four fields are the defining
/// conditions; the rest are consequences reported as diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MiReport {
    pub commutes_s: bool,
    pub commutes_t: bool,
    pub nonnegative: bool,
    pub vacuum_one: bool,
    /// M_ab ≠ 0 with T_a ≠ T_b
    pub t_rule: Vec<(usize, usize)>,
    /// (J, J′, c, d): M_{J0,J′0} ≠ 0 and M_cd ≠ 0 but φ_J(c) ≠ φ_J′(d)
    pub unit_rule: Vec<(usize, usize, usize, usize)>,
    /// (J, J′, a, b): M_{J0,J′0} ≠ 0 but M_{Ja,J′b} ≠ M_ab
    pub unit_symmetry: Vec<(usize, usize, usize, usize)>,
    /// (ℓ, a, b): M_ab ≠ 0 with ε_ℓ(a) ≠ ε_ℓ(b)
    pub galois_rule: Vec<(i64, usize, usize)>,
    /// (ℓ, a, b): M_{σa,σb} ≠ M_ab
    pub galois_symmetry: Vec<(i64, usize, usize)>,
    /// a with Σ_b S_ab M_b0 < 0
    pub positivity: Vec<usize>,
    /// S₀₀² Σ M_ab ≤ 1
    pub sum_bound: bool,
}

impl MiReport {
    pub fn is_invariant(&self) -> bool {
        self.commutes_s && self.commutes_t && self.nonnegative && self.vacuum_one
    }

    /// Invariant, and every derived rule holds as well.
    pub fn is_consistent(&self) -> bool {
        self.is_invariant()
            && self.t_rule.is_empty()
            && self.unit_rule.is_empty()
            && self.unit_symmetry.is_empty()
            && self.galois_rule.is_empty()
            && self.galois_symmetry.is_empty()
            && self.positivity.is_empty()
            && self.sum_bound
    }
}

fn to_cyclo(m: &[Vec<i64>]) -> CycloMatrix {
    let n = m.len();
    Matrix::from_fn(n, n, |a, b| Cyclo::from_int(m[a][b]))
}

/// Symmetry data used by the selection rules; computed once per datum.
#[derive(Clone, Debug)]
pub struct Symmetries {
    pub galois: Vec<GaloisData>,
    pub centre: Option<Centre>,
}

impl Symmetries {
    pub fn of(md: &ModularData) -> Symmetries {
        Symmetries {
            galois: galois_action(md).unwrap_or_default(),
            centre: find_units(md).ok(),
        }
    }
}

pub fn verify_mi(md: &ModularData, m: &[Vec<i64>]) -> Result<MiReport> {
    verify_mi_with(md, m, &Symmetries::of(md))
}

pub fn verify_mi_with(md: &ModularData, m: &[Vec<i64>], sym: &Symmetries) -> Result<MiReport> {
    let n = md.rank();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(InvariantError::Shape {
            rows: m.len(),
            cols: m.first().map_or(0, Vec::len),
            rank: n,
        });
    }
    let s = md.s();
    let mc = to_cyclo(m);
    let commutes_s = mc.matmul(s)? == s.matmul(&mc)?;
    let t = md.t_exponents();
    let mut rep = MiReport {
        commutes_s,
        nonnegative: m.iter().flatten().all(|&x| x >= 0),
        vacuum_one: m[0][0] == 1,
        ..Default::default()
    };
    for a in 0..n {
        for b in 0..n {
            if m[a][b] != 0 && t[a] != t[b] {
                rep.t_rule.push((a, b));
            }
        }
    }
    rep.commutes_t = rep.t_rule.is_empty();
    if let Some(centre) = &sym.centre {
        for j in &centre.units {
            for jp in &centre.units {
                if m[j.label][jp.label] == 0 {
                    continue;
                }
                // φ_J(c) = φ_J′(d) ⇔ Q_J(c)/n_J ≡ Q_J′(d)/n_J′ mod 1
                for c in 0..n {
                    for d in 0..n {
                        let lhs = BigRational::new(j.q[c].into(), (j.order as i64).into());
                        let rhs = BigRational::new(jp.q[d].into(), (jp.order as i64).into());
                        let diff = lhs - rhs;
                        if m[c][d] != 0 && !diff.is_integer() {
                            rep.unit_rule.push((j.label, jp.label, c, d));
                        }
                        if m[j.perm[c]][jp.perm[d]] != m[c][d] {
                            rep.unit_symmetry.push((j.label, jp.label, c, d));
                        }
                    }
                }
            }
        }
    }
    for g in &sym.galois {
        for a in 0..n {
            for b in 0..n {
                if m[a][b] != 0 && g.signs[a] != g.signs[b] {
                    rep.galois_rule.push((g.ell, a, b));
                }
                if m[g.perm[a]][g.perm[b]] != m[a][b] {
                    rep.galois_symmetry.push((g.ell, a, b));
                }
            }
        }
    }
    for a in 0..n {
        let v: Cyclo = (0..n)
            .filter(|&b| m[b][0] != 0)
            .map(|b| s.get(a, b).scale_int(m[b][0]))
            .sum();
        let ok = v.is_zero() || (v.is_real() && v.is_positive_real());
        if !ok {
            rep.positivity.push(a);
        }
    }
    let total: i64 = m.iter().flatten().sum();
    let s00 = s.get(0, 0);
    let lhs = &(s00 * &s00.conj()).scale_int(total);
    rep.sum_bound = lhs
        .cmp_real(&Cyclo::one())
        .is_ok_and(|o| o != std::cmp::Ordering::Greater);
    Ok(rep)
}

/// The fact that M₀ₐ = δ₀ₐ forces a permutation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationCheck {
    /// row or column 0 is not δ
    NotApplicable,
    Permutation,
    /// row and column 0 are δ but M is not a permutation: the data or the
    /// matrix is inconsistent
    Alarm,
}

pub fn permutation_check(m: &ModularInvariant) -> PermutationCheck {
    let n = m.rank();
    let delta = (0..n).all(|a| m.get(0, a) == i64::from(a == 0) && m.get(a, 0) == i64::from(a == 0));
    if !delta {
        PermutationCheck::NotApplicable
    } else if m.is_permutation() {
        PermutationCheck::Permutation
    } else {
        PermutationCheck::Alarm
    }
}

/// Σ_{b∈ℰ_M} S_ab/S_0b and Tr(M N_a) for one label a.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceIdentity {
    pub label: usize,
    pub trace: i64,
    /// the spectral sum equals the trace
    pub equal: bool,
}

/// The identity Σ_{b∈ℰ_M} S_ab/S_0b = Tr(M N_a) ∈ ℤ≥0, for every label.
pub fn trace_identity(md: &ModularData, m: &ModularInvariant) -> Result<Vec<TraceIdentity>> {
    let n = md.rank();
    let fusion = md.fusion()?;
    let s = md.s();
    let inv0: Vec<Cyclo> = (0..n)
        .map(|b| s.get(0, b).inv())
        .collect::<std::result::Result<_, _>>()?;
    let ex = m.exponents();
    (0..n)
        .map(|a| {
            let spectral: Cyclo = ex.iter().map(|&b| s.get(a, b) * &inv0[b]).sum();
            // Tr(M N_a) = Σ_{b,c} M_bc N_{ac}^b
            let mut tr = BigRational::zero();
            for b in 0..n {
                for c in 0..n {
                    if m.get(b, c) != 0 {
                        tr += fusion.n(a, c, b) * BigRational::from_integer(m.get(b, c).into());
                    }
                }
            }
            let trace = tr.to_integer().to_i64().unwrap_or(i64::MIN);
            Ok(TraceIdentity {
                label: a,
                trace,
                equal: tr.is_integer() && spectral == Cyclo::from_rational(&tr),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// simple currents

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleCurrentInvariant {
    pub unit: usize,
    pub matrix: ModularInvariant,
    /// (T_jj T̄₀₀)ⁿ = 1, the criterion for M[J] to be an invariant
    pub criterion: bool,
    /// T_jj T̄₀₀ is a primitive n-th root of unity
    pub primitive: bool,
    pub is_permutation: bool,
    /// the matrix passed [`verify_mi`]
    pub verified: bool,
}

impl SimpleCurrentInvariant {
    pub fn invariant(&self) -> Option<&ModularInvariant> {
        (self.criterion && self.verified).then_some(&self.matrix)
    }
}

/// M[J]_ab = Σ_{ℓ=1}^n δ_{J^ℓ a, b} δ(Q_j(a)/n + ℓ r_j / 2n).
pub fn simple_current_invariant(md: &ModularData, unit: usize) -> Result<SimpleCurrentInvariant> {
    let centre = find_units(md)?;
    let j = centre.unit(unit).ok_or(InvariantError::NotUnit(unit))?;
    let n = md.rank();
    let order = j.order as i64;
    let mut m = vec![vec![0i64; n]; n];
    for (a, row) in m.iter_mut().enumerate() {
        let mut b = a;
        for l in 1..=order {
            b = j.perm[b];
            if (2 * j.q[a] + l * j.r).rem_euclid(2 * order) == 0 {
                row[b] += 1;
            }
        }
    }
    // T_jj T̄₀₀ = e^{πi r (n−1)/n}
    let t = &md.t_exponents()[unit] - &md.t_exponents()[0];
    let t = &t - t.floor();
    let tn = &t * BigRational::from_integer(order.into());
    let criterion = tn.is_integer();
    let primitive = criterion && (1..order).all(|d| !(&t * BigRational::from_integer(d.into())).is_integer());
    let matrix = ModularInvariant { m };
    let verified = verify_mi(md, matrix.rows())?.is_invariant();
    Ok(SimpleCurrentInvariant {
        unit,
        is_permutation: matrix.is_permutation(),
        matrix,
        criterion,
        primitive,
        verified,
    })
}

// ---------------------------------------------------------------------------
// enumeration

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct RuleStats {
    /// entries excluded by T_aa = T_bb
    pub t_rule_zeros: usize,
    /// entries excluded by Galois parities
    pub galois_zeros: usize,
    /// subtrees cut by the unit selection rule
    pub unit_cuts: u64,
    /// subtrees cut by Σ_b S_ab M_b0 ≥ 0
    pub positivity_cuts: u64,
    /// subtrees cut by interval propagation
    pub interval_cuts: u64,
    /// candidates rejected for non-integral entries
    pub non_integral: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub invariants: Vec<ModularInvariant>,
    /// false when the node budget ran out; the list may then be partial
    pub complete: bool,
    pub nodes: u64,
    pub budget: u64,
    pub commutant_dim: usize,
    /// ⌊S₀₀⁻²⌋, the bound on Σ M_ab
    pub sum_bound: i64,
    pub rules: RuleStats,
}

pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// Largest integer m with m·S₀₀² ≤ 1, certified exactly.
pub fn sum_bound(md: &ModularData) -> i64 {
    let s00 = md.s().get(0, 0).clone();
    let sq = &s00 * &s00.conj();
    let guess = (1.0 / sq.to_c64().re).floor() as i64;
    let fits = |m: i64| {
        sq.scale_int(m)
            .cmp_real(&Cyclo::one())
            .is_ok_and(|o| o != std::cmp::Ordering::Greater)
    };
    let mut m = guess.max(1);
    while !fits(m) {
        m -= 1;
    }
    while fits(m + 1) {
        m += 1;
    }
    m
}

struct Search<'a> {
    n: usize,
    d: usize,
    /// distinct nonzero coefficient rows, scaled by `den`
    rows: Vec<Vec<i128>>,
    /// (a,b) ↦ index into rows, or None for entries forced to zero
    entry: Vec<Option<usize>>,
    den: i128,
    sum_coef: Vec<i128>,
    sum_cap: i128,
    /// unit pairs (J0, J′0) with the rows that must vanish once M_{J0,J′0} ≠ 0
    unit_pairs: Vec<(usize, Vec<usize>)>,
    /// column-0 rows and S_ab (real parts) for the positivity cut
    col0: Vec<(usize, Option<usize>)>,
    s_re: Vec<Vec<f64>>,
    real_s: bool,
    budget: u64,
    nodes: u64,
    stats: RuleStats,
    found: Vec<Vec<i128>>,
    exhausted: bool,
    _md: &'a ModularData,
}

impl Search<'_> {
    fn value_range(&self, row: &[i128], lo: &[i128], hi: &[i128]) -> (i128, i128) {
        let mut min = 0;
        let mut max = 0;
        for i in 0..self.d {
            let c = row[i];
            if c > 0 {
                min += c * lo[i];
                max += c * hi[i];
            } else if c < 0 {
                min += c * hi[i];
                max += c * lo[i];
            }
        }
        (min, max)
    }

    /// Tighten [lo, hi] against Σ c_i x_i ≥ 0 for every row (and any extra
    /// rows that must vanish) and against the sum cap; false if empty.
    fn propagate(&mut self, lo: &mut [i128], hi: &mut [i128], zero_rows: &[usize]) -> bool {
        for _ in 0..50 {
            let mut changed = false;
            let mut constraints: Vec<(Vec<i128>, i128)> = Vec::new();
            // Σ c x ≥ 0
            for r in &self.rows {
                constraints.push((r.clone(), 0));
            }
            // −Σ c x ≥ 0 for vanishing rows
            for &z in zero_rows {
                constraints.push((self.rows[z].iter().map(|x| -x).collect(), 0));
            }
            // cap − Σ sum_coef x ≥ 0
            constraints.push((self.sum_coef.iter().map(|x| -x).collect(), self.sum_cap));
            for (row, k) in &constraints {
                let (_, max) = self.value_range(row, lo, hi);
                if max + k < 0 {
                    return false;
                }
                for i in 0..self.d {
                    let c = row[i];
                    if c == 0 || lo[i] == hi[i] {
                        continue;
                    }
                    // max of the other terms
                    let own = if c > 0 { c * hi[i] } else { c * lo[i] };
                    let rest = max - own + k;
                    if c > 0 {
                        // c x_i ≥ −rest
                        let b = Integer::div_ceil(&(-rest), &c);
                        if b > lo[i] {
                            lo[i] = b;
                            changed = true;
                        }
                    } else {
                        // |c| x_i ≤ rest
                        let b = Integer::div_floor(&rest, &(-c));
                        if b < hi[i] {
                            hi[i] = b;
                            changed = true;
                        }
                    }
                    if lo[i] > hi[i] {
                        return false;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        true
    }

    fn entry_value(&self, row: usize, x: &[i128]) -> i128 {
        self.rows[row].iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn dfs(&mut self, lo: Vec<i128>, hi: Vec<i128>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let mut lo = lo;
        let mut hi = hi;
        // unit rule: once M_{J0,J′0} is certainly nonzero, its rows vanish
        let mut zero_rows = Vec::new();
        for (row, zs) in &self.unit_pairs {
            let (min, _) = self.value_range(&self.rows[*row], &lo, &hi);
            if min > 0 {
                zero_rows.extend(zs.iter().copied());
            }
        }
        if !zero_rows.is_empty() {
            self.stats.unit_cuts += 0;
        }
        let before = zero_rows.len();
        if !self.propagate(&mut lo, &mut hi, &zero_rows) {
            if before > 0 {
                self.stats.unit_cuts += 1;
            } else {
                self.stats.interval_cuts += 1;
            }
            return;
        }
        // positivity of (SM)_{a0} once column 0 is fixed
        if self.real_s {
            let fixed = self.col0.iter().all(|&(_, r)| {
                r.is_none_or(|r| {
                    let (a, b) = self.value_range(&self.rows[r], &lo, &hi);
                    a == b
                })
            });
            if fixed {
                let col: Vec<f64> = self
                    .col0
                    .iter()
                    .map(|&(_, r)| {
                        r.map_or(0.0, |r| {
                            self.value_range(&self.rows[r], &lo, &hi).0 as f64 / self.den as f64
                        })
                    })
                    .collect();
                for a in 0..self.n {
                    let v: f64 = (0..self.n).map(|b| self.s_re[a][b] * col[b]).sum();
                    if v < -1e-9 {
                        self.stats.positivity_cuts += 1;
                        return;
                    }
                }
            }
        }
        match (0..self.d)
            .filter(|&i| lo[i] < hi[i])
            .min_by_key(|&i| hi[i] - lo[i])
        {
            None => {
                let x = lo;
                let vals: Option<Vec<i128>> = (0..self.rows.len())
                    .map(|r| {
                        let v = self.entry_value(r, &x);
                        (v % self.den == 0).then_some(v / self.den)
                    })
                    .collect();
                match vals {
                    Some(_) => self.found.push(x),
                    None => self.stats.non_integral += 1,
                }
            }
            Some(i) => {
                for v in lo[i]..=hi[i] {
                    let mut l2 = lo.clone();
                    let mut h2 = hi.clone();
                    l2[i] = v;
                    h2[i] = v;
                    self.dfs(l2, h2);
                    if self.exhausted {
                        return;
                    }
                }
            }
        }
    }
}

/// Every nonnegative integer matrix commuting with S and T with M₀₀ = 1, found by depth-first search over the
/// commutant of S and T restricted by the T and Galois selection rules.
/// Output is sorted lexicographically on the flattened matrix.
pub fn enumerate_invariants(md: &ModularData, budget: u64) -> Result<Enumeration> {
    let n = md.rank();
    let sym = Symmetries::of(md);
    let t = md.t_exponents();
    let mut stats = RuleStats::default();
    let mut allowed = vec![true; n * n];
    for a in 0..n {
        for b in 0..n {
            if t[a] != t[b] {
                allowed[a * n + b] = false;
                stats.t_rule_zeros += 1;
            } else if sym.galois.iter().any(|g| g.signs[a] != g.signs[b]) {
                allowed[a * n + b] = false;
                stats.galois_zeros += 1;
            }
        }
    }
    let pattern = CommutantPattern { allowed };
    let basis = commutant_basis_of(&[md.s()], Some(&pattern))?;
    let d = basis.len();
    // coordinates = entries at the pivots of the reduced basis
    let flat = RatMatrix::from_rows(basis.iter().map(|m| m.data().to_vec()).collect())?;
    let (red, pivots) = flat.rref();
    let den = red.data().iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let den_i = den.to_i128().expect("small denominators");
    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut entry = vec![None; n * n];
    for e in 0..n * n {
        let row: Vec<i128> = (0..d)
            .map(|i| {
                (red.get(i, e) * BigRational::from_integer(den.clone()))
                    .to_integer()
                    .to_i128()
                    .expect("fits")
            })
            .collect();
        if row.iter().all(|&c| c == 0) {
            continue;
        }
        entry[e] = Some(match rows.iter().position(|r| *r == row) {
            Some(k) => k,
            None => {
                rows.push(row);
                rows.len() - 1
            }
        });
    }
    let bound = sum_bound(md);
    let mut sum_coef = vec![0i128; d];
    for e in 0..n * n {
        if let Some(r) = entry[e] {
            for i in 0..d {
                sum_coef[i] += rows[r][i];
            }
        }
    }
    let mut lo = vec![0i128; d];
    let mut hi = vec![bound as i128; d];
    // M₀₀ = 1: (0,0) is the first pivot whenever the commutant is nonzero
    let result_empty = |stats: RuleStats| Enumeration {
        invariants: Vec::new(),
        complete: true,
        nodes: 0,
        budget,
        commutant_dim: d,
        sum_bound: bound,
        rules: stats,
    };
    match pivots.first() {
        Some(0) => {
            lo[0] = 1;
            hi[0] = 1;
        }
        _ => return Ok(result_empty(stats)),
    }
    let mut unit_pairs = Vec::new();
    if let Some(centre) = &sym.centre {
        for j in &centre.units {
            for jp in &centre.units {
                let Some(row) = entry[j.label * n + jp.label] else {
                    continue;
                };
                let mut zs = Vec::new();
                for c in 0..n {
                    for dd in 0..n {
                        let lhs = BigRational::new(j.q[c].into(), (j.order as i64).into());
                        let rhs = BigRational::new(jp.q[dd].into(), (jp.order as i64).into());
                        if !(lhs - rhs).is_integer() {
                            if let Some(r) = entry[c * n + dd] {
                                zs.push(r);
                            }
                        }
                    }
                }
                zs.sort_unstable();
                zs.dedup();
                if !zs.is_empty() {
                    unit_pairs.push((row, zs));
                }
            }
        }
    }
    let s_c = md.s().to_c64();
    let real_s = s_c.data().iter().all(|z| z.im.abs() < 1e-12);
    let mut search = Search {
        n,
        d,
        rows,
        col0: (0..n).map(|b| (b, entry[b * n])).collect(),
        entry,
        den: den_i,
        sum_coef,
        sum_cap: bound as i128 * den_i,
        unit_pairs,
        s_re: (0..n)
            .map(|a| (0..n).map(|b| s_c.get(a, b).re).collect())
            .collect(),
        real_s,
        budget,
        nodes: 0,
        stats,
        found: Vec::new(),
        exhausted: false,
        _md: md,
    };
    search.dfs(lo, hi);
    let mut invariants = Vec::new();
    for x in &search.found {
        let mut m = vec![vec![0i64; n]; n];
        for a in 0..n {
            for b in 0..n {
                if let Some(r) = search.entry[a * n + b] {
                    m[a][b] = (search.entry_value(r, x) / search.den) as i64;
                }
            }
        }
        if verify_mi_with(md, &m, &sym)?.is_invariant() {
            invariants.push(ModularInvariant { m });
        }
    }
    invariants.sort();
    invariants.dedup();
    Ok(Enumeration {
        invariants,
        complete: !search.exhausted,
        nodes: search.nodes,
        budget,
        commutant_dim: d,
        sum_bound: bound,
        rules: search.stats,
    })
}

/// Charge conjugation as a matrix.
pub fn conjugation_matrix(md: &ModularData) -> Result<ModularInvariant> {
    let c = crate::modular_data::charge_conjugation(md)?;
    let n = md.rank();
    let mut m = vec![vec![0; n]; n];
    for a in 0..n {
        m[a][c[a]] = 1;
    }
    Ok(ModularInvariant { m })
}

/// Label multiset as counts, for comparing exponents.
pub fn multiset(ex: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &e in ex {
        *m.entry(e).or_insert(0) += 1;
    }
    m
}

/// Text report of a list of invariants.
pub fn render_list(md: &ModularData, list: &[ModularInvariant]) -> String {
    let mut out = String::new();
    for (i, m) in list.iter().enumerate() {
        let _ = writeln!(out, "{}: {}", i + 1, m.render(md.labels()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::affine_a1;

    #[test]
    fn identity_and_conjugation_pass() {
        let md = affine_a1(3).unwrap();
        let id: Vec<Vec<i64>> = (0..4)
            .map(|a| (0..4).map(|b| i64::from(a == b)).collect())
            .collect();
        assert!(verify_mi(&md, &id).unwrap().is_consistent());
        let c = conjugation_matrix(&md).unwrap();
        assert!(verify_mi(&md, c.rows()).unwrap().is_invariant());
    }

    #[test]
    fn a1_small_levels() {
        for (k, count) in [(1, 1), (2, 1), (3, 1), (4, 2), (6, 2), (10, 3)] {
            let md = affine_a1(k).unwrap();
            let e = enumerate_invariants(&md, DEFAULT_BUDGET).unwrap();
            assert!(e.complete);
            assert_eq!(e.invariants.len(), count, "k = {k}: {:?}", e);
        }
    }
}
