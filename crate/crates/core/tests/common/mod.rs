//! Hand-written oracles shared by the integration tests.
#![allow(dead_code)]

pub type Mat = Vec<Vec<i64>>;

/// Matrix of Σ_i (Σ_{a∈L_i} χ_a)(Σ_{b∈R_i} χ̄_b) over rank k+1.
pub fn from_blocks(k: u32, blocks: &[(&[usize], &[usize])]) -> Mat {
    let n = k as usize + 1;
    let mut m = vec![vec![0i64; n]; n];
    for (l, r) in blocks {
        for &a in *l {
            for &b in *r {
                m[a][b] += 1;
            }
        }
    }
    m
}

pub fn diag(k: u32) -> Mat {
    let n = k as usize + 1;
    (0..n)
        .map(|a| (0..n).map(|b| i64::from(a == b)).collect())
        .collect()
}

/// The D-series invariant of A₁ level k (k even), written out by hand.
pub fn d_series(k: u32) -> Mat {
    let k = k as usize;
    let mut m = vec![vec![0i64; k + 1]; k + 1];
    if k.is_multiple_of(4) {
        for a in (0..=k).step_by(2) {
            m[a][a] += 1;
            m[a][k - a] += 1;
        }
    } else {
        for a in 0..=k {
            if a % 2 == 0 {
                m[a][a] = 1;
            } else {
                m[a][k - a] = 1;
            }
        }
    }
    m
}

/// E₆, E₇, E₈ invariants at levels 10, 16, 28.
pub fn exceptional(k: u32) -> Mat {
    match k {
        10 => from_blocks(k, &[(&[0, 6], &[0, 6]), (&[3, 7], &[3, 7]), (&[4, 10], &[4, 10])]),
        16 => from_blocks(
            k,
            &[
                (&[0, 16], &[0, 16]),
                (&[4, 12], &[4, 12]),
                (&[6, 10], &[6, 10]),
                (&[8], &[8]),
                (&[2, 14], &[8]),
                (&[8], &[2, 14]),
            ],
        ),
        28 => from_blocks(
            k,
            &[
                (&[0, 10, 18, 28], &[0, 10, 18, 28]),
                (&[6, 12, 16, 22], &[6, 12, 16, 22]),
            ],
        ),
        _ => panic!("no exceptional invariant at level {k}"),
    }
}

/// Every A₁ invariant at level k, sorted and without repeats.
pub fn a1_list(k: u32) -> Vec<Mat> {
    let mut v = vec![diag(k)];
    if k.is_multiple_of(2) {
        v.push(d_series(k));
    }
    if matches!(k, 10 | 16 | 28) {
        v.push(exceptional(k));
    }
    sorted(v)
}

pub fn sorted(mut v: Vec<Mat>) -> Vec<Mat> {
    v.sort();
    v.dedup();
    v
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Mat {
    let mut m = vec![vec![0; n]; n];
    for &(a, b) in edges {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

fn path(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn dynkin_a(n: usize) -> Mat {
    graph(n, &path(n))
}

pub fn dynkin_d(n: usize) -> Mat {
    let mut e = path(n - 1);
    e.push((n - 3, n - 1));
    graph(n, &e)
}

pub fn dynkin_e(n: usize) -> Mat {
    let mut e = path(n - 1);
    e.push((2, n - 1));
    graph(n, &e)
}

pub fn tadpole(n: usize) -> Mat {
    let mut e = path(n);
    e.push((n - 1, n - 1));
    graph(n, &e)
}

/// The graph a level-k A₁ invariant is paired with.
pub fn a1_graph(k: u32, m: &Mat) -> Mat {
    let n = k as usize + 1;
    if *m == diag(k) {
        dynkin_a(n)
    } else if k.is_multiple_of(2) && *m == d_series(k) {
        dynkin_d(k as usize / 2 + 2)
    } else {
        dynkin_e(match k {
            10 => 6,
            16 => 7,
            28 => 8,
            _ => panic!("unknown invariant at level {k}"),
        })
    }
}

/// Isomorphism by backtracking over vertex maps (small graphs only).
pub fn iso(x: &Mat, y: &Mat) -> bool {
    fn rec(x: &Mat, y: &Mat, perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = perm.len();
        if i == x.len() {
            return true;
        }
        for j in 0..x.len() {
            if used[j] || x[i][i] != y[j][j] {
                continue;
            }
            if (0..i).all(|p| x[i][p] == y[j][perm[p]] && x[p][i] == y[perm[p]][j]) {
                used[j] = true;
                perm.push(j);
                if rec(x, y, perm, used) {
                    return true;
                }
                perm.pop();
                used[j] = false;
            }
        }
        false
    }
    x.len() == y.len() && rec(x, y, &mut Vec::new(), &mut vec![false; x.len()])
}
