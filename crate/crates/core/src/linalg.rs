//! Sparse integer matrices and exact rank.
//!
//! Coboundary matrices have `±1` entries, so they are kept as integers and
//! ranked exactly. The rational rank is computed by fraction-free sparse row
//! reduction over `i128` with gcd normalization of every reduced row. If an
//! intermediate entry would overflow, or the matrix is too wide for the exact
//! path, the rank is taken over GF(p) for two 61-bit primes (the maximum of the
//! two, which equals the rational rank unless both primes divide every nonzero
//! maximal minor).

use serde::Serialize;

/// Row-major sparse matrix with integer entries; each row sorted by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub rows: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseIntMatrix { n_rows, n_cols, rows: vec![Vec::new(); n_rows] }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&(_, v)| v == 0))
    }

    /// `self * other` in exact integer arithmetic.
    pub fn matmul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.n_cols, other.n_rows, "inner dimensions differ");
        let mut acc = vec![0i64; other.n_cols];
        let mut touched = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(j, a) in row {
                    for &(c, b) in &other.rows[j] {
                        if acc[c] == 0 {
                            touched.push(c);
                        }
                        acc[c] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let out: Vec<(usize, i64)> = touched.iter().filter(|&&c| acc[c] != 0).map(|&c| (c, acc[c])).collect();
                for &c in &touched {
                    acc[c] = 0;
                }
                touched.clear();
                out
            })
            .collect();
        SparseIntMatrix { n_rows: self.n_rows, n_cols: other.n_cols, rows }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(c, v)| v as f64 * x[c]).sum()).collect()
    }

    /// `selfᵀ y`.
    pub fn tmul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                out[c] += v as f64 * y[r];
            }
        }
        out
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        let mut rows = vec![Vec::new(); self.n_cols];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                rows[c].push((r, v));
            }
        }
        SparseIntMatrix { n_rows: self.n_cols, n_cols: self.n_rows, rows }
    }
}

/// How a rank was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    ExactRational,
    Modular,
}

/// Widest matrix (in columns) ranked by the exact rational path.
pub const EXACT_RANK_MAX_COLS: usize = 2000;

/// Rank over ℚ, see the module docs for the method policy.
pub fn rank(m: &SparseIntMatrix) -> (usize, RankMethod) {
    if m.n_cols.min(m.n_rows) == 0 {
        return (0, RankMethod::ExactRational);
    }
    if m.n_cols <= EXACT_RANK_MAX_COLS {
        if let Some(r) = rational_rank(m) {
            return (r, RankMethod::ExactRational);
        }
    }
    (modular_rank_max(m), RankMethod::Modular)
}

const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 2_305_843_009_213_693_921];

pub fn modular_rank_max(m: &SparseIntMatrix) -> usize {
    PRIMES.iter().map(|&p| modular_rank(m, p)).max().unwrap_or(0)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn normalize(row: &mut [(usize, i128)]) {
    let g = row.iter().fold(0i128, |g, &(_, v)| gcd(g, v));
    if g > 1 {
        for e in row.iter_mut() {
            e.1 /= g;
        }
    }
    if let Some(first) = row.first() {
        if first.1 < 0 {
            for e in row.iter_mut() {
                e.1 = -e.1;
            }
        }
    }
}

/// `a * r - b * p` over sparse sorted rows; `None` on overflow.
fn combine(r: &[(usize, i128)], a: i128, p: &[(usize, i128)], b: i128) -> Option<Vec<(usize, i128)>> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let (c, v) = if j >= p.len() || (i < r.len() && r[i].0 < p[j].0) {
            let e = (r[i].0, r[i].1.checked_mul(a)?);
            i += 1;
            e
        } else if i >= r.len() || p[j].0 < r[i].0 {
            let e = (p[j].0, p[j].1.checked_mul(b)?.checked_neg()?);
            j += 1;
            e
        } else {
            let e = (r[i].0, r[i].1.checked_mul(a)?.checked_sub(p[j].1.checked_mul(b)?)?);
            i += 1;
            j += 1;
            e
        };
        if v != 0 {
            out.push((c, v));
        }
    }
    Some(out)
}

/// Exact rank over ℚ by fraction-free elimination; `None` if `i128` overflows.
pub fn rational_rank(m: &SparseIntMatrix) -> Option<usize> {
    let mut pivots: Vec<Option<Vec<(usize, i128)>>> = vec![None; m.n_cols];
    let mut rank = 0;
    for row in &m.rows {
        let mut r: Vec<(usize, i128)> = row.iter().filter(|e| e.1 != 0).map(|&(c, v)| (c, v as i128)).collect();
        normalize(&mut r);
        while let Some(&(lead, lv)) = r.first() {
            match &pivots[lead] {
                None => {
                    pivots[lead] = Some(r);
                    rank += 1;
                    break;
                }
                Some(p) => {
                    let pv = p[0].1;
                    let g = gcd(pv, lv);
                    r = combine(&r, pv / g, p, lv / g)?;
                    normalize(&mut r);
                }
            }
        }
    }
    Some(rank)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

/// Rank over GF(p).
pub fn modular_rank(m: &SparseIntMatrix, p: u64) -> usize {
    let to_mod = |v: i64| -> u64 { (v as i128).rem_euclid(p as i128) as u64 };
    let mut pivots: Vec<Option<Vec<(usize, u64)>>> = vec![None; m.n_cols];
    let mut rank = 0;
    for row in &m.rows {
        let mut r: Vec<(usize, u64)> = row.iter().map(|&(c, v)| (c, to_mod(v))).filter(|e| e.1 != 0).collect();
        while let Some(&(lead, lv)) = r.first() {
            match &pivots[lead] {
                None => {
                    let inv = pow_mod(lv, p - 2, p);
                    for e in r.iter_mut() {
                        e.1 = mul_mod(e.1, inv, p);
                    }
                    pivots[lead] = Some(r);
                    rank += 1;
                    break;
                }
                Some(piv) => {
                    // piv has leading 1: r <- r - lv * piv
                    let mut out = Vec::with_capacity(r.len() + piv.len());
                    let (mut i, mut j) = (0, 0);
                    while i < r.len() || j < piv.len() {
                        let (c, v) = if j >= piv.len() || (i < r.len() && r[i].0 < piv[j].0) {
                            i += 1;
                            r[i - 1]
                        } else {
                            let sub = mul_mod(lv, piv[j].1, p);
                            let e = if i < r.len() && r[i].0 == piv[j].0 {
                                i += 1;
                                (r[i - 1].0, (r[i - 1].1 + p - sub) % p)
                            } else {
                                (piv[j].0, (p - sub) % p)
                            };
                            j += 1;
                            e
                        };
                        if v != 0 {
                            out.push((c, v));
                        }
                    }
                    r = out;
                }
            }
        }
    }
    rank
}
