//! Real cochains with the weighted inner product, coboundary operators, their
//! adjoints, the upper Laplacian `Δ⁺_k = d_k* d_k`, its spectrum, and reduced
//! cohomology dimensions.
//!
//! A `k`-cochain is stored by its values on canonical (ascending) simplices,
//! indexed like `X.simplices(k)`. The inner product is
//! `⟨φ, ψ⟩ = Σ_τ m(τ) φ(τ) ψ(τ)` over canonical simplices, which equals the
//! sum over all orderings weighted by `m / (k+1)!`.
//!
//! The spectrum is computed on the symmetrized operator
//! `W_k^{-1/2} d_kᵀ W_{k+1} d_k W_k^{-1/2}`, similar to `Δ⁺_k`.
//!
//! Degree `−1` is the augmentation: `C^{-1} = ℝ`, `d_{-1}` sends a constant to
//! the constant cochain. Cohomology at degree 0 is therefore reduced.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::sort_sign;
use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::linalg::{rank, RankMethod, SparseIntMatrix};

/// A degree-`k` real cochain on canonical simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<f64>,
}

impl Cochain {
    pub fn zeros(x: &SimplicialComplex, degree: usize) -> Self {
        Cochain { degree, values: vec![0.0; x.count(degree)] }
    }

    pub fn from_values(x: &SimplicialComplex, degree: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != x.count(degree) {
            return Err(Error::LengthMismatch { expected: x.count(degree), got: values.len() });
        }
        Ok(Cochain { degree, values })
    }

    /// Indicator of one canonical simplex.
    pub fn indicator(x: &SimplicialComplex, s: &Simplex) -> Result<Self> {
        let i = x.index_of(s).ok_or_else(|| Error::SimplexNotFound(x.simplex_labels(s)))?;
        let mut c = Cochain::zeros(x, s.dim());
        c.values[i] = 1.0;
        Ok(c)
    }

    /// Standard normal values from a seeded stream.
    pub fn random(x: &SimplicialComplex, degree: usize, rng: &mut impl Rng) -> Self {
        let values = (0..x.count(degree)).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        Cochain { degree, values }
    }

    /// Value on an ordered tuple of distinct vertices: `sign(π) · φ(sorted)`.
    pub fn eval_ordered(&self, x: &SimplicialComplex, tuple: &[VertexId]) -> Result<f64> {
        if tuple.len() != self.degree + 1 {
            return Err(Error::DegreeMismatch(self.degree, tuple.len().saturating_sub(1)));
        }
        let s = Simplex::new(tuple.iter().copied())?;
        let i = x.index_of(&s).ok_or_else(|| Error::SimplexNotFound(x.simplex_labels(&s)))?;
        Ok(sort_sign(tuple) as f64 * self.values[i])
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(Cochain { degree: self.degree, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() })
    }

    pub fn to_json(&self, x: &SimplicialComplex) -> CochainFile {
        let values = x
            .simplices(self.degree)
            .iter()
            .zip(&self.values)
            .map(|(s, &v)| {
                let key: Vec<String> = x.simplex_labels(s).iter().map(u64::to_string).collect();
                (key.join("-"), v)
            })
            .collect();
        CochainFile { k: self.degree, values }
    }

    /// Parses `{"k": .., "values": {"0-1": v, ...}}`; absent simplices are zero.
    pub fn from_json(x: &SimplicialComplex, file: &CochainFile) -> Result<Self> {
        let mut c = Cochain::zeros(x, file.k);
        for (key, &v) in &file.values {
            let labels = key
                .split('-')
                .map(|t| t.parse::<u64>().map_err(|e| Error::Parse { line: 0, msg: format!("{key:?}: {e}") }))
                .collect::<Result<Vec<_>>>()?;
            if labels.len() != file.k + 1 {
                return Err(Error::DegreeMismatch(file.k, labels.len().saturating_sub(1)));
            }
            // keys may list vertices in any order
            let s = x.simplex_by_labels(&labels)?;
            let ids: Vec<VertexId> = labels.iter().map(|&l| x.vertex_by_label(l).unwrap()).collect();
            c.values[x.index_of(&s).unwrap()] = sort_sign(&ids) as f64 * v;
        }
        Ok(c)
    }
}

/// JSON form of a cochain, keyed by sorted vertex labels joined with `-`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainFile {
    pub k: usize,
    pub values: std::collections::BTreeMap<String, f64>,
}

/// Integer matrix of `d_k : C^k → C^{k+1}` (rows: `(k+1)`-simplices).
///
/// Row `σ = (v_0 < … < v_{k+1})` has `(−1)^i` in the column of the facet
/// omitting `v_i`. Purity is not required.
pub fn coboundary_matrix(x: &SimplicialComplex, k: usize) -> SparseIntMatrix {
    let rows = x
        .simplices(k + 1)
        .iter()
        .map(|s| {
            let mut row: Vec<(usize, i64)> = s
                .facets()
                .enumerate()
                .map(|(i, f)| (x.index_of(&f).expect("closed"), if i % 2 == 0 { 1 } else { -1 }))
                .collect();
            row.sort_unstable();
            row
        })
        .collect();
    SparseIntMatrix { n_rows: x.count(k + 1), n_cols: x.count(k), rows }
}

/// `d_{-1} : ℝ → C^0`, a single column of ones.
pub fn augmentation_matrix(x: &SimplicialComplex) -> SparseIntMatrix {
    SparseIntMatrix { n_rows: x.count(0), n_cols: 1, rows: vec![vec![(0, 1)]; x.count(0)] }
}

fn check_degree(x: &SimplicialComplex, k: usize) -> Result<()> {
    let n = x.dim();
    if n == 0 || k > n - 1 {
        return Err(Error::DegreeOutOfRange { degree: k, min: 0, max: n.saturating_sub(1) });
    }
    Ok(())
}

fn weights_f64(x: &SimplicialComplex, d: usize) -> Result<Vec<f64>> {
    Ok(x.weights(d)?.into_iter().map(|w| w.0 as f64).collect())
}

/// `d_k φ`.
pub fn differential(x: &SimplicialComplex, phi: &Cochain) -> Result<Cochain> {
    check_degree(x, phi.degree)?;
    x.require_pure()?;
    check_len(x, phi)?;
    let d = coboundary_matrix(x, phi.degree);
    Ok(Cochain { degree: phi.degree + 1, values: d.mul_vec(&phi.values) })
}

/// `d_{k-1} ψ` where `ψ` has degree `k−1 ≥ 0`, or the constant cochain for the augmentation.
pub fn coboundary_of_constant(x: &SimplicialComplex, c: f64) -> Cochain {
    Cochain { degree: 0, values: vec![c; x.count(0)] }
}

fn check_len(x: &SimplicialComplex, phi: &Cochain) -> Result<()> {
    if phi.values.len() != x.count(phi.degree) {
        return Err(Error::LengthMismatch { expected: x.count(phi.degree), got: phi.values.len() });
    }
    Ok(())
}

/// `⟨φ, ψ⟩ = Σ_τ m(τ) φ(τ) ψ(τ)`.
pub fn inner_product(x: &SimplicialComplex, phi: &Cochain, psi: &Cochain) -> Result<f64> {
    if phi.degree != psi.degree {
        return Err(Error::DegreeMismatch(phi.degree, psi.degree));
    }
    check_len(x, phi)?;
    check_len(x, psi)?;
    let w = x.weights(phi.degree)?;
    Ok(w.iter().zip(phi.values.iter().zip(&psi.values)).map(|(m, (a, b))| m.0 as f64 * a * b).sum())
}

pub fn norm_sq(x: &SimplicialComplex, phi: &Cochain) -> Result<f64> {
    inner_product(x, phi, phi)
}

/// `d_k* ψ = W_k^{-1} d_kᵀ W_{k+1} ψ` for `ψ` of degree `k+1 ≥ 1`.
pub fn adjoint(x: &SimplicialComplex, psi: &Cochain) -> Result<Cochain> {
    let k = psi.degree.checked_sub(1).ok_or(Error::DegreeOutOfRange { degree: 0, min: 1, max: x.dim() })?;
    check_degree(x, k)?;
    check_len(x, psi)?;
    let wk = weights_f64(x, k)?;
    let wk1 = weights_f64(x, k + 1)?;
    let d = coboundary_matrix(x, k);
    let weighted: Vec<f64> = psi.values.iter().zip(&wk1).map(|(v, w)| v * w).collect();
    let values = d.tmul_vec(&weighted).into_iter().zip(&wk).map(|(v, w)| v / w).collect();
    Ok(Cochain { degree: k, values })
}

/// `Δ⁺_k φ = d_k* d_k φ`.
pub fn apply_upper_laplacian(x: &SimplicialComplex, phi: &Cochain) -> Result<Cochain> {
    adjoint(x, &differential(x, phi)?)
}

/// The symmetrized upper Laplacian as a dense matrix.
#[derive(Clone, Debug)]
pub struct UpperLaplacian {
    pub degree: usize,
    /// `W^{-1/2} dᵀ W_{k+1} d W^{-1/2}`.
    pub symmetric: DMatrix<f64>,
    /// `m(τ)^{1/2}` for each `k`-simplex.
    pub sqrt_weights: Vec<f64>,
}

impl UpperLaplacian {
    /// `Δ⁺_k φ` recovered from the symmetric form: `W^{-1/2} A W^{1/2} φ`.
    pub fn apply(&self, phi: &Cochain) -> Cochain {
        let y = DVector::from_iterator(phi.values.len(), phi.values.iter().zip(&self.sqrt_weights).map(|(v, s)| v * s));
        let z = &self.symmetric * y;
        Cochain { degree: self.degree, values: z.iter().zip(&self.sqrt_weights).map(|(v, s)| v / s).collect() }
    }
}

/// Symmetric sparse operator `x ↦ S dᵀ W d S x` without forming the dense matrix.
struct SymmetricOperator {
    d: SparseIntMatrix,
    upper_weights: Vec<f64>,
    inv_sqrt: Vec<f64>,
}

impl SymmetricOperator {
    fn new(x: &SimplicialComplex, k: usize) -> Result<Self> {
        let wk = weights_f64(x, k)?;
        Ok(SymmetricOperator {
            d: coboundary_matrix(x, k),
            upper_weights: weights_f64(x, k + 1)?,
            inv_sqrt: wk.iter().map(|w| 1.0 / w.sqrt()).collect(),
        })
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = v.iter().zip(&self.inv_sqrt).map(|(a, s)| a * s).collect();
        let dv = self.d.mul_vec(&scaled);
        let weighted: Vec<f64> = dv.iter().zip(&self.upper_weights).map(|(a, w)| a * w).collect();
        self.d.tmul_vec(&weighted).into_iter().zip(&self.inv_sqrt).map(|(a, s)| a * s).collect()
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.inv_sqrt.len();
        let mut a = DMatrix::<f64>::zeros(n, n);
        for (row, w) in self.d.rows.iter().zip(&self.upper_weights) {
            for &(i, si) in row {
                for &(j, sj) in row {
                    a[(i, j)] += w * (si * sj) as f64 * self.inv_sqrt[i] * self.inv_sqrt[j];
                }
            }
        }
        a
    }
}

pub fn upper_laplacian_matrix(x: &SimplicialComplex, k: usize) -> Result<UpperLaplacian> {
    check_degree(x, k)?;
    let op = SymmetricOperator::new(x, k)?;
    let sqrt_weights = op.inv_sqrt.iter().map(|s| 1.0 / s).collect();
    Ok(UpperLaplacian { degree: k, symmetric: op.dense(), sqrt_weights })
}

/// Eigen-decomposition summary of `Δ⁺_k`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub degree: usize,
    /// Ascending. Complete for the dense path; empty for the iterative path.
    pub eigenvalues: Vec<f64>,
    pub zero_multiplicity: usize,
    /// Smallest eigenvalue above the tolerance; `None` if `Δ⁺_k = 0`.
    pub lambda_min_nonzero: Option<f64>,
    pub tolerance: f64,
    /// `|X^(k)| − rank d_k`, the cross-check for `zero_multiplicity`.
    pub kernel_dim_exact: usize,
    pub rank_method: RankMethod,
    pub method: SpectralMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    Dense,
    Lanczos,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DENSE_LIMIT: usize = 3000;

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    pub tolerance: f64,
    /// Largest `|X^(k)|` handled by the dense eigensolver.
    pub dense_limit: usize,
    pub max_lanczos_steps: usize,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { tolerance: DEFAULT_TOLERANCE, dense_limit: DENSE_LIMIT, max_lanczos_steps: 600 }
    }
}

pub fn spectrum(x: &SimplicialComplex, k: usize, tolerance: f64) -> Result<SpectralResult> {
    spectrum_with(x, k, &SpectrumOptions { tolerance, ..Default::default() })
}

pub fn spectrum_with(x: &SimplicialComplex, k: usize, opts: &SpectrumOptions) -> Result<SpectralResult> {
    check_degree(x, k)?;
    let op = SymmetricOperator::new(x, k)?;
    let (r, rank_method) = rank(&op.d);
    let kernel_dim_exact = x.count(k) - r;
    let tol = opts.tolerance;
    if x.count(k) <= opts.dense_limit {
        let eig = SymmetricEigen::try_new(op.dense(), 1e-14, 100_000)
            .ok_or_else(|| Error::EigenNonConvergence(format!("dense solve of size {}", x.count(k))))?;
        let mut eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        let zero_multiplicity = eigenvalues.iter().filter(|&&l| l <= tol).count();
        if zero_multiplicity != kernel_dim_exact {
            return Err(Error::KernelMismatch {
                numerical: zero_multiplicity,
                exact: kernel_dim_exact,
                tolerance: tol,
            });
        }
        let lambda_min_nonzero = eigenvalues.iter().copied().find(|&l| l > tol);
        return Ok(SpectralResult {
            degree: k,
            eigenvalues,
            zero_multiplicity,
            lambda_min_nonzero,
            tolerance: tol,
            kernel_dim_exact,
            rank_method,
            method: SpectralMethod::Dense,
        });
    }
    let lambda = lanczos_min_nonzero(x, k, &op, opts)?;
    Ok(SpectralResult {
        degree: k,
        eigenvalues: Vec::new(),
        zero_multiplicity: kernel_dim_exact,
        lambda_min_nonzero: lambda,
        tolerance: tol,
        kernel_dim_exact,
        rank_method,
        method: SpectralMethod::Lanczos,
    })
}

/// Columns spanning `W^{1/2} im d_{k-1}` (the known part of the kernel in
/// symmetrized coordinates).
struct Deflation {
    /// `B = W_k^{1/2} d_{k-1}` as a sparse matrix with float scaling.
    b: SparseIntMatrix,
    sqrt_w: Vec<f64>,
    scale: f64,
}

impl Deflation {
    fn new(x: &SimplicialComplex, k: usize) -> Result<Self> {
        let b = if k == 0 { augmentation_matrix(x) } else { coboundary_matrix(x, k - 1) };
        let sqrt_w: Vec<f64> = weights_f64(x, k)?.into_iter().map(f64::sqrt).collect();
        let scale = sqrt_w.iter().fold(0.0f64, |a, &w| a.max(w * w)) * (k + 2) as f64;
        Ok(Deflation { b, sqrt_w, scale })
    }

    fn b_mul(&self, y: &[f64]) -> Vec<f64> {
        self.b.mul_vec(y).into_iter().zip(&self.sqrt_w).map(|(a, s)| a * s).collect()
    }

    fn bt_mul(&self, v: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = v.iter().zip(&self.sqrt_w).map(|(a, s)| a * s).collect();
        self.b.tmul_vec(&scaled)
    }

    /// `v − B (BᵀB)^+ Bᵀ v` by conjugate gradients on the normal equations.
    fn project(&self, v: &[f64]) -> Vec<f64> {
        let rhs = self.bt_mul(v);
        let n = rhs.len();
        let mut y = vec![0.0; n];
        let mut r = rhs.clone();
        let mut p = r.clone();
        let mut rs = dot(&r, &r);
        // scale by |v| as well: a near-zero rhs would otherwise let CG chase
        // roundoff along the null space of BᵀB
        let stop = 1e-28 * (dot(&rhs, &rhs) + self.scale * dot(v, v)).max(1e-300);
        for _ in 0..(4 * n + 50) {
            if rs <= stop {
                break;
            }
            let ap = self.bt_mul(&self.b_mul(&p));
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                break;
            }
            let alpha = rs / pap;
            for i in 0..n {
                y[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rs_new = dot(&r, &r);
            let beta = rs_new / rs;
            rs = rs_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        let by = self.b_mul(&y);
        v.iter().zip(&by).map(|(a, b)| a - b).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Smallest Ritz value above tolerance of `Δ⁺_k` restricted to the
/// orthogonal complement of `im d_{k-1}`, by Lanczos with full
/// reorthogonalization.
fn lanczos_min_nonzero(
    x: &SimplicialComplex,
    k: usize,
    op: &SymmetricOperator,
    opts: &SpectrumOptions,
) -> Result<Option<f64>> {
    let defl = Deflation::new(x, k)?;
    let n = x.count(k);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2c_05);
    let start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut v = defl.project(&start);
    let norm = dot(&v, &v).sqrt();
    if norm == 0.0 {
        return Ok(None);
    }
    v.iter_mut().for_each(|a| *a /= norm);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let steps = opts.max_lanczos_steps.min(n);
    let mut previous: Option<f64> = None;
    for j in 0..steps {
        let mut w = defl.project(&op.apply(&basis[j]));
        let a = dot(&w, &basis[j]);
        alphas.push(a);
        for q in &basis {
            let c = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
        }
        // second pass keeps the basis orthogonal to working precision
        for q in &basis {
            let c = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
        }
        let b = dot(&w, &w).sqrt();
        let m = alphas.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alphas[r]
            } else if r + 1 == c {
                betas[r]
            } else if c + 1 == r {
                betas[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::try_new(t, 1e-14, 100_000)
            .ok_or_else(|| Error::EigenNonConvergence("tridiagonal Ritz solve".into()))?;
        let candidate = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > opts.tolerance)
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &l)| (i, l));
        let scale = alphas.iter().fold(1.0f64, |s, a| s.max(a.abs()));
        let exhausted = b <= 1e-9 * scale || j + 1 == n;
        if let Some((idx, l)) = candidate {
            let residual = (b * eig.eigenvectors[(m - 1, idx)]).abs();
            let stable = previous.is_some_and(|p: f64| (p - l).abs() <= 1e-12 * l.max(1.0));
            if exhausted || (residual <= 1e-9 * l.max(1.0) && stable) {
                return Ok(Some(l));
            }
            previous = Some(l);
        } else if exhausted {
            return Ok(None);
        }
        if exhausted {
            break;
        }
        w.iter_mut().for_each(|a| *a /= b);
        betas.push(b);
        basis.push(w);
    }
    Err(Error::EigenNonConvergence(format!("Lanczos did not converge in {steps} steps")))
}

/// Dimension of `H^k(X; ℝ)` (reduced at `k = 0`): `|X^(k)| − rank d_k − rank d_{k−1}`.
///
/// Ranks are exact, see [`crate::linalg`].
pub fn cohomology_dim(x: &SimplicialComplex, k: usize) -> Result<CohomologyResult> {
    check_degree(x, k)?;
    let (rk, m1) = rank(&coboundary_matrix(x, k));
    let (rprev, m2) = if k == 0 { rank(&augmentation_matrix(x)) } else { rank(&coboundary_matrix(x, k - 1)) };
    let method = if m1 == RankMethod::Modular || m2 == RankMethod::Modular {
        RankMethod::Modular
    } else {
        RankMethod::ExactRational
    };
    Ok(CohomologyResult { degree: k, dim: x.count(k) - rk - rprev, rank_dk: rk, rank_dk_minus_1: rprev, method })
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyResult {
    pub degree: usize,
    pub dim: usize,
    pub rank_dk: usize,
    pub rank_dk_minus_1: usize,
    pub method: RankMethod,
}

/// Values of a cochain keyed by simplex, for tests and diagnostics.
pub fn as_map(x: &SimplicialComplex, phi: &Cochain) -> HashMap<Simplex, f64> {
    x.simplices(phi.degree).iter().cloned().zip(phi.values.iter().copied()).collect()
}
