//! Piecewise-affine geometry of embedded chains in ℝ^m.
//!
//! For a closed oriented `k`-dimensional boundary `B` and an embedding `f`,
//!
//! ```text
//! EnVol_proj(f(B))² = Σ_I ( Σ_{(τ,s) ∈ B} s · ∫_{f(τ)} x_{i₁} dx_{i₂} ∧ … ∧ dx_{i_{k+1}} )²
//! ```
//!
//! over increasing multi-indices `I = (i₁ < … < i_{k+1})`. On an affine
//! `k`-simplex the integrand's coordinate factor is affine, so the integral
//! is the vertex mean of `x_{i₁}` times the signed projected volume
//! `det((q_j − q₀)_{i₂..}) / k!`. Stokes turns each term into the signed
//! projected `(k+1)`-volume of any filling.
//!
//! Orientation: the ordered simplex `(v_0..v_{k+1})` has boundary
//! `Σ_i (−1)^i (v_0..v̂_i..v_{k+1})`; a face stored canonically carries the
//! permutation sign of its ordered form.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, sort_sign, subsets};
use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::error::{Error, Result};

pub const MAX_AMBIENT: usize = 16;
pub const MAX_BOUNDARY_DIM: usize = 3;

/// Images of dense vertex ids in ℝ^m.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    m: usize,
    points: Vec<Option<Vec<f64>>>,
}

impl Embedding {
    /// Points for vertices `0..points.len()`.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let m = points.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::InvalidParameter("embedding needs m >= 1 and at least one point".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != m) {
            return Err(Error::DimensionMismatch(format!("point of length {} in R^{m}", p.len())));
        }
        Ok(Embedding { m, points: points.into_iter().map(Some).collect() })
    }

    /// I.i.d. standard normal coordinates, vertex-major from one seeded stream.
    pub fn gaussian(n_vertices: usize, m: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n_vertices).map(|_| (0..m).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
        Embedding::new(pts)
    }

    pub fn ambient_dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, v: VertexId) -> Result<&[f64]> {
        self.points.get(v.index()).and_then(|p| p.as_deref()).ok_or(Error::MissingVertex(v.0 as u64))
    }

    /// Fails unless every vertex of `x` has an image.
    pub fn check_total(&self, x: &SimplicialComplex) -> Result<()> {
        for v in 0..x.num_vertices() {
            if self.points.get(v).is_none_or(Option::is_none) {
                return Err(Error::MissingVertex(x.labels()[v]));
            }
        }
        Ok(())
    }

    /// Same embedding with every point shifted by `t`.
    pub fn translated(&self, t: &[f64]) -> Embedding {
        let points =
            self.points.iter().map(|p| p.as_ref().map(|p| p.iter().zip(t).map(|(a, b)| a + b).collect())).collect();
        Embedding { m: self.m, points }
    }

    /// Same embedding with ambient coordinates reordered: new coordinate `i` is old `perm[i]`.
    pub fn permuted_coordinates(&self, perm: &[usize]) -> Embedding {
        let points = self.points.iter().map(|p| p.as_ref().map(|p| perm.iter().map(|&i| p[i]).collect())).collect();
        Embedding { m: self.m, points }
    }

    /// Parses `vertex,x1,...,xm` CSV keyed by the labels of `x`.
    pub fn parse_csv(x: &SimplicialComplex, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.first() != Some(&"vertex") || cols.len() < 2 {
            return Err(Error::Parse { line: 1, msg: "header must be vertex,x1,...,xm".into() });
        }
        let m = cols.len() - 1;
        let mut points = vec![None; x.num_vertices()];
        for (lineno, line) in lines {
            let err = |msg: String| Error::Parse { line: lineno + 1, msg };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != m + 1 {
                return Err(err(format!("expected {} fields, got {}", m + 1, fields.len())));
            }
            let label: u64 = fields[0].parse().map_err(|e| err(format!("vertex {:?}: {e}", fields[0])))?;
            let coords = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| err(format!("{f:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            // vertices outside the complex are ignored
            if let Some(v) = x.vertex_by_label(label) {
                points[v.index()] = Some(coords);
            }
        }
        let e = Embedding { m, points };
        e.check_total(x)?;
        Ok(e)
    }

    pub fn to_csv(&self, x: &SimplicialComplex) -> String {
        let mut out = String::from("vertex");
        for i in 1..=self.m {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (v, p) in self.points.iter().enumerate() {
            if let Some(p) = p {
                out.push_str(&x.labels()[v].to_string());
                for c in p {
                    out.push_str(&format!(",{c:?}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self, x: &SimplicialComplex) -> EmbeddingFile {
        let points = self
            .points
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.as_ref().map(|p| (x.labels()[v].to_string(), p.clone())))
            .collect();
        EmbeddingFile { m: self.m, points }
    }

    pub fn from_json(x: &SimplicialComplex, file: &EmbeddingFile) -> Result<Self> {
        let mut points = vec![None; x.num_vertices()];
        for (label, p) in &file.points {
            let label: u64 = label.parse().map_err(|e| Error::Parse { line: 0, msg: format!("{label:?}: {e}") })?;
            if p.len() != file.m {
                return Err(Error::DimensionMismatch(format!(
                    "vertex {label}: {} coordinates, m = {}",
                    p.len(),
                    file.m
                )));
            }
            if let Some(v) = x.vertex_by_label(label) {
                points[v.index()] = Some(p.clone());
            }
        }
        let e = Embedding { m: file.m, points };
        e.check_total(x)?;
        Ok(e)
    }

    /// Reads JSON when the text starts with `{`, CSV otherwise.
    pub fn parse_any(x: &SimplicialComplex, text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json(x, &serde_json::from_str(text)?)
        } else {
            Self::parse_csv(x, text)
        }
    }
}

/// JSON mirror of the CSV embedding format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub m: usize,
    pub points: BTreeMap<String, Vec<f64>>,
}

/// A signed list of canonical `k`-simplices, each appearing once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedBoundary {
    k: usize,
    faces: Vec<(Simplex, i8)>,
}

impl OrientedBoundary {
    /// Rejects repeated faces, mixed dimensions and open boundaries.
    pub fn new(k: usize, faces: Vec<(Simplex, i8)>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = std::collections::HashSet::new();
        for (s, sign) in &faces {
            if s.dim() != k {
                return Err(Error::DegreeMismatch(k, s.dim()));
            }
            if sign.abs() != 1 {
                return Err(Error::InvalidParameter(format!("face sign {sign}")));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidParameter(format!("face {s:?} listed twice")));
            }
        }
        let b = OrientedBoundary { k, faces };
        if !b.is_closed() {
            return Err(Error::OpenBoundary);
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn faces(&self) -> &[(Simplex, i8)] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Algebraic boundary vanishes; for `k = 0` the signs sum to zero.
    pub fn is_closed(&self) -> bool {
        if self.k == 0 {
            return self.faces.iter().map(|(_, s)| *s as i64).sum::<i64>() == 0;
        }
        let chain: Vec<(Simplex, i64)> = self.faces.iter().map(|(s, c)| (s.clone(), *c as i64)).collect();
        chain_boundary(&chain).is_empty()
    }

    /// Same faces with every sign flipped.
    pub fn reversed(&self) -> OrientedBoundary {
        OrientedBoundary { k: self.k, faces: self.faces.iter().map(|(s, c)| (s.clone(), -c)).collect() }
    }
}

/// Boundary of the ordered simplex `tuple` (length `k+2`), with canonical faces.
pub fn simplex_boundary_oriented(tuple: &[VertexId]) -> Result<OrientedBoundary> {
    if tuple.len() < 2 {
        return Err(Error::InvalidParameter("a boundary needs a simplex of dimension >= 1".into()));
    }
    Simplex::new(tuple.iter().copied())?;
    let faces = (0..tuple.len())
        .map(|i| {
            let face: Vec<VertexId> = tuple.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            let sign = if i % 2 == 0 { 1 } else { -1 } * sort_sign(&face);
            (Simplex::new(face).expect("distinct"), sign)
        })
        .collect();
    OrientedBoundary::new(tuple.len() - 2, faces)
}

/// Boundary of an integer chain of canonical simplices, zero terms dropped.
pub fn chain_boundary(chain: &[(Simplex, i64)]) -> Vec<(Simplex, i64)> {
    let mut acc: BTreeMap<Simplex, i64> = BTreeMap::new();
    for (s, c) in chain {
        for (i, f) in s.facets().enumerate() {
            *acc.entry(f).or_insert(0) += if i % 2 == 0 { *c } else { -*c };
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// An oriented `(k+1)`-chain given by ordered simplices with multiplicities.
pub type OrderedChain = Vec<(Vec<VertexId>, i64)>;

/// Canonicalizes an ordered chain, merging repeated simplices.
pub fn canonical_chain(chain: &OrderedChain) -> Result<Vec<(Simplex, i64)>> {
    let mut acc: BTreeMap<Simplex, i64> = BTreeMap::new();
    for (tuple, c) in chain {
        let s = Simplex::new(tuple.iter().copied())?;
        *acc.entry(s).or_insert(0) += sort_sign(tuple) as i64 * c;
    }
    Ok(acc.into_iter().filter(|(_, c)| *c != 0).collect())
}

/// Cone over `b` from `apex`: `Σ s · (apex, τ)`. Faces containing the apex
/// contribute degenerate (zero-volume) simplices and are omitted.
pub fn cone_filling(b: &OrientedBoundary, apex: VertexId) -> OrderedChain {
    b.faces
        .iter()
        .filter(|(s, _)| !s.contains(apex))
        .map(|(s, c)| {
            let mut t = vec![apex];
            t.extend_from_slice(s.vertices());
            (t, *c as i64)
        })
        .collect()
}

/// The bipyramid `(a, e_0..e_k) − (b, e_0..e_k)` over the ordered base.
pub fn bipyramid(a: VertexId, b: VertexId, base: &[VertexId]) -> OrderedChain {
    let mut up = vec![a];
    up.extend_from_slice(base);
    let mut down = vec![b];
    down.extend_from_slice(base);
    vec![(up, 1), (down, -1)]
}

/// Boundary of a canonical chain as an [`OrientedBoundary`].
pub fn boundary_of_chain(chain: &[(Simplex, i64)]) -> Result<OrientedBoundary> {
    let k = chain.first().ok_or(Error::EmptyInput)?.0.dim().checked_sub(1).ok_or(Error::EmptyInput)?;
    let faces = chain_boundary(chain)
        .into_iter()
        .map(|(s, c)| {
            if c.abs() == 1 {
                Ok((s, c as i8))
            } else {
                Err(Error::InvalidParameter(format!("face {s:?} has multiplicity {c}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    OrientedBoundary::new(k, faces)
}

/// Increasing index tuple `i₁ < … < i_l` (0-based) with `i₁` the coordinate slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!("multi-index {indices:?} must be strictly increasing")));
        }
        Ok(MultiIndex(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn coordinate(&self) -> usize {
        self.0[0]
    }

    pub fn wedge(&self) -> &[usize] {
        &self.0[1..]
    }
}

/// All multi-indices of length `len` in `0..m`, lexicographic.
pub fn multi_indices(m: usize, len: usize) -> Result<Vec<MultiIndex>> {
    if m > MAX_AMBIENT || len > MAX_BOUNDARY_DIM + 1 {
        return Err(Error::MultiIndexTooLarge {
            m,
            k: len.saturating_sub(1),
            max_m: MAX_AMBIENT,
            max_k: MAX_BOUNDARY_DIM,
        });
    }
    Ok(subsets(m, len).into_iter().map(MultiIndex).collect())
}

/// `det` of edge vectors `q_j − q₀` restricted to coordinates `cols`.
fn edge_det(points: &[&[f64]], cols: &[usize]) -> f64 {
    let k = cols.len();
    if k == 0 {
        return 1.0;
    }
    let m = DMatrix::from_fn(k, k, |r, c| points[r + 1][cols[c]] - points[0][cols[c]]);
    m.determinant()
}

fn check_points(points: &[&[f64]], count: usize, idx: &MultiIndex) -> Result<()> {
    if points.len() != count {
        return Err(Error::DimensionMismatch(format!("{} points, expected {count}", points.len())));
    }
    let m = points[0].len();
    if points.iter().any(|p| p.len() != m) || idx.indices().last().is_some_and(|&i| i >= m) {
        return Err(Error::DimensionMismatch(format!("multi-index {:?} in R^{m}", idx.indices())));
    }
    Ok(())
}

/// `∫ x_{i₁} dx_{i₂} ∧ … ∧ dx_{i_{k+1}}` over the affine simplex `[q₀..q_k]`.
pub fn moment_integral(points: &[&[f64]], idx: &MultiIndex) -> Result<f64> {
    let k = idx.wedge().len();
    check_points(points, k + 1, idx)?;
    let c = idx.coordinate();
    let mean = points.iter().map(|p| p[c]).sum::<f64>() / (k + 1) as f64;
    Ok(mean * edge_det(points, idx.wedge()) / factorial(k) as f64)
}

/// `∫ dx_{i₁} ∧ … ∧ dx_{i_{k+1}}` over the affine simplex `[p₀..p_{k+1}]`.
pub fn projected_volume(points: &[&[f64]], idx: &MultiIndex) -> Result<f64> {
    let l = idx.indices().len();
    check_points(points, l + 1, idx)?;
    Ok(edge_det(points, idx.indices()) / factorial(l) as f64)
}

fn images<'e>(f: &'e Embedding, vs: &[VertexId]) -> Result<Vec<&'e [f64]>> {
    vs.iter().map(|&v| f.point(v)).collect()
}

/// `Σ_{(τ,s)} s · moment_integral(f(τ), I)` for every multi-index `I`.
pub fn boundary_moments(b: &OrientedBoundary, f: &Embedding) -> Result<Vec<f64>> {
    let idxs = multi_indices(f.ambient_dim(), b.k + 1)?;
    let mut out = vec![0.0; idxs.len()];
    for (s, sign) in &b.faces {
        let pts = images(f, s.vertices())?;
        for (o, idx) in out.iter_mut().zip(&idxs) {
            *o += *sign as f64 * moment_integral(&pts, idx)?;
        }
    }
    Ok(out)
}

/// `EnVol_proj(f(B))`.
pub fn envol_proj(b: &OrientedBoundary, f: &Embedding) -> Result<f64> {
    Ok(boundary_moments(b, f)?.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Signed projected volumes `Σ c · ∫_{f(σ)} dx_I` of a filling, per multi-index.
pub fn interior_volumes(chain: &[(Simplex, i64)], f: &Embedding, len: usize) -> Result<Vec<f64>> {
    let idxs = multi_indices(f.ambient_dim(), len)?;
    let mut out = vec![0.0; idxs.len()];
    for (s, c) in chain {
        let pts = images(f, s.vertices())?;
        for (o, idx) in out.iter_mut().zip(&idxs) {
            *o += *c as f64 * projected_volume(&pts, idx)?;
        }
    }
    Ok(out)
}

/// `√det(G) / (k+1)!` for the Gram matrix of `p_j − p₀`; degenerate gives 0.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let l = points.len() - 1;
    let e = DMatrix::from_fn(l, points[0].len(), |r, c| points[r + 1][c] - points[0][c]);
    let det = (&e * e.transpose()).determinant();
    det.max(0.0).sqrt() / factorial(l) as f64
}

/// `Σ |c| · simplex_volume` over a filling.
pub fn filling_volume(chain: &[(Simplex, i64)], f: &Embedding) -> Result<f64> {
    let mut total = 0.0;
    for (s, c) in chain {
        total += c.unsigned_abs() as f64 * simplex_volume(&images(f, s.vertices())?);
    }
    Ok(total)
}

/// Result of comparing both sides of Stokes for one boundary and filling.
#[derive(Clone, Debug, Serialize)]
pub struct StokesReport {
    pub max_residual: f64,
    /// Largest absolute value on either side, for relative comparisons.
    pub scale: f64,
}

/// Checks `Σ_B s·∫ x_{i₁} dx_{i₂..} = Σ_F c·∫ dx_I` for every multi-index.
///
/// Fails with [`Error::BoundaryMismatch`] unless `∂F = B` exactly.
pub fn stokes_check(b: &OrientedBoundary, filling: &OrderedChain, f: &Embedding) -> Result<StokesReport> {
    let chain = canonical_chain(filling)?;
    let mut expected: Vec<(Simplex, i64)> = b.faces.iter().map(|(s, c)| (s.clone(), *c as i64)).collect();
    expected.sort();
    if chain_boundary(&chain) != expected {
        return Err(Error::BoundaryMismatch);
    }
    stokes_residual(b, &chain, f)
}

/// Stokes residuals without the combinatorial boundary check.
pub fn stokes_residual(b: &OrientedBoundary, chain: &[(Simplex, i64)], f: &Embedding) -> Result<StokesReport> {
    let lhs = boundary_moments(b, f)?;
    let rhs = interior_volumes(chain, f, b.k + 1)?;
    let max_residual = lhs.iter().zip(&rhs).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
    let scale = lhs.iter().chain(&rhs).map(|v| v.abs()).fold(0.0, f64::max);
    Ok(StokesReport { max_residual, scale })
}
