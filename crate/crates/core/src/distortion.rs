//! Families of polytope boundaries, the spectral filling inequalities, the
//! distortion lower bound, and measured distortion of affine embeddings.
//!
//! For a family `A` of oriented `k`-boundaries in `X`:
//!
//! * `l = min_τ m(τ) / #{S ∈ A : τ ⊂ S}` over `k`-simplices lying in some member (kept exact),
//! * `s = max_S |S|`,
//! * `λ` is the verified least nonzero eigenvalue of `Δ⁺_k`,
//! * `D = max_{τ ∈ X^(k)} #{σ ∈ X^(k+1) : τ ⊂ σ}`.
//!
//! Branching factors `Dk` are evaluated as `D · max(k, 1)` so the graph case
//! `k = 0` keeps its meaning.
//!
//! Measured distortion takes both suprema over `A ∪ T`, where `T` holds the
//! boundaries of the `(k+1)`-simplices of `X`. Filling numbers enter as
//! intervals, so the distortion is reported as an interval too.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::combinatorics::{factorial, next_colex};
use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::error::{Error, Result};
use crate::gallery::{fill_number_in, FillResult, GalleryGraph};
use crate::geometry::{envol_proj, simplex_boundary_oriented, Embedding, OrientedBoundary};
use crate::json::csv_f64;
use crate::laplacian::{cohomology_dim, spectrum, Cochain, DEFAULT_TOLERANCE};
use crate::random::{linial_meshulam, LmParams};

/// A family `A` of oriented `k`-boundaries realized in `X`, with its statistics.
#[derive(Clone, Debug)]
pub struct BoundaryFamily {
    k: usize,
    members: Vec<OrientedBoundary>,
    /// `members[i]` as indices into `X^(k)`, parallel to its faces.
    face_index: Vec<Vec<usize>>,
    l: Ratio<u128>,
    s: usize,
}

impl BoundaryFamily {
    /// Computes `l` and `s` for boundaries whose faces all lie in `X`.
    pub fn new(x: &SimplicialComplex, k: usize, members: Vec<OrientedBoundary>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyInput);
        }
        let weights = x.weights(k)?;
        let mut counts = vec![0u128; x.count(k)];
        let mut face_index = Vec::with_capacity(members.len());
        for b in &members {
            if b.dim() != k {
                return Err(Error::DegreeMismatch(k, b.dim()));
            }
            let idx = b
                .faces()
                .iter()
                .map(|(s, _)| x.index_of(s).ok_or_else(|| Error::SimplexNotFound(x.simplex_labels(s))))
                .collect::<Result<Vec<_>>>()?;
            for &i in &idx {
                counts[i] += 1;
            }
            face_index.push(idx);
        }
        let l = counts
            .iter()
            .zip(&weights)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, w)| Ratio::new(w.0 as u128, c))
            .min()
            .expect("nonempty family");
        let s = members.iter().map(OrientedBoundary::len).max().unwrap_or(0);
        Ok(BoundaryFamily { k, members, face_index, l, s })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn members(&self) -> &[OrientedBoundary] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn l(&self) -> Ratio<u128> {
        self.l
    }

    pub fn l_f64(&self) -> f64 {
        *self.l.numer() as f64 / *self.l.denom() as f64
    }

    pub fn s(&self) -> usize {
        self.s
    }

    fn face_index(&self, i: usize) -> &[usize] {
        &self.face_index[i]
    }
}

/// All `C(N, k+2)` simplex boundaries `∂(j_0 < … < j_{k+1})`.
pub fn vertex_set_family(x: &SimplicialComplex, k: usize) -> Result<BoundaryFamily> {
    if !x.has_complete_skeleton(k) {
        return Err(Error::IncompleteSkeleton(k));
    }
    let n = x.num_vertices() as u32;
    if (n as usize) < k + 2 {
        return Err(Error::InvalidParameter(format!("{n} vertices cannot span a {}-simplex", k + 1)));
    }
    let mut cur: Vec<u32> = (0..k as u32 + 2).collect();
    let mut members = Vec::new();
    loop {
        let tuple: Vec<VertexId> = cur.iter().map(|&v| VertexId(v)).collect();
        members.push(simplex_boundary_oriented(&tuple)?);
        if !next_colex(&mut cur, n) {
            break;
        }
    }
    members.sort_by(|a, b| a.faces().cmp(b.faces()));
    BoundaryFamily::new(x, k, members)
}

/// Which boundary family to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    /// Vertex-set boundaries when the `k`-skeleton is complete, `T` otherwise.
    Auto,
    Vertex,
    /// `T` only.
    Simplices,
}

impl std::str::FromStr for FamilyChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FamilyChoice::Auto),
            "vertex" => Ok(FamilyChoice::Vertex),
            "simplices" => Ok(FamilyChoice::Simplices),
            _ => Err(Error::InvalidParameter(format!("family {s:?}: expected auto, vertex or simplices"))),
        }
    }
}

pub fn build_family(x: &SimplicialComplex, k: usize, choice: FamilyChoice) -> Result<BoundaryFamily> {
    match choice {
        FamilyChoice::Vertex => vertex_set_family(x, k),
        FamilyChoice::Simplices => BoundaryFamily::new(x, k, simplex_boundaries(x, k)),
        FamilyChoice::Auto if x.has_complete_skeleton(k) && x.num_vertices() >= k + 2 => vertex_set_family(x, k),
        FamilyChoice::Auto => BoundaryFamily::new(x, k, simplex_boundaries(x, k)),
    }
}

/// `T`: boundaries of the `(k+1)`-simplices of `X` in canonical order.
pub fn simplex_boundaries(x: &SimplicialComplex, k: usize) -> Vec<OrientedBoundary> {
    x.simplices(k + 1).iter().map(|s| simplex_boundary_oriented(s.vertices()).expect("distinct vertices")).collect()
}

/// `d_{P_S} φ = Σ_{(τ,s) ∈ S} s · φ(τ)`.
pub fn d_ps(x: &SimplicialComplex, phi: &Cochain, b: &OrientedBoundary) -> Result<f64> {
    if phi.degree != b.dim() {
        return Err(Error::DegreeMismatch(phi.degree, b.dim()));
    }
    b.faces().iter().try_fold(0.0, |acc, (s, sign)| {
        let i = x.index_of(s).ok_or_else(|| Error::SimplexNotFound(x.simplex_labels(s)))?;
        Ok(acc + *sign as f64 * phi.values[i])
    })
}

/// Instance-level hypotheses shared by the inequalities and the bound.
#[derive(Clone, Debug, Serialize)]
pub struct Hypotheses {
    pub pure: bool,
    pub gallery_connected: bool,
    /// `dim H^k(X; ℝ) = 0` (reduced at `k = 0`).
    pub cohomology_vanishes: bool,
    /// Least nonzero eigenvalue of `Δ⁺_k`, present only when the kernel cross-check passed.
    pub lambda: Option<f64>,
    /// `D`.
    pub max_degree: usize,
}

impl Hypotheses {
    pub fn compute(x: &SimplicialComplex, k: usize) -> Result<Self> {
        if x.dim() == 0 || k + 1 > x.dim() {
            return Err(Error::DegreeOutOfRange { degree: k, min: 0, max: x.dim().saturating_sub(1) });
        }
        let pure = x.is_pure();
        let g = GalleryGraph::new(x, k);
        let cohomology_vanishes = cohomology_dim(x, k)?.dim == 0;
        let lambda =
            if pure { spectrum(x, k, DEFAULT_TOLERANCE).ok().and_then(|s| s.lambda_min_nonzero) } else { None };
        Ok(Hypotheses {
            pure,
            gallery_connected: g.is_connected(),
            cohomology_vanishes,
            lambda,
            max_degree: g.max_degree(),
        })
    }

    /// Hypotheses of the spectral filling inequality and its embedded form.
    pub fn spectral_ok(&self) -> bool {
        self.pure && self.cohomology_vanishes && self.lambda.is_some()
    }

    /// All hypotheses of the distortion lower bound.
    pub fn all(&self) -> bool {
        self.spectral_ok() && self.gallery_connected
    }

    fn require_spectral(&self) -> Result<f64> {
        if !self.pure {
            return Err(Error::HypothesisNotMet("complex is not pure".into()));
        }
        if !self.cohomology_vanishes {
            return Err(Error::HypothesisNotMet("H^k(X) is nonzero".into()));
        }
        self.lambda.ok_or_else(|| Error::HypothesisNotMet("no verified spectral gap".into()))
    }

    /// Compact `+`-joined list of the hypotheses that hold.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if self.pure {
            parts.push("pure");
        }
        if self.gallery_connected {
            parts.push("gallery");
        }
        if self.cohomology_vanishes {
            parts.push("hk0");
        }
        if self.lambda.is_some() {
            parts.push("lambda");
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join("+")
        }
    }
}

/// Both sides of an inequality `lhs ≥ rhs`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Margin {
    fn new(lhs: f64, rhs: f64) -> Self {
        Margin { lhs, rhs, margin: lhs - rhs }
    }

    /// `margin ≥ −tol · (lhs + 1)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol * (self.lhs.abs() + 1.0)
    }
}

/// `‖dφ‖² − (lλ/s) Σ_{S∈A} (d_{P_S} φ)²`.
pub fn check_spectral_filling_inequality(
    x: &SimplicialComplex,
    family: &BoundaryFamily,
    hyp: &Hypotheses,
    phi: &Cochain,
) -> Result<Margin> {
    let lambda = hyp.require_spectral()?;
    if phi.degree != family.k() {
        return Err(Error::DegreeMismatch(family.k(), phi.degree));
    }
    let dphi = crate::laplacian::differential(x, phi)?;
    let lhs = crate::laplacian::norm_sq(x, &dphi)?;
    let sum: f64 = (0..family.len())
        .map(|i| {
            family.members()[i]
                .faces()
                .iter()
                .zip(family.face_index(i))
                .map(|((_, s), &t)| *s as f64 * phi.values[t])
                .sum::<f64>()
                .powi(2)
        })
        .sum();
    Ok(Margin::new(lhs, family.l_f64() * lambda / family.s() as f64 * sum))
}

/// `Σ_σ m(σ) EnVol_proj(f(∂σ))² − (lλ/s) Σ_{S∈A} EnVol_proj(f(S))²`.
pub fn check_envol_inequality(
    x: &SimplicialComplex,
    family: &BoundaryFamily,
    hyp: &Hypotheses,
    f: &Embedding,
) -> Result<Margin> {
    let lambda = hyp.require_spectral()?;
    f.check_total(x)?;
    let k = family.k();
    let weights = x.weights(k + 1)?;
    let t = simplex_boundaries(x, k);
    let lhs_terms = t.par_iter().map(|b| envol_proj(b, f)).collect::<Result<Vec<_>>>()?;
    let lhs: f64 = lhs_terms.iter().zip(&weights).map(|(e, w)| w.0 as f64 * e * e).sum();
    let rhs_terms = family.members().par_iter().map(|b| envol_proj(b, f)).collect::<Result<Vec<_>>>()?;
    let rhs: f64 = rhs_terms.iter().map(|e| e * e).sum();
    Ok(Margin::new(lhs, family.l_f64() * lambda / family.s() as f64 * rhs))
}

/// `(ln(|B|/|X^(k)|) − s ln 2) / ((s−1) ln(D·max(k,1))) − 1`.
pub fn combinatorial_fill_bound(card_b: usize, card_xk: usize, s: usize, d: usize, k: usize) -> Result<f64> {
    let base = d * k.max(1);
    if base <= 1 {
        return Err(Error::BoundUndefined(format!("D·max(k,1) = {base} <= 1")));
    }
    if s <= 1 {
        return Err(Error::BoundUndefined(format!("s = {s} <= 1")));
    }
    if card_b == 0 || card_xk == 0 {
        return Err(Error::BoundUndefined("empty family or complex".into()));
    }
    let s = s as f64;
    Ok(((card_b as f64 / card_xk as f64).ln() - s * std::f64::consts::LN_2) / ((s - 1.0) * (base as f64).ln()) - 1.0)
}

fn ser_ratio<S: Serializer>(r: &Ratio<u128>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// The distortion lower bound and its ingredients.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremBound {
    pub hypotheses: Hypotheses,
    pub n: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub l: Ratio<u128>,
    pub s: usize,
    pub family_size: usize,
    pub top_count: usize,
    /// The combinatorial factor; `None` when `D·max(k,1) ≤ 1` or `s ≤ 1`.
    pub first_factor: Option<f64>,
    /// `(√((n+1)! s / (2 (k+2)! l λ) · |X^(n)|/|A|))^{-1}`.
    pub second_factor: Option<f64>,
    /// `√(2 (k+2) λ)`.
    pub second_factor_cap: Option<f64>,
    /// `l |A| / s ≤ (n+1)!/(k+1)! · |X^(n)|`, checked in exact arithmetic.
    pub counting_chain_holds: bool,
    /// Product of the factors when every hypothesis holds.
    pub bound: Option<f64>,
    /// The bound is `≤ 0`, so it says nothing.
    pub vacuous: bool,
}

impl TheoremBound {
    pub fn applicable(&self) -> bool {
        self.bound.is_some()
    }
}

/// Evaluates the theorem's right-hand side; ingredients are reported even
/// when a hypothesis fails, but `bound` is then `None`.
pub fn theorem_distortion_bound(x: &SimplicialComplex, family: &BoundaryFamily) -> Result<TheoremBound> {
    let k = family.k();
    let hyp = Hypotheses::compute(x, k)?;
    theorem_distortion_bound_with(x, family, hyp)
}

pub fn theorem_distortion_bound_with(
    x: &SimplicialComplex,
    family: &BoundaryFamily,
    hyp: Hypotheses,
) -> Result<TheoremBound> {
    let k = family.k();
    let n = x.dim();
    let top = x.count(n);
    let a = family.len();
    let s = family.s();
    let l = family.l();
    // l |A| (k+1)! ≤ s (n+1)! |X^(n)|
    let lhs = l * Ratio::from_integer(a as u128 * factorial(k + 1) as u128);
    let rhs = Ratio::from_integer(s as u128 * factorial(n + 1) as u128 * top as u128);
    let counting_chain_holds = lhs <= rhs;
    let first_factor = combinatorial_fill_bound(a / 2, x.count(k), s, hyp.max_degree, k).ok();
    let (second_factor, second_factor_cap) = match hyp.lambda {
        Some(lambda) => {
            let inner = factorial(n + 1) as f64 * s as f64 / (2.0 * factorial(k + 2) as f64 * family.l_f64() * lambda)
                * top as f64
                / a as f64;
            (Some(1.0 / inner.sqrt()), Some((2.0 * (k + 2) as f64 * lambda).sqrt()))
        }
        None => (None, None),
    };
    let bound = match (hyp.all(), first_factor, second_factor) {
        (true, Some(f1), Some(f2)) => Some(f1 * f2),
        _ => None,
    };
    Ok(TheoremBound {
        n,
        k,
        l,
        s,
        family_size: a,
        top_count: top,
        first_factor,
        second_factor,
        second_factor_cap,
        counting_chain_holds,
        vacuous: bound.is_none_or(|b| b <= 0.0),
        bound,
        hypotheses: hyp,
    })
}

/// Closed interval of extended reals; `+∞` serializes as `null`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn is_infinite(&self) -> bool {
        self.hi.is_infinite()
    }
}

/// A boundary's embedded volume and filling number.
#[derive(Clone, Debug, Serialize)]
pub struct MemberEvaluation {
    pub envol: f64,
    pub fill: FillResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub k: usize,
    /// `|A ∪ T|`.
    pub members: usize,
    /// `sup_S Fill_H(f(S)) / Fill(S)`.
    pub sup_ratio_fwd: Interval,
    /// `sup_S Fill(S) / Fill_H(f(S))`; infinite when some volume vanishes.
    pub sup_ratio_bwd: Interval,
    pub distortion: Interval,
    /// Some `EnVol_proj(f(S))` vanished, so the distortion is `+∞`.
    pub infinite: bool,
    /// Every filling number was determined exactly.
    pub exact_fills: bool,
    pub exact_fill_count: usize,
    pub theorem: TheoremBound,
    /// `distortion.lo ≥ bound`, when the bound applies and fills are exact.
    pub consistent: Option<bool>,
}

/// Volumes below this fraction of the largest one count as zero.
pub const ZERO_VOLUME_RELATIVE: f64 = 1e-12;

/// Measures `distor_{k,A∪T}(f)` for the affine extension of `f`.
pub fn evaluate_distortion(
    x: &SimplicialComplex,
    family: &BoundaryFamily,
    f: &Embedding,
    fill_budget: u64,
) -> Result<DistortionReport> {
    let theorem = theorem_distortion_bound(x, family)?;
    evaluate_distortion_with(x, family, f, fill_budget, theorem)
}

/// [`evaluate_distortion`] with a precomputed theorem bound.
pub fn evaluate_distortion_with(
    x: &SimplicialComplex,
    family: &BoundaryFamily,
    f: &Embedding,
    fill_budget: u64,
    theorem: TheoremBound,
) -> Result<DistortionReport> {
    f.check_total(x)?;
    let k = family.k();
    let mut seen: HashSet<Vec<Simplex>> = HashSet::new();
    let mut all: Vec<OrientedBoundary> = Vec::new();
    for b in family.members().iter().cloned().chain(simplex_boundaries(x, k)) {
        let mut key: Vec<Simplex> = b.faces().iter().map(|(s, _)| s.clone()).collect();
        key.sort();
        if seen.insert(key) {
            all.push(b);
        }
    }
    let g = GalleryGraph::new(x, k);
    let evals = all
        .par_iter()
        .map(|b| {
            let terms = b
                .faces()
                .iter()
                .map(|(s, _)| x.index_of(s).ok_or_else(|| Error::SimplexNotFound(x.simplex_labels(s))))
                .collect::<Result<Vec<_>>>()?;
            Ok(MemberEvaluation { envol: envol_proj(b, f)?, fill: fill_number_in(&g, &terms, fill_budget)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_env = evals.iter().map(|e| e.envol).fold(0.0, f64::max);
    let zero = |e: f64| e <= ZERO_VOLUME_RELATIVE * max_env;
    let infinite = evals.iter().any(|e| zero(e.envol));
    let mut fwd = Interval { lo: 0.0, hi: 0.0 };
    let mut bwd = Interval { lo: 0.0, hi: 0.0 };
    for e in &evals {
        let (lo, hi) = e.fill.interval();
        let (lo, hi) = (lo as f64, hi as f64);
        fwd.lo = fwd.lo.max(e.envol / hi);
        fwd.hi = fwd.hi.max(e.envol / lo);
        if !zero(e.envol) {
            bwd.lo = bwd.lo.max(lo / e.envol);
            bwd.hi = bwd.hi.max(hi / e.envol);
        }
    }
    if infinite {
        bwd = Interval { lo: f64::INFINITY, hi: f64::INFINITY };
    }
    let distortion = if infinite {
        Interval { lo: f64::INFINITY, hi: f64::INFINITY }
    } else {
        Interval { lo: fwd.lo * bwd.lo, hi: fwd.hi * bwd.hi }
    };
    let exact_fill_count = evals.iter().filter(|e| e.fill.exact.is_some()).count();
    let exact_fills = exact_fill_count == evals.len();
    let consistent = match theorem.bound {
        Some(b) if exact_fills => Some(distortion.lo >= b),
        _ => None,
    };
    Ok(DistortionReport {
        k,
        members: evals.len(),
        sup_ratio_fwd: fwd,
        sup_ratio_bwd: bwd,
        distortion,
        infinite,
        exact_fills,
        exact_fill_count,
        theorem,
        consistent,
    })
}

/// Vertex embeddings for the random-complex experiment.
#[derive(Clone, Debug)]
pub enum EmbeddingSpec {
    /// Standard normal coordinates in ℝ^m; trial `t` uses seed `seed + t` (wrapping).
    Gaussian { m: usize, seed: u64 },
    /// Eigenvectors 2..m+1 of the weighted 1-skeleton Laplacian.
    Spectral { m: usize },
    /// A fixed embedding reused for every trial.
    Fixed(Embedding),
}

impl EmbeddingSpec {
    /// Parses `gaussian:m:seed` or `spectral:m`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num =
            |s: &str| s.parse::<u64>().map_err(|e| Error::InvalidParameter(format!("embedding spec {text:?}: {e}")));
        match parts.as_slice() {
            ["gaussian", m, seed] => Ok(EmbeddingSpec::Gaussian { m: num(m)? as usize, seed: num(seed)? }),
            ["spectral", m] => Ok(EmbeddingSpec::Spectral { m: num(m)? as usize }),
            _ => {
                Err(Error::InvalidParameter(format!("embedding spec {text:?}: expected gaussian:m:seed or spectral:m")))
            }
        }
    }

    pub fn realize(&self, x: &SimplicialComplex, trial: u64) -> Result<Embedding> {
        match self {
            EmbeddingSpec::Gaussian { m, seed } => Embedding::gaussian(x.num_vertices(), *m, seed.wrapping_add(trial)),
            EmbeddingSpec::Spectral { m } => spectral_embedding(x, *m),
            EmbeddingSpec::Fixed(e) => Ok(e.clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            EmbeddingSpec::Gaussian { m, seed } => format!("gaussian:{m}:{seed}"),
            EmbeddingSpec::Spectral { m } => format!("spectral:{m}"),
            EmbeddingSpec::Fixed(e) => format!("file:{}", e.ambient_dim()),
        }
    }
}

/// Coordinates from eigenvectors `2..=m+1` (ascending eigenvalue) of
/// `L = diag(W·1) − W` with `W_uv = #{top simplices ⊇ {u,v}}`. Each vector's
/// entry of largest magnitude (first on ties) is made positive.
pub fn spectral_embedding(x: &SimplicialComplex, m: usize) -> Result<Embedding> {
    let n = x.num_vertices();
    if m == 0 || m + 1 > n {
        return Err(Error::InvalidParameter(format!("spectral embedding needs 1 <= m <= N-1, got m = {m}, N = {n}")));
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for (i, e) in x.simplices(1).iter().enumerate() {
        let w = x.top_count(1, i) as f64;
        let (u, v) = (e.vertices()[0].index(), e.vertices()[1].index());
        l[(u, v)] -= w;
        l[(v, u)] -= w;
        l[(u, u)] += w;
        l[(v, v)] += w;
    }
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let mut points = vec![vec![0.0; m]; n];
    for (c, &j) in order[1..=m].iter().enumerate() {
        let col = eig.eigenvectors.column(j);
        let mut best = 0;
        for i in 1..n {
            if col[i].abs() > col[best].abs() + 1e-12 {
                best = i;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            points[i][c] = sign * col[i];
        }
    }
    Embedding::new(points)
}

/// One trial of the random-complex experiment.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRow {
    pub trial: u64,
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub lambda: Option<f64>,
    pub l: f64,
    pub s: usize,
    pub d: usize,
    pub bound: Option<f64>,
    pub measured_lo: Option<f64>,
    pub measured_hi: Option<f64>,
    pub hypotheses: String,
    /// `λ ≥ 1/2`, the regime the asymptotic argument conditions on.
    pub lambda_half: bool,
    pub consistent: Option<bool>,
    /// Why the trial produced no measurement, if it did not.
    pub note: Option<String>,
}

impl ExperimentRow {
    pub const CSV_HEADER: &'static str = "seed,N,p,lambda,l,s,D,bound,measured_lo,measured_hi,hypotheses";

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, csv_f64);
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n,
            csv_f64(self.p),
            opt(self.lambda),
            csv_f64(self.l),
            self.s,
            self.d,
            opt(self.bound),
            opt(self.measured_lo),
            opt(self.measured_hi),
            self.hypotheses
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub params: LmParams,
    pub embedding: String,
    pub trials: usize,
    pub rows: Vec<ExperimentRow>,
    /// Trials with every hypothesis met, `λ ≥ 1/2` and exact fills.
    pub eligible: usize,
    /// Fraction of eligible trials with measured lower end `≥` bound; `None` without eligible trials.
    pub pass_rate: Option<f64>,
    /// `K′ = 1 / (2(k+1)√(3(k+2)))`.
    pub k_prime: f64,
    /// `K′ ln N / ln(pN)`; `None` when `pN ≤ 1`.
    pub asymptotic_bound: Option<f64>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(ExperimentRow::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        out
    }
}

/// `1 / (2(k+1)√(3(k+2)))`.
pub fn k_prime(k: usize) -> f64 {
    1.0 / (2.0 * (k + 1) as f64 * (3.0 * (k + 2) as f64).sqrt())
}

/// Runs one trial with complex seed `params.seed + trial` (wrapping).
pub fn lm_trial(params: &LmParams, spec: &EmbeddingSpec, trial: u64, fill_budget: u64) -> Result<ExperimentRow> {
    let p = params.with_seed(params.seed.wrapping_add(trial));
    let x = linial_meshulam(&p)?;
    let mut row = ExperimentRow {
        trial,
        seed: p.seed,
        n: p.n,
        p: p.p,
        lambda: None,
        l: f64::NAN,
        s: params.k + 2,
        d: 0,
        bound: None,
        measured_lo: None,
        measured_hi: None,
        hypotheses: "none".into(),
        lambda_half: false,
        consistent: None,
        note: None,
    };
    if x.dim() < params.k + 1 {
        row.note = Some("no (k+1)-simplices".into());
        return Ok(row);
    }
    let hyp = Hypotheses::compute(&x, params.k)?;
    row.hypotheses = hyp.summary();
    row.lambda = hyp.lambda;
    row.lambda_half = hyp.lambda.is_some_and(|l| l >= 0.5);
    row.d = hyp.max_degree;
    if hyp.lambda.is_some() && !row.lambda_half {
        row.hypotheses.push_str("+hypothesis-miss:lambda<1/2");
    }
    if !hyp.pure {
        row.note = Some("not pure".into());
        return Ok(row);
    }
    let family = vertex_set_family(&x, params.k)?;
    row.l = family.l_f64();
    row.s = family.s();
    let theorem = theorem_distortion_bound_with(&x, &family, hyp)?;
    row.bound = theorem.bound;
    let f = spec.realize(&x, trial)?;
    match evaluate_distortion_with(&x, &family, &f, fill_budget, theorem) {
        Ok(rep) => {
            row.measured_lo = Some(rep.distortion.lo);
            row.measured_hi = Some(rep.distortion.hi);
            row.consistent = rep.consistent;
            if !rep.exact_fills {
                row.note = Some(format!("{} of {} fills exact", rep.exact_fill_count, rep.members));
            }
        }
        Err(Error::Unfillable(..)) => row.note = Some("unfillable boundary".into()),
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// Runs trials in parallel; rows are ordered by trial index.
pub fn lm_distortion_experiment(
    params: &LmParams,
    spec: &EmbeddingSpec,
    trials: usize,
    fill_budget: u64,
) -> Result<ExperimentReport> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let rows = (0..trials as u64)
        .into_par_iter()
        .map(|t| lm_trial(params, spec, t, fill_budget))
        .collect::<Result<Vec<_>>>()?;
    let eligible: Vec<&ExperimentRow> = rows.iter().filter(|r| r.lambda_half && r.consistent.is_some()).collect();
    let pass_rate = (!eligible.is_empty())
        .then(|| eligible.iter().filter(|r| r.consistent == Some(true)).count() as f64 / eligible.len() as f64);
    let kp = k_prime(params.k);
    let pn = params.p * params.n as f64;
    Ok(ExperimentReport {
        params: *params,
        embedding: spec.describe(),
        trials,
        eligible: eligible.len(),
        rows,
        pass_rate,
        k_prime: kp,
        asymptotic_bound: (pn > 1.0).then(|| kp * (params.n as f64).ln() / pn.ln()),
    })
}
