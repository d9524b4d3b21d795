//! End-to-end numerical checks on one complex and one embedding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::distortion::{
    build_family, check_envol_inequality, check_spectral_filling_inequality, simplex_boundaries, FamilyChoice,
    Hypotheses,
};
use crate::error::{Error, Result};
use crate::geometry::{stokes_check, Embedding, OrderedChain};
use crate::laplacian::{
    adjoint, apply_upper_laplacian, augmentation_matrix, coboundary_matrix, differential, inner_product, norm_sq,
    Cochain,
};

/// Relative tolerance for the identities (adjointness, Rayleigh, Stokes).
pub const IDENTITY_TOLERANCE: f64 = 1e-9;
/// Relative slack for the inequality margins.
pub const MARGIN_TOLERANCE: f64 = 1e-8;
/// At most this many `(k+1)`-simplices enter the Stokes check.
pub const STOKES_SAMPLE: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst relative residual, or most negative relative margin.
    pub worst: f64,
    pub cases: usize,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub k: usize,
    pub hypotheses: Hypotheses,
    pub family_size: usize,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// `d_{j+1} ∘ d_j = 0` exactly for every `-1 ≤ j ≤ n−2`.
pub fn check_dd_zero(x: &SimplicialComplex) -> CheckResult {
    let n = x.dim();
    let mut failures = Vec::new();
    let mut cases = 0;
    if n >= 1 {
        cases += 1;
        if !coboundary_matrix(x, 0).matmul(&augmentation_matrix(x)).is_zero() {
            failures.push("-1".to_string());
        }
    }
    for j in 0..n.saturating_sub(1) {
        cases += 1;
        if !coboundary_matrix(x, j + 1).matmul(&coboundary_matrix(x, j)).is_zero() {
            failures.push(j.to_string());
        }
    }
    CheckResult {
        name: "dd_zero",
        passed: failures.is_empty(),
        worst: 0.0,
        cases,
        detail: (!failures.is_empty()).then(|| format!("nonzero at degrees {}", failures.join(","))),
    }
}

/// `⟨dφ,ψ⟩ = ⟨φ,d*ψ⟩` and `‖dφ‖² = ⟨Δ⁺φ,φ⟩` on random cochains.
pub fn check_adjoint(x: &SimplicialComplex, k: usize, trials: usize, rng: &mut ChaCha8Rng) -> Result<[CheckResult; 2]> {
    let mut worst_adj: f64 = 0.0;
    let mut worst_ray: f64 = 0.0;
    for _ in 0..trials {
        let phi = Cochain::random(x, k, rng);
        let psi = Cochain::random(x, k + 1, rng);
        let dphi = differential(x, &phi)?;
        worst_adj = worst_adj.max(rel(inner_product(x, &dphi, &psi)?, inner_product(x, &phi, &adjoint(x, &psi)?)?));
        worst_ray = worst_ray.max(rel(norm_sq(x, &dphi)?, inner_product(x, &apply_upper_laplacian(x, &phi)?, &phi)?));
    }
    let mk = |name, worst: f64| CheckResult {
        name,
        passed: worst <= IDENTITY_TOLERANCE,
        worst,
        cases: trials,
        detail: None,
    };
    Ok([mk("adjoint", worst_adj), mk("rayleigh", worst_ray)])
}

/// Stokes on `∂σ` filled by `σ`, for the first [`STOKES_SAMPLE`] `(k+1)`-simplices.
pub fn check_stokes(x: &SimplicialComplex, k: usize, f: &Embedding) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let boundaries = simplex_boundaries(x, k);
    let cases = boundaries.len().min(STOKES_SAMPLE);
    for (b, sigma) in boundaries.iter().zip(x.simplices(k + 1)).take(cases) {
        let filling: OrderedChain = vec![(sigma.vertices().to_vec(), 1)];
        let r = stokes_check(b, &filling, f)?;
        worst = worst.max(r.max_residual / r.scale.max(1.0));
    }
    Ok(CheckResult { name: "stokes", passed: worst <= IDENTITY_TOLERANCE, worst, cases, detail: None })
}

fn margin_check(name: &'static str, margins: Result<Vec<crate::distortion::Margin>>) -> Result<CheckResult> {
    match margins {
        Ok(ms) => {
            let worst = ms.iter().map(|m| m.margin / (m.lhs.abs() + 1.0)).fold(f64::INFINITY, f64::min);
            Ok(CheckResult {
                name,
                passed: ms.iter().all(|m| m.holds(MARGIN_TOLERANCE)),
                worst,
                cases: ms.len(),
                detail: None,
            })
        }
        Err(Error::HypothesisNotMet(why)) => Ok(CheckResult {
            name,
            passed: false,
            worst: f64::NAN,
            cases: 0,
            detail: Some(format!("hypothesis not met: {why}")),
        }),
        Err(e) => Err(e),
    }
}

/// Runs every check; `seed` drives the random cochains.
pub fn verify_all(
    x: &SimplicialComplex,
    k: usize,
    f: &Embedding,
    family: FamilyChoice,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    let hyp = Hypotheses::compute(x, k)?;
    f.check_total(x)?;
    let fam = build_family(x, k, family)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = vec![check_dd_zero(x)];
    checks.extend(check_adjoint(x, k, trials, &mut rng)?);
    checks.push(check_stokes(x, k, f)?);
    let phis: Vec<Cochain> = (0..trials).map(|_| Cochain::random(x, k, &mut rng)).collect();
    checks.push(margin_check(
        "spectral_filling",
        phis.iter().map(|phi| check_spectral_filling_inequality(x, &fam, &hyp, phi)).collect(),
    )?);
    checks.push(margin_check("envol_filling", check_envol_inequality(x, &fam, &hyp, f).map(|m| vec![m]))?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { k, hypotheses: hyp, family_size: fam.len(), checks, passed })
}
