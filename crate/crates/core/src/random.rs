//! Linial–Meshulam random complexes `X_{k+1}(N, p)`: the complete
//! `k`-skeleton on `N` vertices plus each `(k+1)`-simplex independently with
//! probability `p`.
//!
//! Stream rule: the generator is `ChaCha8Rng::seed_from_u64(seed)`. The
//! `(k+2)`-subset of colexicographic rank `r` is decided by the `u64` at
//! 32-bit word positions `2r, 2r+1`, mapped to `[0, 1)` by its top 53 bits,
//! and included iff that value is `< p`. Decisions therefore do not depend on
//! iteration order, and any rank range can be generated independently.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{binomial, next_colex};
use crate::complex::{Simplex, SimplicialComplex, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LmParams {
    pub n: usize,
    pub p: f64,
    pub k: usize,
    pub seed: u64,
}

impl LmParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < self.k + 2 {
            return Err(Error::InvalidParameter(format!("N = {} must be at least k + 2 = {}", self.n, self.k + 2)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::InvalidParameter("N too large".into()));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        LmParams { seed, ..self }
    }

    /// `C(N, k+2)`, the number of candidate `(k+1)`-simplices.
    pub fn candidates(&self) -> u128 {
        binomial(self.n, self.k + 2)
    }
}

const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

#[inline]
fn uniform(word: u64) -> f64 {
    (word >> 11) as f64 * UNIT
}

/// Calls `visit` on every included `(k+2)`-subset in colex order.
pub fn for_each_lm_simplex(params: &LmParams, mut visit: impl FnMut(&[u32])) -> Result<()> {
    params.validate()?;
    let size = params.k + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut cur: Vec<u32> = (0..size as u32).collect();
    loop {
        if uniform(rng.next_u64()) < params.p {
            visit(&cur);
        }
        if !next_colex(&mut cur, params.n as u32) {
            return Ok(());
        }
    }
}

/// Inclusion decision for the subset of colex rank `rank`, read directly at its stream offset.
pub fn lm_decision(params: &LmParams, rank: u128) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_word_pos(2 * rank);
    uniform(rng.next_u64()) < params.p
}

pub fn linial_meshulam(params: &LmParams) -> Result<SimplicialComplex> {
    params.validate()?;
    let mut gens: Vec<Simplex> = Vec::new();
    for_each_lm_simplex(params, |s| gens.push(Simplex::from_sorted(s.iter().map(|&v| VertexId(v)).collect())))?;
    // the complete k-skeleton
    let mut face: Vec<u32> = (0..params.k as u32 + 1).collect();
    loop {
        gens.push(Simplex::from_sorted(face.iter().map(|&v| VertexId(v)).collect()));
        if !next_colex(&mut face, params.n as u32) {
            break;
        }
    }
    SimplicialComplex::from_dense(params.n, gens)
}

/// Counts of one generated sample, computed without building the complex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LmSampleStats {
    pub seed: u64,
    pub top_count: u64,
    /// Largest number of `(k+1)`-simplices on one `k`-simplex.
    pub max_degree: u64,
    pub min_degree: u64,
}

/// Streams one sample and tallies `k`-simplex degrees (indexed by colex rank).
pub fn sample_stats(params: &LmParams) -> Result<LmSampleStats> {
    params.validate()?;
    let k1 = params.k + 1;
    let faces = binomial(params.n, k1);
    if faces > (1u128 << 32) {
        return Err(Error::InvalidParameter(format!("C(N, k+1) = {faces} too large to tally")));
    }
    // binom[c][i] = C(c, i) for the colex rank of facets
    let binom: Vec<Vec<u64>> = (0..=params.n).map(|c| (0..=k1).map(|i| binomial(c, i) as u64).collect()).collect();
    let mut degree = vec![0u32; faces as usize];
    let mut top_count = 0u64;
    for_each_lm_simplex(params, |s| {
        top_count += 1;
        // rank of s minus s[skip]: elements after the gap shift down one slot
        for skip in 0..s.len() {
            let mut r = 0u64;
            for (slot, &c) in s.iter().enumerate() {
                if slot < skip {
                    r += binom[c as usize][slot + 1];
                } else if slot > skip {
                    r += binom[c as usize][slot];
                }
            }
            degree[r as usize] += 1;
        }
    })?;
    let max_degree = degree.iter().copied().max().unwrap_or(0) as u64;
    let min_degree = degree.iter().copied().min().unwrap_or(0) as u64;
    Ok(LmSampleStats { seed: params.seed, top_count, max_degree, min_degree })
}

/// One of the three concentration events with its frequency and a Chernoff bound on failure.
#[derive(Clone, Debug, Serialize)]
pub struct EventReport {
    pub name: &'static str,
    pub threshold: f64,
    pub frequency: f64,
    /// Upper bound on the failure probability, capped at 1.
    pub failure_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub params: LmParams,
    pub epsilon: f64,
    pub trials: usize,
    pub events: Vec<EventReport>,
    pub expected_top_count: f64,
    pub mean_top_count: f64,
    /// `√(C p (1−p) / trials)`.
    pub standard_error: f64,
    /// Fraction of trials in which every `k`-simplex has a coface.
    pub pure_frequency: f64,
    pub samples: Vec<LmSampleStats>,
}

/// Runs `trials` samples with seeds `seed, seed+1, …` (wrapping) in parallel.
pub fn concentration_report(params: &LmParams, epsilon: f64, trials: usize) -> Result<ConcentrationReport> {
    params.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_stats(&params.with_seed(params.seed.wrapping_add(t))))
        .collect::<Result<Vec<_>>>()?;
    let c = params.candidates() as f64;
    let p = params.p;
    let mu_top = p * c;
    let mu_deg = p * (params.n - params.k - 1) as f64;
    let faces = binomial(params.n, params.k + 1) as f64;
    let eps2 = epsilon * epsilon;
    let freq =
        |pred: &dyn Fn(&LmSampleStats) -> bool| samples.iter().filter(|s| pred(s)).count() as f64 / trials as f64;
    let top_thr = mu_top * (1.0 + epsilon);
    let max_thr = mu_deg * (1.0 + epsilon);
    let min_thr = mu_deg * (1.0 - epsilon);
    let events = vec![
        EventReport {
            name: "top_count_upper",
            threshold: top_thr,
            frequency: freq(&|s| s.top_count as f64 <= top_thr),
            failure_bound: (-eps2 * mu_top / (2.0 + epsilon)).exp().min(1.0),
        },
        EventReport {
            name: "max_degree_upper",
            threshold: max_thr,
            frequency: freq(&|s| s.max_degree as f64 <= max_thr),
            failure_bound: (faces * (-eps2 * mu_deg / (2.0 + epsilon)).exp()).min(1.0),
        },
        EventReport {
            name: "min_degree_lower",
            threshold: min_thr,
            frequency: freq(&|s| s.min_degree as f64 >= min_thr),
            failure_bound: (faces * (-eps2 * mu_deg / 2.0).exp()).min(1.0),
        },
    ];
    let mean_top_count = samples.iter().map(|s| s.top_count as f64).sum::<f64>() / trials as f64;
    Ok(ConcentrationReport {
        params: *params,
        epsilon,
        trials,
        events,
        expected_top_count: mu_top,
        mean_top_count,
        standard_error: (c * p * (1.0 - p) / trials as f64).sqrt(),
        pure_frequency: freq(&|s| s.min_degree >= 1),
        samples,
    })
}
