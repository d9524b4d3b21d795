//! Fixture builders for the benchmarks.

use hdist::geometry::{simplex_boundary_oriented, OrientedBoundary};
use hdist::{complete_complex, linial_meshulam, Embedding, LmParams, SimplicialComplex, VertexId};

/// A dense LM 2-complex on `n` vertices with a fixed seed.
pub fn lm_fixture(n: usize, p: f64) -> SimplicialComplex {
    linial_meshulam(&LmParams { n, p, k: 1, seed: 2024 }).expect("valid parameters")
}

/// The complete 2-complex on `n` vertices.
pub fn complete_fixture(n: usize) -> SimplicialComplex {
    complete_complex(n, 2)
}

/// `∂[0..=k+1]` with a Gaussian embedding in ℝ^m.
pub fn boundary_fixture(k: usize, m: usize) -> (OrientedBoundary, Embedding) {
    let tuple: Vec<VertexId> = (0..k as u32 + 2).map(VertexId).collect();
    let b = simplex_boundary_oriented(&tuple).expect("distinct vertices");
    (b, Embedding::gaussian(k + 2, m, 7).expect("nonempty"))
}
