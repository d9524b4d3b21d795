//! Simplicial complexes with the top-simplex weight `m`, weighted cochain
//! Laplacians, gallery distances and fillings, embedded volumes, random
//! Linial–Meshulam complexes and higher-dimensional distortion bounds.

pub mod combinatorics;
pub mod complex;
pub mod distortion;
pub mod error;
pub mod gallery;
pub mod geometry;
pub mod json;
pub mod laplacian;
pub mod linalg;
pub mod random;
pub mod verify;

pub use complex::{complete_complex, ComplexFile, Simplex, SimplicialComplex, VertexId, Weight};
pub use distortion::{
    evaluate_distortion, theorem_distortion_bound, vertex_set_family, BoundaryFamily, DistortionReport, EmbeddingSpec,
    Hypotheses, TheoremBound,
};
pub use error::{Error, Result};
pub use gallery::{fill_number, gallery_distance, FillResult, GalleryGraph};
pub use geometry::{envol_proj, Embedding, OrientedBoundary};
pub use laplacian::{
    adjoint, apply_upper_laplacian, cohomology_dim, differential, inner_product, spectrum, spectrum_with, Cochain,
    SpectralResult, SpectrumOptions,
};
pub use random::{linial_meshulam, LmParams};
