//! Finite-dimensional frame analysis over a [`Grid`](crate::domain::Grid).
//!
//! A [`SynthesisSystem`] is a finite family `{ψ_k}` sampled on a grid. Its
//! synthesis matrix carries the quadrature weights as `√w_i` row scaling, so
//! the singular values of that matrix are exactly the frame bounds of the
//! discretized system: `S = T T*` is the frame operator, `G = T* T` the Gram
//! matrix.

mod reconstruct;
mod spectrum;
mod system;

pub use reconstruct::{reconstruct, ReconstructOptions, Reconstruction};
pub use spectrum::{
    hermitian_eigenvalues, measure_bounds, measure_bounds_with, BoundsOptions, FrameFlags,
    FrameReport, DEFAULT_RANK_TOL, TIGHT_TOL,
};
pub use system::{
    exponential, exponential_system, exponential_system_from, fourier_basis, SampledFunction,
    SynthesisSystem,
};
