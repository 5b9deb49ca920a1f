//! Numerical phase-space calculus of the twisted Laplacian (special Hermite
//! operator) on uniform sampling lattices.
//!
//! The crate is organized in layers:
//!
//! * [`grid`] — uniform centered grids on `R^n`, sampled complex fields,
//!   rectangle-rule quadrature, and the symplectic form.
//! * [`fourier`] — the standard, partial (first-block), and symplectic Fourier
//!   transforms with exact continuum normalization on lattice points, plus FFT
//!   spectral differentiation and band-limited resampling.
//! * [`specfun`] — Hermite functions, Laguerre polynomials, special Hermite
//!   functions, Laguerre kernels, dilated Gaussians, and the basis catalog.
//! * [`phasespace`] — Gabor / symplectic Gabor / ambiguity / Wigner transforms,
//!   weighted mixed (modulation and amalgam) norms, and the exact-rational
//!   index-condition checkers.
//! * [`twisted`] — the twisted convolution algebra, the Weyl product, and Weyl
//!   quantization of sampled symbols.
//! * [`spectral`] — spectral projections, multiplier engines, the heat /
//!   fractional-heat / Schrödinger / wave flows, negative powers, Bessel
//!   potentials, Riesz means, the metaplectic intertwiner, and the Landau
//!   symplectic matrix.
//! * [`io`] — the TWF1 field container, catalog manifests, multiplier text
//!   files, and CSV helpers.

pub mod error;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod phasespace;
pub mod specfun;
pub mod spectral;
pub mod twisted;

pub use error::{Error, Result};
pub use grid::{Field, GridSpec, SymplecticForm};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
