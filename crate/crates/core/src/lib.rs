//! Nonintersecting particles on the discrete circle `Z/nZ`.
//!
//! The graph `B_{k,n}` has the `k`-subsets of `{0,…,n−1}` as vertices and an
//! edge `I → J` whenever one particle of `I` jumps one step clockwise onto a
//! free site (with wrap-around). Its adjacency matrix is diagonalised by Schur
//! polynomials evaluated at `n`-th roots of unity, which gives
//!
//! * a commuting family of Markov kernels (Doob h-transforms of the adjacency
//!   operators `A_J`),
//! * a discrete Fourier transform turning convolution into pointwise products,
//! * the Verlinde formula for the structure constants of the small quantum
//!   cohomology ring of the Grassmannian `G(k,n)`,
//! * a discrete approximation of the unitary Dyson Brownian motion, whose heat
//!   kernels on `U(k)`/`SU(k)` are evaluated by character series.
//!
//! Modules are layered bottom-up: [`configurations`] → [`schur`] →
//! [`spectral`] → [`harmonic`] / [`qcoh`] → [`heat`] → [`limits`].

pub mod configurations;
pub mod error;
pub mod harmonic;
pub mod heat;
pub mod limits;
pub mod qcoh;
pub mod schur;
pub mod spectral;

pub use configurations::{AnglePoint, Configuration, Partition};
pub use error::{Error, Result};
pub use harmonic::{FourierCoeffs, HMeasure, MomentSummary};
pub use qcoh::CohomologyClass;
pub use spectral::{MarkovKernel, SpectralData};

pub use num_complex::Complex64;

/// Global tolerance for cross-identity checks between complex quantities.
pub const EPS_NUM: f64 = 1e-9;

/// Residual allowed when rounding a spectrally synthesised structure constant
/// to an integer.
pub const ROUNDING_TOL: f64 = 1e-6;
