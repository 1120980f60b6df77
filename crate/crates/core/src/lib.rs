//! Exact rational construction and verification of the multivariate
//! Krawtchouk (Rahman) polynomials, the dice-chain kernel they diagonalize,
//! and the difference operators that make them bispectral.
//!
//! Everything is computed over `BigRational`; floating point only appears in
//! the Monte Carlo simulator and in CSV output.

pub mod bispectral;
pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod params;
pub mod polyeval;
pub mod reference;
pub mod sampling;
pub mod scalar;
pub mod simulator;
pub mod spectral;
pub mod statespace;

pub use error::{Error, Result};
pub use kernel::{build_kernel, KernelMatrix};
pub use matrix::ExactMatrix;
pub use params::{ChainParams, MappedParams, ParamSet, Regime, WeightParams};
pub use polyeval::{build_poly_matrix, rahman_poly, PolyValueMatrix};
pub use scalar::Scalar;
pub use statespace::{State, StateSpace, StencilPattern};
