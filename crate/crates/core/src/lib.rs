//! Numerical tools for coagulation equations whose kernel is homogeneous of
//! degree one: kernel families and their Burgers constants, the linear growth
//! rate of Fourier modes around constant states, dispersion roots, the
//! diagonal-kernel lattice, an explicit scheme in exponential variables and
//! closed-form reference profiles.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod kernels;
pub mod lattice;
#[allow(clippy::excessive_precision)]
pub mod quadrature;
pub mod reference;
pub mod spectral;
pub mod wavesim;

pub use error::{Error, Result};
