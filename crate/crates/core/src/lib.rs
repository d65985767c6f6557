//! Simulation of the Lévy chordal area of a two-dimensional Wiener process
//! conditioned on its increments over a step.
//!
//! Five samplers are provided:
//!
//! - `levy_fourier`: truncated Fourier (Karhunen–Loève) series in Normal variates,
//! - `rw_laplace`: Poisson mixture of Laplace variates,
//! - `logistic`: dyadic series of Poisson-counted Logistic variates,
//! - `logistic_normal`: the same with large Logistic sums replaced by a matched Normal,
//! - `exp_product`: the same with large Logistic sums drawn as differences of
//!   log-products of Exponentials, sampled from tabulated inverse CDFs.
//!
//! Every variate is drawn through [`distributions::VariateSource`], which counts the
//! uniforms consumed so that accuracy can be weighed against effort.

pub mod area;
pub mod bench;
mod dd;
pub mod distributions;
mod error;
pub mod lped;
pub mod oracles;
pub mod special;

pub use error::{Error, Result};
