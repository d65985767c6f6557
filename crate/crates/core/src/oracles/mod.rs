//! Reference computations that do not share code paths with the samplers: the
//! conditional characteristic function of the Lévy area and its numerical
//! inversion, Kolmogorov–Smirnov distances, and Monte Carlo moment estimates.

mod inversion;
mod ks;
mod moments;
mod quadrature;

pub use inversion::{
    cdf_by_inversion, char_fn, density_by_inversion, inversion_cutoff, second_moment_by_quadrature,
};
pub use ks::{ks_statistic, ks_two_sample, EmpiricalSample, MIN_KS_SAMPLE};
pub use moments::{mc_variance, MomentAccumulator, VarianceEstimate};
pub use quadrature::integrate_adaptive;
