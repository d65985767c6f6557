//! Logarithm of a Product of Exponentials Density (LPED).
//!
//! `φ_P` is the density of `log(E_1 ⋯ E_P)` for independent unit-mean Exponentials,
//! i.e. the inverse Mellin transform of `Γ^P` taken in log coordinates. It has
//! mean `-γP` and variance `Pπ²/6`. A sum of `P` standard Logistics has the law of
//! the difference of two independent such variables, which is what makes tables of
//! `Φ_P^{-1}` useful for the Lévy-area samplers.
//!
//! Three density engines:
//!
//! - [`density_asymptotic`]: saddle-point form, uniform in `x`, for large `P`;
//! - [`density_series`]: exact residue series, practical for `P <= 10`;
//! - [`density_large_x`]: right-tail asymptotic form.
//!
//! [`build_cdf`] integrates the saddle-point form from both ends of a window and
//! [`splice_and_invert`] turns the result into an [`InverseCdfTable`].

mod density;
mod io;
mod series;
mod table;

pub use density::{density_asymptotic, density_large_x};
pub use io::{
    read_table, read_table_from, table_file_name, write_table, write_table_to, TABLE_MAGIC,
    TABLE_VERSION,
};
pub use series::{density_series, SeriesCoefficients, DEFAULT_SERIES_TERMS, MAX_SERIES_P};
pub use table::{
    build_cdf, splice_and_invert, EndpointMode, InverseCdfTable, LpedCdf, LpedGridConfig,
    LpedTableSet, DESK_TABLE_POINTS, FULL_TABLE_POINTS, TABLE_EXPONENTS,
};

use crate::special::EULER_GAMMA;

/// Mean of `φ_P`.
pub fn lped_mean(p: u32) -> f64 {
    -EULER_GAMMA * p as f64
}

/// Variance of `φ_P`.
pub fn lped_variance(p: u32) -> f64 {
    p as f64 * std::f64::consts::PI.powi(2) / 6.0
}
