//! The GUE Tracy–Widom distribution from the Hastings–McLeod solution of
//! Painlevé II.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub mod airy;
mod painleve;
mod table;

pub use airy::{airy, AiryValue};
pub use painleve::{hastings_mcleod, StepControl, BLOW_UP};
pub use table::{f_gue_from_q, TWTable};

pub const DEFAULT_SEED_POINT: f64 = 8.0;
pub const DEFAULT_END_POINT: f64 = -10.0;

/// Builds the table on `[-10, 8]` with step `0.005`.
pub fn build_table() -> Result<TWTable> {
    let table = hastings_mcleod(DEFAULT_SEED_POINT, DEFAULT_END_POINT, &StepControl::default())?;
    f_gue_from_q(table)
}

/// Process-wide default table, built on first use.
pub fn default_table() -> Result<&'static TWTable> {
    static TABLE: OnceLock<std::result::Result<TWTable, String>> = OnceLock::new();
    TABLE
        .get_or_init(|| build_table().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Numerical(e.clone()))
}

/// `F_GUE(s)` for `s` in `[-10, 8]`.
pub fn f_gue(s: f64) -> Result<f64> {
    default_table()?.cdf_at(s)
}

pub fn f_gue_quantile(p: f64) -> Result<f64> {
    default_table()?.quantile(p)
}
