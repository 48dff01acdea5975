//! Directed first/last passage percolation in thin rectangles and the
//! machinery needed to check its Tracy–Widom fluctuations numerically.
//!
//! The crate is organised bottom-up:
//!
//! * [`rng`] and [`weights`]: reproducible counter-based streams and iid weight laws.
//! * [`percolation`]: the four passage functionals by dynamic programming, plus
//!   exhaustive oracles for small grids.
//! * [`paths`]: discretised paths, the sup/inf partition functionals, the
//!   `⊗`/`⊙` operations and the O'Connell–Yor transform.
//! * [`rmt`]: GUE extreme eigenvalues through the β = 2 tridiagonal model.
//! * [`tracy_widom`]: Airy functions, the Hastings–McLeod solution and `F_GUE`.
//! * [`skorohod`]: a constructive Skorohod embedding for discrete laws.
//! * [`stats`]: ECDFs, Kolmogorov–Smirnov statistics and centring transforms.
//! * [`timeconstants`]: law-of-large-numbers shape constants.
//! * [`experiment`]: config, deterministic parallel execution and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod experiment;
pub mod paths;
pub mod percolation;
pub mod rmt;
pub mod rng;
pub mod skorohod;
pub mod stats;
pub mod timeconstants;
pub mod tracy_widom;
pub mod weights;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use weights::{Law, WeightDistribution};
