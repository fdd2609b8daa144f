//! Large-scale channel model for indoor-office deployments at 6.9, 8.3 and
//! 14.5 GHz.
//!
//! The crate runs in two directions:
//!
//! * **Generation**: [`lsp::generate_drops`] places receivers at
//!   log-uniform distances and draws correlated shadow fading, delay spread
//!   and angular spreads from the built-in [`params::ModelRegistry`].
//! * **Estimation**: [`estimator`] turns measurement-style records back into
//!   model coefficients (path loss regression, log-normal moments,
//!   correlations, probability-plot data).
//!
//! [`records`] defines the CSV / JSON-lines interchange format shared by both.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod dispersion;
pub mod error;
pub mod estimator;
pub mod lsp;
pub mod params;
pub mod propagation;
pub mod records;

pub use error::{Error, Result};
pub use params::{ChannelState, CorrelationMatrix, FrequencyBand, ModelRegistry, ParamTable};
