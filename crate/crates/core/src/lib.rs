//! Composition operators on the Hardy space H² of the unit disk, restricted to
//! model spaces `Q_θ = H² ⊖ θH²` for finite Blaschke products `θ`.
//!
//! Functions are handled as truncated Taylor series. Invariance questions are
//! answered through three computable routes: projection residuals onto `Q_θ`,
//! zero-multiplicity bookkeeping for `θH²`, and closed-form symbol families.

pub mod blaschke;
pub mod config;
pub mod error;
pub mod linalg;
pub mod modelspace;
pub mod moebius;
pub mod operators;
pub mod report;
pub mod series;
pub mod symbol;
pub mod theorems;

pub use blaschke::BlaschkeProduct;
pub use config::CheckConfig;
pub use error::{Error, Result};
pub use moebius::MoebiusMap;
pub use report::{Criterion, InvarianceReport, Verdict};
pub use series::TruncatedSeries;
pub use symbol::Symbol;
