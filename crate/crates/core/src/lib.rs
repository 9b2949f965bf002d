//! Weighted arithmetic, geometric and harmonic mean failure rates of
//! lifetime models, the aging classes they define, and their quantile
//! analogues.
//!
//! A [`WeightedModel`] pairs a base hazard `h` with a weight `w`; its means
//! over `[0, x]` are
//!
//! * `A^w(x) = ∫w·h / ∫w`
//! * `G^w(x) = exp(∫w·ln h / ∫w)`
//! * `H^w(x) = ∫w / ∫(w/h)`
//!
//! ```
//! use hazard_means::{HazardModel, WeightFunction, WeightedModel};
//!
//! let m = WeightedModel::new(HazardModel::weibull(1.0, 2.0)?, WeightFunction::power(1.0)?);
//! assert!((m.wafr(2.0)? - 8.0 / 3.0).abs() < 1e-12);
//! # Ok::<(), hazard_means::Error>(())
//! ```

pub mod aging;
pub mod characterization;
pub mod cli;
pub mod error;
pub mod models;
pub mod quadrature;
pub mod quantile;
pub mod special;
pub mod systems;
pub mod weighted;

pub use aging::{classify, AgingClass, AgingReport, BoundReport, BoundStatus, Relation};
pub use error::{Error, Result};
pub use models::{Direction, Hazard, HazardFamily, HazardModel, ModelSpec, MonotoneLabel, MonotoneVerdict, WeightFamily, WeightFunction};
pub use quadrature::{integrate, QuadratureConfig};
pub use quantile::{QuantileModel, QuantileOptions};
pub use weighted::{MeanTriple, MeanValue, WeightedModel};
