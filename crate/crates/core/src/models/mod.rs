//! Parametric hazard models, weight functions and numerical monotonicity scans.

mod hazard;
mod monotone;
mod weight;

use serde::{Deserialize, Serialize};

pub use hazard::{invert_cumulative_hazard, make_hazard, survival_quantile, CustomHazard, Hazard, HazardFamily, HazardModel};
pub use monotone::{scan_grid, scan_monotonicity, scan_monotonicity_with, scan_values, MonotoneLabel, MonotoneVerdict, DEAD_BAND};
pub use weight::{make_weight, WeightFamily, WeightFn, WeightFunction};

use crate::error::Result;

/// Analytic monotonicity metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
    Constant,
    Unknown,
}

impl Direction {
    /// Whether two directions are both monotone and agree (constant agrees with anything monotone).
    pub fn same_as(self, other: Direction) -> Option<bool> {
        use Direction::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => None,
            (Constant, _) | (_, Constant) => Some(true),
            (a, b) => Some(a == b),
        }
    }
}

/// The JSON model document `{"hazard": {...}, "weight": {...}}`; the weight
/// defaults to constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelSpec {
    pub hazard: HazardModel,
    #[serde(default)]
    pub weight: WeightFunction,
}

impl ModelSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Mass quantile levels bounding the default scan interval.
pub const SCAN_MASS: (f64, f64) = (0.001, 0.999);

/// Interval `[x₀.₀₀₁, x₀.₉₉₉]` holding 99.8% of the model's mass, clipped
/// to the support.
pub fn default_scan_interval(m: &dyn Hazard) -> Result<(f64, f64)> {
    let lo = survival_quantile(m, 1.0 - SCAN_MASS.0)?;
    let hi = survival_quantile(m, 1.0 - SCAN_MASS.1)?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_document() {
        let spec = ModelSpec::from_json(
            r#"{"hazard":{"family":"weibull","alpha":1,"beta":2},"weight":{"family":"exponential","n":-1}}"#,
        )
        .unwrap();
        assert_eq!(spec.hazard.hazard(2.0), 4.0);
        assert_eq!(spec.weight.direction(), Direction::Decreasing);
        let bare = ModelSpec::from_json(r#"{"hazard":{"family":"exponential","lambda":0.5}}"#).unwrap();
        assert!(bare.weight.is_constant());
    }

    #[test]
    fn scan_interval_holds_the_mass() {
        let m = HazardModel::exponential(1.0).unwrap();
        let (lo, hi) = default_scan_interval(&m).unwrap();
        assert!((lo + (0.999f64).ln()).abs() < 1e-10);
        assert!((hi - 1000f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn direction_agreement() {
        assert_eq!(Direction::Increasing.same_as(Direction::Decreasing), Some(false));
        assert_eq!(Direction::Constant.same_as(Direction::Decreasing), Some(true));
        assert_eq!(Direction::Unknown.same_as(Direction::Increasing), None);
    }
}
