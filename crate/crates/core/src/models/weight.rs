use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Direction, Hazard, HazardFamily, HazardModel};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// A shared weight closure; not serializable.
#[derive(Clone)]
pub struct WeightFn(pub Arc<dyn Fn(f64) -> f64 + Send + Sync>);

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("WeightFn(..)")
    }
}

/// Weight families, serialized as `{"family": "power", "c": 1}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `w(x) = 1`
    Constant,
    /// `w(x) = x^c`, `c > −1`
    Power { c: f64 },
    /// `w(x) = e^{nx}`
    Exponential { n: f64 },
    /// `w(x) = 1 − e^{nx}`, `n < 0`
    OneMinusExponential { n: f64 },
    /// `w(x) = 1/(1 − ᾱḠ(x))` with `Ḡ` the survival of `base`
    MarshallOlkinTilt { base: HazardFamily, alpha: f64 },
    /// `w(x) = (x − a)/(b − x)` on `[a, b)`, zero below `a`
    KiesRatio { a: f64, b: f64 },
    /// Piecewise-linear through `(grid[i], values[i])`, flat outside the grid.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
    #[serde(skip)]
    Custom {
        name: String,
        w: WeightFn,
        direction: Direction,
    },
}

/// A validated weight function with its cumulative `W(x) = ∫₀ˣ w`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "WeightFamily", into = "WeightFamily")]
pub struct WeightFunction {
    family: WeightFamily,
    #[serde(skip)]
    mo_base: Option<HazardModel>,
}

impl Default for WeightFunction {
    fn default() -> Self {
        Self { family: WeightFamily::Constant, mo_base: None }
    }
}

impl TryFrom<WeightFamily> for WeightFunction {
    type Error = Error;
    fn try_from(family: WeightFamily) -> Result<Self> {
        make_weight(family)
    }
}

impl From<WeightFunction> for WeightFamily {
    fn from(w: WeightFunction) -> Self {
        w.family
    }
}

/// Validates `family` and wraps it as a weight function.
pub fn make_weight(family: WeightFamily) -> Result<WeightFunction> {
    let mut mo_base = None;
    match &family {
        WeightFamily::Constant => {}
        WeightFamily::Power { c } => {
            if !(*c > -1.0 && c.is_finite()) {
                return Err(Error::invalid("c", format!("weight not locally integrable at 0 (c = {c} ≤ −1)")));
            }
        }
        WeightFamily::Exponential { n } => {
            if !n.is_finite() {
                return Err(Error::invalid("n", "must be finite"));
            }
        }
        WeightFamily::OneMinusExponential { n } => {
            if !(*n < 0.0 && n.is_finite()) {
                return Err(Error::invalid("n", format!("must be negative, got {n}")));
            }
        }
        WeightFamily::MarshallOlkinTilt { base, alpha } => {
            if !(*alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
            }
            mo_base = Some(super::make_hazard(base.clone())?);
        }
        WeightFamily::KiesRatio { a, b } => {
            if !(*a >= 0.0 && *b > *a && b.is_finite()) {
                return Err(Error::invalid("b", format!("need 0 <= a < b, got a = {a}, b = {b}")));
            }
        }
        WeightFamily::Tabulated { grid, values } => {
            if grid.len() < 2 || grid.len() != values.len() {
                return Err(Error::invalid("grid", "need at least two points and one value per point"));
            }
            if grid.windows(2).any(|w| !(w[0] < w[1])) || !(grid[0] >= 0.0) || !grid[grid.len() - 1].is_finite() {
                return Err(Error::invalid("grid", "must be strictly ascending, finite and non-negative"));
            }
            if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return Err(Error::invalid("values", "must be finite and non-negative"));
            }
        }
        WeightFamily::Custom { .. } => {}
    }
    Ok(WeightFunction { family, mo_base })
}

fn sign_direction(s: f64) -> Direction {
    if s > 0.0 {
        Direction::Increasing
    } else if s < 0.0 {
        Direction::Decreasing
    } else {
        Direction::Constant
    }
}

impl WeightFunction {
    pub fn constant() -> Self {
        Self::default()
    }
    pub fn power(c: f64) -> Result<Self> {
        make_weight(WeightFamily::Power { c })
    }
    pub fn exponential(n: f64) -> Result<Self> {
        make_weight(WeightFamily::Exponential { n })
    }
    pub fn one_minus_exponential(n: f64) -> Result<Self> {
        make_weight(WeightFamily::OneMinusExponential { n })
    }
    pub fn marshall_olkin_tilt(base: HazardModel, alpha: f64) -> Result<Self> {
        make_weight(WeightFamily::MarshallOlkinTilt { base: base.spec().clone(), alpha })
    }
    pub fn kies_ratio(a: f64, b: f64) -> Result<Self> {
        make_weight(WeightFamily::KiesRatio { a, b })
    }
    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        make_weight(WeightFamily::Tabulated { grid, values })
    }
    /// A closure-backed weight; `direction` is trusted as declared.
    pub fn custom(name: impl Into<String>, direction: Direction, w: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            family: WeightFamily::Custom { name: name.into(), w: WeightFn(Arc::new(w)), direction },
            mo_base: None,
        }
    }

    pub fn spec(&self) -> &WeightFamily {
        &self.family
    }

    pub fn name(&self) -> String {
        match &self.family {
            WeightFamily::Constant => "constant".into(),
            WeightFamily::Power { c } => format!("power(c={c})"),
            WeightFamily::Exponential { n } => format!("exponential(n={n})"),
            WeightFamily::OneMinusExponential { n } => format!("one_minus_exponential(n={n})"),
            WeightFamily::MarshallOlkinTilt { base, alpha } => format!("marshall_olkin_tilt({}, alpha={alpha})", base.name()),
            WeightFamily::KiesRatio { a, b } => format!("kies_ratio(a={a}, b={b})"),
            WeightFamily::Tabulated { grid, .. } => format!("tabulated({} points)", grid.len()),
            WeightFamily::Custom { name, .. } => name.clone(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.family, WeightFamily::Constant)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant => 1.0,
            WeightFamily::Power { c } => x.powf(*c),
            WeightFamily::Exponential { n } => (n * x).exp(),
            WeightFamily::OneMinusExponential { n } => -(n * x).exp_m1(),
            WeightFamily::MarshallOlkinTilt { alpha, .. } => {
                let base = self.mo_base.as_ref().expect("validated at construction");
                let g = base.survival(x).unwrap_or(0.0);
                1.0 / (1.0 - (1.0 - alpha) * g)
            }
            WeightFamily::KiesRatio { a, b } => {
                if x < *a {
                    0.0
                } else {
                    let t = x.min(b - 1e-12 * (b - a));
                    (t - a) / (b - t)
                }
            }
            WeightFamily::Tabulated { grid, values } => interpolate(grid, values, x),
            WeightFamily::Custom { w, .. } => (w.0)(x),
        }
    }

    /// `W(x)` in closed form, when the family has one.
    pub fn closed_cumulative(&self, x: f64) -> Option<f64> {
        let x = x.max(0.0);
        match &self.family {
            WeightFamily::Constant => Some(x),
            WeightFamily::Power { c } => Some(x.powf(c + 1.0) / (c + 1.0)),
            WeightFamily::Exponential { n } => Some(if *n == 0.0 { x } else { (n * x).exp_m1() / n }),
            WeightFamily::OneMinusExponential { n } => Some(x - (n * x).exp_m1() / n),
            WeightFamily::KiesRatio { a, b } => {
                if x <= *a {
                    Some(0.0)
                } else {
                    let t = x.min(b - 1e-12 * (b - a));
                    Some((b - a) * ((b - a) / (b - t)).ln() - (t - a))
                }
            }
            WeightFamily::Tabulated { grid, values } => Some(tabulated_integral(grid, values, x)),
            WeightFamily::MarshallOlkinTilt { .. } | WeightFamily::Custom { .. } => None,
        }
    }

    /// `W(x) = ∫₀ˣ w`, by closed form or quadrature.
    pub fn cumulative(&self, x: f64) -> Result<f64> {
        self.cumulative_with(x, &QuadratureConfig::default())
    }

    pub fn cumulative_with(&self, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if let Some(v) = self.closed_cumulative(x) {
            return Ok(v);
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        Ok(integrate(|u| self.eval(u), 0.0, x, cfg)?.value)
    }

    /// Declared (analytic) monotone direction.
    pub fn direction(&self) -> Direction {
        match &self.family {
            WeightFamily::Constant => Direction::Constant,
            WeightFamily::Power { c } => sign_direction(*c),
            WeightFamily::Exponential { n } => sign_direction(*n),
            WeightFamily::OneMinusExponential { .. } => Direction::Increasing,
            WeightFamily::MarshallOlkinTilt { alpha, .. } => sign_direction(alpha - 1.0),
            WeightFamily::KiesRatio { .. } => Direction::Increasing,
            WeightFamily::Tabulated { values, .. } => {
                let up = values.windows(2).any(|w| w[1] > w[0]);
                let down = values.windows(2).any(|w| w[1] < w[0]);
                match (up, down) {
                    (false, false) => Direction::Constant,
                    (true, false) => Direction::Increasing,
                    (false, true) => Direction::Decreasing,
                    (true, true) => Direction::Unknown,
                }
            }
            WeightFamily::Custom { direction, .. } => *direction,
        }
    }
}

fn interpolate(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x <= grid[0] {
        return values[0];
    }
    if x >= grid[n - 1] {
        return values[n - 1];
    }
    let i = grid.partition_point(|g| *g <= x) - 1;
    let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    values[i] + t * (values[i + 1] - values[i])
}

fn tabulated_integral(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    let mut acc = values[0] * x.min(grid[0]);
    for i in 0..n - 1 {
        if x <= grid[i] {
            return acc;
        }
        let end = x.min(grid[i + 1]);
        acc += 0.5 * (values[i] + interpolate(grid, values, end)) * (end - grid[i]);
    }
    if x > grid[n - 1] {
        acc += values[n - 1] * (x - grid[n - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{scan_monotonicity, MonotoneLabel};

    #[test]
    fn cumulative_spot_values() {
        assert_eq!(WeightFunction::power(1.0).unwrap().cumulative(2.0).unwrap(), 2.0);
        let e = WeightFunction::exponential(-1.0).unwrap().cumulative(1.0).unwrap();
        assert!((e - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((e - 0.632_120_6).abs() < 1e-7);
        for x in [1.0, 5.0, 10.0] {
            assert_eq!(WeightFunction::constant().cumulative(x).unwrap(), x);
        }
    }

    #[test]
    fn rejects_non_integrable_power() {
        match WeightFunction::power(-1.0) {
            Err(Error::Validation { name, reason }) => {
                assert_eq!(name, "c");
                assert!(reason.contains("not locally integrable"));
            }
            other => panic!("{other:?}"),
        }
        assert!(WeightFunction::one_minus_exponential(0.5).is_err());
        assert!(WeightFunction::tabulated(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(WeightFunction::tabulated(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
        assert!(WeightFunction::kies_ratio(2.0, 1.0).is_err());
    }

    #[test]
    fn closed_cumulatives_match_quadrature() {
        let weights = [
            WeightFunction::power(-0.5).unwrap(),
            WeightFunction::power(2.0).unwrap(),
            WeightFunction::exponential(0.7).unwrap(),
            WeightFunction::one_minus_exponential(-2.0).unwrap(),
            WeightFunction::kies_ratio(0.5, 4.0).unwrap(),
            WeightFunction::tabulated(vec![0.5, 1.0, 3.0], vec![2.0, 0.5, 1.0]).unwrap(),
        ];
        let cfg = QuadratureConfig::default();
        for w in &weights {
            for x in [0.3, 1.7, 3.5] {
                let closed = w.closed_cumulative(x).unwrap();
                let mut quad = 0.0;
                // split at the kinks of the tabulated weight
                let mut knots = vec![0.0, 0.5, 1.0, 3.0, x];
                knots.retain(|k| *k <= x);
                knots.dedup();
                for p in knots.windows(2) {
                    quad += integrate(|u| w.eval(u), p[0], p[1], &cfg).unwrap().value;
                }
                assert!((closed - quad).abs() <= 1e-9 * (1.0 + closed), "{} at {x}: {closed} vs {quad}", w.name());
            }
        }
    }

    #[test]
    fn declared_directions_match_scan() {
        let base = HazardModel::weibull(1.0, 2.0).unwrap();
        let weights = [
            WeightFunction::constant(),
            WeightFunction::power(1.5).unwrap(),
            WeightFunction::power(-0.5).unwrap(),
            WeightFunction::exponential(-1.0).unwrap(),
            WeightFunction::exponential(0.5).unwrap(),
            WeightFunction::one_minus_exponential(-1.0).unwrap(),
            WeightFunction::marshall_olkin_tilt(base.clone(), 0.4).unwrap(),
            WeightFunction::marshall_olkin_tilt(base, 3.0).unwrap(),
            WeightFunction::kies_ratio(0.0, 5.0).unwrap(),
        ];
        for w in &weights {
            let v = scan_monotonicity(|x| w.eval(x), (0.05, 4.0), 200).unwrap();
            let expected = match w.direction() {
                Direction::Increasing => MonotoneLabel::Increasing,
                Direction::Decreasing => MonotoneLabel::Decreasing,
                Direction::Constant => MonotoneLabel::Constant,
                Direction::Unknown => unreachable!(),
            };
            assert_eq!(v.label, expected, "{}", w.name());
        }
    }

    #[test]
    fn marshall_olkin_weight_integrates() {
        let w = WeightFunction::marshall_olkin_tilt(HazardModel::exponential(1.0).unwrap(), 0.5).unwrap();
        // 1/(1 − ½e^{−u}) = 2eᵘ/(2eᵘ − 1), with antiderivative ln(2eᵘ − 1)
        let x = 1.3f64;
        let exact = (2.0 * x.exp() - 1.0).ln();
        assert!((w.cumulative(x).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn json_schema() {
        let w: WeightFunction = serde_json::from_str(r#"{"family":"exponential","n":-1}"#).unwrap();
        assert_eq!(w.direction(), Direction::Decreasing);
        let c: WeightFunction = serde_json::from_str(r#"{"family":"constant"}"#).unwrap();
        assert!(c.is_constant());
        assert!(serde_json::from_str::<WeightFunction>(r#"{"family":"power","c":-2}"#).is_err());
        let t: WeightFunction = serde_json::from_str(r#"{"family":"tabulated","grid":[0,1],"values":[1,3]}"#).unwrap();
        assert_eq!(t.eval(0.5), 2.0);
    }
}
