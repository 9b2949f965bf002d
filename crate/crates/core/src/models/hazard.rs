use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Direction;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// A lifetime distribution described through its failure rate.
///
/// `cumulative_hazard` defaults to quadrature of `hazard` from the lower end
/// of the support; survival and density follow from it.
pub trait Hazard: Send + Sync + fmt::Debug {
    fn hazard(&self, x: f64) -> f64;

    /// Support `[lo, hi)`; `hi` may be infinite.
    fn support(&self) -> (f64, f64);

    fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        let (lo, _) = self.support();
        if x <= lo {
            return Ok(0.0);
        }
        Ok(integrate(|u| self.hazard(u), lo, x, &QuadratureConfig::default())?.value)
    }

    fn survival(&self, x: f64) -> Result<f64> {
        Ok((-self.cumulative_hazard(x)?).exp())
    }

    fn density(&self, x: f64) -> Result<f64> {
        let h = self.hazard(x);
        if h == 0.0 {
            return Ok(0.0);
        }
        Ok(h * self.survival(x)?)
    }

    /// Analytic monotonicity of `h`, when known.
    fn direction(&self) -> Direction {
        Direction::Unknown
    }

    fn family(&self) -> Option<&HazardFamily> {
        None
    }
}

/// Parametric families, serialized as `{"family": "weibull", "alpha": 1, "beta": 2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HazardFamily {
    /// `h(x) = λ`
    Exponential { lambda: f64 },
    /// `h(x) = αβx^{β−1}`, `H(x) = αx^β`
    Weibull { alpha: f64, beta: f64 },
    /// `h(x) = αθx^{θ−1} + βγx^{γ−1}`
    AdditiveWeibull { alpha: f64, theta: f64, beta: f64, gamma: f64 },
    /// `F̄(t) = exp(−λ((t−a)/(b−t))^β)` on `[a, b)`
    Kies { a: f64, b: f64, lambda: f64, beta: f64 },
    /// Pareto I with scale and shape both α: `F̄(x) = (α/x)^α` on `[α, ∞)`
    ParetoOne { alpha: f64 },
    /// `F̄(x) = αḠ(x)/(1 − ᾱḠ(x))` with `ᾱ = 1 − α` and `Ḡ` the base survival
    MarshallOlkin { base: Box<HazardFamily>, tilt: f64 },
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

impl HazardFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            HazardFamily::Exponential { lambda } => positive("lambda", *lambda),
            HazardFamily::Weibull { alpha, beta } => {
                positive("alpha", *alpha)?;
                positive("beta", *beta)
            }
            HazardFamily::AdditiveWeibull { alpha, theta, beta, gamma } => {
                positive("alpha", *alpha)?;
                positive("theta", *theta)?;
                positive("beta", *beta)?;
                positive("gamma", *gamma)
            }
            HazardFamily::Kies { a, b, lambda, beta } => {
                if !(*a >= 0.0 && a.is_finite()) {
                    return Err(Error::invalid("a", format!("must be non-negative, got {a}")));
                }
                if !(*b > *a && b.is_finite()) {
                    return Err(Error::invalid("b", format!("must exceed a = {a}, got {b}")));
                }
                positive("lambda", *lambda)?;
                positive("beta", *beta)
            }
            HazardFamily::ParetoOne { alpha } => positive("alpha", *alpha),
            HazardFamily::MarshallOlkin { base, tilt } => {
                positive("tilt", *tilt)?;
                base.validate()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HazardFamily::Exponential { .. } => "exponential",
            HazardFamily::Weibull { .. } => "weibull",
            HazardFamily::AdditiveWeibull { .. } => "additive_weibull",
            HazardFamily::Kies { .. } => "kies",
            HazardFamily::ParetoOne { .. } => "pareto_one",
            HazardFamily::MarshallOlkin { .. } => "marshall_olkin",
        }
    }
}

/// Kies evaluations stay this far (relative to `b − a`) below `b`.
const KIES_CLAMP: f64 = 1e-12;

fn kies_clamp(a: f64, b: f64, x: f64) -> f64 {
    x.min(b - KIES_CLAMP * (b - a))
}

/// A validated parametric hazard model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HazardFamily", into = "HazardFamily")]
pub struct HazardModel {
    family: HazardFamily,
}

impl TryFrom<HazardFamily> for HazardModel {
    type Error = Error;
    fn try_from(family: HazardFamily) -> Result<Self> {
        make_hazard(family)
    }
}

impl From<HazardModel> for HazardFamily {
    fn from(m: HazardModel) -> Self {
        m.family
    }
}

/// Validates `family` and wraps it as a model.
pub fn make_hazard(family: HazardFamily) -> Result<HazardModel> {
    family.validate()?;
    Ok(HazardModel { family })
}

impl HazardModel {
    pub fn exponential(lambda: f64) -> Result<Self> {
        make_hazard(HazardFamily::Exponential { lambda })
    }
    pub fn weibull(alpha: f64, beta: f64) -> Result<Self> {
        make_hazard(HazardFamily::Weibull { alpha, beta })
    }
    pub fn additive_weibull(alpha: f64, theta: f64, beta: f64, gamma: f64) -> Result<Self> {
        make_hazard(HazardFamily::AdditiveWeibull { alpha, theta, beta, gamma })
    }
    pub fn kies(a: f64, b: f64, lambda: f64, beta: f64) -> Result<Self> {
        make_hazard(HazardFamily::Kies { a, b, lambda, beta })
    }
    pub fn pareto_one(alpha: f64) -> Result<Self> {
        make_hazard(HazardFamily::ParetoOne { alpha })
    }
    pub fn marshall_olkin(base: HazardModel, tilt: f64) -> Result<Self> {
        make_hazard(HazardFamily::MarshallOlkin { base: Box::new(base.family), tilt })
    }

    pub fn spec(&self) -> &HazardFamily {
        &self.family
    }

    /// Whether `h` is bounded at the lower end of the support.
    pub fn finite_at_origin(&self) -> bool {
        self.hazard(self.support().0).is_finite()
    }
}

fn eval_hazard(f: &HazardFamily, x: f64) -> f64 {
    match *f {
        HazardFamily::Exponential { lambda } => lambda,
        HazardFamily::Weibull { alpha, beta } => alpha * beta * x.powf(beta - 1.0),
        HazardFamily::AdditiveWeibull { alpha, theta, beta, gamma } => {
            alpha * theta * x.powf(theta - 1.0) + beta * gamma * x.powf(gamma - 1.0)
        }
        HazardFamily::Kies { a, b, lambda, beta } => {
            if x < a {
                return 0.0;
            }
            let t = kies_clamp(a, b, x);
            let r = (t - a) / (b - t);
            lambda * beta * r.powf(beta - 1.0) * (b - a) / ((b - t) * (b - t))
        }
        HazardFamily::ParetoOne { alpha } => {
            if x < alpha {
                0.0
            } else {
                alpha / x
            }
        }
        HazardFamily::MarshallOlkin { ref base, tilt } => {
            let g = (-eval_cumulative(base, x)).exp();
            eval_hazard(base, x) / (1.0 - (1.0 - tilt) * g)
        }
    }
}

fn eval_cumulative(f: &HazardFamily, x: f64) -> f64 {
    match *f {
        HazardFamily::Exponential { lambda } => lambda * x.max(0.0),
        HazardFamily::Weibull { alpha, beta } => alpha * x.max(0.0).powf(beta),
        HazardFamily::AdditiveWeibull { alpha, theta, beta, gamma } => {
            let x = x.max(0.0);
            alpha * x.powf(theta) + beta * x.powf(gamma)
        }
        HazardFamily::Kies { a, b, lambda, beta } => {
            if x <= a {
                return 0.0;
            }
            let t = kies_clamp(a, b, x);
            lambda * ((t - a) / (b - t)).powf(beta)
        }
        HazardFamily::ParetoOne { alpha } => {
            if x <= alpha {
                0.0
            } else {
                alpha * (x / alpha).ln()
            }
        }
        HazardFamily::MarshallOlkin { ref base, tilt } => {
            // −ln F̄ = H_G + ln(1 + (ᾱ/α)(1 − Ḡ))
            let hg = eval_cumulative(base, x);
            let one_minus_g = -(-hg).exp_m1();
            hg + ((1.0 - tilt) / tilt * one_minus_g).ln_1p()
        }
    }
}

fn eval_support(f: &HazardFamily) -> (f64, f64) {
    match *f {
        HazardFamily::Kies { a, b, .. } => (a, b),
        HazardFamily::ParetoOne { alpha } => (alpha, f64::INFINITY),
        HazardFamily::MarshallOlkin { ref base, .. } => eval_support(base),
        _ => (0.0, f64::INFINITY),
    }
}

fn shape_direction(shape: f64) -> Direction {
    if shape > 1.0 {
        Direction::Increasing
    } else if shape < 1.0 {
        Direction::Decreasing
    } else {
        Direction::Constant
    }
}

fn eval_direction(f: &HazardFamily) -> Direction {
    match *f {
        HazardFamily::Exponential { .. } => Direction::Constant,
        HazardFamily::Weibull { beta, .. } => shape_direction(beta),
        HazardFamily::AdditiveWeibull { theta, gamma, .. } => {
            let (d1, d2) = (shape_direction(theta), shape_direction(gamma));
            match (d1, d2) {
                (Direction::Constant, d) | (d, Direction::Constant) => d,
                (a, b) if a == b => a,
                _ => Direction::Unknown,
            }
        }
        HazardFamily::Kies { beta, .. } => {
            if beta >= 1.0 {
                Direction::Increasing
            } else {
                Direction::Unknown
            }
        }
        HazardFamily::ParetoOne { .. } => Direction::Decreasing,
        HazardFamily::MarshallOlkin { ref base, tilt } => {
            let base_dir = eval_direction(base);
            if tilt == 1.0 {
                return base_dir;
            }
            // 1/(1 − ᾱḠ) decreases for α < 1 and increases for α > 1
            let factor = if tilt < 1.0 { Direction::Decreasing } else { Direction::Increasing };
            match base_dir {
                Direction::Constant => factor,
                d if d == factor => d,
                _ => Direction::Unknown,
            }
        }
    }
}

impl Hazard for HazardModel {
    fn hazard(&self, x: f64) -> f64 {
        eval_hazard(&self.family, x)
    }

    fn support(&self) -> (f64, f64) {
        eval_support(&self.family)
    }

    fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        Ok(eval_cumulative(&self.family, x))
    }

    fn direction(&self) -> Direction {
        eval_direction(&self.family)
    }

    fn family(&self) -> Option<&HazardFamily> {
        Some(&self.family)
    }
}

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A hazard given by closures; the cumulative hazard is integrated
/// numerically unless supplied.
#[derive(Clone)]
pub struct CustomHazard {
    name: String,
    h: Func,
    cumulative: Option<Func>,
    support: (f64, f64),
    direction: Direction,
}

impl fmt::Debug for CustomHazard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomHazard")
            .field("name", &self.name)
            .field("support", &self.support)
            .field("direction", &self.direction)
            .finish_non_exhaustive()
    }
}

impl CustomHazard {
    pub fn new(name: impl Into<String>, h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            h: Arc::new(h),
            cumulative: None,
            support: (0.0, f64::INFINITY),
            direction: Direction::Unknown,
        }
    }

    pub fn with_cumulative(mut self, c: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.cumulative = Some(Arc::new(c));
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = (lo, hi);
        self
    }

    pub fn with_direction(mut self, d: Direction) -> Self {
        self.direction = d;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl Hazard for CustomHazard {
    fn hazard(&self, x: f64) -> f64 {
        (self.h)(x)
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        match &self.cumulative {
            Some(c) => Ok(c(x)),
            None => {
                let (lo, _) = self.support;
                if x <= lo {
                    return Ok(0.0);
                }
                Ok(integrate(|u| (self.h)(u), lo, x, &QuadratureConfig::default())?.value)
            }
        }
    }

    fn direction(&self) -> Direction {
        self.direction
    }
}

/// Smallest `x` in the support with cumulative hazard `H(x) ≥ target`,
/// located by bracketing and bisection to relative width 1e−12.
pub fn invert_cumulative_hazard(m: &dyn Hazard, target: f64) -> Result<f64> {
    let (lo, hi) = m.support();
    if !(target >= 0.0) {
        return Err(Error::invalid("target", "cumulative hazard target must be non-negative"));
    }
    if target == 0.0 {
        return Ok(lo);
    }
    let mut left = lo;
    let mut right;
    if hi.is_finite() {
        right = hi;
    } else {
        let mut step = 1.0f64.max(lo.abs());
        right = lo + step;
        let mut tries = 0;
        while m.cumulative_hazard(right)? < target {
            left = right;
            step *= 2.0;
            right = lo + step;
            tries += 1;
            if tries > 1100 || !right.is_finite() {
                return Err(Error::Defective(format!(
                    "cumulative hazard stays below {target} on the whole support"
                )));
            }
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (left + right);
        if mid <= left || mid >= right || right - left <= 1e-12 * right.abs().max(1e-300) {
            break;
        }
        if m.cumulative_hazard(mid)? < target {
            left = mid;
        } else {
            right = mid;
        }
    }
    Ok(0.5 * (left + right))
}

/// Abscissa where the survival function equals `s` (0 < s ≤ 1).
pub fn survival_quantile(m: &dyn Hazard, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::invalid("survival", format!("must lie in (0, 1], got {s}")));
    }
    invert_cumulative_hazard(m, -s.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_spot_values() {
        assert_eq!(HazardModel::exponential(0.5).unwrap().hazard(3.0), 0.5);
        assert_eq!(HazardModel::weibull(1.0, 2.0).unwrap().hazard(2.0), 4.0);
        let kies = HazardModel::kies(0.0, 1.0, 1.0, 2.0).unwrap();
        assert!((kies.survival(0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((kies.survival(0.5).unwrap() - 0.367_879_4).abs() < 1e-7);
    }

    #[test]
    fn validation_names_the_parameter() {
        match HazardModel::weibull(1.0, -2.0) {
            Err(Error::Validation { name, .. }) => assert_eq!(name, "beta"),
            other => panic!("{other:?}"),
        }
        assert!(HazardModel::kies(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(HazardModel::kies(-1.0, 1.0, 1.0, 1.0).is_err());
        assert!(HazardModel::exponential(f64::NAN).is_err());
        assert!(HazardModel::pareto_one(0.0).is_err());
        let bad_base = HazardFamily::MarshallOlkin { base: Box::new(HazardFamily::Exponential { lambda: -1.0 }), tilt: 2.0 };
        assert!(make_hazard(bad_base).is_err());
    }

    #[test]
    fn weibull_cumulative_matches_quadrature() {
        for beta in [0.5, 1.0, 2.0, 3.0] {
            let m = HazardModel::weibull(1.3, beta).unwrap();
            for x in [0.1, 1.0, 2.5] {
                let q = integrate(|u| m.hazard(u), 0.0, x, &QuadratureConfig::default()).unwrap().value;
                let c = m.cumulative_hazard(x).unwrap();
                assert!((q - c).abs() <= 1e-10 * c, "beta {beta} x {x}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn cumulative_matches_quadrature_for_every_family() {
        let models = [
            HazardModel::additive_weibull(0.5, 0.5, 0.2, 3.0).unwrap(),
            HazardModel::kies(0.5, 3.0, 0.7, 1.5).unwrap(),
            HazardModel::pareto_one(2.0).unwrap(),
            HazardModel::marshall_olkin(HazardModel::weibull(1.0, 2.0).unwrap(), 0.3).unwrap(),
            HazardModel::marshall_olkin(HazardModel::exponential(1.5).unwrap(), 4.0).unwrap(),
        ];
        for m in &models {
            let (lo, _) = m.support();
            for x in [lo + 0.3, lo + 1.1, lo + 2.0] {
                let q = integrate(|u| m.hazard(u), lo, x, &QuadratureConfig::default()).unwrap().value;
                let c = m.cumulative_hazard(x).unwrap();
                assert!((q - c).abs() <= 1e-9 * (1.0 + c), "{m:?} x {x}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn density_is_hazard_times_survival() {
        let m = HazardModel::additive_weibull(1.0, 0.5, 1.0, 2.0).unwrap();
        for x in [0.2, 0.7, 1.9] {
            let f = m.density(x).unwrap();
            assert!((f - m.hazard(x) * m.survival(x).unwrap()).abs() <= 1e-10 * f);
        }
        assert_eq!(m.survival(0.0).unwrap(), 1.0);
    }

    #[test]
    fn marshall_olkin_neutral_tilt() {
        let base = HazardModel::weibull(0.8, 1.7).unwrap();
        let mo = HazardModel::marshall_olkin(base.clone(), 1.0).unwrap();
        for x in [0.1, 0.5, 1.0, 3.0] {
            assert!((mo.hazard(x) - base.hazard(x)).abs() <= 1e-12 * base.hazard(x));
        }
        assert_eq!(mo.direction(), Direction::Increasing);
    }

    #[test]
    fn pareto_and_kies_supports() {
        let p = HazardModel::pareto_one(2.0).unwrap();
        assert_eq!(p.support(), (2.0, f64::INFINITY));
        assert_eq!(p.hazard(1.0), 0.0);
        assert!((p.survival(4.0).unwrap() - 0.25).abs() < 1e-15);
        let k = HazardModel::kies(1.0, 2.0, 1.0, 0.5).unwrap();
        assert!(k.hazard(2.0).is_finite());
        assert!(k.survival(2.0).unwrap() < 1e-100);
    }

    #[test]
    fn inversion_round_trip() {
        let m = HazardModel::weibull(1.0, 2.0).unwrap();
        let x = survival_quantile(&m, (-1.0f64).exp()).unwrap();
        assert!((x - 1.0).abs() < 1e-11);
        let k = HazardModel::kies(0.0, 1.0, 1.0, 2.0).unwrap();
        let x = survival_quantile(&k, (-1.0f64).exp()).unwrap();
        assert!((x - 0.5).abs() < 1e-11);
        let defective = CustomHazard::new("bounded", |u: f64| (-u).exp()).with_cumulative(|u: f64| 1.0 - (-u).exp());
        assert!(matches!(survival_quantile(&defective, 0.1), Err(Error::Defective(_))));
    }

    #[test]
    fn json_schema() {
        let m: HazardModel = serde_json::from_str(r#"{"family":"weibull","alpha":1,"beta":2}"#).unwrap();
        assert_eq!(m.spec(), &HazardFamily::Weibull { alpha: 1.0, beta: 2.0 });
        let mo: HazardModel = serde_json::from_str(
            r#"{"family":"marshall_olkin","base":{"family":"exponential","lambda":1},"tilt":0.5}"#,
        )
        .unwrap();
        assert_eq!(mo.direction(), Direction::Decreasing);
        assert!(serde_json::from_str::<HazardModel>(r#"{"family":"weibull","alpha":1,"beta":-2}"#).is_err());
        let back = serde_json::to_string(&m).unwrap();
        assert_eq!(back, r#"{"family":"weibull","alpha":1.0,"beta":2.0}"#);
    }

    #[test]
    fn custom_hazard_integrates() {
        let c = CustomHazard::new("linear", |u| 2.0 * u);
        assert!((c.cumulative_hazard(3.0).unwrap() - 9.0).abs() < 1e-12);
    }
}
