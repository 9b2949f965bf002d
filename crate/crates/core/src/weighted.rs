//! Weighted arithmetic, geometric and harmonic mean failure rates and the
//! weighted lifetime they induce.
//!
//! For a hazard `h` and weight `w`, with `W(x) = ∫₀ˣ w`,
//!
//! ```text
//! A^w(x) = ∫₀ˣ w·h / W(x)
//! G^w(x) = exp(∫₀ˣ w·ln h / W(x))
//! H^w(x) = W(x) / ∫₀ˣ w/h
//! ```
//!
//! and the weighted variable has hazard `h^w = w·h`, cumulative hazard
//! `K(x) = ∫₀ˣ w·h` and survival `F̄^w = e^{−K}`. A constant weight gives the
//! plain means A, G and H.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::models::{
    default_scan_interval, invert_cumulative_hazard, Direction, Hazard, HazardFamily, ModelSpec, WeightFamily, WeightFunction,
    SCAN_MASS,
};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special;

/// A mean that is either finite or undefined because its defining integral diverges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanValue {
    Finite(f64),
    Divergent,
}

impl MeanValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MeanValue::Finite(v) => Some(v),
            MeanValue::Divergent => None,
        }
    }

    /// Divergent means read as 0, their infimum.
    pub fn or_zero(self) -> f64 {
        self.value().unwrap_or(0.0)
    }

    pub fn is_divergent(self) -> bool {
        self == MeanValue::Divergent
    }
}

impl fmt::Display for MeanValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanValue::Finite(v) => write!(f, "{v}"),
            MeanValue::Divergent => f.write_str("div"),
        }
    }
}

impl Serialize for MeanValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MeanValue::Finite(v) => s.serialize_f64(*v),
            MeanValue::Divergent => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("divergent", &true)?;
                map.end()
            }
        }
    }
}

/// `(A^w, G^w, H^w)` at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanTriple {
    pub x: f64,
    pub afr: MeanValue,
    pub gfr: MeanValue,
    pub hfr: MeanValue,
}

impl MeanTriple {
    /// Largest relative violation of `A ≥ G ≥ H` over the finite, positive members.
    pub fn chain_violation(&self) -> f64 {
        let vals = [self.afr.value(), self.gfr.value(), self.hfr.value()];
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            if let (Some(hi), Some(lo)) = (vals[i], vals[i + 1]) {
                if hi > 0.0 && lo > 0.0 {
                    worst = worst.max((lo - hi) / hi);
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Integral {
    /// ∫ w
    Weight,
    /// ∫ w·h
    Hazard,
    /// ∫ w·ln h
    LogHazard,
    /// ∫ w/h
    InverseHazard,
}

/// A hazard paired with a weight.
#[derive(Debug, Clone)]
pub struct WeightedModel {
    hazard: Arc<dyn Hazard>,
    weight: WeightFunction,
    quad: QuadratureConfig,
    closed_forms: bool,
}

impl WeightedModel {
    pub fn new(hazard: impl Hazard + 'static, weight: WeightFunction) -> Self {
        Self::from_arc(Arc::new(hazard), weight)
    }

    pub fn from_arc(hazard: Arc<dyn Hazard>, weight: WeightFunction) -> Self {
        Self { hazard, weight, quad: QuadratureConfig::default(), closed_forms: true }
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self::new(spec.hazard.clone(), spec.weight.clone())
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.quad = cfg;
        self
    }

    /// Disabling closed forms forces every integral through quadrature.
    pub fn with_closed_forms(mut self, enabled: bool) -> Self {
        self.closed_forms = enabled;
        self
    }

    /// The same hazard under constant weight.
    pub fn unweighted(&self) -> Self {
        Self { weight: WeightFunction::constant(), ..self.clone() }
    }

    /// The same hazard under another weight.
    pub fn reweighted(&self, weight: WeightFunction) -> Self {
        Self { weight, ..self.clone() }
    }

    pub fn base(&self) -> &Arc<dyn Hazard> {
        &self.hazard
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quad
    }

    pub fn uses_closed_forms(&self) -> bool {
        self.closed_forms
    }

    fn lower(&self) -> f64 {
        self.hazard.support().0.max(0.0)
    }

    /// Closed form of one of the four integrals over `[0, x]`, when the
    /// (hazard, weight) pair has one.
    fn closed(&self, kind: Integral, x: f64) -> Option<Result<f64>> {
        if !self.closed_forms {
            return None;
        }
        if kind == Integral::Weight {
            return self.weight.closed_cumulative(x).map(Ok);
        }
        let family = self.hazard.family()?;
        let c = match self.weight.spec() {
            WeightFamily::Constant => Some(0.0),
            WeightFamily::Power { c } => Some(*c),
            WeightFamily::Exponential { n } if *n == 0.0 => Some(0.0),
            WeightFamily::Exponential { .. } => None,
            _ => return None,
        };
        let w = self.weight.closed_cumulative(x)?;
        match (family, c) {
            (HazardFamily::Exponential { lambda }, _) => Some(Ok(match kind {
                Integral::Hazard => lambda * w,
                Integral::LogHazard => lambda.ln() * w,
                Integral::InverseHazard => w / lambda,
                Integral::Weight => unreachable!(),
            })),
            (HazardFamily::Weibull { alpha, beta }, Some(c)) => Some(weibull_power(kind, *alpha, *beta, c, x)),
            (HazardFamily::Weibull { alpha, beta }, None) => match self.weight.spec() {
                WeightFamily::Exponential { n } if *n < 0.0 => Some(weibull_exponential(kind, *alpha, *beta, *n, x, w)),
                _ => None,
            },
            _ => None,
        }
    }

    fn integrand(&self, kind: Integral) -> impl Fn(f64) -> f64 + '_ {
        move |u| {
            let w = self.weight.eval(u);
            match kind {
                Integral::Weight => w,
                Integral::Hazard => w * self.hazard.hazard(u),
                Integral::LogHazard => w * self.hazard.hazard(u).ln(),
                Integral::InverseHazard => w / self.hazard.hazard(u),
            }
        }
    }

    /// Cumulative values of one integral at every grid point, sharing panels.
    fn sweep(&self, kind: Integral, grid: &[f64]) -> Vec<Result<f64>> {
        if let Some(first) = grid.first() {
            if self.closed(kind, *first).is_some() {
                return grid.iter().map(|&x| self.closed(kind, x).expect("same family")).collect();
            }
        }
        let lo = self.lower();
        let start = match kind {
            Integral::Weight => 0.0,
            Integral::Hazard => lo,
            Integral::LogHazard | Integral::InverseHazard => {
                if lo > 0.0 {
                    // h vanishes on [0, lo)
                    let err = |x: f64| match kind {
                        Integral::LogHazard => Error::Divergent { a: 0.0, b: x },
                        _ => Error::DegenerateHazard { x: lo },
                    };
                    return grid.iter().map(|&x| if x > 0.0 { Err(err(x)) } else { Ok(0.0) }).collect();
                }
                0.0
            }
        };
        let f = self.integrand(kind);
        let mut out = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        let mut prev = start;
        let mut failed: Option<Error> = None;
        for (index, &x) in grid.iter().enumerate() {
            if let Some(e) = &failed {
                out.push(Err(e.clone()));
                continue;
            }
            if x > prev {
                match integrate(&f, prev, x, &self.quad) {
                    Ok(est) => {
                        acc += est.value;
                        prev = x;
                    }
                    Err(e) => {
                        let e = if index == 0 { e } else { Error::Panel { index, end: x, source: Box::new(e) } };
                        failed = Some(e.clone());
                        out.push(Err(e));
                        continue;
                    }
                }
            }
            out.push(Ok(acc));
        }
        out
    }

    fn single(&self, kind: Integral, x: f64) -> Result<f64> {
        self.sweep(kind, &[x]).pop().expect("one point")
    }

    fn check_x(x: f64) -> Result<()> {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("x", format!("must be positive and finite, got {x}")))
        }
    }

    /// `W(x) = ∫₀ˣ w`.
    pub fn cumulative_weight(&self, x: f64) -> Result<f64> {
        self.single(Integral::Weight, x)
    }

    /// `K(x) = ∫₀ˣ w·h`, the cumulative hazard of the weighted variable.
    pub fn weighted_cumulative_hazard(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        self.single(Integral::Hazard, x)
    }

    /// `∫₀ˣ w·ln h`; a divergent integral is reported as [`Error::Divergent`].
    pub fn log_hazard_integral(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        self.single(Integral::LogHazard, x)
    }

    /// `∫₀ˣ w/h`; a divergent integral is reported as [`Error::Divergent`].
    pub fn inverse_hazard_integral(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        self.single(Integral::InverseHazard, x)
    }

    /// Default scan interval: where 99.8% of the weighted variable's mass
    /// lies. For a defective weighted variable the levels are taken within
    /// its finite mass `1 − F̄^w(∞)`.
    pub fn scan_interval(&self) -> Result<(f64, f64)> {
        let base = default_scan_interval(self.hazard.as_ref())?;
        if self.weight.is_constant() {
            return Ok(base);
        }
        let report = self.check_validity_postulates(base.1)?;
        let (lo_mass, hi_mass) = SCAN_MASS;
        let targets = if report.defective {
            let k_inf = report.tail_evidence.last().expect("seven probes").1;
            let finite_mass = -(-k_inf).exp_m1();
            [-(-lo_mass * finite_mass).ln_1p(), -(-hi_mass * finite_mass).ln_1p()]
        } else {
            [-(-lo_mass).ln_1p(), -(-hi_mass).ln_1p()]
        };
        let lo = invert_cumulative_hazard(self, targets[0])?;
        let hi = invert_cumulative_hazard(self, targets[1])?;
        Ok((lo, hi))
    }

    /// `K` at every point of an ascending grid, sharing quadrature panels.
    pub fn cumulative_hazard_grid(&self, grid: &[f64]) -> Vec<Result<f64>> {
        self.sweep(Integral::Hazard, grid)
    }

    /// Weighted arithmetic mean failure rate `A^w(x)`.
    pub fn wafr(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        let w = self.positive_weight(x)?;
        Ok(self.single(Integral::Hazard, x)? / w)
    }

    /// Weighted geometric mean failure rate `G^w(x)`.
    pub fn wgfr(&self, x: f64) -> Result<MeanValue> {
        Self::check_x(x)?;
        let w = self.positive_weight(x)?;
        geometric(self.single(Integral::LogHazard, x), w)
    }

    /// Weighted harmonic mean failure rate `H^w(x)`.
    pub fn whfr(&self, x: f64) -> Result<MeanValue> {
        Self::check_x(x)?;
        let w = self.positive_weight(x)?;
        harmonic(self.single(Integral::InverseHazard, x), w)
    }

    pub fn mean_triple(&self, x: f64) -> Result<MeanTriple> {
        self.mean_triple_grid(&[x])?.pop().expect("one point")
    }

    /// Triples on an ascending positive grid; each integral is accumulated
    /// panel by panel, and a failing point does not stop the others.
    pub fn mean_triple_grid(&self, grid: &[f64]) -> Result<Vec<Result<MeanTriple>>> {
        if grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::invalid("grid", "points must be positive and finite"));
        }
        if grid.windows(2).any(|p| !(p[0] <= p[1])) {
            return Err(Error::invalid("grid", "must be ascending"));
        }
        let ws = self.sweep(Integral::Weight, grid);
        let ks = self.sweep(Integral::Hazard, grid);
        let ls = self.sweep(Integral::LogHazard, grid);
        let ms = self.sweep(Integral::InverseHazard, grid);
        let triples = grid
            .iter()
            .zip(ws)
            .zip(ks)
            .zip(ls)
            .zip(ms)
            .map(|((((&x, w), k), l), m)| {
                let w = w?;
                if !(w > 0.0) {
                    return Err(Error::DegenerateWeight { x });
                }
                Ok(MeanTriple { x, afr: MeanValue::Finite(k? / w), gfr: geometric(l, w)?, hfr: harmonic(m, w)? })
            })
            .collect();
        Ok(triples)
    }

    fn positive_weight(&self, x: f64) -> Result<f64> {
        let w = self.single(Integral::Weight, x)?;
        if w > 0.0 {
            Ok(w)
        } else {
            Err(Error::DegenerateWeight { x })
        }
    }

    /// `h^w(x) = w(x)·h(x)`.
    pub fn weighted_hazard(&self, x: f64) -> f64 {
        let w = self.weight.eval(x);
        if w == 0.0 {
            0.0
        } else {
            w * self.hazard.hazard(x)
        }
    }

    /// `F̄^w(x) = e^{−K(x)}`.
    pub fn weighted_survival(&self, x: f64) -> Result<f64> {
        Ok((-self.weighted_cumulative_hazard(x)?).exp())
    }

    /// `f^w(x) = h^w(x)·F̄^w(x)`.
    pub fn weighted_density(&self, x: f64) -> Result<f64> {
        let hw = self.weighted_hazard(x);
        if hw == 0.0 {
            return Ok(0.0);
        }
        Ok(hw * self.weighted_survival(x)?)
    }

    /// Evidence on the four conditions under which `e^{−K}` is a survival function.
    pub fn check_validity_postulates(&self, horizon: f64) -> Result<PostulateReport> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::invalid("horizon", "must be positive and finite"));
        }
        let lo = self.lower();
        let n = 200;
        let grid: Vec<f64> = (1..=n).map(|i| lo + (horizon - lo).max(0.0) * i as f64 / n as f64).collect();
        let nonnegative = grid.iter().all(|&x| {
            let v = self.weighted_hazard(x);
            v >= 0.0 || v.is_nan() && self.weight.eval(x) == 0.0
        });
        let finite_cumulative = self.sweep(Integral::Hazard, &grid).iter().all(|k| matches!(k, Ok(v) if v.is_finite()));

        let probes: Vec<f64> = (0..=6).map(|k| horizon * 2f64.powi(k)).collect();
        let ks = self.sweep(Integral::Hazard, &probes);
        let mut tail_evidence = Vec::with_capacity(probes.len());
        for (x, k) in probes.iter().zip(ks) {
            tail_evidence.push((*x, k?));
        }
        let increasing = tail_evidence.windows(2).all(|p| p[1].1 >= p[0].1);
        let last = tail_evidence[6].1 - tail_evidence[5].1;
        let tail = if increasing && last > self.quad.abs_tol.max(1e-9 * tail_evidence[6].1.abs()) {
            TailBehavior::LikelyDivergent
        } else {
            TailBehavior::LikelyConvergent
        };
        Ok(PostulateReport {
            horizon,
            nonnegative,
            finite_cumulative,
            tail,
            tail_evidence,
            infinite_hazard_propagation: "not_checkable",
            defective: tail == TailBehavior::LikelyConvergent,
        })
    }
}

fn geometric(log_integral: Result<f64>, w: f64) -> Result<MeanValue> {
    match log_integral {
        Ok(l) => {
            let v = (l / w).exp();
            if v.is_finite() {
                Ok(MeanValue::Finite(v))
            } else {
                Ok(MeanValue::Divergent)
            }
        }
        Err(e) if e.is_divergent() => Ok(MeanValue::Divergent),
        Err(e) => Err(e),
    }
}

fn harmonic(inverse_integral: Result<f64>, w: f64) -> Result<MeanValue> {
    match inverse_integral {
        Ok(m) if m.is_finite() && m > 0.0 => Ok(MeanValue::Finite(w / m)),
        Ok(_) => Ok(MeanValue::Divergent),
        Err(e) if e.is_divergent() => Ok(MeanValue::Divergent),
        Err(e) => Err(e),
    }
}

/// `∫₀ˣ u^c·{h, ln h, 1/h}` for `h = αβu^{β−1}`.
fn weibull_power(kind: Integral, alpha: f64, beta: f64, c: f64, x: f64) -> Result<f64> {
    let ab = alpha * beta;
    let c1 = c + 1.0;
    match kind {
        Integral::Weight => Ok(x.powf(c1) / c1),
        Integral::Hazard => {
            let p = beta + c;
            if p > 0.0 {
                Ok(ab * x.powf(p) / p)
            } else {
                Err(Error::Divergent { a: 0.0, b: x })
            }
        }
        Integral::LogHazard => {
            let xc = x.powf(c1);
            Ok(ab.ln() * xc / c1 + (beta - 1.0) * (xc * x.ln() / c1 - xc / (c1 * c1)))
        }
        Integral::InverseHazard => {
            let p = c + 2.0 - beta;
            if p > 0.0 {
                Ok(x.powf(p) / (ab * p))
            } else {
                Err(Error::Divergent { a: 0.0, b: x })
            }
        }
    }
}

/// `∫₀ˣ e^{nu}·{h, ln h, 1/h}` for `h = αβu^{β−1}`, `n < 0`, with `w = W(x)`.
fn weibull_exponential(kind: Integral, alpha: f64, beta: f64, n: f64, x: f64, w: f64) -> Result<f64> {
    let ab = alpha * beta;
    let m = -n;
    match kind {
        Integral::Weight => Ok(w),
        Integral::Hazard => Ok(ab * m.powf(-beta) * special::lower_incomplete_gamma(beta, m * x)?),
        Integral::LogHazard => {
            // ∫₀ˣ e^{nu} ln u du = W(x) ln x + Ein(mx)/n
            Ok(ab.ln() * w + (beta - 1.0) * (w * x.ln() + special::ein(m * x)? / n))
        }
        Integral::InverseHazard => {
            if beta < 2.0 {
                Ok(m.powf(beta - 2.0) * special::lower_incomplete_gamma(2.0 - beta, m * x)? / ab)
            } else {
                Err(Error::Divergent { a: 0.0, b: x })
            }
        }
    }
}

impl Hazard for WeightedModel {
    fn hazard(&self, x: f64) -> f64 {
        self.weighted_hazard(x)
    }

    fn support(&self) -> (f64, f64) {
        self.hazard.support()
    }

    fn cumulative_hazard(&self, x: f64) -> Result<f64> {
        self.weighted_cumulative_hazard(x)
    }

    fn direction(&self) -> Direction {
        use Direction::*;
        match (self.hazard.direction(), self.weight.direction()) {
            (Constant, d) | (d, Constant) => d,
            (a, b) if a == b && a != Unknown => a,
            _ => Unknown,
        }
    }
}

/// How the cumulative hazard behaves over the probed horizons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBehavior {
    LikelyDivergent,
    LikelyConvergent,
}

/// Evidence for the survival-validity conditions of `e^{−K}`:
/// (i) `h^w ≥ 0`, (ii) `K` finite up to the horizon, (iii) `K → ∞`,
/// (iv) infinite hazard carried to `K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostulateReport {
    pub horizon: f64,
    pub nonnegative: bool,
    pub finite_cumulative: bool,
    pub tail: TailBehavior,
    /// `(2^k·horizon, K(2^k·horizon))` for k = 0..6.
    pub tail_evidence: Vec<(f64, f64)>,
    pub infinite_hazard_propagation: &'static str,
    /// True when the weighted variable has positive mass at infinity.
    pub defective: bool,
}

/// Closed forms for a Weibull hazard `αβx^{β−1}` under the weight `e^{nx}`, `n < 0`,
/// written with incomplete gamma functions, `E₁` and Euler's constant.
pub mod weibull_exponential_weight {
    use super::MeanValue;
    use crate::error::{Error, Result};
    use crate::special::{exponential_integral_e1, gamma, lower_incomplete_gamma, upper_incomplete_gamma, EULER_GAMMA};

    fn check(alpha: f64, beta: f64, n: f64, x: f64) -> Result<f64> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::invalid("alpha/beta", "must be positive"));
        }
        if !(n < 0.0) {
            return Err(Error::invalid("n", format!("must be negative, got {n}")));
        }
        if !(x > 0.0) {
            return Err(Error::invalid("x", "must be positive"));
        }
        Ok(-n)
    }

    /// `F̄^w(x) = exp{−αβ m^{−β}(Γ(β) − Γ(β, mx))}`, `m = −n`.
    pub fn survival(alpha: f64, beta: f64, n: f64, x: f64) -> Result<f64> {
        let m = check(alpha, beta, n, x)?;
        let k = alpha * beta * m.powf(-beta) * (gamma(beta) - upper_incomplete_gamma(beta, m * x)?);
        Ok((-k).exp())
    }

    /// `F̄^w(∞) = exp(−αβ m^{−β} Γ(β)) > 0`: the weighted variable is defective.
    pub fn survival_at_infinity(alpha: f64, beta: f64, n: f64) -> Result<f64> {
        let m = check(alpha, beta, n, 1.0)?;
        Ok((-alpha * beta * m.powf(-beta) * gamma(beta)).exp())
    }

    /// `A^w(x) = αβ m^{−β} γ(β, mx)·n/(e^{nx} − 1)`.
    pub fn afr(alpha: f64, beta: f64, n: f64, x: f64) -> Result<f64> {
        let m = check(alpha, beta, n, x)?;
        Ok(alpha * beta * m.powf(-beta) * lower_incomplete_gamma(beta, m * x)? * n / (n * x).exp_m1())
    }

    /// `G^w(x) = αβ x^{β−1} (mx)^{(β−1)/(e^{nx}−1)} e^{(β−1)(E₁(mx)+γ)/(e^{nx}−1)}`.
    pub fn gfr(alpha: f64, beta: f64, n: f64, x: f64) -> Result<f64> {
        let m = check(alpha, beta, n, x)?;
        let d = (n * x).exp_m1();
        let e1 = exponential_integral_e1(m * x)?;
        let log_g = (alpha * beta).ln()
            + (beta - 1.0) * x.ln()
            + (beta - 1.0) / d * (m * x).ln()
            + (beta - 1.0) * (e1 + EULER_GAMMA) / d;
        Ok(log_g.exp())
    }

    /// `H^w(x) = αβ (e^{nx} − 1)/n · m^{2−β}/γ(2−β, mx)` for `β < 2`; divergent otherwise.
    pub fn hfr(alpha: f64, beta: f64, n: f64, x: f64) -> Result<MeanValue> {
        let m = check(alpha, beta, n, x)?;
        if beta >= 2.0 {
            return Ok(MeanValue::Divergent);
        }
        let g = lower_incomplete_gamma(2.0 - beta, m * x)?;
        Ok(MeanValue::Finite(alpha * beta * (n * x).exp_m1() / n * m.powf(2.0 - beta) / g))
    }

    /// Peak `(β−1)/m` of the upside-down bathtub weighted hazard, for `β > 1`.
    pub fn hazard_peak(beta: f64, n: f64) -> Option<f64> {
        (beta > 1.0 && n < 0.0).then(|| (beta - 1.0) / -n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HazardModel;
    use proptest::prelude::*;

    fn weibull(alpha: f64, beta: f64) -> HazardModel {
        HazardModel::weibull(alpha, beta).unwrap()
    }

    fn both_routes(m: &WeightedModel) -> [WeightedModel; 2] {
        [m.clone(), m.clone().with_closed_forms(false)]
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn exponential_means_are_lambda() {
        let e = HazardModel::exponential(0.5).unwrap();
        for w in [WeightFunction::constant(), WeightFunction::power(2.0).unwrap(), WeightFunction::exponential(-1.0).unwrap()] {
            for m in both_routes(&WeightedModel::new(e.clone(), w)) {
                assert!(close(m.wafr(3.0).unwrap(), 0.5, 1e-10));
                assert!(close(m.wgfr(1.0).unwrap().value().unwrap(), 0.5, 1e-10));
                assert!(close(m.whfr(2.0).unwrap().value().unwrap(), 0.5, 1e-10));
            }
        }
    }

    #[test]
    fn weibull_spot_values() {
        for m in both_routes(&WeightedModel::new(weibull(1.0, 2.0), WeightFunction::constant())) {
            assert!(close(m.wafr(2.0).unwrap(), 2.0, 1e-10));
        }
        for m in both_routes(&WeightedModel::new(weibull(1.0, 2.0), WeightFunction::power(1.0).unwrap())) {
            assert!(close(m.wafr(2.0).unwrap(), 8.0 / 3.0, 1e-10));
        }
        for m in both_routes(&WeightedModel::new(weibull(1.0, 1.5), WeightFunction::constant())) {
            let g = m.wgfr(4.0).unwrap().value().unwrap();
            assert!(close(g, 3.0 * (-0.5f64).exp(), 1e-9), "{g}");
            assert!((g - 1.8196).abs() < 1e-4);
            assert!(close(m.whfr(4.0).unwrap().value().unwrap(), 1.5, 1e-9));
        }
    }

    #[test]
    fn harmonic_divergence_is_flagged() {
        for m in both_routes(&WeightedModel::new(weibull(1.0, 2.0), WeightFunction::constant())) {
            assert_eq!(m.whfr(1.0).unwrap(), MeanValue::Divergent);
            assert_eq!(m.whfr(1.0).unwrap().or_zero(), 0.0);
        }
    }

    #[test]
    fn triple_grid() {
        let m = WeightedModel::new(HazardModel::exponential(1.0).unwrap(), WeightFunction::power(2.0).unwrap());
        for t in m.with_closed_forms(false).mean_triple_grid(&[1.0, 2.0, 3.0]).unwrap() {
            let t = t.unwrap();
            for v in [t.afr, t.gfr, t.hfr] {
                assert!(close(v.value().unwrap(), 1.0, 1e-10));
            }
        }
        for m in both_routes(&WeightedModel::new(weibull(1.0, 1.5), WeightFunction::constant())) {
            let t = m.mean_triple(4.0).unwrap();
            assert!(close(t.afr.value().unwrap(), 2.0, 1e-10));
            assert!(close(t.hfr.value().unwrap(), 1.5, 1e-9));
        }
        for m in both_routes(&WeightedModel::new(weibull(1.0, 2.0), WeightFunction::constant())) {
            let t = m.mean_triple(4.0).unwrap();
            assert!(close(t.afr.value().unwrap(), 4.0, 1e-10));
            assert!(close(t.gfr.value().unwrap(), 8.0 / std::f64::consts::E, 1e-9));
            assert!((t.gfr.value().unwrap() - 2.943_035_5).abs() < 1e-7);
            assert!(t.hfr.is_divergent());
        }
        let m = WeightedModel::new(weibull(1.0, 2.0), WeightFunction::constant());
        assert!(m.mean_triple_grid(&[2.0, 1.0]).is_err());
        assert!(m.mean_triple_grid(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn weighted_survival_values() {
        let m = WeightedModel::new(weibull(1.0, 2.0), WeightFunction::exponential(-1.0).unwrap());
        let oracle = (-2.0 * (1.0 - 2.0 * (-1.0f64).exp())).exp();
        for r in both_routes(&m) {
            assert!(close(r.weighted_survival(1.0).unwrap(), oracle, 1e-10));
            assert_eq!(r.weighted_survival(0.0).unwrap(), 1.0);
        }
        assert!(close(weibull_exponential_weight::survival(1.0, 2.0, -1.0, 1.0).unwrap(), oracle, 1e-12));
        let e = WeightedModel::new(HazardModel::exponential(1.0).unwrap(), WeightFunction::constant());
        assert!(close(e.weighted_survival(2f64.ln()).unwrap(), 0.5, 1e-14));
        let x = 0.8;
        assert!(close(m.weighted_density(x).unwrap(), m.weighted_hazard(x) * m.weighted_survival(x).unwrap(), 1e-15));
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        for beta in [0.5, 2.0, 3.0] {
            let m = WeightedModel::new(weibull(1.0, beta), WeightFunction::exponential(-1.0).unwrap()).with_closed_forms(false);
            for x in [0.1, 1.0, 2.7, 5.0] {
                let s = weibull_exponential_weight::survival(1.0, beta, -1.0, x).unwrap();
                assert!(close(m.weighted_survival(x).unwrap(), s, 1e-9));
                let a = weibull_exponential_weight::afr(1.0, beta, -1.0, x).unwrap();
                assert!(close(m.wafr(x).unwrap(), a, 1e-9));
                let g = weibull_exponential_weight::gfr(1.0, beta, -1.0, x).unwrap();
                assert!(close(m.wgfr(x).unwrap().value().unwrap(), g, 1e-8), "beta {beta} x {x}");
                let h = weibull_exponential_weight::hfr(1.0, beta, -1.0, x).unwrap();
                assert_eq!(m.whfr(x).unwrap().is_divergent(), h.is_divergent());
                if let (Some(q), Some(c)) = (m.whfr(x).unwrap().value(), h.value()) {
                    assert!(close(q, c, 1e-8));
                }
            }
        }
    }

    #[test]
    fn fast_path_matches_quadrature_for_power_weights() {
        for (beta, c) in [(0.5, 0.0), (1.5, 1.0), (3.0, 2.0), (0.7, -0.5)] {
            let m = WeightedModel::new(weibull(1.3, beta), WeightFunction::power(c).unwrap());
            let q = m.clone().with_closed_forms(false);
            for x in [0.3, 2.0] {
                let (a, b) = (m.mean_triple(x).unwrap(), q.mean_triple(x).unwrap());
                assert!(close(a.afr.value().unwrap(), b.afr.value().unwrap(), 1e-9));
                assert!(close(a.gfr.value().unwrap(), b.gfr.value().unwrap(), 1e-9));
                assert_eq!(a.hfr.is_divergent(), b.hfr.is_divergent());
                if let (Some(u), Some(v)) = (a.hfr.value(), b.hfr.value()) {
                    assert!(close(u, v, 1e-9));
                }
            }
        }
    }

    #[test]
    fn postulates() {
        let m = WeightedModel::new(weibull(1.0, 2.0), WeightFunction::constant());
        let r = m.check_validity_postulates(1.0).unwrap();
        assert!(r.nonnegative && r.finite_cumulative && !r.defective);
        assert_eq!(r.tail, TailBehavior::LikelyDivergent);
        let m = WeightedModel::new(weibull(1.0, 2.0), WeightFunction::exponential(-1.0).unwrap());
        let r = m.check_validity_postulates(5.0).unwrap();
        assert_eq!(r.tail, TailBehavior::LikelyConvergent);
        assert!(r.defective);
        assert!(close(r.tail_evidence[6].1, 2.0, 1e-9));
        assert!(close(weibull_exponential_weight::survival_at_infinity(1.0, 2.0, -1.0).unwrap(), (-2.0f64).exp(), 1e-14));
        let e = WeightedModel::new(HazardModel::exponential(1.0).unwrap(), WeightFunction::constant());
        let r = e.check_validity_postulates(1.0).unwrap();
        assert!(r.nonnegative && r.finite_cumulative && r.tail == TailBehavior::LikelyDivergent);
    }

    #[test]
    fn limit_at_origin() {
        let m = WeightedModel::new(HazardModel::additive_weibull(1.0, 1.0, 0.5, 2.0).unwrap(), WeightFunction::exponential(-1.0).unwrap());
        let h0 = m.base().hazard(0.0);
        assert!(close(m.wafr(1e-6).unwrap(), h0, 1e-3));
    }

    #[test]
    fn degenerate_weight_and_hazard() {
        let m = WeightedModel::new(weibull(1.0, 2.0), WeightFunction::kies_ratio(1.0, 3.0).unwrap());
        assert!(matches!(m.wafr(0.5), Err(Error::DegenerateWeight { .. })));
        let p = WeightedModel::new(HazardModel::pareto_one(2.0).unwrap(), WeightFunction::constant());
        assert!(matches!(p.whfr(3.0), Err(Error::DegenerateHazard { .. })));
        assert!(p.wgfr(3.0).unwrap().is_divergent());
        // ∫₂³ 2/u du / 3
        assert!(close(p.wafr(3.0).unwrap(), 2.0 * 1.5f64.ln() / 3.0, 1e-10));
    }

    #[test]
    fn scan_interval_of_defective_variable() {
        let m = WeightedModel::new(weibull(1.0, 3.0), WeightFunction::exponential(-1.0).unwrap());
        let (lo, hi) = m.scan_interval().unwrap();
        assert!(lo < 0.2 && hi > 5.0, "{lo} {hi}");
        let plain = WeightedModel::new(weibull(1.0, 2.0), WeightFunction::constant());
        let (lo, hi) = plain.scan_interval().unwrap();
        assert!((lo - (-(0.999f64).ln()).sqrt()).abs() < 1e-9 && (hi - 1000f64.ln().sqrt()).abs() < 1e-9);
    }

    #[test]
    fn json_for_divergent_means() {
        let t = MeanTriple { x: 1.0, afr: MeanValue::Finite(2.0), gfr: MeanValue::Finite(1.0), hfr: MeanValue::Divergent };
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"x":1.0,"afr":2.0,"gfr":1.0,"hfr":{"divergent":true}}"#);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn am_gm_hm_chain(beta in 0.3f64..1.9, alpha in 0.2f64..3.0, c in 0.0f64..2.0, x in 0.1f64..6.0) {
            let m = WeightedModel::new(weibull(alpha, beta), WeightFunction::power(c).unwrap()).with_closed_forms(false);
            let t = m.mean_triple(x).unwrap();
            prop_assert!(t.chain_violation() <= 1e-9, "{t:?}");
        }

        #[test]
        fn reduction_to_plain_means(beta in 0.3f64..3.0, x in 0.1f64..5.0) {
            let m = WeightedModel::new(weibull(1.0, beta), WeightFunction::constant());
            let a = m.wafr(x).unwrap();
            prop_assert!(close(a, x.powf(beta - 1.0), 1e-10));
            let g = m.wgfr(x).unwrap().value().unwrap();
            prop_assert!(close(g, beta * x.powf(beta - 1.0) * (1.0 - beta).exp(), 1e-10));
        }

        #[test]
        fn weighted_survival_is_valid(beta in 0.3f64..3.0, n in -2.0f64..2.0, x in 0.0f64..3.0, dx in 0.01f64..1.0) {
            let m = WeightedModel::new(weibull(1.0, beta), WeightFunction::exponential(n).unwrap());
            let s1 = m.weighted_survival(x).unwrap();
            let s2 = m.weighted_survival(x + dx).unwrap();
            prop_assert!((0.0..=1.0).contains(&s1) && s2 <= s1 + 1e-15);
            prop_assert!(m.weighted_density(x + dx).unwrap() >= 0.0);
        }
    }
}
