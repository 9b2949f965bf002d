//! Quantile-side means: `Q`, `q`, the hazard quantile `h_q`, and the
//! quantile AFR/GFR/HFR, with transformations, proportional hazards and
//! recovery of `Q` from proportionality to `h_q`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{
    invert_cumulative_hazard, scan_monotonicity_with, CustomHazard, Direction, Hazard, HazardFamily, HazardModel,
    MonotoneLabel, MonotoneVerdict, WeightFunction, DEAD_BAND,
};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::weighted::{MeanValue, WeightedModel};

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The 99-point grid `0.01, 0.02, …, 0.99`.
pub fn u_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    DerivedFromHazard,
    Transformed,
}

/// Which denominator the quantile AFR/GFR/HFR use.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DenominatorMode {
    /// `Q(u)`, the conventional quantile form.
    #[default]
    Conventional,
    /// `Q(u) − Q(0) = ∫₀ᵘ q`, matching the weighted means with weight `q`.
    WeightedConsistent,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct QuantileOptions {
    pub mode: DenominatorMode,
    pub quadrature: QuadratureConfig,
}

/// A quantile function `Q` on `[0, 1)` with its density `q = Q'`.
#[derive(Clone)]
pub struct QuantileModel {
    name: String,
    quantile: Func,
    density: Func,
    provenance: Provenance,
}

impl fmt::Debug for QuantileModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuantileModel").field("name", &self.name).field("provenance", &self.provenance).finish()
    }
}

/// `−ln(1 − u)`.
fn neg_log1m(u: f64) -> f64 {
    -(-u).ln_1p()
}

impl QuantileModel {
    pub fn new(
        name: impl Into<String>,
        quantile: impl Fn(f64) -> f64 + Send + Sync + 'static,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        provenance: Provenance,
    ) -> Self {
        Self { name: name.into(), quantile: Arc::new(quantile), density: Arc::new(density), provenance }
    }

    /// `Q(u) = −ln(1 − u)/λ`.
    pub fn exponential(lambda: f64) -> Result<Self> {
        HazardModel::exponential(lambda)?;
        Ok(Self::new(
            format!("exponential(lambda={lambda})"),
            move |u| neg_log1m(u) / lambda,
            move |u| 1.0 / (lambda * (1.0 - u)),
            Provenance::ClosedForm,
        ))
    }

    /// Quantile of the cumulative hazard `αx^β`: `Q(u) = (−ln(1 − u)/α)^{1/β}`.
    pub fn weibull(alpha: f64, beta: f64) -> Result<Self> {
        HazardModel::weibull(alpha, beta)?;
        Ok(Self::new(
            format!("weibull(alpha={alpha}, beta={beta})"),
            move |u| (neg_log1m(u) / alpha).powf(1.0 / beta),
            move |u| {
                let l = neg_log1m(u);
                (l / alpha).powf(1.0 / beta) / (beta * (1.0 - u) * l)
            },
            Provenance::ClosedForm,
        ))
    }

    /// `Q(u) = α(1 − u)^{−1/α}`.
    pub fn pareto_one(alpha: f64) -> Result<Self> {
        HazardModel::pareto_one(alpha)?;
        Ok(Self::new(
            format!("pareto_one(alpha={alpha})"),
            move |u| alpha * (1.0 - u).powf(-1.0 / alpha),
            move |u| (1.0 - u).powf(-1.0 / alpha - 1.0),
            Provenance::ClosedForm,
        ))
    }

    /// Closed form when the family has one, numerical inversion otherwise.
    pub fn from_hazard_model(m: &HazardModel) -> Result<Self> {
        match m.spec() {
            HazardFamily::Exponential { lambda } => Self::exponential(*lambda),
            HazardFamily::Weibull { alpha, beta } => Self::weibull(*alpha, *beta),
            HazardFamily::ParetoOne { alpha } => Self::pareto_one(*alpha),
            _ => quantile_from_hazard(Arc::new(m.clone())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `Q(u)`.
    pub fn quantile(&self, u: f64) -> f64 {
        (self.quantile)(u)
    }

    /// `q(u) = dQ/du`.
    pub fn density(&self, u: f64) -> f64 {
        (self.density)(u)
    }

    /// `h_q(u) = 1/((1 − u)q(u))`.
    pub fn hazard_quantile(&self, u: f64) -> f64 {
        1.0 / ((1.0 - u) * self.density(u))
    }

    /// Cumulative hazard `−ln(1 − F(x))`, found by solving `Q(1 − e^{−t}) = x` for `t`.
    pub fn cumulative_hazard_at(&self, x: f64) -> Result<f64> {
        let q_of = |t: f64| self.quantile(-(-t).exp_m1());
        if x <= self.quantile(0.0) {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        while q_of(hi) < x {
            lo = hi;
            hi *= 2.0;
            if hi > 700.0 {
                return Err(Error::SupportExhausted { x });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if q_of(mid) < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Quantile model of a hazard by bracketed inversion of `F`.
pub fn quantile_from_hazard(m: Arc<dyn Hazard>) -> Result<QuantileModel> {
    // a proper law reaches any cumulative hazard level
    match invert_cumulative_hazard(m.as_ref(), 40.0) {
        Err(Error::Defective(reason)) => {
            return Err(Error::invalid("hazard", format!("defective distribution has no quantile function: {reason}")))
        }
        Err(e) => return Err(e),
        Ok(_) => {}
    }
    let qm = m.clone();
    let quantile = move |u: f64| invert_cumulative_hazard(qm.as_ref(), neg_log1m(u)).unwrap_or(f64::NAN);
    let dm = m.clone();
    let dq = quantile.clone();
    let density = move |u: f64| 1.0 / ((1.0 - u) * dm.hazard(dq(u)));
    Ok(QuantileModel {
        name: format!("{m:?}"),
        quantile: Arc::new(quantile),
        density: Arc::new(density),
        provenance: Provenance::DerivedFromHazard,
    })
}

fn denominator(qm: &QuantileModel, u: f64, mode: DenominatorMode) -> Result<f64> {
    let q = qm.quantile(u);
    let d = match mode {
        DenominatorMode::Conventional => q,
        DenominatorMode::WeightedConsistent => q - qm.quantile(0.0),
    };
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Degenerate(format!("quantile denominator {d} at u = {u}")));
    }
    Ok(d)
}

fn check_open_u(u: f64) -> Result<()> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::invalid("u", format!("must lie in (0, 1), got {u}")));
    }
    Ok(())
}

/// Quantile AFR `−ln(1 − u)/Q(u)`.
pub fn qa(qm: &QuantileModel, u: f64) -> Result<f64> {
    qa_with(qm, u, &QuantileOptions::default())
}

pub fn qa_with(qm: &QuantileModel, u: f64, opts: &QuantileOptions) -> Result<f64> {
    check_open_u(u)?;
    Ok(neg_log1m(u) / denominator(qm, u, opts.mode)?)
}

/// Quantile GFR `exp((1/Q(u))∫₀ᵘ q ln h_q)`.
pub fn qg(qm: &QuantileModel, u: f64) -> Result<MeanValue> {
    qg_with(qm, u, &QuantileOptions::default())
}

pub fn qg_with(qm: &QuantileModel, u: f64, opts: &QuantileOptions) -> Result<MeanValue> {
    check_open_u(u)?;
    let d = denominator(qm, u, opts.mode)?;
    // dividing by the denominator keeps the integral O(1) whatever the quantile scale
    let integrand = |p: f64| {
        let q = qm.density(p);
        if q == 0.0 {
            0.0
        } else {
            -(q / d) * ((1.0 - p) * q).ln()
        }
    };
    match integrate(integrand, 0.0, u, &opts.quadrature) {
        Ok(e) => Ok(MeanValue::Finite(e.value.exp())),
        Err(e) if e.is_divergent() => Ok(MeanValue::Divergent),
        Err(e) => Err(e),
    }
}

/// Quantile HFR `Q(u)/∫₀ᵘ(1 − p)q²`.
pub fn qh(qm: &QuantileModel, u: f64) -> Result<MeanValue> {
    qh_with(qm, u, &QuantileOptions::default())
}

pub fn qh_with(qm: &QuantileModel, u: f64, opts: &QuantileOptions) -> Result<MeanValue> {
    check_open_u(u)?;
    let d = denominator(qm, u, opts.mode)?;
    match integrate(|p| (1.0 - p) * (qm.density(p) / d).powi(2), 0.0, u, &opts.quadrature) {
        Ok(e) if e.value.is_finite() && e.value > 0.0 => Ok(MeanValue::Finite(1.0 / (d * e.value))),
        Ok(_) => Ok(MeanValue::Divergent),
        Err(e) if e.is_divergent() => Ok(MeanValue::Divergent),
        Err(e) => Err(e),
    }
}

/// The harmonic integral in its second form `∫₀ᵘ q/h_q`.
pub fn harmonic_integral_via_hazard(qm: &QuantileModel, u: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate(|p| qm.density(p) / qm.hazard_quantile(p), 0.0, u, cfg)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileMeanTriple {
    pub u: f64,
    pub qa: f64,
    pub qg: MeanValue,
    pub qh: MeanValue,
}

/// `(QA, QG, QH)` from the direct quantile formulas.
pub fn quantile_means(qm: &QuantileModel, u: f64, opts: &QuantileOptions) -> Result<QuantileMeanTriple> {
    Ok(QuantileMeanTriple { u, qa: qa_with(qm, u, opts)?, qg: qg_with(qm, u, opts)?, qh: qh_with(qm, u, opts)? })
}

/// The weighted model with hazard `h_q` and weight `q` on `[0, 1)`.
pub fn as_weighted_model(qm: &QuantileModel) -> WeightedModel {
    let hm = qm.clone();
    let hazard = CustomHazard::new(format!("h_q[{}]", qm.name), move |p| hm.hazard_quantile(p)).with_support(0.0, 1.0);
    let wm = qm.clone();
    let weight = WeightFunction::custom(format!("q[{}]", qm.name), Direction::Increasing, move |p| wm.density(p));
    WeightedModel::new(hazard, weight)
}

/// `(QA, QG, QH)` through the weighted-mean machinery with weight `q` and
/// hazard `h_q`; `mode` rescales from the `∫q` denominator to `Q(u)`.
pub fn quantile_means_via_weighted(qm: &QuantileModel, u: f64, mode: DenominatorMode) -> Result<QuantileMeanTriple> {
    check_open_u(u)?;
    let m = as_weighted_model(qm);
    let t = m.mean_triple(u)?;
    let s = match mode {
        DenominatorMode::WeightedConsistent => 1.0,
        DenominatorMode::Conventional => m.cumulative_weight(u)? / denominator(qm, u, DenominatorMode::Conventional)?,
    };
    Ok(QuantileMeanTriple {
        u,
        qa: t.afr.value().ok_or(Error::Divergent { a: 0.0, b: u })? * s,
        qg: match t.gfr {
            MeanValue::Finite(g) => MeanValue::Finite(g.powf(s)),
            MeanValue::Divergent => MeanValue::Divergent,
        },
        qh: match t.hfr {
            MeanValue::Finite(h) => MeanValue::Finite(h / s),
            MeanValue::Divergent => MeanValue::Divergent,
        },
    })
}

/// Example closed forms for the Pareto-I law `Q(u) = α(1 − u)^{−1/α}`.
pub mod pareto_one_closed {
    pub fn qa(alpha: f64, u: f64) -> f64 {
        -(1.0 - u).powf(1.0 / alpha) * (-u).ln_1p() / alpha
    }

    pub fn qg(alpha: f64, u: f64) -> f64 {
        let r = (1.0 - u).powf(1.0 / alpha);
        (1.0 - r).exp() * r
    }

    pub fn qh(alpha: f64, u: f64) -> f64 {
        let r = (1.0 - u).powf(1.0 / alpha);
        -2.0 * r / ((1.0 - u).powf(2.0 / alpha) - 1.0)
    }
}

/// A non-decreasing transformation `T` with derivative `T'`.
#[derive(Clone)]
pub struct Transform {
    pub name: String,
    t: Func,
    dt: Func,
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transform").field("name", &self.name).finish()
    }
}

impl Transform {
    pub fn new(
        name: impl Into<String>,
        t: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dt: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), t: Arc::new(t), dt: Arc::new(dt) }
    }

    pub fn identity() -> Self {
        Self::new("identity", |x| x, |_| 1.0)
    }

    pub fn scale(c: f64) -> Self {
        Self::new(format!("{c}*x"), move |x| c * x, move |_| c)
    }

    pub fn power(p: f64) -> Self {
        Self::new(format!("x^{p}"), move |x| x.powf(p), move |x| p * x.powf(p - 1.0))
    }
}

/// Quantile model of `T(X)`: `Q_T = T∘Q_X`, `q_T = T'(Q_X)·q_X`.
pub fn transform_quantile(qx: &QuantileModel, t: &Transform) -> Result<QuantileModel> {
    for u in u_grid() {
        let d = (t.dt)(qx.quantile(u));
        if d < 0.0 {
            return Err(Error::invalid("transform", format!("derivative {d} < 0 at u = {u}; T must be non-decreasing")));
        }
    }
    let (q1, tf) = (qx.clone(), t.t.clone());
    let (q2, dtf) = (qx.clone(), t.dt.clone());
    Ok(QuantileModel {
        name: format!("{}({})", t.name, qx.name),
        quantile: Arc::new(move |u| tf(q1.quantile(u))),
        density: Arc::new(move |u| dtf(q2.quantile(u)) * q2.density(u)),
        provenance: Provenance::Transformed,
    })
}

/// Comparison of the distribution-side and quantile-side AFR under proportional hazards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhmReport {
    pub theta: f64,
    /// `max |A_Y(x) − θA_X(x)|/(θA_X(x))` over `x = Q_X(u)`.
    pub distribution_gap: f64,
    /// `max_u |QA_Y(u) − θQA_X(u)|`.
    pub quantile_gap: f64,
    /// `max_u |QA_Y(u) − θQA_X(1 − (1 − u)^{1/θ})|`.
    pub identity_gap: f64,
    pub u_grid: Vec<f64>,
}

/// The model `Y` with `F̄_Y = F̄_X^θ`: `Q_Y(u) = Q_X(1 − (1 − u)^{1/θ})`, and the comparison report.
pub fn phm_quantile(qx: &QuantileModel, theta: f64) -> Result<(QuantileModel, PhmReport)> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::invalid("theta", format!("must be positive, got {theta}")));
    }
    let v = move |u: f64| -((1.0 / theta) * (-u).ln_1p()).exp_m1();
    let (q1, q2) = (qx.clone(), qx.clone());
    let y = QuantileModel {
        name: format!("phm(theta={theta}, {})", qx.name),
        quantile: Arc::new(move |u| q1.quantile(v(u))),
        density: Arc::new(move |u| q2.density(v(u)) * (1.0 / theta) * (1.0 - u).powf(1.0 / theta - 1.0)),
        provenance: Provenance::Transformed,
    };
    let grid = u_grid();
    let (mut distribution_gap, mut quantile_gap, mut identity_gap) = (0.0f64, 0.0f64, 0.0f64);
    for &u in &grid {
        let x = qx.quantile(u);
        let (hx, hy) = (qx.cumulative_hazard_at(x)?, y.cumulative_hazard_at(x)?);
        if hx > 0.0 {
            distribution_gap = distribution_gap.max(((hy / x) - theta * hx / x).abs() / (theta * hx / x));
        }
        let qa_y = qa(&y, u)?;
        quantile_gap = quantile_gap.max((qa_y - theta * qa(qx, u)?).abs());
        identity_gap = identity_gap.max((qa_y - theta * qa(qx, v(u))?).abs());
    }
    Ok((y, PhmReport { theta, distribution_gap, quantile_gap, identity_gap, u_grid: grid }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProportionalMean {
    A,
    G,
    H,
}

/// Quantile function whose chosen quantile mean is `ratio·h_q`:
/// `Q(u) = c·(ln(A/(1 − u)))^r` with `(c, r) = ((1/(a·k))^a, a)` for `A` and
/// `((ln(e/b)/k)^{1/ln(e/b)}, 1/ln(e/b))` for `G`. The literal `H` form repeats
/// the `G` one and is only available with `allow_duplicate_h_form`.
pub fn recover_quantile_from_proportionality(
    which: ProportionalMean,
    ratio: f64,
    k: f64,
    a_const: f64,
    allow_duplicate_h_form: bool,
) -> Result<QuantileModel> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::invalid("ratio", format!("must be positive, got {ratio}")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid("k", format!("must be positive, got {k}")));
    }
    if !(a_const >= 1.0 && a_const.is_finite()) {
        return Err(Error::invalid("a_const", format!("must be at least 1 so that ln(A/(1-u)) >= 0 on [0, 1), got {a_const}")));
    }
    let (c, r) = match which {
        ProportionalMean::A => ((1.0 / (ratio * k)).powf(ratio), ratio),
        ProportionalMean::G | ProportionalMean::H => {
            if which == ProportionalMean::H && !allow_duplicate_h_form {
                return Err(Error::Unsupported(
                    "the literal H form duplicates the G form; enable it explicitly to use it".into(),
                ));
            }
            let l = (std::f64::consts::E / ratio).ln();
            if l <= 0.0 {
                return Err(Error::invalid("ratio", format!("ln(e/b) = {l} must be positive")));
            }
            ((l / k).powf(1.0 / l), 1.0 / l)
        }
    };
    let la = a_const.ln();
    Ok(QuantileModel::new(
        format!("recovered_{which:?}(ratio={ratio}, k={k}, A={a_const})"),
        move |u| c * (la + neg_log1m(u)).powf(r),
        move |u| c * r * (la + neg_log1m(u)).powf(r - 1.0) / (1.0 - u),
        Provenance::ClosedForm,
    ))
}

/// Monotonicity of `h_q` and the three quantile means on a `u` interval.
#[derive(Debug, Clone, Serialize)]
pub struct QuantileAgingReport {
    pub hazard_quantile: MonotoneVerdict,
    pub qa: MonotoneVerdict,
    pub qg: Option<MonotoneVerdict>,
    pub qh: Option<MonotoneVerdict>,
    /// Whether every finite mean follows a monotone `h_q`.
    pub transmission: Option<bool>,
    pub notes: Vec<String>,
}

pub fn classify_quantile(
    qm: &QuantileModel,
    interval: (f64, f64),
    grid_size: usize,
    opts: &QuantileOptions,
) -> Result<QuantileAgingReport> {
    let scan = |f: &dyn Fn(f64) -> Result<f64>| scan_monotonicity_with(f, interval, grid_size, DEAD_BAND);
    let hazard_quantile = scan(&|u| Ok(qm.hazard_quantile(u)))?;
    let qa_v = scan(&|u| qa_with(qm, u, opts))?;
    let finite = |v: MeanValue, u: f64| v.value().ok_or(Error::Divergent { a: 0.0, b: u });
    let mut notes = Vec::new();
    let mut optional = |name: &str, r: Result<MonotoneVerdict>| match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_divergent() => {
            notes.push(format!("{name} diverges; excluded"));
            Ok(None)
        }
        Err(e @ Error::Accuracy { .. }) => {
            notes.push(format!("{name} not resolved to tolerance ({e}); excluded"));
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let qg_v = optional("QG", scan(&|u| finite(qg_with(qm, u, opts)?, u)))?;
    let qh_v = optional("QH", scan(&|u| finite(qh_with(qm, u, opts)?, u)))?;
    let h = hazard_quantile.label;
    let follows = |l: MonotoneLabel| match h {
        MonotoneLabel::Increasing => l.is_nondecreasing(),
        MonotoneLabel::Decreasing => l.is_nonincreasing(),
        MonotoneLabel::Constant => l == MonotoneLabel::Constant,
        MonotoneLabel::NonMonotone => true,
    };
    let transmission = h.is_monotone().then(|| {
        follows(qa_v.label) && qg_v.iter().chain(qh_v.iter()).all(|v| follows(v.label))
    });
    Ok(QuantileAgingReport { hazard_quantile, qa: qa_v, qg: qg_v, qh: qh_v, transmission, notes })
}
