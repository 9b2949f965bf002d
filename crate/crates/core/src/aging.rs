//! Aging classes from the monotonicity of weighted means, and numerical
//! checks of the bounds and equivalences relating them.
//!
//! Every verdict is evidence on a finite interval and grid, never a proof;
//! reports carry the interval they were computed on.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{
    scan_grid, scan_values, CustomHazard, Direction, MonotoneLabel, MonotoneVerdict, WeightFunction, DEAD_BAND,
};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::weighted::{MeanTriple, MeanValue, WeightedModel};

/// Default grid size for classification scans.
pub const DEFAULT_GRID: usize = 200;

/// Default tolerance on normalized bound violations.
pub const BOUND_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum AgingClass {
    #[serde(rename = "IFR")]
    Ifr,
    #[serde(rename = "DFR")]
    Dfr,
    #[serde(rename = "Iw-AFR")]
    IwAfr,
    #[serde(rename = "Dw-AFR")]
    DwAfr,
    #[serde(rename = "Iw-GFR")]
    IwGfr,
    #[serde(rename = "Dw-GFR")]
    DwGfr,
    #[serde(rename = "Iw-HFR")]
    IwHfr,
    #[serde(rename = "Dw-HFR")]
    DwHfr,
}

impl AgingClass {
    pub fn as_str(self) -> &'static str {
        match self {
            AgingClass::Ifr => "IFR",
            AgingClass::Dfr => "DFR",
            AgingClass::IwAfr => "Iw-AFR",
            AgingClass::DwAfr => "Dw-AFR",
            AgingClass::IwGfr => "Iw-GFR",
            AgingClass::DwGfr => "Dw-GFR",
            AgingClass::IwHfr => "Iw-HFR",
            AgingClass::DwHfr => "Dw-HFR",
        }
    }
}

/// Monotonicity verdicts for a weighted model and the aging classes they imply.
#[derive(Debug, Clone, Serialize)]
pub struct AgingReport {
    pub interval: (f64, f64),
    pub grid_size: usize,
    /// Base hazard `h`; decides IFR/DFR.
    pub hazard: MonotoneVerdict,
    /// Weighted hazard `h^w = w·h`.
    pub weighted_hazard: MonotoneVerdict,
    /// `A^w`, `G^w`, `H^w`; `None` when the mean diverges on the interval.
    pub afr: Option<MonotoneVerdict>,
    pub gfr: Option<MonotoneVerdict>,
    pub hfr: Option<MonotoneVerdict>,
    /// Plain arithmetic mean `(1/x)∫₀ˣ h^w` of the weighted variable's own hazard.
    pub weighted_variable_afr: MonotoneVerdict,
    pub labels: BTreeSet<AgingClass>,
    /// Whether every finite mean follows the direction of a monotone `h`; `None` if `h` is not monotone.
    pub transmission: Option<bool>,
    /// Whether IFR implies all increasing-mean classes and DFR all decreasing ones.
    pub inclusions_hold: bool,
    pub defective: bool,
    pub notes: Vec<String>,
}

impl AgingReport {
    pub fn has(&self, class: AgingClass) -> bool {
        self.labels.contains(&class)
    }
}

fn push_labels(labels: &mut BTreeSet<AgingClass>, label: MonotoneLabel, up: AgingClass, down: AgingClass) {
    if label.is_nondecreasing() {
        labels.insert(up);
    }
    if label.is_nonincreasing() {
        labels.insert(down);
    }
}

fn follows(h: MonotoneLabel, mean: MonotoneLabel) -> bool {
    match h {
        MonotoneLabel::Increasing => mean.is_nondecreasing(),
        MonotoneLabel::Decreasing => mean.is_nonincreasing(),
        MonotoneLabel::Constant => mean == MonotoneLabel::Constant,
        MonotoneLabel::NonMonotone => true,
    }
}

/// Classifies `m` on `interval` (default: [`WeightedModel::scan_interval`]).
pub fn classify(m: &WeightedModel, interval: Option<(f64, f64)>, grid_size: usize) -> Result<AgingReport> {
    let interval = match interval {
        Some(iv) => iv,
        None => m.scan_interval()?,
    };
    let (lo, hi) = interval;
    let (slo, shi) = m.base().support();
    if !(lo > 0.0 && lo >= slo && hi <= shi) {
        return Err(Error::invalid(
            "interval",
            format!("[{lo}, {hi}] must be positive and inside the support [{slo}, {shi})"),
        ));
    }
    let grid = scan_grid(interval, grid_size)?;
    let mut notes = Vec::new();

    let base = m.base().clone();
    let h_values: Vec<f64> = grid.iter().map(|&x| base.hazard(x)).collect();
    let hazard = scan_values(&|x| Ok(base.hazard(x)), grid.clone(), h_values, DEAD_BAND)?;
    let hw_values: Vec<f64> = grid.iter().map(|&x| m.weighted_hazard(x)).collect();
    let weighted_hazard = scan_values(&|x| Ok(m.weighted_hazard(x)), grid.clone(), hw_values, DEAD_BAND)?;

    let triples = m.mean_triple_grid(&grid)?.into_iter().collect::<Result<Vec<MeanTriple>>>()?;
    let scan_mean = |name: &str, pick: fn(&MeanTriple) -> MeanValue, single: &dyn Fn(f64) -> Result<MeanValue>, notes: &mut Vec<String>| -> Result<Option<MonotoneVerdict>> {
        let values: Option<Vec<f64>> = triples.iter().map(|t| pick(t).value()).collect();
        match values {
            Some(values) => {
                let f = |x: f64| single(x)?.value().ok_or(Error::Divergent { a: 0.0, b: x });
                Ok(Some(scan_values(&f, grid.clone(), values, DEAD_BAND)?))
            }
            None => {
                notes.push(format!("{name} diverges on the scan interval; excluded from labeling"));
                Ok(None)
            }
        }
    };
    let afr = scan_mean("A^w", |t| t.afr, &|x| m.wafr(x).map(MeanValue::Finite), &mut notes)?;
    let gfr = scan_mean("G^w", |t| t.gfr, &|x| m.wgfr(x), &mut notes)?;
    let hfr = scan_mean("H^w", |t| t.hfr, &|x| m.whfr(x), &mut notes)?;

    let ks = m.cumulative_hazard_grid(&grid).into_iter().collect::<Result<Vec<f64>>>()?;
    let plain: Vec<f64> = grid.iter().zip(&ks).map(|(x, k)| k / x).collect();
    let weighted_variable_afr =
        scan_values(&|x: f64| Ok(m.weighted_cumulative_hazard(x)? / x), grid.clone(), plain, DEAD_BAND)?;

    let mut labels = BTreeSet::new();
    push_labels(&mut labels, hazard.label, AgingClass::Ifr, AgingClass::Dfr);
    let means = [
        (&afr, AgingClass::IwAfr, AgingClass::DwAfr),
        (&gfr, AgingClass::IwGfr, AgingClass::DwGfr),
        (&hfr, AgingClass::IwHfr, AgingClass::DwHfr),
    ];
    for (v, up, down) in means {
        if let Some(v) = v {
            push_labels(&mut labels, v.label, up, down);
        }
    }

    let transmission = hazard
        .label
        .is_monotone()
        .then(|| means.iter().filter_map(|(v, _, _)| v.as_ref()).all(|v| follows(hazard.label, v.label)));
    let inclusions_hold = means.iter().all(|(v, up, down)| {
        v.is_none()
            || (!labels.contains(&AgingClass::Ifr) || labels.contains(up))
                && (!labels.contains(&AgingClass::Dfr) || labels.contains(down))
    });

    let defective = if m.weight().is_constant() {
        false
    } else {
        m.check_validity_postulates(hi)?.defective
    };
    if defective {
        notes.push("weighted variable is defective: its cumulative hazard stays bounded".into());
    }

    Ok(AgingReport {
        interval,
        grid_size,
        hazard,
        weighted_hazard,
        afr,
        gfr,
        hfr,
        weighted_variable_afr,
        labels,
        transmission,
        inclusions_hold,
        defective,
        notes,
    })
}

/// Relation expected between the two sides of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Pass,
    Fail,
    /// Preconditions cannot be decided (unknown directions, divergent sides).
    Inconclusive,
    /// A stated precondition is numerically false on the interval.
    Skipped,
}

/// One inequality checked over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub id: String,
    pub relation: Option<Relation>,
    pub status: BoundStatus,
    /// Largest `(violation)/(1 + scale)` over the samples; negative values are slack.
    pub max_violation: f64,
    pub tolerance: f64,
    pub worst_x: Option<f64>,
    pub points: usize,
    pub note: Option<String>,
}

impl BoundReport {
    /// Compares `lhs` against `rhs` at each `(x, lhs, rhs)` sample.
    pub fn evaluate(id: impl Into<String>, relation: Relation, samples: &[(f64, f64, f64)], tolerance: f64) -> Self {
        let mut worst = f64::NEG_INFINITY;
        let mut worst_x = None;
        for &(x, lhs, rhs) in samples {
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            let v = match relation {
                Relation::Ge => rhs - lhs,
                Relation::Le => lhs - rhs,
                Relation::Eq => (lhs - rhs).abs(),
            } / scale;
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if v > worst {
                worst = v;
                worst_x = Some(x);
            }
        }
        let status = if samples.is_empty() {
            BoundStatus::Inconclusive
        } else if worst <= tolerance {
            BoundStatus::Pass
        } else {
            BoundStatus::Fail
        };
        Self {
            id: id.into(),
            relation: Some(relation),
            status,
            max_violation: if samples.is_empty() { 0.0 } else { worst },
            tolerance,
            worst_x,
            points: samples.len(),
            note: None,
        }
    }

    pub fn inconclusive(id: impl Into<String>, note: impl Into<String>) -> Self {
        Self::not_run(id, BoundStatus::Inconclusive, note)
    }

    pub fn skipped(id: impl Into<String>, note: impl Into<String>) -> Self {
        Self::not_run(id, BoundStatus::Skipped, note)
    }

    fn not_run(id: impl Into<String>, status: BoundStatus, note: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            relation: None,
            status,
            max_violation: 0.0,
            tolerance: BOUND_TOL,
            worst_x: None,
            points: 0,
            note: Some(note.into()),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == BoundStatus::Pass
    }

    /// Pass, inconclusive and skipped all count as "not refuted".
    pub fn refuted(&self) -> bool {
        self.status == BoundStatus::Fail
    }
}

fn integral(f: impl Fn(f64) -> f64, x: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(integrate(f, 0.0, x, cfg)?.value)
}

/// Checks `(∫f₁g₁)(∫f₂g₂) − (∫f₁g₂)(∫f₂g₁)` against zero over `[0, x]`:
/// non-negative when `f₁/f₂` and `g₁/g₂` move in the same direction,
/// non-positive when they move in opposite directions, zero when either ratio is constant.
pub fn wijsman_check(
    f1: impl Fn(f64) -> f64,
    f2: impl Fn(f64) -> f64,
    g1: impl Fn(f64) -> f64,
    g2: impl Fn(f64) -> f64,
    x: f64,
    expected: Relation,
) -> Result<BoundReport> {
    let cfg = QuadratureConfig::default();
    let i11 = integral(|u| f1(u) * g1(u), x, &cfg)?;
    let i22 = integral(|u| f2(u) * g2(u), x, &cfg)?;
    let i12 = integral(|u| f1(u) * g2(u), x, &cfg)?;
    let i21 = integral(|u| f2(u) * g1(u), x, &cfg)?;
    if [i11, i22, i12, i21].iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Degenerate(format!("a cross integral over [0, {x}] is not positive")));
    }
    let lhs = i11 * i22;
    let rhs = i12 * i21;
    // normalize by the products so the tolerance is relative
    let scale = lhs.abs().max(rhs.abs());
    Ok(BoundReport::evaluate("ratio_ordering", expected, &[(x, lhs / scale, rhs / scale)], 1e-10))
}

/// Relation predicted from the declared directions of weight and hazard:
/// `Ge` for the same direction, `Le` for opposite ones, `Eq` when either is constant.
fn direction_relation(w: Direction, h: Direction) -> Option<Relation> {
    if w == Direction::Constant || h == Direction::Constant {
        return Some(Relation::Eq);
    }
    match w.same_as(h)? {
        true => Some(Relation::Ge),
        false => Some(Relation::Le),
    }
}

fn min_on(f: impl Fn(f64) -> f64, x_max: f64) -> (f64, f64) {
    let n = 400;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=n {
        let x = if i == 0 { 1e-9 * x_max } else { x_max * i as f64 / n as f64 };
        let v = f(x);
        if v < best.0 {
            best = (v, x);
        }
    }
    best
}

fn max_on(f: impl Fn(f64) -> f64, x_max: f64) -> f64 {
    -min_on(|x| -f(x), x_max).0
}

fn check_grid(grid: &[f64]) -> Result<f64> {
    if grid.is_empty() || grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::invalid("x_grid", "must be non-empty with positive finite points"));
    }
    Ok(grid.iter().cloned().fold(0.0, f64::max))
}

/// Weighted versus plain means: `A^w ≥ A`, `G^w ≥ G` (when `h ≥ 1`) and
/// `H^w ≥ H` when weight and hazard move in the same direction, reversed
/// when they move in opposite directions.
pub fn bound_check_means(m: &WeightedModel, x_grid: &[f64]) -> Result<Vec<BoundReport>> {
    let x_max = check_grid(x_grid)?;
    let ids = ["afr_weighted_vs_plain", "gfr_weighted_vs_plain", "hfr_weighted_vs_plain"];
    let Some(relation) = direction_relation(m.weight().direction(), m.base().direction()) else {
        return Ok(ids.iter().map(|id| BoundReport::inconclusive(*id, "weight or hazard has no declared direction")).collect());
    };
    let mut grid = x_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let weighted = m.mean_triple_grid(&grid)?;
    let plain = m.unweighted().mean_triple_grid(&grid)?;

    let mut samples: [Vec<(f64, f64, f64)>; 3] = Default::default();
    let mut skipped_points = [0usize; 3];
    for (tw, tp) in weighted.into_iter().zip(plain) {
        let (tw, tp) = (tw?, tp?);
        let pairs = [(tw.afr, tp.afr), (tw.gfr, tp.gfr), (tw.hfr, tp.hfr)];
        for (i, (a, b)) in pairs.into_iter().enumerate() {
            match (a.value(), b.value()) {
                (Some(a), Some(b)) => samples[i].push((tw.x, a, b)),
                _ => skipped_points[i] += 1,
            }
        }
    }
    let base = m.base().clone();
    let (h_min, h_at) = min_on(|x| base.hazard(x), x_max);
    let mut out = Vec::with_capacity(3);
    for (i, id) in ids.iter().enumerate() {
        if i == 1 && h_min < 1.0 {
            out.push(BoundReport::skipped(*id, format!("requires h >= 1; h({h_at:.6}) = {h_min:.6}")));
            continue;
        }
        let mut r = BoundReport::evaluate(*id, relation, &samples[i], BOUND_TOL);
        if skipped_points[i] > 0 {
            r = r.with_note(format!("{} points with a divergent mean left out", skipped_points[i]));
        }
        out.push(r);
    }
    Ok(out)
}

/// Bounds for the sequence of hazards `h_k = w^k·h` reweighted by `w`.
///
/// Checked as follows, with `S` the integral over `[0, x]`:
/// * `afr_ratio`: `A^w_{h_k}/A^w_h = S w^{k+1}h / S wh` is `≥ S w^{k+1} / S w`
///   when `w` and `h` move in the same direction, `≤` when opposite;
/// * `gfr_ratio`: for `w ≥ 1`, `G^w_{h_k}/G^w_h ≥ exp((k/x) S ln w)`, together
///   with the identity `G^w_{h_k}/G^w_h = exp(k S w ln w / S w)`;
/// * `hfr_ratio`: `H^w_{h_k}/H^w_h = S(w/h) / S(w^{1−k}/h)` is `≥ S w / S w^{1−k}`
///   when `w` and `h` move in opposite directions, `≤` when the same;
/// * `afr_vs_plain`, `hfr_vs_plain`: `A^w_{h_k}` and `H^w_{h_k}` are `≥` the
///   plain means when the directions agree and `w ≥ 1`, `≤` when they are
///   opposite and `w ≤ 1`;
/// * `gfr_vs_plain`: `G^w_{h_k} ≥ G` when `h ≥ 1`, `w ≥ 1` and the directions agree.
///
/// Unmet preconditions yield inconclusive or skipped reports, never failures.
pub fn sequence_weight_bounds(m: &WeightedModel, k: u32, x_grid: &[f64]) -> Result<Vec<BoundReport>> {
    if k == 0 {
        return Err(Error::invalid("k", "must be at least 1"));
    }
    let x_max = check_grid(x_grid)?;
    let cfg = *m.quadrature();
    let kf = k as f64;
    let w = m.weight().clone();
    let base = m.base().clone();
    let dw = w.direction();
    let dh = base.direction();
    let same = dw.same_as(dh);
    let w_min = min_on(|x| w.eval(x), x_max).0;
    let w_max = max_on(|x| w.eval(x), x_max);
    let h_min = min_on(|x| base.hazard(x), x_max).0;

    let wk = {
        let w = w.clone();
        let base = base.clone();
        move |u: f64| w.eval(u).powf(kf) * base.hazard(u)
    };
    let hk_model =
        WeightedModel::from_arc(Arc::new(CustomHazard::new(format!("w^{k} h"), wk)), w.clone()).with_quadrature(cfg);
    let plain = m.unweighted();

    let mut afr_ratio = Vec::new();
    let mut afr_identity = Vec::new();
    let mut gfr_ratio = Vec::new();
    let mut gfr_identity = Vec::new();
    let mut hfr_ratio = Vec::new();
    let mut afr_plain = Vec::new();
    let mut hfr_plain = Vec::new();
    let mut gfr_plain = Vec::new();
    for &x in x_grid {
        let we = |u: f64| w.eval(u);
        let h = |u: f64| base.hazard(u);
        let s_w = integral(we, x, &cfg)?;
        let s_wh = integral(|u| we(u) * h(u), x, &cfg)?;
        let s_wk1h = integral(|u| we(u).powf(kf + 1.0) * h(u), x, &cfg)?;
        let s_wk1 = integral(|u| we(u).powf(kf + 1.0), x, &cfg)?;
        afr_ratio.push((x, s_wk1h / s_wh, s_wk1 / s_w));
        let direct = hk_model.wafr(x)? / m.wafr(x)?;
        afr_identity.push((x, direct, s_wk1h / s_wh));
        afr_plain.push((x, s_wk1h / s_w, plain.wafr(x)?));

        let s_wlnw = integral(|u| we(u) * we(u).ln(), x, &cfg)?;
        let s_lnw = integral(|u| we(u).ln(), x, &cfg)?;
        let identity = (kf * s_wlnw / s_w).exp();
        gfr_ratio.push((x, identity, (kf / x * s_lnw).exp()));
        if let (MeanValue::Finite(gk), MeanValue::Finite(g)) = (hk_model.wgfr(x)?, m.wgfr(x)?) {
            gfr_identity.push((x, gk / g, identity));
            if let MeanValue::Finite(gp) = plain.wgfr(x)? {
                gfr_plain.push((x, gk, gp));
            }
        }

        let s_w1k = integrate(|u| we(u).powf(1.0 - kf), 0.0, x, &cfg);
        let s_w_over_h = integrate(|u| we(u) / h(u), 0.0, x, &cfg);
        let s_w1k_over_h = integrate(|u| we(u).powf(1.0 - kf) / h(u), 0.0, x, &cfg);
        if let (Ok(a), Ok(b), Ok(c)) = (&s_w_over_h, &s_w1k_over_h, &s_w1k) {
            let s_w1k = c.value;
            hfr_ratio.push((x, a.value / b.value, s_w / s_w1k));
            if let MeanValue::Finite(hp) = plain.whfr(x)? {
                hfr_plain.push((x, s_w / b.value, hp));
            }
        }
    }

    let mut out = Vec::new();
    out.push(match direction_relation(dw, dh) {
        Some(rel) => BoundReport::evaluate("afr_ratio", rel, &afr_ratio, BOUND_TOL),
        None => BoundReport::inconclusive("afr_ratio", "weight or hazard has no declared direction"),
    });
    out.push(BoundReport::evaluate("afr_ratio_identity", Relation::Eq, &afr_identity, 1e-7));
    out.push(if w_min >= 1.0 {
        BoundReport::evaluate("gfr_ratio", Relation::Ge, &gfr_ratio, BOUND_TOL)
    } else {
        BoundReport::skipped("gfr_ratio", format!("requires w >= 1; min w = {w_min:.6}"))
    });
    out.push(BoundReport::evaluate("gfr_ratio_identity", Relation::Eq, &gfr_identity, 1e-7));
    let hfr_rel = direction_relation(dw, dh).map(|r| match r {
        Relation::Ge => Relation::Le,
        Relation::Le => Relation::Ge,
        Relation::Eq => Relation::Eq,
    });
    out.push(match hfr_rel {
        Some(_) if hfr_ratio.is_empty() => BoundReport::inconclusive("hfr_ratio", "harmonic integrals diverge"),
        Some(rel) => BoundReport::evaluate("hfr_ratio", rel, &hfr_ratio, BOUND_TOL),
        None => BoundReport::inconclusive("hfr_ratio", "weight or hazard has no declared direction"),
    });

    let plain_rel = match same {
        Some(true) if w_min >= 1.0 => Some(Relation::Ge),
        Some(false) if w_max <= 1.0 => Some(Relation::Le),
        _ => None,
    };
    for (id, samples) in [("afr_vs_plain", &afr_plain), ("hfr_vs_plain", &hfr_plain)] {
        out.push(match plain_rel {
            Some(_) if samples.is_empty() => BoundReport::inconclusive(id, "a mean diverges"),
            Some(rel) => BoundReport::evaluate(id, rel, samples, BOUND_TOL),
            None => BoundReport::inconclusive(
                id,
                format!("needs agreeing directions with w >= 1 or opposite ones with w <= 1 (w in [{w_min:.4}, {w_max:.4}])"),
            ),
        });
    }
    out.push(if same == Some(true) && w_min >= 1.0 && h_min >= 1.0 {
        BoundReport::evaluate("gfr_vs_plain", Relation::Ge, &gfr_plain, BOUND_TOL)
    } else {
        BoundReport::skipped("gfr_vs_plain", "requires h >= 1, w >= 1 and agreeing directions")
    });
    Ok(out)
}

fn expect_from_scan(label: MonotoneLabel) -> Option<(Relation, Relation)> {
    // (relation for the pointwise inequality, relation for successive values of the monotone transform)
    match label {
        MonotoneLabel::Increasing => Some((Relation::Ge, Relation::Le)),
        MonotoneLabel::Decreasing => Some((Relation::Le, Relation::Ge)),
        MonotoneLabel::Constant => Some((Relation::Eq, Relation::Eq)),
        MonotoneLabel::NonMonotone => None,
    }
}

fn star_interval(alphas: &[f64], x_grid: &[f64]) -> Result<(f64, f64)> {
    if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::invalid("alphas", "must lie in [0, 1]"));
    }
    let x_max = check_grid(x_grid)?;
    let x_min = x_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let a_min = alphas.iter().cloned().filter(|a| *a > 0.0).fold(1.0, f64::min);
    let lo = (a_min * x_min).min(x_max * 0.5);
    Ok((lo, x_max))
}

/// Weighted star-shapedness of `−ln F̄^w` for an Iw-AFR (Dw-AFR) model:
/// `star_survival`: `F̄^w(αx) ≥ (≤) F̄^w(x)^{W(αx)/W(x)}` for every pair, and
/// `star_root_survival`: `F̄^w(x)^{1/W(x)}` decreasing (increasing) along the scan grid.
pub fn star_shaped_check(m: &WeightedModel, alphas: &[f64], x_grid: &[f64]) -> Result<Vec<BoundReport>> {
    let interval = star_interval(alphas, x_grid)?;
    let scan_g = scan_grid(interval, 64)?;
    let afr: Vec<f64> = scan_g.iter().map(|&x| m.wafr(x)).collect::<Result<_>>()?;
    let verdict = scan_values(&|x| m.wafr(x), scan_g.clone(), afr.clone(), DEAD_BAND)?;
    let Some((pointwise, successive)) = expect_from_scan(verdict.label) else {
        let note = "A^w is not monotone on the interval";
        return Ok(vec![BoundReport::inconclusive("star_survival", note), BoundReport::inconclusive("star_root_survival", note)]);
    };
    let mut samples = Vec::new();
    for &x in x_grid {
        let wx = m.cumulative_weight(x)?;
        let sx = m.weighted_survival(x)?;
        for &a in alphas {
            let ratio = if a == 0.0 { 0.0 } else { m.cumulative_weight(a * x)? / wx };
            samples.push((x, m.weighted_survival(a * x)?, sx.powf(ratio)));
        }
    }
    let mut root = Vec::new();
    for (i, pair) in afr.windows(2).enumerate() {
        // F̄^w(x)^{1/W(x)} = exp(−A^w(x))
        root.push((scan_g[i + 1], (-pair[1]).exp(), (-pair[0]).exp()));
    }
    Ok(vec![
        BoundReport::evaluate("star_survival", pointwise, &samples, BOUND_TOL),
        BoundReport::evaluate("star_root_survival", successive, &root, BOUND_TOL),
    ])
}

/// Weighted star-shapedness of `∫₀ˣ w·ln h` for an Iw-GFR (Dw-GFR) model:
/// `star_log_hazard`: `∫₀^{αx} w ln h ≤ (≥) (W(αx)/W(x))∫₀ˣ w ln h`, plus the sanity
/// check `0 ≤ W(αx)/W(x) ≤ 1` reported as `weight_ratio_range`.
pub fn gfr_star_shaped_check(m: &WeightedModel, alphas: &[f64], x_grid: &[f64]) -> Result<Vec<BoundReport>> {
    let interval = star_interval(alphas, x_grid)?;
    let scan_g = scan_grid(interval, 64)?;
    let gfr_of = |x: f64| -> Result<f64> { m.wgfr(x)?.value().ok_or(Error::Divergent { a: 0.0, b: x }) };
    let values: Vec<f64> = match scan_g.iter().map(|&x| gfr_of(x)).collect::<Result<Vec<_>>>() {
        Ok(v) => v,
        Err(e) if e.is_divergent() => {
            let note = "G^w diverges on the interval";
            return Ok(vec![BoundReport::inconclusive("star_log_hazard", note), BoundReport::inconclusive("weight_ratio_range", note)]);
        }
        Err(e) => return Err(e),
    };
    let verdict = scan_values(&gfr_of, scan_g, values, DEAD_BAND)?;
    let mut ratio_samples = Vec::new();
    let mut samples = Vec::new();
    for &x in x_grid {
        let wx = m.cumulative_weight(x)?;
        let lx = m.log_hazard_integral(x)?;
        for &a in alphas {
            let (wa, la) = if a == 0.0 {
                (0.0, 0.0)
            } else {
                (m.cumulative_weight(a * x)?, m.log_hazard_integral(a * x)?)
            };
            let r = wa / wx;
            ratio_samples.push((x, r, 0.5));
            samples.push((x, la, r * lx));
        }
    }
    // |r − ½| ≤ ½ encodes 0 ≤ r ≤ 1
    let ratio_check: Vec<(f64, f64, f64)> = ratio_samples.iter().map(|&(x, r, _)| (x, 0.5, (r - 0.5).abs())).collect();
    let weight_ratio = BoundReport::evaluate("weight_ratio_range", Relation::Ge, &ratio_check, 1e-12);
    let star = match verdict.label {
        MonotoneLabel::Increasing => BoundReport::evaluate("star_log_hazard", Relation::Le, &samples, BOUND_TOL),
        MonotoneLabel::Decreasing => BoundReport::evaluate("star_log_hazard", Relation::Ge, &samples, BOUND_TOL),
        MonotoneLabel::Constant => BoundReport::evaluate("star_log_hazard", Relation::Eq, &samples, BOUND_TOL),
        MonotoneLabel::NonMonotone => BoundReport::inconclusive("star_log_hazard", "G^w is not monotone on the interval"),
    };
    Ok(vec![star, weight_ratio])
}

/// Both sides of `W(x)·dA^w/dx = w(x)(h(x) − A^w(x))`, the left by central differences.
pub fn afr_derivative_identity(m: &WeightedModel, x: f64) -> Result<(f64, f64)> {
    let eta = 1e-4 * x;
    let d = (m.wafr(x + eta)? - m.wafr(x - eta)?) / (2.0 * eta);
    let lhs = m.cumulative_weight(x)? * d;
    let rhs = m.weight().eval(x) * (m.base().hazard(x) - m.wafr(x)?);
    Ok((lhs, rhs))
}

/// A weight raised to an integer power, keeping its declared direction.
pub fn weight_power(w: &WeightFunction, k: i32) -> WeightFunction {
    let inner = w.clone();
    let dir = match (w.direction(), k.signum()) {
        (_, 0) | (Direction::Constant, _) => Direction::Constant,
        (d, 1) => d,
        (Direction::Increasing, _) => Direction::Decreasing,
        (Direction::Decreasing, _) => Direction::Increasing,
        _ => Direction::Unknown,
    };
    WeightFunction::custom(format!("({})^{k}", w.name()), dir, move |x| inner.eval(x).powi(k))
}
