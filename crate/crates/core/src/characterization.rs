//! Consistency tests for the characterizations by means: equal means imply an
//! exponential law, and a mean proportional to the hazard pins down its form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{scan_values, Direction, Hazard, MonotoneLabel, WeightFamily, WeightFunction, DEAD_BAND};
use crate::weighted::{MeanTriple, WeightedModel};

/// Default relative threshold for "consistent with".
pub const DEFAULT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeanKind {
    A,
    G,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeanPair {
    AG,
    GH,
    AH,
}

impl MeanPair {
    pub const ALL: [MeanPair; 3] = [MeanPair::AG, MeanPair::GH, MeanPair::AH];

    fn kinds(self) -> (MeanKind, MeanKind) {
        match self {
            MeanPair::AG => (MeanKind::A, MeanKind::G),
            MeanPair::GH => (MeanKind::G, MeanKind::H),
            MeanPair::AH => (MeanKind::A, MeanKind::H),
        }
    }
}

fn pick(t: &MeanTriple, kind: MeanKind) -> Option<f64> {
    match kind {
        MeanKind::A => t.afr.value(),
        MeanKind::G => t.gfr.value(),
        MeanKind::H => t.hfr.value(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    ConsistentWith,
    InconsistentWith,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterizationVerdict {
    pub id: String,
    /// Largest relative deviation over the grid.
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Consistency,
    /// Abscissa of the largest deviation.
    pub witness_x: Option<f64>,
    pub note: Option<String>,
}

impl CharacterizationVerdict {
    fn from_statistic(id: String, statistic: f64, threshold: f64, witness_x: Option<f64>) -> Self {
        let verdict = if statistic <= threshold { Consistency::ConsistentWith } else { Consistency::InconsistentWith };
        Self { id, statistic, threshold, verdict, witness_x, note: None }
    }

    fn inconclusive(id: String, threshold: f64, note: impl Into<String>) -> Self {
        Self { id, statistic: f64::NAN, threshold, verdict: Consistency::Inconclusive, witness_x: None, note: Some(note.into()) }
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict == Consistency::ConsistentWith
    }
}

/// Outcome of [`test_exponentiality_via_mean_equality`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentialityReport {
    pub verdict: CharacterizationVerdict,
    /// Relative spread `max h / min h − 1` of the hazard over the grid.
    pub hazard_spread: f64,
    /// Whether the hazard is flat within the threshold, as equality of means demands.
    pub hazard_flat: bool,
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::invalid("x_grid", "must be non-empty with positive finite points"));
    }
    Ok(())
}

/// Equality of two weighted means on the grid, read as evidence for an exponential law.
pub fn test_exponentiality_via_mean_equality(
    m: &WeightedModel,
    pair: MeanPair,
    x_grid: &[f64],
    threshold: f64,
) -> Result<ExponentialityReport> {
    check_grid(x_grid)?;
    let id = format!("mean_equality_{pair:?}");
    let (p, q) = pair.kinds();
    let mut stat = 0.0f64;
    let mut witness = None;
    let mut divergent = false;
    for x in x_grid {
        let t = m.mean_triple(*x)?;
        match (pick(&t, p), pick(&t, q)) {
            (Some(a), Some(b)) => {
                let g = rel_gap(a, b);
                if g > stat || witness.is_none() {
                    stat = stat.max(g);
                    witness = Some(*x);
                }
            }
            _ => divergent = true,
        }
    }
    let verdict = if divergent {
        CharacterizationVerdict::inconclusive(id, threshold, "a mean diverges on the grid")
    } else {
        CharacterizationVerdict::from_statistic(id, stat, threshold, witness)
    };
    let (lo, hi) = x_grid
        .iter()
        .map(|x| m.base().hazard(*x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), h| (lo.min(h), hi.max(h)));
    let hazard_spread = if lo > 0.0 { hi / lo - 1.0 } else { f64::INFINITY };
    Ok(ExponentialityReport { verdict, hazard_spread, hazard_flat: hazard_spread <= threshold })
}

/// Hazard whose chosen weighted mean equals `ratio·h`, built from the
/// cumulative weight `W` as `h = k·W^p` (`A`, `G`) or `(W/(k·ratio))^p` (`H`).
#[derive(Debug, Clone)]
pub struct RecoveredHazard {
    weight: WeightFunction,
    which: MeanKind,
    ratio: f64,
    k: f64,
    exponent: f64,
}

impl RecoveredHazard {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn which(&self) -> MeanKind {
        self.which
    }

    /// Weibull shape `(n − a·n + 1)/a`-type value when the weight is a power `x^n`.
    pub fn weibull_shape(&self) -> Option<f64> {
        match self.weight.spec() {
            WeightFamily::Power { c } if self.which == MeanKind::A => Some((c - self.ratio * c + 1.0) / self.ratio),
            WeightFamily::Power { c } => Some((c + 1.0) * self.exponent + 1.0),
            WeightFamily::Constant => Some(self.exponent + 1.0),
            _ => None,
        }
    }

    fn scale(&self) -> f64 {
        match self.which {
            MeanKind::H => (1.0 / (self.k * self.ratio)).powf(self.exponent),
            _ => self.k,
        }
    }
}

impl Hazard for RecoveredHazard {
    fn hazard(&self, x: f64) -> f64 {
        if self.exponent == 0.0 {
            return self.scale();
        }
        let w = self.weight.cumulative(x).unwrap_or(f64::NAN);
        self.scale() * w.powf(self.exponent)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    fn direction(&self) -> Direction {
        if self.exponent > 0.0 {
            Direction::Increasing
        } else if self.exponent < 0.0 {
            Direction::Decreasing
        } else {
            Direction::Constant
        }
    }
}

/// Hazard for which the chosen weighted mean is `ratio` times the hazard.
pub fn recover_hazard_from_proportionality(
    w: &WeightFunction,
    which: MeanKind,
    ratio: f64,
    k: f64,
) -> Result<RecoveredHazard> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::invalid("ratio", format!("must be positive, got {ratio}")));
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid("k", format!("must be positive, got {k}")));
    }
    let exponent = match which {
        MeanKind::A => (1.0 - ratio) / ratio,
        MeanKind::G => (std::f64::consts::E / ratio).ln() - 1.0,
        MeanKind::H => 1.0 - ratio,
    };
    if exponent <= -1.0 {
        return Err(Error::invalid(
            "ratio",
            format!("exponent {exponent} <= -1 gives a hazard that is not locally integrable"),
        ));
    }
    Ok(RecoveredHazard { weight: w.clone(), which, ratio, k, exponent })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionalityReport {
    /// Median of `mean(x)/h(x)` over the grid.
    pub ratio: f64,
    pub verdict: CharacterizationVerdict,
    pub hazard_label: MonotoneLabel,
    /// Whether the scanned hazard direction matches the one implied by the
    /// ratio (`< 1` increasing, `> 1` decreasing); `None` unless consistent.
    pub direction_agrees: Option<bool>,
}

/// Whether the chosen mean is a constant multiple of the hazard on the grid.
pub fn test_proportionality(
    m: &WeightedModel,
    which: MeanKind,
    x_grid: &[f64],
    threshold: f64,
) -> Result<ProportionalityReport> {
    check_grid(x_grid)?;
    let mut grid = x_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut ratios = Vec::with_capacity(grid.len());
    for &x in &grid {
        let h = m.base().hazard(x);
        if !(h > 0.0) {
            return Err(Error::DegenerateHazard { x });
        }
        let t = m.mean_triple(x)?;
        match pick(&t, which) {
            Some(v) => ratios.push(v / h),
            None => return Err(Error::Divergent { a: 0.0, b: x }),
        }
    }
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let (stat, at) = ratios
        .iter()
        .zip(&grid)
        .map(|(r, x)| ((r / median - 1.0).abs(), *x))
        .fold((0.0f64, None), |acc, (d, x)| if d > acc.0 || acc.1.is_none() { (d.max(acc.0), Some(x)) } else { acc });
    let verdict = CharacterizationVerdict::from_statistic(format!("proportional_{which:?}"), stat, threshold, at);

    let hazard_label = if grid.len() >= 2 {
        let values = grid.iter().map(|x| m.base().hazard(*x)).collect();
        let base = m.base().clone();
        scan_values(&|x| Ok(base.hazard(x)), grid.clone(), values, DEAD_BAND)?.label
    } else {
        MonotoneLabel::Constant
    };
    let direction_agrees = verdict.is_consistent().then(|| {
        if (median - 1.0).abs() <= threshold {
            hazard_label == MonotoneLabel::Constant
        } else if median < 1.0 {
            hazard_label.is_nondecreasing()
        } else {
            hazard_label.is_nonincreasing()
        }
    });
    Ok(ProportionalityReport { ratio: median, verdict, hazard_label, direction_agrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::HazardModel;

    fn grid() -> Vec<f64> {
        (1..=20).map(|i| 0.25 * i as f64).collect()
    }

    #[test]
    fn exponential_means_agree() {
        let m = WeightedModel::new(HazardModel::exponential(0.7).unwrap(), WeightFunction::power(2.0).unwrap());
        for pair in MeanPair::ALL {
            let r = test_exponentiality_via_mean_equality(&m, pair, &grid(), 1e-9).unwrap();
            assert!(r.verdict.is_consistent() && r.hazard_flat, "{r:?}");
        }
    }

    #[test]
    fn rayleigh_arithmetic_vs_geometric() {
        let m = WeightedModel::new(HazardModel::weibull(1.0, 2.0).unwrap(), WeightFunction::constant());
        let r = test_exponentiality_via_mean_equality(&m, MeanPair::AG, &grid(), DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.verdict.verdict, Consistency::InconsistentWith);
        // A = x, G = 2x/e
        assert!((r.verdict.statistic - (1.0 - 2.0 / std::f64::consts::E)).abs() < 1e-9);
        let r = test_exponentiality_via_mean_equality(&m, MeanPair::GH, &grid(), DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.verdict.verdict, Consistency::Inconclusive);
    }

    #[test]
    fn nearly_exponential_weibull() {
        let m = WeightedModel::new(HazardModel::weibull(1.0, 1.0000001).unwrap(), WeightFunction::constant());
        let r = test_exponentiality_via_mean_equality(&m, MeanPair::AG, &grid(), 1e-4).unwrap();
        assert!(r.verdict.is_consistent() && r.hazard_flat);
    }

    #[test]
    fn recovered_cubic_weibull() {
        let w = WeightFunction::power(1.0).unwrap();
        let h = recover_hazard_from_proportionality(&w, MeanKind::A, 0.5, 2.0).unwrap();
        assert_eq!(h.weibull_shape(), Some(3.0));
        for x in [0.5, 1.0, 3.0] {
            assert!((h.hazard(x) - x * x).abs() < 1e-12);
        }
        let m = WeightedModel::new(h, w);
        let r = test_proportionality(&m, MeanKind::A, &grid(), DEFAULT_THRESHOLD).unwrap();
        assert!((r.ratio - 0.5).abs() < 1e-6 && r.verdict.is_consistent());
        assert_eq!(r.direction_agrees, Some(true));
    }

    #[test]
    fn recovery_edges() {
        let w = WeightFunction::power(1.0).unwrap();
        let h = recover_hazard_from_proportionality(&w, MeanKind::A, 1.0, 2.5).unwrap();
        assert_eq!(h.hazard(3.0), 2.5);
        assert_eq!(h.direction(), Direction::Constant);
        let e = std::f64::consts::E;
        assert!(matches!(
            recover_hazard_from_proportionality(&w, MeanKind::G, e, 1.0),
            Err(Error::Validation { .. })
        ));
        assert!(recover_hazard_from_proportionality(&w, MeanKind::A, 0.0, 1.0).is_err());
    }

    #[test]
    fn round_trips_for_each_mean() {
        let g = grid();
        for which in [MeanKind::A, MeanKind::G, MeanKind::H] {
            for ratio in [0.6, 0.9, 1.4] {
                for c in [0.0, 1.0, 2.0] {
                    let w = WeightFunction::power(c).unwrap();
                    let h = recover_hazard_from_proportionality(&w, which, ratio, 1.5).unwrap();
                    let m = WeightedModel::new(h, w);
                    let r = test_proportionality(&m, which, &g, DEFAULT_THRESHOLD).unwrap();
                    assert!((r.ratio - ratio).abs() < 1e-6, "{which:?} {ratio} {c}: {}", r.ratio);
                }
            }
        }
    }

    #[test]
    fn drifting_ratio() {
        let m = WeightedModel::new(HazardModel::weibull(1.0, 2.0).unwrap(), WeightFunction::exponential(1.0).unwrap());
        let r = test_proportionality(&m, MeanKind::A, &grid(), DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.verdict.verdict, Consistency::InconsistentWith);
        assert_eq!(r.direction_agrees, None);
        let e = WeightedModel::new(HazardModel::exponential(2.0).unwrap(), WeightFunction::constant());
        for which in [MeanKind::A, MeanKind::G, MeanKind::H] {
            assert!((test_proportionality(&e, which, &grid(), DEFAULT_THRESHOLD).unwrap().ratio - 1.0).abs() < 1e-10);
        }
    }
}
