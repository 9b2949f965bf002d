//! Finite mixtures, weighted series systems, and a search for a series
//! system of Iw-AFR components whose own AFR is not monotone.

use std::sync::Arc;

use serde::Serialize;

use crate::aging::{classify, AgingClass, AgingReport};
use crate::error::{Error, Result};
use crate::models::{scan_grid, scan_values, Direction, Hazard, HazardModel, MonotoneLabel, MonotoneVerdict, WeightFunction, DEAD_BAND};
use crate::weighted::WeightedModel;

/// Tolerance on `Σπᵢ = 1`.
pub const PROPORTION_TOL: f64 = 1e-12;

/// A finite mixture `F = Σπᵢ Fᵢ`.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    components: Vec<HazardModel>,
    proportions: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(components: Vec<HazardModel>, proportions: Vec<f64>) -> Result<Self> {
        if components.is_empty() || components.len() != proportions.len() {
            return Err(Error::invalid("proportions", "need one proportion per component and at least one component"));
        }
        if proportions.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::invalid("proportions", "must be positive"));
        }
        let total: f64 = proportions.iter().sum();
        if (total - 1.0).abs() > PROPORTION_TOL {
            return Err(Error::invalid("proportions", format!("must sum to 1, got {total}")));
        }
        Ok(Self { components, proportions })
    }

    pub fn components(&self) -> &[HazardModel] {
        &self.components
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    /// Effective weights `pᵢ(x) = πᵢF̄ᵢ(x)/Σπⱼ F̄ⱼ(x)`, computed in log space.
    pub fn effective_weights(&self, x: f64) -> Result<Vec<f64>> {
        if !(x >= 0.0) {
            return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
        }
        let logs: Vec<f64> = self
            .components
            .iter()
            .zip(&self.proportions)
            .map(|(c, p)| Ok(p.ln() - c.cumulative_hazard(x)?))
            .collect::<Result<_>>()?;
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(Error::SupportExhausted { x });
        }
        let mut p: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= total);
        // snap to multiples of 2^-53 so every partial sum is exact, then give the
        // residue to the largest weight
        let unit = f64::EPSILON / 2.0;
        let big = (0..p.len()).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap_or(0);
        let mut rest = 0.0;
        for (i, v) in p.iter_mut().enumerate() {
            if i != big {
                *v = (*v / unit).round() * unit;
                rest += *v;
            }
        }
        p[big] = 1.0 - rest;
        Ok(p)
    }

    /// Mixture hazard `Σpᵢ(x)hᵢ(x)` with the effective weights.
    pub fn hazard_with_weights(&self, x: f64) -> Result<(f64, Vec<f64>)> {
        let p = self.effective_weights(x)?;
        let h = p.iter().zip(&self.components).map(|(p, c)| p * c.hazard(x)).sum();
        Ok((h, p))
    }
}

/// Mixture hazard and effective weights at `x`.
pub fn mixture_hazard(spec: &MixtureSpec, x: f64) -> Result<(f64, Vec<f64>)> {
    spec.hazard_with_weights(x)
}

/// A series system with hazard `Σhᵢ(x)wᵢ(x)`.
#[derive(Debug, Clone)]
pub struct WeightedSeriesSpec {
    components: Vec<(Arc<dyn Hazard>, WeightFunction)>,
    weights_sum_to_one: bool,
}

impl WeightedSeriesSpec {
    /// Builds a series spec; with `weights_sum_to_one` the constraint is checked on `validation_grid`.
    pub fn new(
        components: Vec<(Arc<dyn Hazard>, WeightFunction)>,
        weights_sum_to_one: bool,
        validation_grid: &[f64],
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("components", "need at least one"));
        }
        let spec = Self { components, weights_sum_to_one };
        if weights_sum_to_one {
            let gap = spec.weight_sum_gap(validation_grid);
            if gap > 1e-9 {
                return Err(Error::invalid("weights", format!("sum deviates from 1 by {gap:e}")));
            }
        }
        Ok(spec)
    }

    pub fn components(&self) -> &[(Arc<dyn Hazard>, WeightFunction)] {
        &self.components
    }

    pub fn weights_sum_to_one(&self) -> bool {
        self.weights_sum_to_one
    }

    /// `max |Σwᵢ(x) − 1|` over `grid`.
    pub fn weight_sum_gap(&self, grid: &[f64]) -> f64 {
        grid.iter()
            .map(|&x| (self.components.iter().map(|(_, w)| w.eval(x)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl Hazard for WeightedSeriesSpec {
    fn hazard(&self, x: f64) -> f64 {
        self.components.iter().map(|(h, w)| h.hazard(x) * w.eval(x)).sum()
    }

    fn support(&self) -> (f64, f64) {
        self.components.iter().fold((0.0, f64::INFINITY), |(lo, hi), (h, _)| {
            let (a, b) = h.support();
            (lo.max(a), hi.min(b))
        })
    }
}

/// Series system hazard at `x`.
pub fn series_hazard(spec: &WeightedSeriesSpec, x: f64) -> f64 {
    spec.hazard(x)
}

/// Recasts a mixture as a weighted series system with `wᵢ = pᵢ`.
pub fn mixture_as_series(spec: &MixtureSpec) -> WeightedSeriesSpec {
    let shared = Arc::new(spec.clone());
    let components = spec
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m = shared.clone();
            let w = WeightFunction::custom(format!("p_{}", i + 1), Direction::Unknown, move |x| {
                m.effective_weights(x).map(|p| p[i]).unwrap_or(f64::NAN)
            });
            (Arc::new(c.clone()) as Arc<dyn Hazard>, w)
        })
        .collect();
    WeightedSeriesSpec { components, weights_sum_to_one: true }
}

/// Parameter box for the non-closure search: component 1 is Weibull(α, β)
/// weighted by `e^{nt}`, component 2 Weibull(a, b) weighted by `1 − e^{nt}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchBox {
    pub alpha: f64,
    pub a: f64,
    pub betas: Vec<f64>,
    pub bs: Vec<f64>,
    pub ns: Vec<f64>,
    pub interval: (f64, f64),
    pub grid_size: usize,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            a: 1.0,
            betas: vec![5.0, 4.0, 3.0, 2.0, 6.0],
            bs: vec![1.1, 1.5, 2.0],
            ns: vec![-1.0, -0.5, -2.0],
            interval: (0.05, 20.0),
            grid_size: 200,
        }
    }
}

impl SearchBox {
    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.a > 0.0) {
            return Err(Error::invalid("search_box", "alpha and a must be positive"));
        }
        if self.betas.iter().chain(&self.bs).any(|s| !(*s > 1.0)) {
            return Err(Error::invalid("search_box", "shapes beta and b must exceed 1"));
        }
        if self.ns.iter().any(|n| !(*n < 0.0)) {
            return Err(Error::invalid("search_box", "n must be negative"));
        }
        if self.betas.is_empty() || self.bs.is_empty() || self.ns.is_empty() {
            return Err(Error::invalid("search_box", "every parameter range needs a value"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesParameters {
    pub alpha: f64,
    pub beta: f64,
    pub n: f64,
    pub a: f64,
    pub b: f64,
}

impl SeriesParameters {
    /// The two weighted components of the series system.
    pub fn components(&self) -> Result<[WeightedModel; 2]> {
        Ok([
            WeightedModel::new(HazardModel::weibull(self.alpha, self.beta)?, WeightFunction::exponential(self.n)?),
            WeightedModel::new(HazardModel::weibull(self.a, self.b)?, WeightFunction::one_minus_exponential(self.n)?),
        ])
    }

    /// The series system `h₁w₁ + h₂w₂` under a constant weight.
    pub fn system(&self) -> Result<WeightedModel> {
        let [c1, c2] = self.components()?;
        let spec = WeightedSeriesSpec::new(
            vec![(c1.base().clone(), c1.weight().clone()), (c2.base().clone(), c2.weight().clone())],
            false,
            &[],
        )?;
        Ok(WeightedModel::from_arc(Arc::new(spec), WeightFunction::constant()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub parameters: SeriesParameters,
    pub components: [AgingReport; 2],
    /// AFR `(1/t)∫₀ᵗ h` of the series system.
    pub system_afr: MonotoneVerdict,
    /// The same scan on a four times finer grid.
    pub refined_system_afr: MonotoneVerdict,
    pub change_points: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CounterexampleOutcome {
    Found(Box<Witness>),
    NotFound { cells_searched: usize, search_box: SearchBox },
}

impl CounterexampleOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            CounterexampleOutcome::Found(w) => Some(w),
            CounterexampleOutcome::NotFound { .. } => None,
        }
    }
}

/// Scans the plain AFR of the series system on `grid_size` points of `interval`.
pub fn system_afr_scan(p: &SeriesParameters, interval: (f64, f64), grid_size: usize) -> Result<MonotoneVerdict> {
    let system = p.system()?;
    let grid = scan_grid(interval, grid_size)?;
    let values = system
        .cumulative_hazard_grid(&grid)
        .into_iter()
        .zip(&grid)
        .map(|(k, x)| Ok(k? / x))
        .collect::<Result<Vec<_>>>()?;
    scan_values(&|x| system.wafr(x), grid, values, DEAD_BAND)
}

fn component_is_iw_afr(r: &AgingReport) -> bool {
    r.afr.as_ref().is_some_and(|v| v.label == MonotoneLabel::Increasing) && r.has(AgingClass::IwAfr)
}

/// Evaluates one parameter cell; returns a witness if both components are
/// Iw-AFR and the system AFR changes direction on both grids.
pub fn check_cell(p: SeriesParameters, interval: (f64, f64), grid_size: usize) -> Result<Option<Witness>> {
    let system_afr = system_afr_scan(&p, interval, grid_size)?;
    if system_afr.label != MonotoneLabel::NonMonotone {
        return Ok(None);
    }
    let refined = system_afr_scan(&p, interval, 4 * grid_size)?;
    if refined.label != MonotoneLabel::NonMonotone {
        return Ok(None);
    }
    let [c1, c2] = p.components()?;
    let r1 = classify(&c1, Some(interval), grid_size)?;
    let r2 = classify(&c2, Some(interval), grid_size)?;
    if !(component_is_iw_afr(&r1) && component_is_iw_afr(&r2)) {
        return Ok(None);
    }
    Ok(Some(Witness {
        parameters: p,
        components: [r1, r2],
        change_points: refined.change_points.clone(),
        system_afr,
        refined_system_afr: refined,
    }))
}

/// Sweeps the box in order `β`, `b`, `n` and returns the first witness.
pub fn counterexample_nonclosure(search_box: &SearchBox) -> Result<CounterexampleOutcome> {
    search_box.validate()?;
    let mut cells = 0;
    for &beta in &search_box.betas {
        for &b in &search_box.bs {
            for &n in &search_box.ns {
                cells += 1;
                let p = SeriesParameters { alpha: search_box.alpha, beta, n, a: search_box.a, b };
                if let Some(w) = check_cell(p, search_box.interval, search_box.grid_size)? {
                    return Ok(CounterexampleOutcome::Found(Box::new(w)));
                }
            }
        }
    }
    Ok(CounterexampleOutcome::NotFound { cells_searched: cells, search_box: search_box.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(l: f64) -> HazardModel {
        HazardModel::exponential(l).unwrap()
    }

    #[test]
    fn identical_components() {
        let m = MixtureSpec::new(vec![exp(1.0), exp(1.0)], vec![0.5, 0.5]).unwrap();
        for x in [0.0, 1.0, 7.0] {
            assert!((mixture_hazard(&m, x).unwrap().0 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn exponential_pair() {
        let m = MixtureSpec::new(vec![exp(1.0), exp(2.0)], vec![0.5, 0.5]).unwrap();
        let (h, p) = mixture_hazard(&m, 1.0).unwrap();
        let e1 = (-1f64).exp();
        let e2 = (-2f64).exp();
        assert!((p[0] - e1 / (e1 + e2)).abs() < 1e-15);
        assert!((h - (e1 + 2.0 * e2) / (e1 + e2)).abs() < 1e-14);
        assert!((h - 1.2689414).abs() < 1e-7);
        let (h0, p0) = mixture_hazard(&m, 0.0).unwrap();
        assert_eq!(p0, vec![0.5, 0.5]);
        assert_eq!(h0, 1.5);
    }

    #[test]
    fn proportions_validated() {
        assert!(MixtureSpec::new(vec![exp(1.0), exp(2.0)], vec![0.5, 0.6]).is_err());
        assert!(MixtureSpec::new(vec![exp(1.0)], vec![0.5, 0.5]).is_err());
        assert!(MixtureSpec::new(vec![exp(1.0), exp(2.0)], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn worked_series_system() {
        let c1: Arc<dyn Hazard> = Arc::new(HazardModel::weibull(1.0, 3.0).unwrap());
        let c2: Arc<dyn Hazard> = Arc::new(HazardModel::weibull(1.0, 2.0).unwrap());
        let s = WeightedSeriesSpec::new(
            vec![(c1, WeightFunction::exponential(-1.0).unwrap()), (c2, WeightFunction::one_minus_exponential(-1.0).unwrap())],
            true,
            &[0.0, 0.5, 1.0, 5.0],
        )
        .unwrap();
        let e = (-1f64).exp();
        assert!((series_hazard(&s, 1.0) - (3.0 * e + 2.0 * (1.0 - e))).abs() < 1e-14);
        assert!((series_hazard(&s, 1.0) - 2.3678794).abs() < 1e-7);
    }

    #[test]
    fn mixture_equals_series() {
        let m = MixtureSpec::new(
            vec![HazardModel::weibull(1.0, 2.0).unwrap(), HazardModel::weibull(0.5, 0.7).unwrap(), exp(3.0)],
            vec![0.2, 0.3, 0.5],
        )
        .unwrap();
        let s = mixture_as_series(&m);
        let grid: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
        assert_eq!(s.weight_sum_gap(&grid), 0.0);
        for &x in &grid {
            let (a, b) = (series_hazard(&s, x), mixture_hazard(&m, x).unwrap().0);
            // the shape-0.7 component has an infinite hazard at 0
            assert!(a == b || (a - b).abs() <= 1e-12, "{x}: {a} vs {b}");
        }
        let single = MixtureSpec::new(vec![exp(2.0)], vec![1.0]).unwrap();
        assert_eq!(mixture_as_series(&single).components()[0].1.eval(3.0), 1.0);
    }

    #[test]
    fn negative_control_finds_nothing() {
        let b = SearchBox { betas: vec![3.0], bs: vec![3.0], ns: vec![-1.0], ..SearchBox::default() };
        let out = counterexample_nonclosure(&b).unwrap();
        assert!(matches!(out, CounterexampleOutcome::NotFound { cells_searched: 1, .. }));
    }

    #[test]
    fn box_validation() {
        let b = SearchBox { ns: vec![0.5], ..SearchBox::default() };
        assert!(counterexample_nonclosure(&b).is_err());
        let b = SearchBox { bs: vec![1.0], ..SearchBox::default() };
        assert!(counterexample_nonclosure(&b).is_err());
    }

    #[test]
    fn system_hazard_shape() {
        let p = SeriesParameters { alpha: 1.0, beta: 5.0, n: -1.0, a: 1.0, b: 1.1 };
        let s = p.system().unwrap();
        let h = |t: f64| 5.0 * t.powi(4) * (-t).exp() + 1.1 * t.powf(0.1) * (1.0 - (-t).exp());
        for t in [0.5, 4.0, 15.0] {
            assert!((s.base().hazard(t) - h(t)).abs() < 1e-12);
        }
        assert!(h(4.0) > 24.0 && h(15.0) < 1.6);
    }
}
