//! Adaptive quadrature on finite intervals.
//!
//! Regular integrands go through a globally adaptive 7/15-point
//! Gauss–Kronrod scheme: the panel carrying the largest error estimate is
//! bisected until the summed estimate meets the tolerance. Integrands that are
//! non-finite at an endpoint (integrable power or log singularities such as
//! `u^{β−1}` or `ln h(u)` with `h(0) = 0`) are first probed for divergence by
//! dyadic ε-halving and, when convergent, integrated with a tanh–sinh rule,
//! which never samples the endpoints themselves.
//!
//! Integrands must be side-effect free.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
    /// Relative distance from a singular endpoint inside which non-finite
    /// samples are dropped and down to which the divergence probe halves.
    pub singularity_offset: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_depth: 50, singularity_offset: 1e-12 }
    }
}

impl QuadratureConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32, singularity_offset: f64) -> Result<Self> {
        let cfg = Self { abs_tol, rel_tol, max_depth, singularity_offset };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if self.max_depth == 0 {
            return Err(Error::invalid("max_depth", "must be at least 1"));
        }
        if !(self.singularity_offset > 0.0 && self.singularity_offset < 1e-6) {
            return Err(Error::invalid("singularity_offset", "must lie in (0, 1e-6)"));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// An integral estimate together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// How an integrand behaves as one endpoint is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointBehavior {
    Regular,
    Convergent,
    Divergent,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn finite_at<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { what: "integrand".into(), at: x })
    }
}

/// One 15-point Kronrod application with the QUADPACK error heuristic.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = finite_at(f, center)?;
    let mut res_g = WG[3] * fc;
    let mut res_k = WGK[7] * fc;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let v1 = finite_at(f, center - dx)?;
        let v2 = finite_at(f, center + dx)?;
        f1[j] = v1;
        f2[j] = v2;
        res_k += WGK[j] * (v1 + v2);
        res_abs += WGK[j] * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (v1 + v2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((result, err))
}

const MAX_PANELS: usize = 20_000;

fn adaptive_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    let (value, error) = kronrod15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error, depth: 0 });
    let mut frozen: Vec<Panel> = Vec::new();
    let mut total = value;
    let mut total_err = error;
    let mut panels = 1usize;
    loop {
        if total_err <= cfg.tolerance(total) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= cfg.max_depth || panels >= MAX_PANELS {
            frozen.push(worst);
            if panels >= MAX_PANELS {
                break;
            }
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod15(f, worst.a, mid)?;
        let (rv, re) = kronrod15(f, mid, worst.b)?;
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        panels += 1;
        heap.push(Panel { a: worst.a, b: mid, value: lv, error: le, depth: worst.depth + 1 });
        heap.push(Panel { a: mid, b: worst.b, value: rv, error: re, depth: worst.depth + 1 });
    }
    // re-sum to shed the drift of the incremental updates
    let all = heap.iter().chain(frozen.iter());
    let (value, error) = all.fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    if error <= cfg.tolerance(value) {
        Ok(Estimate { value, error })
    } else {
        Err(Error::Accuracy { a, b, estimate: value, error })
    }
}

const TS_MAX_LEVEL: u32 = 12;

/// tanh–sinh quadrature; nodes are generated as distances from the
/// endpoints so that samples can approach a singular endpoint closely.
fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    use std::f64::consts::FRAC_PI_2;
    let width = b - a;
    let drop_zone = cfg.singularity_offset * width;

    let sample = |x: f64, dist: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else if dist <= drop_zone {
            Ok(0.0)
        } else {
            Err(Error::Domain { what: "integrand".into(), at: x })
        }
    };

    // Sum of weight·f over both nodes at abscissa t > 0, or None past the
    // point where the nodes collapse onto the endpoints.
    let pair = |t: f64| -> Result<Option<f64>> {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u).exp();
        let dist = width * e / (1.0 + e);
        let weight = 2.0 * width * FRAC_PI_2 * t.cosh() * e / ((1.0 + e) * (1.0 + e));
        let left = a + dist;
        let right = b - dist;
        if dist == 0.0 || weight == 0.0 || (left == a && right == b) {
            return Ok(None);
        }
        let mut s = 0.0;
        if left > a {
            s += weight * sample(left, dist)?;
        }
        if right < b {
            s += weight * sample(right, dist)?;
        }
        Ok(Some(s))
    };

    let center = 0.5 * (a + b);
    let mut sum = 0.5 * width * FRAC_PI_2 * sample(center, 0.5 * width)?;
    let mut k = 1.0;
    while let Some(s) = pair(k)? {
        sum += s;
        k += 1.0;
    }
    let mut h = 1.0;
    let mut prev = h * sum;
    let mut err = f64::INFINITY;
    for level in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let mut j = 1.0;
        loop {
            match pair(j * h)? {
                Some(s) => sum += s,
                None => break,
            }
            j += 2.0;
        }
        let current = h * sum;
        err = (current - prev).abs();
        prev = current;
        if level >= 3 && err <= cfg.tolerance(current) {
            return Ok(Estimate { value: current, error: err });
        }
    }
    Err(Error::Accuracy { a, b, estimate: prev, error: err })
}

/// Classifies the behaviour of `f` at endpoint `at` of the interval
/// `[at, other]` (or `[other, at]`) by integrating over dyadic shells
/// `[ε/2, ε]` for ε halving down to `singularity_offset` of the width.
/// Shell integrals that stop shrinking signal divergence.
pub fn probe_endpoint<F: Fn(f64) -> f64>(f: F, at: f64, other: f64, cfg: &QuadratureConfig) -> EndpointBehavior {
    if f(at).is_finite() {
        return EndpointBehavior::Regular;
    }
    let width = other - at;
    let halvings = ((1.0 / cfg.singularity_offset).log2().ceil() as i32).clamp(12, 60);
    let mut shells = Vec::with_capacity(halvings as usize);
    for k in 1..=halvings {
        let outer = at + width * 0.5f64.powi(k - 1);
        let inner = at + width * 0.5f64.powi(k);
        let (lo, hi) = if width > 0.0 { (inner, outer) } else { (outer, inner) };
        match kronrod15(&f, lo, hi) {
            Ok((v, _)) if v.is_finite() => shells.push(v),
            _ => return EndpointBehavior::Divergent,
        }
    }
    let tail = &shells[shells.len() - 8..];
    let same_sign = tail.iter().all(|v| *v > 0.0) || tail.iter().all(|v| *v < 0.0);
    if !same_sign {
        return EndpointBehavior::Convergent;
    }
    let stalled = tail.windows(2).all(|w| w[1].abs() >= 0.999 * w[0].abs());
    if stalled {
        EndpointBehavior::Divergent
    } else {
        EndpointBehavior::Convergent
    }
}

/// ∫ₐᵇ f with reported error at most `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate> {
    if !(a <= b) {
        return Err(Error::invalid("interval", format!("need a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let left = probe_endpoint(&f, a, b, cfg);
    let right = probe_endpoint(&f, b, a, cfg);
    if left == EndpointBehavior::Divergent || right == EndpointBehavior::Divergent {
        return Err(Error::Divergent { a, b });
    }
    if left == EndpointBehavior::Regular && right == EndpointBehavior::Regular {
        adaptive_kronrod(&f, a, b, cfg)
    } else {
        tanh_sinh(&f, a, b, cfg)
    }
}

/// Cumulative integrals `∫₀^{grid[i]} f`, built panel by panel.
pub fn integrate_to_grid<F: Fn(f64) -> f64>(f: F, grid: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    cumulative_from(f, 0.0, grid, cfg)
}

/// Cumulative integrals `∫_{start}^{grid[i]} f` (zero for grid points at or below `start`).
pub fn cumulative_from<F: Fn(f64) -> f64>(f: F, start: f64, grid: &[f64], cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("grid", "must be ascending"));
    }
    if let Some(first) = grid.first() {
        if !(*first >= 0.0) && start == 0.0 {
            return Err(Error::invalid("grid", "first point must be non-negative"));
        }
    }
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = start;
    for (index, &x) in grid.iter().enumerate() {
        if x > prev {
            let est = integrate(&f, prev, x, cfg)
                .map_err(|e| Error::Panel { index, end: x, source: Box::new(e) })?;
            acc += est.value;
            prev = x;
        }
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|u| 2.0 * u, 0.0, 2.0, &cfg()).unwrap();
        assert!((est.value - 4.0).abs() < 1e-14);
        assert_eq!(integrate(|u| u, 3.0, 3.0, &cfg()).unwrap().value, 0.0);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let est = integrate(|u: f64| 1.0 / u.sqrt(), 0.0, 1.0, &cfg()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8, "{}", est.value);
    }

    #[test]
    fn strong_singularities_and_logs() {
        // ∫₀¹ u^{-0.9} = 10
        let est = integrate(|u: f64| u.powf(-0.9), 0.0, 1.0, &cfg()).unwrap();
        assert!((est.value - 10.0).abs() < 1e-7, "{}", est.value);
        // ∫₀¹ ln u = -1
        let est = integrate(|u: f64| u.ln(), 0.0, 1.0, &cfg()).unwrap();
        assert!((est.value + 1.0).abs() < 1e-10);
        // singular at the right end: ∫₀¹ (1-u)^{-1/2} = 2, resolvable only to ulp(1) from the end
        let est = integrate(|u: f64| 1.0 / (1.0 - u).sqrt(), 0.0, 1.0, &cfg()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn gamma_weighted_integrand() {
        // ∫₀¹ 2u e^{-u} = 2 γ(2, 1)
        let est = integrate(|u: f64| 2.0 * u * (-u).exp(), 0.0, 1.0, &cfg()).unwrap();
        let oracle = 2.0 * crate::special::lower_incomplete_gamma(2.0, 1.0).unwrap();
        assert!((est.value - oracle).abs() < 1e-8);
        assert!((est.value - 0.528_482_2).abs() < 1e-7);
    }

    #[test]
    fn divergence_is_detected() {
        assert!(matches!(integrate(|u: f64| 1.0 / u, 0.0, 1.0, &cfg()), Err(Error::Divergent { .. })));
        assert!(matches!(integrate(|u: f64| u.powi(-2), 0.0, 1.0, &cfg()), Err(Error::Divergent { .. })));
        assert_eq!(probe_endpoint(|u: f64| u.powf(-0.5), 0.0, 1.0, &cfg()), EndpointBehavior::Convergent);
        assert_eq!(probe_endpoint(|u: f64| u, 0.0, 1.0, &cfg()), EndpointBehavior::Regular);
    }

    #[test]
    fn interior_non_finite_is_domain_error() {
        let r = integrate(|u: f64| if (u - 0.5).abs() < 0.3 { f64::NAN } else { 1.0 }, 0.0, 1.0, &cfg());
        assert!(matches!(r, Err(Error::Domain { .. })));
    }

    #[test]
    fn depth_limit_reports_accuracy_failure() {
        let tight = QuadratureConfig { max_depth: 1, abs_tol: 1e-15, rel_tol: 1e-15, ..cfg() };
        let r = integrate(|u: f64| (40.0 * u).sin().abs(), 0.0, 10.0, &tight);
        match r {
            Err(Error::Accuracy { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected accuracy failure, got {other:?}"),
        }
    }

    #[test]
    fn grid_cumulative() {
        let c = integrate_to_grid(|_| 1.0, &[1.0, 2.0, 3.0], &cfg()).unwrap();
        for (v, e) in c.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-14);
        }
        let c = integrate_to_grid(|u| 2.0 * u, &[1.0, 2.0], &cfg()).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 4.0).abs() < 1e-13);
        let c = integrate_to_grid(|u: f64| (-u).exp(), &[1.0, 2.0], &cfg()).unwrap();
        assert!((c[0] - 0.632_120_6).abs() < 1e-7 && (c[0] - (1.0 - (-1.0f64).exp())).abs() < 1e-9);
        assert!((c[1] - 0.864_664_7).abs() < 1e-7 && (c[1] - (1.0 - (-2.0f64).exp())).abs() < 1e-9);
        assert!(integrate_to_grid(|u| u, &[2.0, 1.0], &cfg()).is_err());
    }

    #[test]
    fn grid_errors_name_the_panel() {
        let r = integrate_to_grid(|u: f64| if u > 1.5 && u < 1.7 { f64::NAN } else { 1.0 }, &[1.0, 2.0, 3.0], &cfg());
        match r {
            Err(Error::Panel { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(0.0, 1e-10, 50, 1e-12).is_err());
        assert!(QuadratureConfig::new(1e-12, 1e-10, 0, 1e-12).is_err());
        assert!(QuadratureConfig::new(1e-12, 1e-10, 50, 1e-5).is_err());
        assert!(QuadratureConfig::new(1e-12, 1e-10, 50, 1e-9).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn additivity(a in 0.0f64..2.0, d1 in 0.01f64..3.0, d2 in 0.01f64..3.0) {
            let f = |u: f64| (u.sin() + 1.5) * (-0.3 * u).exp();
            let b = a + d1;
            let c = b + d2;
            let whole = integrate(f, a, c, &cfg()).unwrap().value;
            let parts = integrate(f, a, b, &cfg()).unwrap().value + integrate(f, b, c, &cfg()).unwrap().value;
            prop_assert!((whole - parts).abs() <= 1e-9 * (1.0 + whole.abs()));
        }

        #[test]
        fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, b in 0.1f64..5.0) {
            let f = |u: f64| u.powf(1.5) + 0.2;
            let g = |u: f64| (2.0 * u).cos();
            let combo = integrate(|u| alpha * f(u) + beta * g(u), 0.0, b, &cfg()).unwrap().value;
            let sep = alpha * integrate(f, 0.0, b, &cfg()).unwrap().value + beta * integrate(g, 0.0, b, &cfg()).unwrap().value;
            prop_assert!((combo - sep).abs() <= 1e-9 * (1.0 + combo.abs()));
        }

        #[test]
        fn positivity(shape in 0.2f64..3.0, b in 0.1f64..10.0) {
            let r = integrate(|u: f64| u.powf(shape - 1.0) * (-u).exp(), 0.0, b, &cfg()).unwrap();
            prop_assert!(r.value >= -cfg().abs_tol);
        }
    }
}
