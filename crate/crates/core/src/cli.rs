//! Command-line front end: evaluates measures on grids, classifies models,
//! runs verification suites and writes CSV or JSON.
//!
//! Exit status is 0 when every requested check passes, 1 when a check
//! fails, 2 for parse or validation errors and 3 for numerical failures.

use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::aging::{bound_check_means, classify, gfr_star_shaped_check, sequence_weight_bounds, star_shaped_check, BoundReport, DEFAULT_GRID};
use crate::characterization::{test_exponentiality_via_mean_equality, MeanPair};
use crate::error::Error;
use crate::models::{scan_grid, HazardModel, ModelSpec, WeightFunction};
use crate::quadrature::QuadratureConfig;
use crate::quantile::{phm_quantile, qa, quantile_means, u_grid, QuantileModel, QuantileOptions};
use crate::systems::{counterexample_nonclosure, mixture_as_series, mixture_hazard, series_hazard, CounterexampleOutcome, MixtureSpec, SearchBox};
use crate::weighted::{MeanValue, WeightedModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eval,
    Classify,
    Verify,
    Quantile,
    System,
    Counterexample,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Abscissae given as `start:stop:count` or as a comma-separated list.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range { start: f64, stop: f64, count: usize },
    List(Vec<f64>),
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number `{t}`: {e}"));
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("expected start:stop:count, got `{s}`"));
            }
            let (start, stop) = (num(parts[0])?, num(parts[1])?);
            let count: usize = parts[2].trim().parse().map_err(|e| format!("bad count `{}`: {e}", parts[2]))?;
            if count < 2 {
                return Err(format!("count must be at least 2, got {count}"));
            }
            if !(start < stop && start.is_finite() && stop.is_finite()) {
                return Err(format!("need finite start < stop, got {start}:{stop}"));
            }
            Ok(GridSpec::Range { start, stop, count })
        } else {
            let list = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
            if list.is_empty() || list.iter().any(|x| !x.is_finite()) {
                return Err("grid list must hold finite numbers".into());
            }
            Ok(GridSpec::List(list))
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Range { start, stop, count } => {
                let step = (stop - start) / (*count - 1) as f64;
                (0..*count).map(|i| if i + 1 == *count { *stop } else { start + step * i as f64 }).collect()
            }
            GridSpec::List(v) => v.clone(),
        }
    }

    fn bounds(&self) -> (f64, f64, usize) {
        let p = self.points();
        let lo = p.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi, p.len())
    }
}

/// Parsed command line.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "hazard-means", version, about = "Weighted mean failure rates and aging classes")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON model document `{"hazard": {...}, "weight": {...}}` (a mixture document for `system`).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// `start:stop:count` or `x1,x2,...`.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Verification suite: chain, bounds, star, characterization, transmission, mixture or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Proportional-hazards factor for `quantile`.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative quadrature tolerance.
    #[arg(long)]
    pub tol_quad: Option<f64>,
    /// Tolerance applied by the checks.
    #[arg(long)]
    pub tol_check: Option<f64>,
}

#[derive(Debug)]
pub struct CliError {
    pub status: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { status: EXIT_USAGE, kind: "validation", message: message.into() }
    }

    pub fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind, "message": self.message}}).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let usage = matches!(e, Error::Validation { .. } | Error::Unsupported(_) | Error::Defective(_));
        Self {
            status: if usage { EXIT_USAGE } else { EXIT_NUMERICAL },
            kind: if usage { "validation" } else { "numerical" },
            message: e.to_string(),
        }
    }
}

/// Rendered output and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub body: String,
    pub status: i32,
}

/// Model documents accepted by `system`.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct MixtureDocument {
    pub components: Vec<HazardModel>,
    pub proportions: Vec<f64>,
}

/// Formats `v` with nine significant digits.
pub fn fmt9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        format!("{:.*}", (8 - mag) as usize, v)
    } else {
        format!("{v:.8e}")
    }
}

fn fmt_mean(v: MeanValue) -> String {
    match v {
        MeanValue::Finite(x) => fmt9(x),
        MeanValue::Divergent => "div".into(),
    }
}

fn mean_json(v: MeanValue) -> Value {
    match v {
        MeanValue::Finite(x) => json!(x),
        MeanValue::Divergent => json!({"divergent": true}),
    }
}

fn quad_config(cfg: &RunConfig) -> Result<QuadratureConfig, CliError> {
    let mut q = QuadratureConfig::default();
    if let Some(t) = cfg.tol_quad {
        q.rel_tol = t;
        q.validate().map_err(CliError::from)?;
    }
    Ok(q)
}

fn load_spec(cfg: &RunConfig) -> Result<ModelSpec, CliError> {
    let path = cfg.model.as_ref().ok_or_else(|| CliError::usage("--model is required for this command"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    ModelSpec::from_json(&text).map_err(|e| CliError::usage(format!("invalid model document: {e}")))
}

fn load_model(cfg: &RunConfig) -> Result<(ModelSpec, WeightedModel), CliError> {
    let spec = load_spec(cfg)?;
    let m = WeightedModel::from_spec(&spec).with_quadrature(quad_config(cfg)?);
    Ok((spec, m))
}

fn x_grid(cfg: &RunConfig, m: &WeightedModel, default_count: usize) -> Result<Vec<f64>, CliError> {
    let grid = match &cfg.grid {
        Some(g) => g.points(),
        None => scan_grid(m.scan_interval()?, default_count)?,
    };
    if grid.iter().any(|x| !(*x > 0.0)) {
        return Err(CliError::usage("grid points must be positive"));
    }
    Ok(grid)
}

fn to_json(v: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::usage(format!("cannot serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn require_json(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.format != Format::Json {
        return Err(CliError::usage(format!("`{:?}` writes JSON only; pass --format json", cfg.command).to_lowercase()));
    }
    Ok(())
}

fn eval(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let (spec, m) = load_model(cfg)?;
    let grid = x_grid(cfg, &m, 50)?;
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    let triples = m.mean_triple_grid(&sorted)?;
    let mut rows = Vec::new();
    let mut failed = 0;
    for (x, t) in sorted.iter().zip(triples) {
        let h = m.base().hazard(*x);
        let hw = m.weighted_hazard(*x);
        let row = t.and_then(|t| Ok((t, m.weighted_survival(*x)?)));
        if row.is_err() {
            failed += 1;
        }
        rows.push((*x, h, hw, row));
    }
    let status = if failed > 0 { EXIT_NUMERICAL } else { EXIT_OK };
    let header = ["x", "h", "h_w", "survival_w", "afr_w", "gfr_w", "hfr_w", "status"];
    let body = match cfg.format {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|(x, h, hw, r)| match r {
                    Ok((t, s)) => vec![fmt9(*x), fmt9(*h), fmt9(*hw), fmt9(*s), fmt_mean(t.afr), fmt_mean(t.gfr), fmt_mean(t.hfr), "ok".into()],
                    Err(e) => {
                        let mut v = vec![fmt9(*x), fmt9(*h), fmt9(*hw)];
                        v.extend(std::iter::repeat_n(String::new(), 4));
                        v.push(format!("error: {e}"));
                        v
                    }
                })
                .collect();
            csv_table(&header, &table)
        }
        Format::Json => {
            let table: Vec<Value> = rows
                .iter()
                .map(|(x, h, hw, r)| match r {
                    Ok((t, s)) => json!({"x": x, "h": h, "h_w": hw, "survival_w": s, "afr_w": mean_json(t.afr), "gfr_w": mean_json(t.gfr), "hfr_w": mean_json(t.hfr)}),
                    Err(e) => json!({"x": x, "h": h, "h_w": hw, "error": e.to_string()}),
                })
                .collect();
            to_json(&json!({"command": "eval", "model": spec, "partial": failed > 0, "rows": table}))?
        }
    };
    Ok(RunOutput { body, status })
}

fn classify_cmd(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    require_json(cfg)?;
    let (spec, m) = load_model(cfg)?;
    let (interval, n) = match &cfg.grid {
        Some(g) => {
            let (lo, hi, n) = g.bounds();
            (Some((lo, hi)), n)
        }
        None => (None, DEFAULT_GRID),
    };
    let report = classify(&m, interval, n)?;
    let status = if report.inclusions_hold { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(RunOutput { body: to_json(&json!({"command": "classify", "model": spec, "report": report}))?, status })
}

/// One named check inside a verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn from_bound(prefix: &str, b: &BoundReport) -> Self {
        Self {
            id: format!("{prefix}.{}", b.id),
            passed: !b.refuted(),
            max_violation: b.max_violation,
            tolerance: b.tolerance,
            note: b.note.clone().or_else(|| Some(format!("{:?}", b.status).to_lowercase())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub const SUITES: [&str; 6] = ["chain", "bounds", "star", "characterization", "transmission", "mixture"];

fn suite_chain(m: &WeightedModel, grid: &[f64], tol: f64) -> crate::Result<Vec<CheckResult>> {
    let mut weights = vec![m.weight().clone()];
    for w in [WeightFunction::constant(), WeightFunction::power(1.0)?, WeightFunction::exponential(-1.0)?] {
        if w.name() != m.weight().name() {
            weights.push(w);
        }
    }
    let mut out = Vec::new();
    for w in weights {
        let rm = m.reweighted(w.clone());
        let mut worst = 0.0f64;
        for t in rm.mean_triple_grid(grid)? {
            worst = worst.max(t?.chain_violation());
        }
        out.push(CheckResult { id: format!("chain[{}]", w.name()), passed: worst <= tol, max_violation: worst, tolerance: tol, note: None });
    }
    Ok(out)
}

fn suite_bounds(m: &WeightedModel, grid: &[f64]) -> crate::Result<Vec<CheckResult>> {
    let mut out: Vec<CheckResult> = bound_check_means(m, grid)?.iter().map(|b| CheckResult::from_bound("means", b)).collect();
    out.extend(sequence_weight_bounds(m, 2, grid)?.iter().map(|b| CheckResult::from_bound("sequence_k2", b)));
    Ok(out)
}

fn suite_star(m: &WeightedModel, grid: &[f64]) -> crate::Result<Vec<CheckResult>> {
    let alphas = [0.25, 0.5, 0.75];
    let mut out: Vec<CheckResult> = star_shaped_check(m, &alphas, grid)?.iter().map(|b| CheckResult::from_bound("afr", b)).collect();
    out.extend(gfr_star_shaped_check(m, &alphas, grid)?.iter().map(|b| CheckResult::from_bound("gfr", b)));
    Ok(out)
}

fn suite_characterization(m: &WeightedModel, grid: &[f64], tol: f64) -> crate::Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    for pair in MeanPair::ALL {
        let r = test_exponentiality_via_mean_equality(m, pair, grid, tol)?;
        // equal means must come with a flat hazard
        let passed = !r.verdict.is_consistent() || r.hazard_flat;
        out.push(CheckResult {
            id: r.verdict.id.clone(),
            passed,
            max_violation: if r.verdict.statistic.is_nan() { 0.0 } else { r.verdict.statistic },
            tolerance: tol,
            note: Some(format!("{:?}", r.verdict.verdict).to_lowercase()),
        });
    }
    Ok(out)
}

fn suite_transmission(m: &WeightedModel) -> crate::Result<Vec<CheckResult>> {
    let r = classify(m, None, DEFAULT_GRID)?;
    Ok(vec![
        CheckResult { id: "inclusions".into(), passed: r.inclusions_hold, max_violation: 0.0, tolerance: 0.0, note: None },
        CheckResult {
            id: "transmission".into(),
            passed: r.transmission != Some(false),
            max_violation: 0.0,
            tolerance: 0.0,
            note: r.transmission.is_none().then(|| "hazard is not monotone on the interval".into()),
        },
    ])
}

/// A random mixture of two to four exponential or Weibull components.
pub fn random_mixture(rng: &mut impl Rng) -> crate::Result<MixtureSpec> {
    let n = rng.random_range(2..=4);
    let mut components = Vec::with_capacity(n);
    for _ in 0..n {
        let c = if rng.random_bool(0.5) {
            HazardModel::exponential(rng.random_range(0.2..3.0))?
        } else {
            HazardModel::weibull(rng.random_range(0.2..3.0), rng.random_range(0.5..3.0))?
        };
        components.push(c);
    }
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = p[..n - 1].iter().sum();
    p[n - 1] = 1.0 - head;
    MixtureSpec::new(components, p)
}

/// Largest hazard gap and weight-sum gap between a mixture and its series form on `grid`.
pub fn mixture_series_gaps(spec: &MixtureSpec, grid: &[f64]) -> crate::Result<(f64, f64)> {
    let series = mixture_as_series(spec);
    let mut hazard_gap = 0.0f64;
    let mut sum_gap = 0.0f64;
    for &x in grid {
        let (h, p) = mixture_hazard(spec, x)?;
        let s = series_hazard(&series, x);
        if !(h.is_infinite() && s == h) {
            hazard_gap = hazard_gap.max((s - h).abs());
        }
        sum_gap = sum_gap.max((p.iter().sum::<f64>() - 1.0).abs());
    }
    Ok((hazard_gap, sum_gap))
}

fn suite_mixture(seed: u64, tol: f64) -> crate::Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<f64> = (0..=100).map(|i| 0.05 * i as f64).collect();
    let mut out = Vec::new();
    for i in 0..8 {
        let spec = random_mixture(&mut rng)?;
        let (gap, sum_gap) = mixture_series_gaps(&spec, &grid)?;
        out.push(CheckResult {
            id: format!("mixture_series[{i}]"),
            passed: gap <= tol && sum_gap == 0.0,
            max_violation: gap.max(sum_gap),
            tolerance: tol,
            note: Some(format!("{} components", spec.components().len())),
        });
    }
    Ok(out)
}

fn verify(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    require_json(cfg)?;
    let names: Vec<&str> = if cfg.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&cfg.suite.as_str()) {
        vec![cfg.suite.as_str()]
    } else {
        return Err(CliError::usage(format!("unknown suite `{}`; expected one of {} or all", cfg.suite, SUITES.join(", "))));
    };
    let needs_model = names.iter().any(|n| *n != "mixture");
    let loaded = if needs_model { Some(load_model(cfg)?) } else { None };
    let grid = match &loaded {
        Some((_, m)) => x_grid(cfg, m, 20)?,
        None => Vec::new(),
    };
    let mut suites = Vec::new();
    for name in names {
        let checks = match (name, &loaded) {
            ("mixture", _) => suite_mixture(cfg.seed, cfg.tol_check.unwrap_or(1e-12))?,
            ("chain", Some((_, m))) => suite_chain(m, &grid, cfg.tol_check.unwrap_or(1e-9))?,
            ("bounds", Some((_, m))) => suite_bounds(m, &grid)?,
            ("star", Some((_, m))) => suite_star(m, &grid)?,
            ("characterization", Some((_, m))) => suite_characterization(m, &grid, cfg.tol_check.unwrap_or(1e-6))?,
            ("transmission", Some((_, m))) => suite_transmission(m)?,
            _ => unreachable!("model loaded for every suite but mixture"),
        };
        let passed = checks.iter().all(|c| c.passed);
        suites.push(SuiteResult { suite: name.into(), passed, checks });
    }
    let passed = suites.iter().all(|s| s.passed);
    let doc = json!({
        "command": "verify",
        "model": loaded.as_ref().map(|(s, _)| s),
        "seed": cfg.seed,
        "passed": passed,
        "suites": suites,
    });
    Ok(RunOutput { body: to_json(&doc)?, status: if passed { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

fn quantile_cmd(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let spec = load_spec(cfg)?;
    let qm = QuantileModel::from_hazard_model(&spec.hazard)?;
    let grid = match &cfg.grid {
        Some(g) => g.points(),
        None => u_grid(),
    };
    if grid.iter().any(|u| !(*u > 0.0 && *u < 1.0)) {
        return Err(CliError::usage("quantile grid points must lie in (0, 1)"));
    }
    let opts = QuantileOptions { quadrature: quad_config(cfg)?, ..Default::default() };
    let phm = cfg.theta.map(|t| phm_quantile(&qm, t)).transpose()?;
    let mut rows = Vec::new();
    for &u in &grid {
        let t = quantile_means(&qm, u, &opts)?;
        let extra = match &phm {
            Some((y, r)) => Some((qa(y, u)?, r.theta * t.qa)),
            None => None,
        };
        rows.push((u, qm.quantile(u), qm.density(u), qm.hazard_quantile(u), t, extra));
    }
    let body = match cfg.format {
        Format::Csv => {
            let mut header = vec!["u", "Q", "q", "h_q", "QA", "QG", "QH"];
            if phm.is_some() {
                header.extend(["QA_Y", "theta_QA_X"]);
            }
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|(u, q, d, h, t, extra)| {
                    let mut r = vec![fmt9(*u), fmt9(*q), fmt9(*d), fmt9(*h), fmt9(t.qa), fmt_mean(t.qg), fmt_mean(t.qh)];
                    if let Some((y, x)) = extra {
                        r.extend([fmt9(*y), fmt9(*x)]);
                    }
                    r
                })
                .collect();
            csv_table(&header, &table)
        }
        Format::Json => {
            let table: Vec<Value> = rows
                .iter()
                .map(|(u, q, d, h, t, _)| json!({"u": u, "Q": q, "q": d, "h_q": h, "QA": t.qa, "QG": mean_json(t.qg), "QH": mean_json(t.qh)}))
                .collect();
            to_json(&json!({
                "command": "quantile",
                "model": spec.hazard,
                "note": "quantile means use the base hazard; the weight is not applied",
                "rows": table,
                "phm": phm.as_ref().map(|(_, r)| r),
            }))?
        }
    };
    Ok(RunOutput { body, status: EXIT_OK })
}

fn system_cmd(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    require_json(cfg)?;
    let (source, spec) = match &cfg.model {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            let doc: MixtureDocument = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid mixture document: {e}")))?;
            ("file", MixtureSpec::new(doc.components, doc.proportions)?)
        }
        None => ("random", random_mixture(&mut ChaCha8Rng::seed_from_u64(cfg.seed))?),
    };
    let grid = match &cfg.grid {
        Some(g) => g.points(),
        None => (0..=100).map(|i| 0.05 * i as f64).collect(),
    };
    if grid.iter().any(|x| !(*x >= 0.0)) {
        return Err(CliError::usage("system grid points must be non-negative"));
    }
    let (hazard_gap, weight_sum_gap) = mixture_series_gaps(&spec, &grid)?;
    let tol = cfg.tol_check.unwrap_or(1e-12);
    let passed = hazard_gap <= tol && weight_sum_gap == 0.0;
    let doc = json!({
        "command": "system",
        "source": source,
        "seed": cfg.seed,
        "components": spec.components(),
        "proportions": spec.proportions(),
        "grid": grid,
        "max_hazard_gap": hazard_gap,
        "max_weight_sum_gap": weight_sum_gap,
        "tolerance": tol,
        "passed": passed,
    });
    Ok(RunOutput { body: to_json(&doc)?, status: if passed { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

fn counterexample_cmd(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    require_json(cfg)?;
    let mut search = SearchBox::default();
    if let Some(g) = &cfg.grid {
        let (lo, hi, n) = g.bounds();
        search.interval = (lo, hi);
        search.grid_size = n;
    }
    let outcome = counterexample_nonclosure(&search)?;
    let status = if matches!(outcome, CounterexampleOutcome::Found(_)) { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(RunOutput { body: to_json(&json!({"command": "counterexample", "result": outcome}))?, status })
}

/// Runs one command and renders its output.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    match cfg.command {
        Command::Eval => eval(cfg),
        Command::Classify => classify_cmd(cfg),
        Command::Verify => verify(cfg),
        Command::Quantile => quantile_cmd(cfg),
        Command::System => system_cmd(cfg),
        Command::Counterexample => counterexample_cmd(cfg),
    }
}

/// Parses `args`, runs, writes output and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let err = CliError::usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.status;
        }
    };
    match run(&cfg) {
        Ok(out) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &out.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                eprintln!("{}", CliError::usage(msg).to_json());
                return EXIT_USAGE;
            }
            if out.status == EXIT_NUMERICAL {
                let msg = "some rows failed numerically; see the status column".to_string();
                eprintln!("{}", CliError { status: EXIT_NUMERICAL, kind: "numerical", message: msg }.to_json());
            }
            out.status
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.status
        }
    }
}
