use serde::{Deserialize, Serialize};

use super::Direction;
use crate::error::{Error, Result};

/// Derivative magnitudes below `DEAD_BAND·(1 + |f|)` count as zero.
pub const DEAD_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneLabel {
    Increasing,
    Decreasing,
    NonMonotone,
    Constant,
}

impl MonotoneLabel {
    pub fn direction(self) -> Direction {
        match self {
            MonotoneLabel::Increasing => Direction::Increasing,
            MonotoneLabel::Decreasing => Direction::Decreasing,
            MonotoneLabel::Constant => Direction::Constant,
            MonotoneLabel::NonMonotone => Direction::Unknown,
        }
    }

    pub fn is_monotone(self) -> bool {
        self != MonotoneLabel::NonMonotone
    }

    /// Non-decreasing: increasing or constant.
    pub fn is_nondecreasing(self) -> bool {
        matches!(self, MonotoneLabel::Increasing | MonotoneLabel::Constant)
    }

    pub fn is_nonincreasing(self) -> bool {
        matches!(self, MonotoneLabel::Decreasing | MonotoneLabel::Constant)
    }
}

/// Outcome of a numerical monotonicity scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneVerdict {
    pub label: MonotoneLabel,
    /// Abscissae where the derivative changes sign, strictly inside `interval`.
    pub change_points: Vec<f64>,
    pub interval: (f64, f64),
    pub grid_used: Vec<f64>,
}

/// Scans `f` on an equispaced grid over `interval`.
pub fn scan_monotonicity<F: Fn(f64) -> f64>(f: F, interval: (f64, f64), grid_size: usize) -> Result<MonotoneVerdict> {
    scan_monotonicity_with(|x| Ok(f(x)), interval, grid_size, DEAD_BAND)
}

/// Like [`scan_monotonicity`] for fallible evaluators and a custom dead-band.
pub fn scan_monotonicity_with<F: Fn(f64) -> Result<f64>>(
    f: F,
    interval: (f64, f64),
    grid_size: usize,
    dead_band: f64,
) -> Result<MonotoneVerdict> {
    let grid = scan_grid(interval, grid_size)?;
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    scan_values(&f, grid, values, dead_band)
}

/// The equispaced grid a scan of `interval` evaluates on.
pub fn scan_grid(interval: (f64, f64), grid_size: usize) -> Result<Vec<f64>> {
    let (lo, hi) = interval;
    if grid_size < 16 {
        return Err(Error::invalid("grid_size", format!("must be at least 16, got {grid_size}")));
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid("interval", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (grid_size - 1) as f64;
    Ok((0..grid_size).map(|i| if i + 1 == grid_size { hi } else { lo + step * i as f64 }).collect())
}

/// Classifies precomputed `values` on `grid` (from [`scan_grid`]); `f` is
/// only called to locate change points.
pub fn scan_values<F: Fn(f64) -> Result<f64>>(
    f: &F,
    grid: Vec<f64>,
    values: Vec<f64>,
    dead_band: f64,
) -> Result<MonotoneVerdict> {
    let n = grid.len();
    if n < 2 || values.len() != n {
        return Err(Error::invalid("grid", "need matching grid and values of length at least 2"));
    }
    let interval = (grid[0], grid[n - 1]);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain { what: "scanned function".into(), at: x })
        }
    };
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain { what: "scanned function".into(), at: grid[i] });
    }

    // central difference at each cell midpoint
    let signs: Vec<i8> = (0..n - 1)
        .map(|i| {
            let d = (values[i + 1] - values[i]) / (grid[i + 1] - grid[i]);
            let scale = 1.0 + 0.5 * (values[i] + values[i + 1]).abs();
            if d.abs() <= dead_band * scale {
                0
            } else if d > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();

    let nonzero: Vec<(usize, i8)> = signs.iter().copied().enumerate().filter(|(_, s)| *s != 0).collect();
    let mut change_points = Vec::new();
    for pair in nonzero.windows(2) {
        let (i, si) = pair[0];
        let (j, sj) = pair[1];
        if si != sj {
            let maximize = si > 0;
            let tol = (interval.1 - interval.0) * 1e-6;
            change_points.push(locate_extremum(&eval, grid[i], grid[j + 1], maximize, tol)?);
        }
    }
    let label = if nonzero.is_empty() {
        MonotoneLabel::Constant
    } else if !change_points.is_empty() {
        MonotoneLabel::NonMonotone
    } else if nonzero[0].1 > 0 {
        MonotoneLabel::Increasing
    } else {
        MonotoneLabel::Decreasing
    };
    Ok(MonotoneVerdict { label, change_points, interval, grid_used: grid })
}

/// Golden-section bracketing of an interior extremum down to width `tol`.
fn locate_extremum<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, maximize: bool, tol: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let score = |x: f64| -> Result<f64> { f(x).map(|v| if maximize { v } else { -v }) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = score(c)?;
    let mut fd = score(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increasing_hazard() {
        let v = scan_monotonicity(|x| 2.0 * x, (0.1, 10.0), 200).unwrap();
        assert_eq!(v.label, MonotoneLabel::Increasing);
        assert!(v.change_points.is_empty());
    }

    #[test]
    fn upside_down_bathtub_peak() {
        let v = scan_monotonicity(|x: f64| 3.0 * x * x * (-x).exp(), (0.1, 10.0), 200).unwrap();
        assert_eq!(v.label, MonotoneLabel::NonMonotone);
        assert_eq!(v.change_points.len(), 1);
        assert!((v.change_points[0] - 2.0).abs() < 1e-4, "{:?}", v.change_points);
    }

    #[test]
    fn constant_and_plateaus() {
        assert_eq!(scan_monotonicity(|_| 0.5, (0.0, 1.0), 16).unwrap().label, MonotoneLabel::Constant);
        let v = scan_monotonicity(|x: f64| x.min(1.0), (0.0, 2.0), 50).unwrap();
        assert_eq!(v.label, MonotoneLabel::Increasing);
    }

    #[test]
    fn bathtub_minimum() {
        let v = scan_monotonicity(|x: f64| (x - 1.3) * (x - 1.3), (0.0, 3.0), 64).unwrap();
        assert_eq!(v.label, MonotoneLabel::NonMonotone);
        assert!((v.change_points[0] - 1.3).abs() < 1e-5);
        assert!(v.change_points.iter().all(|c| *c > 0.0 && *c < 3.0));
    }

    #[test]
    fn errors() {
        assert!(scan_monotonicity(|x| x, (0.0, 1.0), 8).is_err());
        assert!(scan_monotonicity(|x| x, (1.0, 1.0), 32).is_err());
        assert!(matches!(
            scan_monotonicity(|x| if x > 0.5 { f64::NAN } else { x }, (0.0, 1.0), 32),
            Err(Error::Domain { .. })
        ));
    }
}
