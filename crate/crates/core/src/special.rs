//! Special functions used by the closed-form weighted means: the incomplete
//! gamma pair, the exponential integral E₁, log-gamma and Euler's constant.
//!
//! Every routine is a pure function of its arguments.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Tolerances for the series and continued-fraction evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFnConfig {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SpecialFnConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_iter: 500 }
    }
}

impl SpecialFnConfig {
    pub fn new(rel_tol: f64, max_iter: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        if max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be at least 1"));
        }
        Ok(Self { rel_tol, max_iter })
    }
}

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)| (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    if x == x.floor() && x > 0.0 && x <= 21.0 {
        // exact factorials for small integers
        return (1..x as u64).map(|k| k as f64).product();
    }
    ln_gamma(x).exp()
}

fn check_args(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid("a", format!("must be positive, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
    }
    Ok(())
}

/// γ(a, x) = ∫₀ˣ t^{a−1} e^{−t} dt.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    lower_incomplete_gamma_with(a, x, &SpecialFnConfig::default())
}

pub fn lower_incomplete_gamma_with(a: f64, x: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    check_args(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(gamma(a));
    }
    if x < a + 1.0 {
        lower_series(a, x, cfg)
    } else {
        Ok(gamma(a) - upper_fraction(a, x, cfg)?)
    }
}

/// Γ(a, x) = ∫ₓ^∞ t^{a−1} e^{−t} dt.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    upper_incomplete_gamma_with(a, x, &SpecialFnConfig::default())
}

pub fn upper_incomplete_gamma_with(a: f64, x: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    check_args(a, x)?;
    if x == 0.0 {
        return Ok(gamma(a));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        Ok(gamma(a) - lower_series(a, x, cfg)?)
    } else {
        upper_fraction(a, x, cfg)
    }
}

fn lower_series(a: f64, x: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..cfg.max_iter {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() <= sum.abs() * cfg.rel_tol * 1e-3 {
            return Ok(sum * (a * x.ln() - x).exp());
        }
    }
    Err(Error::NonConvergence { routine: "incomplete gamma series", a, x })
}

const TINY: f64 = 1e-300;

// Modified Lentz evaluation of the Legendre continued fraction for Γ(a, x).
fn upper_fraction(a: f64, x: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=cfg.max_iter {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() <= cfg.rel_tol * 1e-3 {
            return Ok(h * (a * x.ln() - x).exp());
        }
    }
    Err(Error::NonConvergence { routine: "incomplete gamma continued fraction", a, x })
}

/// E₁(z) = ∫_z^∞ e^{−t}/t dt for z > 0.
pub fn exponential_integral_e1(z: f64) -> Result<f64> {
    exponential_integral_e1_with(z, &SpecialFnConfig::default())
}

pub fn exponential_integral_e1_with(z: f64, cfg: &SpecialFnConfig) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::invalid("z", format!("must be positive, got {z}")));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z <= 1.0 {
        // -γ - ln z + Σ (-1)^{k+1} z^k / (k k!)
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 1..=cfg.max_iter {
            let kf = k as f64;
            fact *= -z / kf;
            let term = -fact / kf;
            sum += term;
            if term.abs() <= sum.abs() * cfg.rel_tol * 1e-3 {
                return Ok(-EULER_GAMMA - z.ln() + sum);
            }
        }
        return Err(Error::NonConvergence { routine: "E1 series", a: 1.0, x: z });
    }
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=cfg.max_iter {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() <= cfg.rel_tol * 1e-3 {
            return Ok(h * (-z).exp());
        }
    }
    Err(Error::NonConvergence { routine: "E1 continued fraction", a: 1.0, x: z })
}

/// Ein(z) = ∫₀^z (1 − e^{−t})/t dt = E₁(z) + ln z + γ, entire in z.
pub fn ein(z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(0.0);
    }
    if z.abs() < 1.0 {
        // Σ (-1)^{k+1} z^k / (k k!), no cancellation against ln z
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 1..=500 {
            let kf = k as f64;
            fact *= -z / kf;
            let term = -fact / kf;
            sum += term;
            if term.abs() <= sum.abs() * 1e-16 {
                return Ok(sum);
            }
        }
        return Err(Error::NonConvergence { routine: "Ein series", a: 1.0, x: z });
    }
    Ok(exponential_integral_e1(z)? + z.ln() + EULER_GAMMA)
}
