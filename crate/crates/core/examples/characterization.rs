//! Equality of means as a test for exponentiality, and hazards recovered
//! from a mean proportional to the hazard.

use hazard_means::characterization::{
    recover_hazard_from_proportionality, test_exponentiality_via_mean_equality, test_proportionality, MeanKind, MeanPair,
    DEFAULT_THRESHOLD,
};
use hazard_means::{Hazard, HazardModel, WeightFunction, WeightedModel};

fn main() -> hazard_means::Result<()> {
    let grid: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    for (name, h) in [
        ("exponential(0.7)", HazardModel::exponential(0.7)?),
        ("weibull(1, 2)", HazardModel::weibull(1.0, 2.0)?),
        ("weibull(1, 1.0000001)", HazardModel::weibull(1.0, 1.0000001)?),
    ] {
        let m = WeightedModel::new(h, WeightFunction::power(2.0)?);
        for pair in MeanPair::ALL {
            let r = test_exponentiality_via_mean_equality(&m, pair, &grid, 1e-4)?;
            println!("{name:<22} {pair:?}: {:?} (gap {:.3e}, hazard spread {:.3e})", r.verdict.verdict, r.verdict.statistic, r.hazard_spread);
        }
    }

    let w = WeightFunction::power(1.0)?;
    let h = recover_hazard_from_proportionality(&w, MeanKind::A, 0.5, 2.0)?;
    println!("recovered hazard at x = 1, 2, 3: {:.6} {:.6} {:.6}", h.hazard(1.0), h.hazard(2.0), h.hazard(3.0));
    println!("Weibull shape: {:?}", h.weibull_shape());
    let r = test_proportionality(&WeightedModel::new(h, w), MeanKind::A, &grid, DEFAULT_THRESHOLD)?;
    println!("measured A^w/h = {:.9} ({:?})", r.ratio, r.verdict.verdict);

    let drift = WeightedModel::new(HazardModel::weibull(1.0, 2.0)?, WeightFunction::exponential(1.0)?);
    let r = test_proportionality(&drift, MeanKind::A, &grid, DEFAULT_THRESHOLD)?;
    println!("weibull(1, 2) with w = e^x: ratio {:.4}, deviation {:.3e} ({:?})", r.ratio, r.verdict.statistic, r.verdict.verdict);
    Ok(())
}
