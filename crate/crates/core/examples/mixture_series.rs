//! A finite mixture rewritten as a series system with weights p_i(x).

use hazard_means::systems::{mixture_as_series, mixture_hazard, series_hazard, MixtureSpec};
use hazard_means::HazardModel;

fn main() -> hazard_means::Result<()> {
    let m = MixtureSpec::new(
        vec![HazardModel::exponential(1.0)?, HazardModel::exponential(2.0)?, HazardModel::weibull(0.5, 3.0)?],
        vec![0.3, 0.5, 0.2],
    )?;
    let s = mixture_as_series(&m);
    println!("{:>5} {:>12} {:>12} {:>10}  weights", "x", "mixture", "series", "gap");
    for i in 0..=10 {
        let x = 0.5 * i as f64;
        let (h, p) = mixture_hazard(&m, x)?;
        let hs = series_hazard(&s, x);
        let weights: Vec<String> = p.iter().map(|v| format!("{v:.4}")).collect();
        println!("{x:>5} {h:>12.9} {hs:>12.9} {:>10.1e}  [{}] sum={}", (h - hs).abs(), weights.join(", "), p.iter().sum::<f64>());
    }
    Ok(())
}
