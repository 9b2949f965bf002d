//! Inequalities between weighted and plain means, the sequence weights
//! `w^k·h`, and the weighted star-shaped conditions.

use hazard_means::aging::{bound_check_means, gfr_star_shaped_check, sequence_weight_bounds, star_shaped_check, BoundReport};
use hazard_means::{HazardModel, WeightFunction, WeightedModel};

fn print(reports: &[BoundReport]) {
    for r in reports {
        let rel = r.relation.map(|r| format!("{r:?}")).unwrap_or_else(|| "-".into());
        println!("  {:<22} {:<3} {:<12} max violation {:>10.3e} {}", r.id, rel, format!("{:?}", r.status), r.max_violation, r.note.as_deref().unwrap_or(""));
    }
}

fn main() -> hazard_means::Result<()> {
    let grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
    let h = HazardModel::weibull(1.0, 2.0)?;
    for (name, w) in [
        ("same direction (w = x)", WeightFunction::power(1.0)?),
        ("opposite direction (w = e^{-x})", WeightFunction::exponential(-1.0)?),
    ] {
        let m = WeightedModel::new(h.clone(), w);
        println!("{name}: weighted vs plain");
        print(&bound_check_means(&m, &grid)?);
        println!("{name}: sequence weights, k = 2");
        print(&sequence_weight_bounds(&m, 2, &grid)?);
    }
    let alphas = [0.25, 0.5, 0.75];
    let x = [0.5, 1.0, 2.0, 4.0];
    for (name, m) in [
        ("Iw-AFR witness", WeightedModel::new(h.clone(), WeightFunction::constant())),
        ("Dw-AFR witness", WeightedModel::new(HazardModel::weibull(1.0, 0.5)?, WeightFunction::power(0.5)?)),
    ] {
        println!("{name}: star-shaped conditions");
        print(&star_shaped_check(&m, &alphas, &x)?);
        print(&gfr_star_shaped_check(&m, &alphas, &x)?);
    }
    Ok(())
}
