//! Weighted AFR, GFR and HFR of a Weibull hazard under an exponential weight,
//! by quadrature and by the incomplete-gamma closed forms.

use hazard_means::weighted::weibull_exponential_weight as closed;
use hazard_means::{HazardModel, MeanValue, WeightFunction, WeightedModel};

fn show(v: MeanValue) -> String {
    match v {
        MeanValue::Finite(x) => format!("{x:.9}"),
        MeanValue::Divergent => "div".into(),
    }
}

fn main() -> hazard_means::Result<()> {
    let (alpha, n) = (1.0, -1.0);
    for beta in [0.5, 2.0, 3.0] {
        let m = WeightedModel::new(HazardModel::weibull(alpha, beta)?, WeightFunction::exponential(n)?).with_closed_forms(false);
        println!("beta = {beta}");
        println!("{:>5} {:>13} {:>13} {:>13} {:>13} {:>13}", "x", "survival_w", "closed", "A^w", "G^w", "H^w");
        for x in [0.5, 1.0, 2.0, 4.0] {
            let t = m.mean_triple(x)?;
            println!(
                "{x:>5} {:>13.9} {:>13.9} {:>13} {:>13} {:>13}",
                m.weighted_survival(x)?,
                closed::survival(alpha, beta, n, x)?,
                show(t.afr),
                show(t.gfr),
                show(t.hfr)
            );
        }
        println!("mass left at infinity: {:.9}", closed::survival_at_infinity(alpha, beta, n)?);
        if let Some(peak) = closed::hazard_peak(beta, n) {
            println!("weighted hazard peaks at x = {peak}");
        }
        println!();
    }
    Ok(())
}
