//! Quantile AFR, GFR and HFR, the Pareto-I closed forms, and the quantile
//! side of the proportional hazards model.

use std::sync::Arc;

use hazard_means::quantile::{pareto_one_closed, phm_quantile, quantile_from_hazard, quantile_means, QuantileOptions};
use hazard_means::{HazardModel, MeanValue, QuantileModel};

fn main() -> hazard_means::Result<()> {
    let opts = QuantileOptions::default();
    let alpha = 2.0;
    let generic = quantile_from_hazard(Arc::new(HazardModel::pareto_one(alpha)?))?;
    println!("Pareto-I(alpha = {alpha}): generic route vs closed forms");
    for u in [0.1, 0.5, 0.9] {
        let t = quantile_means(&generic, u, &opts)?;
        let g = t.qg.value().unwrap_or(f64::NAN);
        let h = t.qh.value().unwrap_or(f64::NAN);
        println!(
            "  u={u}: QA {:.9} ({:.9})  QG {g:.9} ({:.9})  QH {h:.9} ({:.9})",
            t.qa,
            pareto_one_closed::qa(alpha, u),
            pareto_one_closed::qg(alpha, u),
            pareto_one_closed::qh(alpha, u)
        );
    }

    for lambda in [0.5, 2.0, 3.0] {
        let w = QuantileModel::weibull(1.0, lambda)?;
        let t = quantile_means(&w, 0.5, &opts)?;
        println!("weibull shape {lambda}: QA(0.5) = {:.9}, Q(0.5)^(shape-1) = {:.9}", t.qa, w.quantile(0.5).powf(lambda - 1.0));
    }

    let e = quantile_means(&QuantileModel::exponential(0.5)?, 0.7, &opts)?;
    let show = |v: MeanValue| v.value().map(|x| format!("{x:.9}")).unwrap_or_else(|| "div".into());
    println!("exponential(0.5) at u = 0.7: {:.9} {} {}", e.qa, show(e.qg), show(e.qh));

    let (_, report) = phm_quantile(&QuantileModel::pareto_one(alpha)?, 2.0)?;
    println!(
        "proportional hazards, theta = 2: distribution gap {:.2e}, quantile gap {:.4}, identity gap {:.2e}",
        report.distribution_gap, report.quantile_gap, report.identity_gap
    );
    Ok(())
}
