//! Aging-class labels from the monotonicity of the weighted means.

use hazard_means::{classify, HazardModel, WeightFunction, WeightedModel};

fn main() -> hazard_means::Result<()> {
    let cases = [
        ("weibull(1, 2), constant weight", HazardModel::weibull(1.0, 2.0)?, WeightFunction::constant(), Some((0.1, 5.0))),
        ("weibull(1, 0.5), constant weight", HazardModel::weibull(1.0, 0.5)?, WeightFunction::constant(), None),
        ("weibull(1, 3), weight e^{-x}", HazardModel::weibull(1.0, 3.0)?, WeightFunction::exponential(-1.0)?, Some((0.1, 10.0))),
        ("additive weibull, weight x", HazardModel::additive_weibull(1.0, 0.5, 1.0, 2.0)?, WeightFunction::power(1.0)?, None),
    ];
    for (name, h, w, interval) in cases {
        let r = classify(&WeightedModel::new(h, w), interval, 200)?;
        let labels: Vec<&str> = r.labels.iter().map(|l| l.as_str()).collect();
        println!("{name}");
        println!("  interval        [{:.4}, {:.4}]", r.interval.0, r.interval.1);
        println!("  h               {:?}", r.hazard.label);
        println!("  h^w             {:?} {:?}", r.weighted_hazard.label, r.weighted_hazard.change_points);
        println!("  labels          {}", labels.join(", "));
        println!("  transmission    {:?}, inclusions hold: {}", r.transmission, r.inclusions_hold);
        for note in &r.notes {
            println!("  note            {note}");
        }
    }
    Ok(())
}
