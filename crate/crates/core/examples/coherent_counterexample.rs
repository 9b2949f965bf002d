//! Searches for a series system of two Iw-AFR components whose AFR is not monotone.

use hazard_means::systems::{counterexample_nonclosure, CounterexampleOutcome, SearchBox};

fn main() -> hazard_means::Result<()> {
    let search = SearchBox::default();
    match counterexample_nonclosure(&search)? {
        CounterexampleOutcome::Found(w) => {
            let p = w.parameters;
            println!("witness: alpha={} beta={} n={} a={} b={}", p.alpha, p.beta, p.n, p.a, p.b);
            for (i, c) in w.components.iter().enumerate() {
                let labels: Vec<&str> = c.labels.iter().map(|l| l.as_str()).collect();
                println!("component {}: {}", i + 1, labels.join(", "));
            }
            println!("system AFR: {:?}, change points {:?}", w.system_afr.label, w.system_afr.change_points);
            println!("refined x4: {:?}, change points {:?}", w.refined_system_afr.label, w.change_points);
        }
        CounterexampleOutcome::NotFound { cells_searched, .. } => {
            println!("no witness in {cells_searched} cells");
        }
    }
    Ok(())
}
