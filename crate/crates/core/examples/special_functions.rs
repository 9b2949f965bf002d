//! Gamma-family functions and the exponential integral.

use hazard_means::special::{ein, exponential_integral_e1, gamma, lower_incomplete_gamma, upper_incomplete_gamma, EULER_GAMMA};

fn main() -> hazard_means::Result<()> {
    println!("Euler's constant      {EULER_GAMMA:.16}");
    println!("Gamma(4.5)            {:.12}", gamma(4.5));
    for (a, x) in [(0.5, 1.0), (2.0, 3.0), (3.0, 0.25)] {
        let lo = lower_incomplete_gamma(a, x)?;
        let hi = upper_incomplete_gamma(a, x)?;
        println!("a={a:<4} x={x:<5} gamma={lo:.12} Gamma={hi:.12} sum-Gamma(a)={:.1e}", lo + hi - gamma(a));
    }
    for z in [0.1, 1.0, 5.0] {
        println!("E1({z}) = {:.12}   Ein({z}) = {:.12}", exponential_integral_e1(z)?, ein(z)?);
    }
    Ok(())
}
