//! One- and two-point weights against their defining integrals.

use crossover::weights::Weights;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let w = Weights::new(Nu::One, 0.6)?;
    println!("{:>5} {:>22} {:>22}", "y", "g(y)", "quadrature");
    for y in [0.2, 0.7, 1.3] {
        println!("{y:>5} {:>22.15e} {:>22.15e}", w.g(y), w.g_def(y)?);
    }
    println!("G(0.4, 1.1) = {:.15e}, quadrature {:.15e}", w.big_g(0.4, 1.1), w.big_g_def(0.4, 1.1)?);
    println!("g_bar = {:.15e}", w.g_bar());
    Ok(())
}
