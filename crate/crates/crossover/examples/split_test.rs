//! At large a the rescaled spectrum is that of two independent GAOE blocks.

use crossover::ensemble::mc_split_compare;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    for a in [1.0, 10.0, 100.0] {
        let ks = mc_split_compare(4, Nu::Zero, a, 5_000, 3, 4)?;
        println!("a = {a:>5}: KS {:.4} (1% critical {:.4}) {}", ks.statistic, ks.critical_1pct, if ks.passes() { "compatible" } else { "rejected" });
    }
    Ok(())
}
