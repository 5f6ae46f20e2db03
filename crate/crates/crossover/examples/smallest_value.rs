//! Smallest singular value: truncated expansion in correlation functions
//! against a sampled histogram.

use crossover::ensemble::{mc_smallest_histogram, Model, SamplerConfig};
use crossover::weights::TransitionParams;
use crossover::kernels::Kernel;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let params = TransitionParams::new(3, Nu::One, 0.5)?;
    let k = Kernel::new(params)?;
    let cfg = SamplerConfig { model: Model::TwoMatrix, params, samples: 50_000, seed: 1, streams: 4 };
    let h = mc_smallest_histogram(&cfg, 0.0, 1.5, 15)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "s", "order 1", "order 2", "sampled");
    for b in 0..h.bins() {
        let (lo, hi) = h.edges(b);
        let s = 0.5 * (lo + hi);
        let (t1, t2) = (k.smallest_truncated(s, 1)?, k.smallest_truncated(s, 2)?);
        println!("{s:>6.2} {:>10.4} {:>10.4} {:>10.4}", t1.value, t2.value, h.density(b));
    }
    Ok(())
}
