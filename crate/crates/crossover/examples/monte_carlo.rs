//! Sampled singular-value histogram of the two- and three-matrix models
//! against the analytic density.

use crossover::ensemble::{compare_histogram, mc_density_histogram, Model, SamplerConfig};
use crossover::kernels::Kernel;
use crossover::weights::TransitionParams;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let params = TransitionParams::new(4, Nu::Zero, 0.5)?;
    let k = Kernel::new(params)?;
    for model in [Model::TwoMatrix, Model::ThreeMatrix] {
        let cfg = SamplerConfig { model, params, samples: 40_000, seed: 2026, streams: 8 };
        let h = mc_density_histogram(&cfg, 0.0, 3.0, 30)?;
        let cmp = compare_histogram(&h, |x| k.density(x))?;
        let worst = cmp.iter().map(|b| b.pull()).fold(0.0, f64::max);
        println!("{model:?}: {} values, largest bin pull {worst:.2} sigma", h.total_values);
    }
    Ok(())
}
