//! Close to a = 1 the kernel sums cancel badly in double precision; the
//! kernel switches to double-double arithmetic on its own.

use crossover::kernels::{density_gaoe_ref, Kernel, KernelOptions, Precision};
use crossover::weights::TransitionParams;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let p = TransitionParams::new(4, Nu::One, 1.0 - 1e-5)?;
    let auto = Kernel::new(p)?;
    println!("double-double route: {}", auto.is_extended());
    let double = Kernel::with_options(p, KernelOptions { precision: Precision::Double, ..KernelOptions::default() });
    for x in [0.5, 1.0, 1.5] {
        let d = double.as_ref().map_err(|e| e.clone()).and_then(|k| k.density(x));
        println!(
            "x = {x}: auto {:.8}, GAOE {:.8}, double only: {}",
            auto.density(x)?,
            density_gaoe_ref(4, Nu::One, x)?,
            match d {
                Ok(v) => format!("{v:.8}"),
                Err(e) => e.to_string(),
            }
        );
    }
    Ok(())
}
