//! Spectral density and two-point function from the Pfaffian kernel, with
//! the chGOE and GAOE curves at the ends of the interpolation.

use crossover::kernels::{density_chgoe_ref, density_gaoe_ref, Kernel};
use crossover::weights::TransitionParams;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let (n, nu) = (4, Nu::Zero);
    let kernels: Vec<Kernel> = [0.01, 0.5, 0.9999]
        .iter()
        .map(|&a| Kernel::new(TransitionParams::new(n, nu, a)?))
        .collect::<crossover::Result<_>>()?;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "x", "chGOE", "a=0.01", "a=0.5", "a=0.9999", "GAOE");
    for i in 0..=12 {
        let x = 0.25 * i as f64;
        print!("{x:>5.2} {:>10.6}", density_chgoe_ref(n, nu, x)?);
        for k in &kernels {
            print!(" {:>10.6}", k.density(x)?);
        }
        println!(" {:>10.6}", density_gaoe_ref(n, nu, x)?);
    }
    println!("R2(0.5, 1.0) at a=0.5: {:.8}", kernels[1].corr2(0.5, 1.0)?);
    Ok(())
}
