//! The joint density integrated numerically, compared with the kernel
//! correlation functions at n = 2.

use crossover::jpdf::{corr_rk_bruteforce, jpdf_eval};
use crossover::kernels::Kernel;
use crossover::weights::TransitionParams;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let (n, nu, a) = (2, Nu::One, 0.5);
    let k = Kernel::new(TransitionParams::new(n, nu, a)?)?;
    println!("P_2(0.4, 1.1) = {:.10}", jpdf_eval(n, nu, a, &[0.4, 1.1])?.value);
    for x in [0.3, 0.8, 1.4] {
        println!("R1({x}): kernel {:.12}, brute force {:.12}", k.density(x)?, corr_rk_bruteforce(n, 1, nu, a, &[x])?);
    }
    Ok(())
}
