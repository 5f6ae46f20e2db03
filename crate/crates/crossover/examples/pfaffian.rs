//! Pfaffian of a random antisymmetric matrix by Parlett-Reid, checked
//! against the recursive expansion and the determinant.

use crossover::linalg::{determinant, pfaffian, pfaffian_recursive, AntisymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> crossover::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = AntisymMatrix::from_upper_fn(6, |_, _| rng.gen_range(-1.0..1.0));
    let pf = pfaffian(&m)?;
    println!("Pf (Parlett-Reid) = {pf:.15}");
    println!("Pf (expansion)    = {:.15}", pfaffian_recursive(&m)?);
    println!("Pf^2 - det        = {:.3e}", pf * pf - determinant(m.matrix())?);
    Ok(())
}
