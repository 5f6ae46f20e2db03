//! Skew-orthogonal polynomials at a = 0.5: coefficients in x^2, norms and
//! the skew products that define them.

use crossover::sop::{norm_h, p_poly, q_poly, sop_products, SkewWeight};
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let (nu, a) = (Nu::Zero, 0.5);
    for j in 0..4 {
        println!("p_{j}: {:?}", p_poly(j, nu, a)?.coeffs());
        println!("q_{j}: {:?}", q_poly(j, nu, a, 0.0)?.coeffs());
        println!("h_{j} = {:.6e}", norm_h(j, nu, a)?);
    }
    let pr = sop_products(2, 2, nu, a, 0.0, SkewWeight::Even)?;
    println!("<p_2, q_2> / h_2 = {:.12}", pr.pq / norm_h(2, nu, a)?);
    let pr = sop_products(0, 2, nu, a, 0.0, SkewWeight::Even)?;
    println!("<p_0, p_2> = {:.3e}, <p_0, q_2> = {:.3e}", pr.pp, pr.pq);
    Ok(())
}
