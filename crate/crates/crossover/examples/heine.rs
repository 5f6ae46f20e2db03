//! Averages of characteristic polynomials over sampled matrices reproduce
//! the skew-orthogonal polynomials.

use crossover::ensemble::{heine_mc, HeineKind};
use crossover::sop::p_poly;
use crossover::Nu;

fn main() -> crossover::Result<()> {
    let (j, nu, a) = (2, Nu::One, 0.6);
    let xs = [0.5, 1.0, 2.0];
    let p = p_poly(j, nu, a)?;
    let est = heine_mc(j, nu, a, &xs, HeineKind::P, 200_000, 11, 4)?;
    for (x, e) in xs.iter().zip(&est) {
        println!("x = {x}: p_2 = {:.5}, sampled {:.5} +- {:.5}", p.eval(*x), e.mean, e.std_error);
    }
    Ok(())
}
