//! Joint density of the singular values at small `n`, its normalisation,
//! and brute-force correlation functions used as oracles for the kernels.

use crate::error::{Error, Result};
use crate::linalg::{pfaffian, vandermonde_sq, AntisymMatrix};
use crate::quad::{break_list, integrate_breaks, halfline_cutoff, QuadSpec};
use crate::special::{ln_factorial, ln_gamma};
use crate::weights::Weights;
use crate::Nu;

/// Largest `n` accepted by [`jpdf_eval`].
pub const MAX_JPDF_N: usize = 6;

/// Largest `n` accepted by [`corr_rk_bruteforce`].
pub const MAX_BRUTEFORCE_N: usize = 3;

/// `ln C_{n,nu}`:
/// `C = 2^{n(3+n+nu)/2} / (a^n (1-a^2)^{n(n+nu)/2}) prod_{j<n} 1/(Gamma((j+3)/2) Gamma((j+nu+1)/2))`.
pub fn jpdf_const(n: usize, nu: Nu, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    let (nf, v) = (n as f64, nu.as_f64());
    let mut c = nf * (3.0 + nf + v) / 2.0 * 2f64.ln() - nf * a.ln() - nf * (nf + v) / 2.0 * (1.0 - a * a).ln();
    for j in 0..n {
        let jf = j as f64;
        c -= ln_gamma((jf + 3.0) / 2.0)? + ln_gamma((jf + v + 1.0) / 2.0)?;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JpdfValue {
    pub log_constant: f64,
    pub pfaffian_part: f64,
    pub vandermonde_part: f64,
    pub value: f64,
}

/// Evaluator for `P_n(lambda)` at fixed `(n, nu, a)`.
#[derive(Debug, Clone)]
pub struct Jpdf {
    n: usize,
    weights: Weights,
    log_c: f64,
}

impl Jpdf {
    pub fn new(n: usize, nu: Nu, a: f64) -> Result<Self> {
        if n > MAX_JPDF_N {
            return Err(Error::SizeLimit(format!("jpdf evaluation supports n <= {MAX_JPDF_N}, got {n}")));
        }
        Ok(Jpdf { n, log_c: jpdf_const(n, nu, a)?, weights: Weights::new(nu, a)? })
    }

    /// `C Delta({lambda^2}) Pf[G(lambda_j, lambda_k)]`, bordered by a `g`
    /// column for odd `n`.
    pub fn eval(&self, lambda: &[f64]) -> Result<JpdfValue> {
        if lambda.len() != self.n {
            return Err(Error::Dimension(format!("{} values for n = {}", lambda.len(), self.n)));
        }
        if let Some(l) = lambda.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(Error::domain(format!("singular values must be finite and nonnegative, got {l}")));
        }
        let n = self.n;
        let dim = n + n % 2;
        let m = AntisymMatrix::from_upper_fn(dim, |j, k| {
            if k == n {
                self.weights.g(lambda[j])
            } else {
                self.weights.big_g(lambda[j], lambda[k])
            }
        });
        let pf = pfaffian(&m)?;
        let vd = vandermonde_sq(lambda);
        Ok(JpdfValue {
            log_constant: self.log_c,
            pfaffian_part: pf,
            vandermonde_part: vd,
            value: self.log_c.exp() * vd * pf,
        })
    }
}

pub fn jpdf_eval(n: usize, nu: Nu, a: f64, lambda: &[f64]) -> Result<JpdfValue> {
    Jpdf::new(n, nu, a)?.eval(lambda)
}

/// `R_k` straight from the definition,
/// `n!/(n-k)! int P_n(points, free) d free`, by nested quadrature.
/// Two free arguments (n = 3, k = 1) take a few seconds per point.
pub fn corr_rk_bruteforce(n: usize, k: usize, nu: Nu, a: f64, points: &[f64]) -> Result<f64> {
    if n > MAX_BRUTEFORCE_N {
        return Err(Error::SizeLimit(format!("brute-force correlations support n <= {MAX_BRUTEFORCE_N}, got {n}")));
    }
    if k == 0 || k > n || points.len() != k {
        return Err(Error::domain(format!("need 1 <= k = {} <= n = {n} points", points.len())));
    }
    let jp = Jpdf::new(n, nu, a)?;
    let free = n - k;
    let comb = (ln_factorial(n) - ln_factorial(n - k)).exp();
    let mut lam = points.to_vec();
    lam.resize(n, 0.0);
    let v = nested(&jp, &lam, k, free)?;
    Ok(comb * v)
}

fn nested(jp: &Jpdf, lam: &[f64], pos: usize, free: usize) -> Result<f64> {
    if free == 0 {
        return jp.eval(lam).map(|v| v.value);
    }
    let spec = if free == 1 { QuadSpec::with_tol(1e-13, 1e-10) } else { QuadSpec::with_tol(1e-11, 1e-8) };
    let breaks: Vec<f64> = lam[..pos].to_vec();
    let hi = halfline_cutoff(2.0, breaks.iter().cloned().fold(1.5, f64::max), &spec);
    let grid = break_list(0.0, hi, &breaks);
    let mut fail = None;
    let r = integrate_breaks(
        |y| {
            let mut l = lam.to_vec();
            l[pos] = y;
            match nested(jp, &l, pos + 1, free - 1) {
                Ok(v) => v,
                Err(e) => {
                    fail.get_or_insert(e);
                    0.0
                }
            }
        },
        &grid,
        &spec,
    )?;
    if let Some(e) = fail {
        return Err(e);
    }
    Ok(r.value)
}

/// Selberg integral
/// `int_{[0,inf)^n} prod x_i^kappa |Delta(x)|^beta e^{-beta/2 sum x} dx`.
pub fn selberg(n: usize, kappa: f64, beta: f64) -> Result<f64> {
    ln_selberg(n, kappa, beta).map(f64::exp)
}

pub fn ln_selberg(n: usize, kappa: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::domain(format!("Selberg integral needs beta > 0, got {beta}")));
    }
    if !(kappa > -1.0) {
        return Err(Error::domain(format!("Selberg integral needs kappa > -1, got {kappa}")));
    }
    let nf = n as f64;
    let mut s = (nf * (kappa + 1.0) + beta * nf * (nf - 1.0) / 2.0) * (2.0 / beta).ln();
    for j in 0..n {
        let jf = j as f64;
        s += ln_gamma(1.0 + beta * (jf + 1.0) / 2.0)? + ln_gamma(1.0 + kappa + beta * jf / 2.0)? - ln_gamma(1.0 + beta / 2.0)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_quadrant_ext;

    #[test]
    fn single_value_constant_is_inverse_g_bar() {
        for nu in [Nu::Zero, Nu::One] {
            for a in [0.2, 0.5, 0.9] {
                let gb = Weights::new(nu, a).unwrap().g_bar();
                let c = jpdf_const(1, nu, a).unwrap().exp();
                assert!((c * gb - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_by_two_assembly() {
        let v = jpdf_eval(2, Nu::Zero, 0.5, &[0.5, 1.0]).unwrap();
        let g = Weights::new(Nu::Zero, 0.5).unwrap().big_g(0.5, 1.0);
        let want = jpdf_const(2, Nu::Zero, 0.5).unwrap().exp() * 0.75 * g;
        assert!((v.value - want).abs() < 1e-15 * want.abs());
        assert_eq!(jpdf_eval(2, Nu::Zero, 0.5, &[0.7, 0.7]).unwrap().value, 0.0);
    }

    #[test]
    fn permutation_symmetric() {
        let a = jpdf_eval(3, Nu::One, 0.4, &[0.3, 0.9, 1.4]).unwrap().value;
        let b = jpdf_eval(3, Nu::One, 0.4, &[1.4, 0.3, 0.9]).unwrap().value;
        assert!((a - b).abs() < 1e-12 * a.abs() && a > 0.0);
    }

    #[test]
    fn n2_normalised() {
        let jp = Jpdf::new(2, Nu::Zero, 0.5).unwrap();
        let spec = QuadSpec::with_tol(1e-12, 1e-10);
        let v = integrate_quadrant_ext(|x, y| jp.eval(&[x, y]).unwrap().value, 2.0, 1.0, true, &spec).unwrap();
        assert!((v.value - 1.0).abs() < 1e-6, "{}", v.value);
    }

    #[test]
    fn selberg_small_cases() {
        assert!((selberg(1, 1.5, 1.0).unwrap() - 2f64.powf(2.5) * ln_gamma(2.5).unwrap().exp()).abs() < 1e-12);
        let spec = QuadSpec::with_tol(1e-13, 1e-11);
        for (beta, kappa) in [(2.0, 0.0), (1.0, 1.0)] {
            let f = |x: f64, y: f64| {
                let (u, w) = (x * x, y * y);
                4.0 * x * y * (u * w).powf(kappa) * (u - w).abs().powf(beta) * (-beta / 2.0 * (u + w)).exp()
            };
            let q = integrate_quadrant_ext(f, beta / 2.0, 3.0, true, &spec).unwrap().value;
            let s = selberg(2, kappa, beta).unwrap();
            assert!((q - s).abs() < 1e-8 * s, "{q} {s}");
        }
    }
}
