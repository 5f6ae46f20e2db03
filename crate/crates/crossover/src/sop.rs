//! Skew-orthogonal polynomials `p_j`, `q_j` as exact coefficient vectors in
//! `t = x^2`, their norms, skew products and limit polynomials.
//!
//! `p_j` is monic of degree `j` in `t`, `q_j` monic of degree `j + 1`. The
//! second family is fixed only up to `q_j -> q_j + c p_j`; that freedom is the
//! `c_tilde` argument throughout.

use crate::error::{Error, Result};
use crate::profile::{self, Profile};
use crate::quad::{integrate_halfline_gaussian_ext, integrate_quadrant_ext, QuadSpec};
use crate::special::{double_factorial_odd, gaussian_moment, hermite_coeffs, laguerre_coeffs, ln_factorial};
use crate::weights::Weights;
use crate::Nu;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest polynomial index accepted.
pub const MAX_INDEX: usize = 60;

/// The leading coefficient is exactly 1 by construction; pin it against
/// rounding in the factorial ratios.
fn monic(mut coeffs: Vec<f64>) -> SqPolynomial {
    if let Some(c) = coeffs.last_mut() {
        *c = 1.0;
    }
    SqPolynomial::new(coeffs)
}

/// Polynomial in `t = x^2`, `P(x) = sum_k c_k x^{2k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SqPolynomial {
    coeffs: Vec<f64>,
}

impl SqPolynomial {
    /// Coefficients lowest degree first. An empty vector is the zero polynomial.
    pub fn new(coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            return SqPolynomial { coeffs: vec![0.0] };
        }
        SqPolynomial { coeffs }
    }

    pub fn one() -> Self {
        SqPolynomial { coeffs: vec![1.0] }
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        SqPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1.0
    }

    pub fn eval_t(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_t(x * x)
    }

    pub fn scaled(&self, s: f64) -> Self {
        SqPolynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &SqPolynomial, s: f64) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut c = vec![0.0; n];
        for (i, v) in self.coeffs.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in other.coeffs.iter().enumerate() {
            c[i] += s * v;
        }
        SqPolynomial::new(c)
    }

    /// Largest coefficient difference, padding the shorter vector with zeros.
    pub fn max_abs_diff(&self, other: &SqPolynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|i| (self.coeffs.get(i).unwrap_or(&0.0) - other.coeffs.get(i).unwrap_or(&0.0)).abs())
            .fold(0.0, f64::max)
    }

    /// Coefficients of `x^nu P(x^2)` in powers of `x`.
    pub fn x_coeffs(&self, nu: Nu) -> Vec<f64> {
        let v = nu.value();
        let mut out = vec![0.0; 2 * self.degree() + v + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[2 * k + v] = *c;
        }
        out
    }
}

fn check_index(j: usize) -> Result<()> {
    if j > MAX_INDEX {
        return Err(Error::SizeLimit(format!("polynomial index {j} exceeds {MAX_INDEX}")));
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("a must be positive and finite, got {a}")));
    }
    Ok(())
}

fn check_interpolating(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    Ok(())
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `p_j` from the finite double sum over products of Hermite polynomials
/// `H_{j-k}(sqrt(2) x / a) H_{j-k+nu}(sqrt(2) x / a)`.
pub fn p_poly(j: usize, nu: Nu, a: f64) -> Result<SqPolynomial> {
    check_index(j)?;
    check_a(a)?;
    let v = nu.value();
    let half_a2 = 0.5 * a * a;
    let norm = 0.5f64.powi((2 * j + v) as i32);
    let mut out = vec![0.0; j + 1];
    for k in 0..=j {
        let (m1, m2) = (j - k, j - k + v);
        let ck = (ln_factorial(j) + ln_factorial(j + v) - ln_factorial(k) - ln_factorial(m1) - ln_factorial(m2)).exp();
        let (h1, h2) = (hermite_coeffs(m1), hermite_coeffs(m2));
        let mut prod = vec![0.0; m1 + m2 + 1];
        for (i1, c1) in h1.iter().enumerate() {
            for (i2, c2) in h2.iter().enumerate() {
                prod[i1 + i2] += c1 * c2;
            }
        }
        // the x^d term carries (a^2/2)^l with 2l = m1 + m2 - d
        for (d, c) in prod.iter().enumerate() {
            if *c == 0.0 || d < v {
                continue;
            }
            let l = (m1 + m2 - d) / 2;
            out[(d - v) / 2] += sign(k) * ck * c * half_a2.powi(l as i32) * norm;
        }
    }
    Ok(monic(out))
}

/// Monomial expansion of `E[L(u t + y^2)]` for a Laguerre coefficient
/// vector `ell` and `y ~ N(0, s2)`, lowest power of `t` first.
fn laguerre_gauss_expand(ell: &[f64], u: f64, s2: f64, out: &mut [f64]) {
    for (m, l) in ell.iter().enumerate() {
        for r in 0..=m {
            let i = m - r;
            let mu = double_factorial_odd(r) * s2.powi(r as i32);
            out[i] += l * crate::special::binomial(m, r) * u.powi(i as i32) * mu;
        }
    }
}

/// `p_j` from the single Gaussian average of `L_j^{(nu)}(4t/(1+a^2) + y^2)`,
/// each power of `y^2` integrated exactly.
pub fn p_poly_laguerre(j: usize, nu: Nu, a: f64) -> Result<SqPolynomial> {
    check_index(j)?;
    check_a(a)?;
    let big_a = 1.0 + a * a;
    let pre = (ln_factorial(j) + j as f64 * (big_a / 4.0).ln()).exp() * sign(j);
    let mut out = vec![0.0; j + 1];
    laguerre_gauss_expand(&laguerre_coeffs(j, nu.as_f64()), 4.0 / big_a, a * a / big_a, &mut out);
    Ok(monic(out.into_iter().map(|c| c * pre).collect()))
}

/// `p_j(x)` from the double angular integral, by the trapezoidal rule with
/// `4(j + nu) + 32` nodes per angle.
pub fn p_contour_oracle(j: usize, nu: Nu, a: f64, x: f64) -> Result<f64> {
    if j > 20 {
        return Err(Error::SizeLimit(format!("contour oracle supports j <= 20, got {j}")));
    }
    check_a(a)?;
    let v = nu.value();
    if v == 1 && x.abs() < 1e-8 {
        return Err(Error::domain("contour oracle divides by x; use the polynomial near 0"));
    }
    let nodes = 4 * (j + v) + 48;
    let h = 2.0 * PI / nodes as f64;
    let a2 = a * a;
    // saddle radius of e^{(1+a^2) r^2/4 + 2|x| r} / r^{2j+nu}, which keeps the
    // cancellation in the trapezoidal sum near rounding level
    let m = (2 * j + v) as f64;
    let r = if m == 0.0 { 1.0 } else { 2.0 * m / (2.0 * x.abs() + (4.0 * x * x + 2.0 * (1.0 + a2) * m).sqrt()) };
    let mut acc = Complex64::new(0.0, 0.0);
    for il in 0..nodes {
        let el = Complex64::from_polar(r, il as f64 * h);
        for ir in 0..nodes {
            let er = Complex64::from_polar(r, ir as f64 * h);
            let expo = -a2 / 8.0 * (el * el + er * er) - x * (el + er) - 0.25 * el * er;
            acc += expo.exp() / (el.powu(j as u32) * er.powu((j + v) as u32));
        }
    }
    let mean = acc.re / (nodes * nodes) as f64;
    let fact = (ln_factorial(j) + ln_factorial(j + v)).exp();
    Ok(fact * mean / (-x).powi(v as i32))
}

/// `p_j(x)` from the two-dimensional Gaussian integral
/// `x^{-nu} E[(iy + l + x)^j (iy - l + x)^{j+nu}]` with
/// `y ~ N(0, (1+a^2)/8)`, `l ~ N(0, (1-a^2)/8)`, by quadrature.
pub fn p_gauss_oracle(j: usize, nu: Nu, a: f64, x: f64) -> Result<f64> {
    check_index(j)?;
    check_interpolating(a)?;
    let v = nu.value();
    if v == 1 && x.abs() < 1e-8 {
        return Err(Error::domain("Gaussian oracle divides by x; use the polynomial near 0"));
    }
    let (sy, sl) = ((1.0 + a * a).sqrt() / 2.0, (1.0 - a * a).sqrt() / 2.0);
    let term = |y: f64, l: f64| {
        let z1 = Complex64::new(x + l, y);
        let z2 = Complex64::new(x - l, y);
        (z1.powu(j as u32) * z2.powu((j + v) as u32)).re
    };
    let f = |u: f64, w: f64| {
        let (y, l) = (u * sy, w * sl);
        (term(y, l) + term(-y, l) + term(y, -l) + term(-y, -l)) * (-u * u - w * w).exp()
    };
    let spec = QuadSpec::with_tol(1e-14, 1e-13);
    let extent = ((2 * j + v) as f64).sqrt();
    let r = integrate_quadrant_ext(f, 1.0, extent, false, &spec)?;
    Ok(r.value / PI / x.powi(v as i32))
}

/// `q_j` from the explicit three-block Laguerre form, Gaussian moments taken
/// exactly. `c_tilde` adds `c_tilde * p_j`.
pub fn q_poly(j: usize, nu: Nu, a: f64, c_tilde: f64) -> Result<SqPolynomial> {
    check_interpolating(a)?;
    q_poly_unchecked(j, nu, a, c_tilde)
}

/// [`q_poly`] for any `a > 0`; the expression is algebraic in `a^2`.
pub(crate) fn q_poly_unchecked(j: usize, nu: Nu, a: f64, c_tilde: f64) -> Result<SqPolynomial> {
    check_index(j)?;
    check_a(a)?;
    let v = nu.as_f64();
    let a2 = a * a;
    let big_a = 1.0 + a2;
    let eps = 1.0 - a2;
    let u = 4.0 / big_a;
    let s2 = a2 / big_a;
    let len = j + 3;
    let lag = |k: i64, alpha: f64| -> Vec<f64> {
        if k < 0 {
            Vec::new()
        } else {
            laguerre_coeffs(k as usize, alpha)
        }
    };
    let expand = |ell: &[f64]| {
        let mut out = vec![0.0; len];
        laguerre_gauss_expand(ell, u, s2, &mut out);
        out
    };
    let mut res = vec![0.0; len];
    let b1 = expand(&lag(j as i64 - 2, v + 2.0));
    for i in 0..len - 1 {
        res[i + 1] += -4.0 / (big_a * big_a) * b1[i];
    }
    let b2 = expand(&lag(j as i64 - 1, v + 1.0));
    for i in 0..len {
        res[i] += (2.0 * v + 1.0) / (2.0 * big_a) * b2[i];
    }
    for i in 0..len - 1 {
        res[i + 1] += -2.0 * eps / big_a * b2[i];
    }
    let ell = lag(j as i64, v);
    let b3 = expand(&ell);
    for i in 0..len - 1 {
        res[i + 1] += b3[i];
    }
    for i in 0..len {
        res[i] += c_tilde * b3[i];
    }
    // -(1-a^2)(2j a^2 - 1)/(4a^2) - (1-a^4) y^2/(4a^4), with the 1/a^2 pieces
    // cancelled against the y^2 moment before multiplying out
    for (m, l) in ell.iter().enumerate() {
        for r in 0..=m {
            let i = m - r;
            let df = double_factorial_odd(r);
            let mu = df * s2.powi(r as i32);
            let tail = if r == 0 {
                0.0
            } else {
                r as f64 * df * a2.powi(r as i32 - 1) / big_a.powi(r as i32)
            };
            let beta = -eps / 2.0 * (j as f64 * mu + tail);
            res[i] += l * crate::special::binomial(m, r) * u.powi(i as i32) * beta;
        }
    }
    let pre = (ln_factorial(j) + j as f64 * (big_a / 4.0).ln()).exp() * sign(j);
    res.truncate(j + 2);
    Ok(monic(res.into_iter().map(|c| c * pre).collect()))
}

/// `q_j` from `x^{-nu} (x^2 - d_x^2/16 + (a^4-1)/2 d_{a^2} + c_tilde)(x^nu p_j)`,
/// the `a^2` derivative by a central difference with step `1e-6`.
pub fn q_via_operator_oracle(j: usize, nu: Nu, a: f64, c_tilde: f64) -> Result<SqPolynomial> {
    const STEP: f64 = 1e-6;
    check_index(j)?;
    if !(a > 1e-3 && a < 1.0 - 1e-3) {
        return Err(Error::domain(format!("finite-difference step invalid at a = {a}; need 1e-3 < a < 1 - 1e-3")));
    }
    let v = nu.value();
    let p = p_poly(j, nu, a)?;
    let a2 = a * a;
    let pp = p_poly(j, nu, (a2 + STEP).sqrt())?;
    let pm = p_poly(j, nu, (a2 - STEP).sqrt())?;
    let mut res = vec![0.0; j + 2];
    for (k, c) in p.coeffs().iter().enumerate() {
        res[k + 1] += c;
        res[k] += c_tilde * c;
        res[k] += (a2 * a2 - 1.0) / 2.0 * (pp.coeffs()[k] - pm.coeffs()[k]) / (2.0 * STEP);
        if k >= 1 {
            let m = (2 * k + v) as f64;
            res[k - 1] -= m * (m - 1.0) / 16.0 * c;
        }
    }
    Ok(SqPolynomial::new(res))
}

/// Gauge `c_tilde` for which [`q_poly`] equals the characteristic-polynomial
/// average `x^{-nu} <det(x - J) (x^2 + Tr J^2 / 2 + c)>`.
///
/// That average has no `t^j` term at `c = 0`, which fixes the shift.
pub fn heine_gauge(j: usize, nu: Nu, a: f64, c: f64) -> Result<f64> {
    let q = q_poly(j, nu, a, 0.0)?;
    Ok(c - q.coeffs()[j])
}

/// Gauge used inside the kernels. With it the Gaussian-smoothed profile of
/// `q_j` has no `p_j` admixture; see [`crate::profile::Profile::structured_q`].
pub fn kernel_gauge(j: usize, nu: Nu, a: f64) -> f64 {
    -(a * a + (1.0 + a * a) * (2 * j + nu.value()) as f64) / 4.0
}

/// `ln h_j`.
pub fn ln_norm_h(j: usize, nu: Nu, a: f64) -> Result<f64> {
    check_interpolating(a)?;
    let v = nu.value();
    Ok(PI.ln() + 2.0 * a.ln() + (2 * j + 2 + v) as f64 * (1.0 - a * a).ln() + ln_factorial(j) + ln_factorial(j + v)
        - (4 * j + 2 * v + 7) as f64 * 2f64.ln())
}

/// Normalisation `h_j = <p_j, q_j>`.
pub fn norm_h(j: usize, nu: Nu, a: f64) -> Result<f64> {
    ln_norm_h(j, nu, a).map(f64::exp)
}

/// Even skew product `int int f(x) g(y) G_nu(x, y)`, from the
/// Gaussian-smoothed profiles of `f` and `g`.
pub fn skew_product_even(f: &SqPolynomial, g: &SqPolynomial, nu: Nu, a: f64) -> Result<f64> {
    check_interpolating(a)?;
    let pf = Profile::smooth(f, nu, a);
    let pg = Profile::smooth(g, nu, a);
    profile::skew(&pf, &pg, a)
}

/// Even skew product by direct quadrature over the quadrant. Slow; an oracle
/// for [`skew_product_even`].
pub fn skew_product_even_quadrature(f: &SqPolynomial, g: &SqPolynomial, nu: Nu, a: f64) -> Result<f64> {
    check_interpolating(a)?;
    let w = Weights::new(nu, a)?;
    let spec = QuadSpec::with_tol(1e-16, 1e-10);
    let extent = ((f.degree() + g.degree() + 1) as f64).sqrt();
    integrate_quadrant_ext(|x, y| f.eval(x) * g.eval(y) * w.big_g(x, y), 2.0, extent, true, &spec).map(|r| r.value)
}

/// `int_0^inf f(y) g_nu(y) dy`.
pub fn weighted_mean(f: &SqPolynomial, nu: Nu, a: f64) -> Result<f64> {
    check_interpolating(a)?;
    let w = Weights::new(nu, a)?;
    match nu {
        Nu::Zero => {
            let pre = (PI * a * a * (1.0 - a * a) / 8.0).sqrt();
            let mut s = 0.0;
            for (i, c) in f.coeffs().iter().enumerate() {
                s += c * 0.5 * gaussian_moment(i, 2.0)?;
            }
            Ok(pre * s)
        }
        Nu::One => {
            let extent = (f.degree() as f64 + 1.0).sqrt();
            // rounding floor set by the absolute integrand
            let mass = integrate_halfline_gaussian_ext(|y| f.eval(y).abs() * w.g(y), 2.0, extent, &[], &QuadSpec::with_tol(0.0, 1e-6))?;
            let spec = QuadSpec::with_tol(4.0 * f64::EPSILON * mass.value.max(1e-300), 1e-13);
            integrate_halfline_gaussian_ext(|y| f.eval(y) * w.g(y), 2.0, extent, &[], &spec).map(|r| r.value)
        }
    }
}

/// Odd skew product `int int f(x) g(y) H_nu(x, y)`, expanded as
/// `<f,g>_e - <f>_g <1,g>_e / g_bar + <g>_g <1,f>_e / g_bar`.
pub fn skew_product_odd(f: &SqPolynomial, g: &SqPolynomial, nu: Nu, a: f64) -> Result<f64> {
    check_interpolating(a)?;
    let gb = Weights::new(nu, a)?.g_bar();
    let one = SqPolynomial::one();
    let fg = skew_product_even(f, g, nu, a)?;
    let one_g = skew_product_even(&one, g, nu, a)?;
    let one_f = skew_product_even(&one, f, nu, a)?;
    Ok(fg - weighted_mean(f, nu, a)? * one_g / gb + weighted_mean(g, nu, a)? * one_f / gb)
}

/// Odd skew product by direct quadrature against `H_nu`. Slow; an oracle.
pub fn skew_product_odd_quadrature(f: &SqPolynomial, g: &SqPolynomial, nu: Nu, a: f64) -> Result<f64> {
    check_interpolating(a)?;
    let w = Weights::new(nu, a)?;
    let gb = w.g_bar();
    let spec = QuadSpec::with_tol(1e-16, 1e-10);
    let extent = ((f.degree() + g.degree() + 1) as f64).sqrt();
    let bar = |t: f64| w.big_g_bar(t).unwrap_or(f64::NAN);
    let h = |x: f64, y: f64| w.big_g(x, y) - w.g(x) * bar(y) / gb + w.g(y) * bar(x) / gb;
    integrate_quadrant_ext(|x, y| f.eval(x) * g.eval(y) * h(x, y), 2.0, extent, true, &spec).map(|r| r.value)
}

/// `p_j` at `a -> 0`: `j!/(-4)^j L_j^{(nu)}(4t)`.
pub fn p_limit_chgoe(j: usize, nu: Nu) -> Result<SqPolynomial> {
    check_index(j)?;
    Ok(SqPolynomial::new(laguerre_in_4t(j as i64, nu, j)))
}

/// `j!/(-4)^j L_k^{(nu)}(4t)` padded to `len` coefficients.
fn laguerre_in_4t(k: i64, nu: Nu, j: usize) -> Vec<f64> {
    let pre = (ln_factorial(j) - j as f64 * 4f64.ln()).exp() * sign(j);
    if k < 0 {
        return vec![0.0];
    }
    laguerre_coeffs(k as usize, nu.as_f64())
        .iter()
        .enumerate()
        .map(|(m, c)| pre * c * 4f64.powi(m as i32))
        .collect()
}

/// `q_j` at `a -> 0`: the combination
/// `(j+1) L_{j+1} - (j+nu) L_j - (j+nu) L_{j-1}` at `4t`, made monic.
///
/// Agrees with `q_poly(j, nu, a -> 0, c)` for a suitable gauge `c`.
pub fn q_limit_chgoe(j: usize, nu: Nu) -> Result<SqPolynomial> {
    check_index(j)?;
    let jn = (j + nu.value()) as f64;
    let top = SqPolynomial::new(laguerre_in_4t(j as i64 + 1, nu, j)).scaled((j + 1) as f64);
    let mid = SqPolynomial::new(laguerre_in_4t(j as i64, nu, j));
    let low = SqPolynomial::new(laguerre_in_4t(j as i64 - 1, nu, j));
    let q = top.add_scaled(&mid, -jn).add_scaled(&low, -jn);
    let lead = q.leading();
    Ok(q.scaled(1.0 / lead))
}

/// `x^nu p_j` at `a -> 1`: `2^{-3(2j+nu)/2} H_{2j+nu}(sqrt(2) x)`, divided by `x^nu`.
pub fn p_limit_gaoe(j: usize, nu: Nu) -> Result<SqPolynomial> {
    check_index(j)?;
    let v = nu.value();
    let k = 2 * j + v;
    let h = hermite_coeffs(k);
    let scale = 2f64.powf(-1.5 * k as f64);
    let coeffs = (0..=j).map(|i| h[2 * i + v] * 2f64.powf((2 * i + v) as f64 / 2.0) * scale).collect();
    Ok(SqPolynomial::new(coeffs))
}

/// Rescaled `a -> infinity` limit:
/// `2^{-3(2j+nu)/2} H_j(sqrt(2) x) H_{j+nu}(sqrt(2) x) / x^nu`.
pub fn p_limit_split(j: usize, nu: Nu) -> Result<SqPolynomial> {
    check_index(j)?;
    let v = nu.value();
    let (h1, h2) = (hermite_coeffs(j), hermite_coeffs(j + v));
    let mut prod = vec![0.0; 2 * j + v + 1];
    for (i1, c1) in h1.iter().enumerate() {
        for (i2, c2) in h2.iter().enumerate() {
            prod[i1 + i2] += c1 * c2;
        }
    }
    let scale = 2f64.powf(-1.5 * (2 * j + v) as f64);
    let coeffs = (0..=j).map(|i| prod[2 * i + v] * 2f64.powf((2 * i + v) as f64 / 2.0) * scale).collect();
    Ok(SqPolynomial::new(coeffs))
}

/// The four skew products between the pairs `j` and `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopProducts {
    pub pp: f64,
    pub pq: f64,
    pub qp: f64,
    pub qq: f64,
}

/// Which two-point weight a skew product uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewWeight {
    /// `G_nu`, used for even `n`.
    Even,
    /// `H_nu`, used for odd `n`.
    Odd,
}

/// Skew products of `(p_j, q_j)` with `(p_k, q_k)`, computed from the
/// factorised profiles. Unlike [`skew_product_even`] on the coefficient
/// vectors this keeps full relative accuracy at `a` close to 1, where the
/// norms become tiny compared with the coefficients.
pub fn sop_products(j: usize, k: usize, nu: Nu, a: f64, c_tilde: f64, weight: SkewWeight) -> Result<SopProducts> {
    check_interpolating(a)?;
    check_index(j.max(k))?;
    let (pj, qj) = (Profile::structured_p(j, nu, a)?, Profile::structured_q(j, nu, a, c_tilde)?);
    let (pk, qk) = (Profile::structured_p(k, nu, a)?, Profile::structured_q(k, nu, a, c_tilde)?);
    let prod = |f: &Profile, g: &Profile| -> Result<f64> {
        let e = profile::skew(f, g, a)?;
        match weight {
            SkewWeight::Even => Ok(e),
            SkewWeight::Odd => {
                let one = Profile::smooth(&SqPolynomial::one(), nu, a);
                let gb = Weights::new(nu, a)?.g_bar();
                let (mf, mg) = (profile::mean(f, a)?, profile::mean(g, a)?);
                Ok(e - mf * profile::skew(&one, g, a)? / gb + mg * profile::skew(&one, f, a)? / gb)
            }
        }
    };
    Ok(SopProducts { pp: prod(&pj, &pk)?, pq: prod(&pj, &qk)?, qp: prod(&qj, &pk)?, qq: prod(&qj, &qk)? })
}

/// `(<p_j>_g, <q_j>_g)` from the factorised profiles. Both vanish for odd `j`.
pub fn sop_means(j: usize, nu: Nu, a: f64, c_tilde: f64) -> Result<(f64, f64)> {
    check_interpolating(a)?;
    check_index(j)?;
    let p = Profile::structured_p(j, nu, a)?;
    let q = Profile::structured_q(j, nu, a, c_tilde)?;
    Ok((profile::mean(&p, a)?, profile::mean(&q, a)?))
}

/// A skew-orthogonal pair with its norm.
#[derive(Debug, Clone)]
pub struct SopPair {
    pub j: usize,
    pub nu: Nu,
    pub a: f64,
    pub c_tilde: f64,
    pub p: SqPolynomial,
    pub q: SqPolynomial,
    pub h: f64,
}

impl SopPair {
    pub fn new(j: usize, nu: Nu, a: f64, c_tilde: f64) -> Result<Self> {
        Ok(SopPair {
            j,
            nu,
            a,
            c_tilde,
            p: p_poly(j, nu, a)?,
            q: q_poly(j, nu, a, c_tilde)?,
            h: norm_h(j, nu, a)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_closed_forms() {
        for &a in &[0.2, 0.5, 0.9] {
            let p = p_poly(1, Nu::Zero, a).unwrap();
            assert!((p.coeffs()[0] + 0.25).abs() < 1e-15 && p.is_monic());
            let p = p_poly(1, Nu::One, a).unwrap();
            assert!((p.coeffs()[0] + (2.0 + a * a) / 4.0).abs() < 1e-14);
            assert_eq!(p_poly(0, Nu::One, a).unwrap().coeffs(), &[1.0]);
        }
    }

    #[test]
    fn q_is_monic_and_gauge_linear() {
        let q0 = q_poly(2, Nu::One, 0.6, 0.0).unwrap();
        let q1 = q_poly(2, Nu::One, 0.6, 0.7).unwrap();
        let p = p_poly(2, Nu::One, 0.6).unwrap();
        assert_eq!(q0.degree(), 3);
        assert!((q0.leading() - 1.0).abs() < 1e-14);
        assert!(q1.add_scaled(&q0, -1.0).max_abs_diff(&p.scaled(0.7)) < 1e-14);
    }

    #[test]
    fn q_at_j0_is_t_plus_gauge() {
        let q = q_poly(0, Nu::Zero, 0.5, 0.3).unwrap();
        assert!((q.coeffs()[0] - 0.3).abs() < 1e-15 && (q.coeffs()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn norm_spot_value() {
        let h = norm_h(0, Nu::Zero, 0.5).unwrap();
        let want = PI * 0.25 * 0.75f64.powi(2) / 128.0;
        assert!((h - want).abs() < 1e-16);
    }

    #[test]
    fn limit_polynomials_are_monic() {
        for j in 0..6 {
            for nu in [Nu::Zero, Nu::One] {
                for p in [p_limit_chgoe(j, nu), q_limit_chgoe(j, nu), p_limit_gaoe(j, nu), p_limit_split(j, nu)] {
                    assert!((p.unwrap().leading() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn size_cap() {
        assert!(matches!(p_poly(61, Nu::Zero, 0.5), Err(Error::SizeLimit(_))));
    }
}
