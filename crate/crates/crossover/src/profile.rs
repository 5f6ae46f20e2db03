//! Gaussian-smoothed profiles of polynomials, the working representation for
//! skew products and integral transforms at `0 < a < 1`.
//!
//! For `P(x) = x^nu f(x^2)` the profile is
//!
//! ```text
//! M_f(r)   = E[ P(sqrt(1-a^2) r + (a/2) Z) ],   Z ~ N(0, 1)
//! Psi_f(r) = int_0^inf sign(t - r) M_f(t) e^{-2t^2} dt
//! ```
//!
//! and, with `eps = 1 - a^2`,
//!
//! ```text
//! <f, g>_e        = (pi a^2 eps / 8) int_0^inf e^{-2t^2} M_g(t) (-Psi_f(t)) dt
//! int f(y) G(x,y) = (1/4) sqrt(pi a^2 / 2) eps x^nu e^{-2x^2}
//!                   * int_0^inf [e^{-2(r-d)^2/a^2} +- e^{-2(r+d)^2/a^2}] Psi_f(r) dr
//! ```
//!
//! where `d = sqrt(eps) x` and the sign is `+` for `nu = 0`. Both follow from
//! writing `G` as a double Gaussian integral and doing the polynomial part
//! first.
//!
//! For the skew-orthogonal polynomials the profile factorises:
//! `M_{p_j}(r) = eps^{k/2} r^nu p_j^{(a=0)}(r^2)` with `k = 2j + nu`, and the
//! same holds for `q_j` in the kernel gauge. Building profiles from that form
//! avoids the cancellation hidden in the monomial coefficients when `a` is
//! close to 1.

use crate::error::{Error, Result};
use crate::quad::{integrate_halfline_gaussian_ext, integrate_vec_scaled, QuadSpec};
use crate::sop::{kernel_gauge, p_limit_chgoe, SqPolynomial};
use crate::special::{binomial, double_factorial_odd, erfc};
use crate::Nu;
use std::f64::consts::PI;

/// Coefficients of `M_f` in powers of `r`, with a bound on the rounding
/// error carried by each.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    coeffs: Vec<f64>,
    bound: Vec<f64>,
}

impl Profile {
    /// Generic route: smooth the monomial coefficients of `x^nu f(x^2)`.
    pub fn smooth(f: &SqPolynomial, nu: Nu, a: f64) -> Profile {
        let p = f.x_coeffs(nu);
        let s2 = a * a / 4.0;
        let eps = 1.0 - a * a;
        let mut m = vec![0.0; p.len()];
        let mut b = vec![0.0; p.len()];
        for (k, pk) in p.iter().enumerate() {
            if *pk == 0.0 {
                continue;
            }
            for l in 0..=k / 2 {
                let w = binomial(k, 2 * l) * double_factorial_odd(l) * s2.powi(l as i32);
                m[k - 2 * l] += pk * w;
                b[k - 2 * l] += pk.abs() * w;
            }
        }
        for i in 0..m.len() {
            let s = eps.powf(i as f64 / 2.0);
            m[i] *= s;
            b[i] *= s;
        }
        Profile { coeffs: m, bound: b }
    }

    /// Factorised profile of `p_j`.
    pub fn structured_p(j: usize, nu: Nu, a: f64) -> Result<Profile> {
        let pi = p_limit_chgoe(j, nu)?.x_coeffs(nu);
        let s = (1.0 - a * a).powf((2 * j + nu.value()) as f64 / 2.0);
        Ok(Profile::scaled_exact(pi.iter().map(|c| c * s).collect()))
    }

    /// Factorised profile of `q_j` with gauge `c_tilde`:
    /// `eps^{k/2} [eps (r^2 Pi - r Pi'/4) + (c_tilde - c*) Pi]`.
    pub fn structured_q(j: usize, nu: Nu, a: f64, c_tilde: f64) -> Result<Profile> {
        let pi = p_limit_chgoe(j, nu)?.x_coeffs(nu);
        let eps = 1.0 - a * a;
        let s = eps.powf((2 * j + nu.value()) as f64 / 2.0);
        let shift = c_tilde - kernel_gauge(j, nu, a);
        let mut m = vec![0.0; pi.len() + 2];
        for (i, c) in pi.iter().enumerate() {
            m[i + 2] += eps * c;
            m[i] += -eps * i as f64 / 4.0 * c + shift * c;
        }
        Ok(Profile::scaled_exact(m.into_iter().map(|c| c * s).collect()))
    }

    /// Profile with the given coefficients in powers of `r`, taken as exact.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Profile {
        Profile::scaled_exact(coeffs)
    }

    fn scaled_exact(coeffs: Vec<f64>) -> Profile {
        let bound = coeffs.iter().map(|c| c.abs()).collect();
        Profile { coeffs, bound }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `M_f(r)`.
    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    /// `Psi_f(r)` given the tail moments from [`tail_moments`].
    pub fn psi_with(&self, tails: &[f64]) -> f64 {
        self.coeffs.iter().zip(tails).map(|(c, t)| c * t).sum()
    }

    pub fn psi(&self, r: f64) -> f64 {
        let mut t = vec![0.0; self.coeffs.len()];
        tail_moments(r, &mut t);
        self.psi_with(&t)
    }

    /// Upper bound on `|Psi_f|` built from absolute coefficient sizes; sets
    /// the scale of rounding errors in everything computed from `f`.
    pub fn magnitude(&self) -> f64 {
        weighted_abs(&self.bound)
    }

    /// Same bound from the smoothed coefficients alone, i.e. without the
    /// cancellation that produced them.
    pub fn size(&self) -> f64 {
        weighted_abs(&self.coeffs)
    }
}

fn weighted_abs(c: &[f64]) -> f64 {
    let mut t0 = vec![0.0; c.len()];
    full_moments(&mut t0);
    c.iter().zip(&t0).map(|(b, t)| b.abs() * t).sum()
}

impl Profile {
}

/// `T_i = int_0^inf t^i e^{-2t^2} dt` for `i < out.len()`.
fn full_moments(out: &mut [f64]) {
    for i in 0..out.len() {
        out[i] = match i {
            0 => (PI / 8.0).sqrt(),
            1 => 0.25,
            _ => (i - 1) as f64 / 4.0 * out[i - 2],
        };
    }
}

/// `2 U_i(r) - T_i` with `U_i(r) = int_r^inf t^i e^{-2t^2} dt`, so that
/// `Psi_f(r) = sum_i m_i (2 U_i(r) - T_i)`.
pub fn tail_moments(r: f64, out: &mut [f64]) {
    let e = (-2.0 * r * r).exp();
    let mut u = [0.0f64; 2];
    let mut t = [0.0f64; 2];
    let mut rp = 1.0;
    for i in 0..out.len() {
        let (ui, ti) = match i {
            0 => ((PI / 8.0).sqrt() * erfc(2f64.sqrt() * r), (PI / 8.0).sqrt()),
            1 => (e / 4.0, 0.25),
            _ => {
                let k = (i - 1) as f64 / 4.0;
                (k * u[i % 2] + rp * e / 4.0, k * t[i % 2])
            }
        };
        if i >= 1 {
            rp *= r;
        }
        u[i % 2] = ui;
        t[i % 2] = ti;
        out[i] = 2.0 * ui - ti;
    }
}

/// `<f, g>_e` from the two profiles.
pub fn skew(pf: &Profile, pg: &Profile, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    let eps = 1.0 - a * a;
    let mut tails = vec![0.0; pf.coeffs.len()];
    let f = |t: f64| {
        tail_moments(t, &mut tails);
        (-2.0 * t * t).exp() * pg.eval(t) * -pf.psi_with(&tails)
    };
    let scale = pf.size() * pg.size();
    let spec = QuadSpec::with_tol(4.0 * f64::EPSILON * scale.max(1e-300), 1e-13);
    let extent = ((pf.degree() + pg.degree()) as f64).sqrt() / 2.0;
    let r = integrate_halfline_gaussian_ext(f, 2.0, extent, &[], &spec)?;
    Ok(PI * a * a * eps / 8.0 * r.value)
}

/// `<f>_g = int_0^inf f(y) g_nu(y) dy = sqrt(pi a^2 eps / 8) int_0^inf M_f(t) e^{-2t^2} dt`,
/// summed exactly over the moments.
pub fn mean(pf: &Profile, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    let mut t0 = vec![0.0; pf.coeffs.len()];
    full_moments(&mut t0);
    let s: f64 = pf.coeffs.iter().zip(&t0).map(|(c, t)| c * t).sum();
    Ok((PI * a * a * (1.0 - a * a) / 8.0).sqrt() * s)
}

/// Values and error bounds of `int_0^inf f_i(y) G_nu(x, y) dy` for several
/// profiles at once.
#[derive(Debug, Clone, PartialEq)]
pub struct Transforms {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Transforms of all `profiles` at `x >= 0`, sharing one adaptive rule.
pub fn transforms(profiles: &[&Profile], nu: Nu, a: f64, x: f64) -> Result<Transforms> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    let x = x.abs();
    let eps = 1.0 - a * a;
    let a2 = a * a;
    let d = eps.sqrt() * x;
    let width = 7.0 * a / 2f64.sqrt();
    let lo = (d - width).max(0.0);
    let hi = d + width;
    let maxdeg = profiles.iter().map(|p| p.coeffs.len()).max().unwrap_or(1);
    let mut tails = vec![0.0; maxdeg];
    let odd = nu == Nu::One;
    let f = |r: f64, out: &mut [f64]| {
        let k = (-2.0 * (r - d) * (r - d) / a2).exp();
        let k2 = (-2.0 * (r + d) * (r + d) / a2).exp();
        let kern = if odd { k - k2 } else { k + k2 };
        tail_moments(r, &mut tails);
        for (o, p) in out.iter_mut().zip(profiles) {
            *o = kern * p.psi_with(&tails);
        }
    };
    let mags: Vec<f64> = profiles.iter().map(|p| p.magnitude()).collect();
    let kernel_mass = a * (PI / 2.0).sqrt();
    let scales: Vec<f64> = mags.iter().map(|m| (kernel_mass * m).max(1e-300)).collect();
    let spec = QuadSpec::with_tol(4.0 * f64::EPSILON, 1e-13);
    let points: Vec<f64> = if d > lo { vec![lo, d, hi] } else { vec![lo, hi] };
    let r = integrate_vec_scaled(f, profiles.len(), &points, &spec, &scales)?;
    let pre = 0.25 * (PI * a2 / 2.0).sqrt() * eps * x.powi(nu.value() as i32) * (-2.0 * x * x).exp();
    let values = r.values.iter().map(|v| pre * v).collect();
    let errors = r
        .errors
        .iter()
        .zip(&mags)
        .map(|(e, m)| pre * (e + 64.0 * f64::EPSILON * kernel_mass * m))
        .collect();
    Ok(Transforms { values, errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sop::{p_poly, q_poly};

    #[test]
    fn tails_match_quadrature() {
        let mut t = vec![0.0; 6];
        tail_moments(0.7, &mut t);
        for (i, ti) in t.iter().enumerate() {
            let spec = QuadSpec::with_tol(1e-16, 1e-13);
            let f = |s: f64| (s - 0.7).signum() * s.powi(i as i32) * (-2.0 * s * s).exp();
            let want = integrate_halfline_gaussian_ext(f, 2.0, 1.0, &[0.7], &spec).unwrap().value;
            assert!((ti - want).abs() < 1e-14, "{i} {ti} {want}");
        }
    }

    #[test]
    fn structured_profiles_match_generic() {
        for nu in [Nu::Zero, Nu::One] {
            for j in 0..5 {
                let a = 0.5;
                let sp = Profile::structured_p(j, nu, a).unwrap();
                let gp = Profile::smooth(&p_poly(j, nu, a).unwrap(), nu, a);
                let c = 0.3;
                let sq = Profile::structured_q(j, nu, a, c).unwrap();
                let gq = Profile::smooth(&q_poly(j, nu, a, c).unwrap(), nu, a);
                for r in [0.0, 0.4, 1.3] {
                    assert!((sp.eval(r) - gp.eval(r)).abs() < 1e-12 * (1.0 + gp.eval(r).abs()));
                    assert!((sq.eval(r) - gq.eval(r)).abs() < 1e-11 * (1.0 + gq.eval(r).abs()), "{nu} {j} {r}");
                }
            }
        }
    }
}
