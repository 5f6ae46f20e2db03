//! Kernel ingredients in double-double precision, for `a` close to 1.
//!
//! There the kernel sums cancel: for `n = 4` at `a = 1 - 1e-4` single terms
//! exceed the density by about `1e7`. Every quantity entering the sums is
//! therefore computed here to about 30 digits.
//!
//! Transforms use the profile representation with the order of integration
//! swapped. For a profile `M(t) = sum_u m_u t^u`,
//!
//! ```text
//! int f(y) G(x,y) dy = pre(x) sum_u m_u A_u(x),
//! A_u(x) = int_0^inf t^u e^{-2t^2} kappa_d(t) dt,
//! kappa_d(t) = int_0^inf sign(t - r) [e^{-2(r-d)^2/a^2} +- e^{-2(r+d)^2/a^2}] dr
//! ```
//!
//! with `d = sqrt(1-a^2) x`. `kappa_d` is a sum of error functions, and
//! `A_u` is computed by panelled Gauss-Legendre quadrature.

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::Nu;

/// Relative accuracy assumed for every double-double quantity below.
pub const REL_ERR: f64 = 1e-28;

/// `binom(n, k)` exactly.
fn binom(n: usize, k: usize) -> Dd {
    if k > n {
        return Dd::ZERO;
    }
    let mut b: u128 = 1;
    for i in 0..k {
        b = b * (n - i) as u128 / (i + 1) as u128;
    }
    from_u128(b)
}

fn from_u128(v: u128) -> Dd {
    let hi = v as f64;
    let rest = v as i128 - hi as i128;
    Dd::new(hi) + Dd::new(rest as f64)
}

fn factorial(k: usize) -> Dd {
    from_u128((1..=k as u128).product())
}

/// `(2r-1)!!`.
fn double_factorial_odd(r: usize) -> Dd {
    from_u128((1..=r as u128).map(|i| 2 * i - 1).product())
}

/// Coefficients of `L_k^{(alpha)}(z)`, `(-1)^m binom(k+alpha, k-m) / m!`.
fn laguerre(k: usize, alpha: usize) -> Vec<Dd> {
    (0..=k)
        .map(|m| {
            let c = binom(k + alpha, k - m) / factorial(m);
            if m % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

fn sign(k: usize) -> Dd {
    if k % 2 == 0 {
        Dd::ONE
    } else {
        -Dd::ONE
    }
}

/// `E[L(u t + y^2)]` expanded in `t`, `y ~ N(0, s2)`.
fn laguerre_gauss_expand(ell: &[Dd], u: Dd, s2: Dd, out: &mut [Dd]) {
    for (m, l) in ell.iter().enumerate() {
        for r in 0..=m {
            let i = m - r;
            out[i] += *l * binom(m, r) * u.powi(i as u32) * double_factorial_odd(r) * s2.powi(r as u32);
        }
    }
}

/// Common constants at fixed `a`.
#[derive(Debug, Clone, Copy)]
pub struct Consts {
    pub a: Dd,
    pub a2: Dd,
    /// `1 - a^2`
    pub eps: Dd,
    pub sqrt_eps: Dd,
}

impl Consts {
    pub fn new(a: f64) -> Result<Consts> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
        }
        let a2 = Dd::prod(a, a);
        let eps = Dd::ONE - a2;
        Ok(Consts { a: Dd::new(a), a2, eps, sqrt_eps: eps.sqrt() })
    }

    /// `eps^{k/2}`.
    fn eps_half_pow(&self, k: usize) -> Dd {
        let e = self.eps.powi((k / 2) as u32);
        if k % 2 == 1 {
            e * self.sqrt_eps
        } else {
            e
        }
    }
}

/// `j! ((1+a^2)/4)^j (-1)^j`, the prefactor shared by `p_j` and `q_j`.
fn sop_prefactor(j: usize, c: &Consts) -> Dd {
    factorial(j) * ((Dd::ONE + c.a2).ldexp(-2)).powi(j as u32) * sign(j)
}

/// Coefficients of `p_j` in `t = x^2`.
pub fn p_poly(j: usize, nu: Nu, c: &Consts) -> Vec<Dd> {
    let big_a = Dd::ONE + c.a2;
    let mut out = vec![Dd::ZERO; j + 1];
    laguerre_gauss_expand(&laguerre(j, nu.value()), Dd::new(4.0) / big_a, c.a2 / big_a, &mut out);
    let pre = sop_prefactor(j, c);
    out.into_iter().map(|v| v * pre).collect()
}

/// Coefficients of `q_j` in `t = x^2` with gauge `c_tilde`.
pub fn q_poly(j: usize, nu: Nu, c: &Consts, c_tilde: Dd) -> Vec<Dd> {
    let v = nu.value();
    let a2 = c.a2;
    let big_a = Dd::ONE + a2;
    let eps = c.eps;
    let u = Dd::new(4.0) / big_a;
    let s2 = a2 / big_a;
    let len = j + 3;
    let expand = |k: i64, alpha: usize| {
        let mut out = vec![Dd::ZERO; len];
        if k >= 0 {
            laguerre_gauss_expand(&laguerre(k as usize, alpha), u, s2, &mut out);
        }
        out
    };
    let mut res = vec![Dd::ZERO; len];
    let b1 = expand(j as i64 - 2, v + 2);
    let f1 = -Dd::new(4.0) / (big_a * big_a);
    for i in 0..len - 1 {
        res[i + 1] += f1 * b1[i];
    }
    let b2 = expand(j as i64 - 1, v + 1);
    let f2 = Dd::new((2 * v + 1) as f64) / big_a.ldexp(1);
    let f3 = -eps.ldexp(1) / big_a;
    for i in 0..len {
        res[i] += f2 * b2[i];
    }
    for i in 0..len - 1 {
        res[i + 1] += f3 * b2[i];
    }
    let ell = laguerre(j, v);
    let b3 = expand(j as i64, v);
    for i in 0..len - 1 {
        res[i + 1] += b3[i];
    }
    for i in 0..len {
        res[i] += c_tilde * b3[i];
    }
    let half_eps = eps.ldexp(-1);
    for (m, l) in ell.iter().enumerate() {
        for r in 0..=m {
            let i = m - r;
            let df = double_factorial_odd(r);
            let mu = df * s2.powi(r as u32);
            let tail = if r == 0 {
                Dd::ZERO
            } else {
                Dd::new(r as f64) * df * a2.powi(r as u32 - 1) / big_a.powi(r as u32)
            };
            let beta = -half_eps * (Dd::new(j as f64) * mu + tail);
            res[i] += *l * binom(m, r) * u.powi(i as u32) * beta;
        }
    }
    res.truncate(j + 2);
    let pre = sop_prefactor(j, c);
    res.into_iter().map(|v| v * pre).collect()
}

/// Kernel gauge `-(a^2 + (1+a^2)(2j+nu))/4`.
pub fn kernel_gauge(j: usize, nu: Nu, c: &Consts) -> Dd {
    -(c.a2 + (Dd::ONE + c.a2) * Dd::new((2 * j + nu.value()) as f64)).ldexp(-2)
}

/// `h_j = pi a^2 eps^{2j+2+nu} j! (j+nu)! / 2^{4j+2nu+7}`.
pub fn norm_h(j: usize, nu: Nu, c: &Consts) -> Dd {
    let v = nu.value();
    (dd::PI * c.a2 * c.eps.powi((2 * j + 2 + v) as u32) * factorial(j) * factorial(j + v)).ldexp(-((4 * j + 2 * v + 7) as i32))
}

/// `a = 0` polynomial `Pi(t) = j!/(-4)^j L_j^{(nu)}(4t)` in powers of `r`,
/// with `r^nu` attached.
fn pi_profile(j: usize, nu: Nu) -> Vec<Dd> {
    let v = nu.value();
    let pre = (factorial(j) * sign(j)).ldexp(-2 * j as i32);
    let mut out = vec![Dd::ZERO; 2 * j + v + 1];
    for (m, l) in laguerre(j, v).iter().enumerate() {
        out[2 * m + v] = pre * *l * Dd::ONE.ldexp(2 * m as i32);
    }
    out
}

/// Smoothed profile of `p_j`, `eps^{k/2} Pi(r)`.
pub fn p_profile(j: usize, nu: Nu, c: &Consts) -> Vec<Dd> {
    let s = c.eps_half_pow(2 * j + nu.value());
    pi_profile(j, nu).into_iter().map(|v| v * s).collect()
}

/// Smoothed profile of `q_j`, `eps^{k/2} [eps (r^2 Pi - r Pi'/4) + shift Pi]`
/// with `shift = c_tilde - c*`.
pub fn q_profile(j: usize, nu: Nu, c: &Consts, shift: Dd) -> Vec<Dd> {
    let pi = pi_profile(j, nu);
    let s = c.eps_half_pow(2 * j + nu.value());
    let mut m = vec![Dd::ZERO; pi.len() + 2];
    for (i, v) in pi.iter().enumerate() {
        m[i + 2] += c.eps * *v;
        m[i] += (shift - c.eps * Dd::new(i as f64).ldexp(-2)) * *v;
    }
    m.into_iter().map(|v| v * s).collect()
}

/// `M_u(alpha) = int_0^inf t^u e^{-alpha t^2} dt` for `u < len`.
fn gauss_moments(alpha: Dd, len: usize) -> Vec<Dd> {
    let mut out = Vec::with_capacity(len);
    for u in 0..len {
        let v = match u {
            0 => (dd::PI / alpha).sqrt().ldexp(-1),
            1 => Dd::ONE / alpha.ldexp(1),
            _ => Dd::new((u - 1) as f64) / alpha.ldexp(1) * out[u - 2],
        };
        out.push(v);
    }
    out
}

/// `T_u = int_0^inf t^u e^{-2t^2} dt`.
pub fn full_moments(len: usize) -> Vec<Dd> {
    gauss_moments(Dd::new(2.0), len)
}

/// `int_0^inf t^u e^{-2t^2} w(t) dt` for `u < len`, for a smooth bounded `w`
/// varying on scale `width`.
fn weighted_moments(len: usize, width: f64, mut w: impl FnMut(Dd) -> Dd) -> Vec<Dd> {
    let hi = 0.5 * (len as f64).sqrt() + 6.5;
    let panels = (hi / width.min(0.5)).ceil() as usize;
    let (xs, ws) = dd::gauss_legendre();
    let step = hi / panels as f64;
    let half = Dd::new(step / 2.0);
    let mut out = vec![Dd::ZERO; len];
    for p in 0..panels {
        let mid = Dd::prod(step, p as f64) + half;
        for (x, wq) in xs.iter().zip(ws) {
            let t = mid + half * *x;
            let mut f = *wq * half * (-(t * t).ldexp(1)).exp() * w(t);
            for o in out.iter_mut() {
                *o += f;
                f *= t;
            }
        }
    }
    out
}

/// `B_u = int_0^inf t^u e^{-2t^2} (2 U_nu(t) - T_nu) dt`, the moments of
/// `Psi` for the profile `r^nu`.
pub fn one_moments(nu: Nu, len: usize) -> Vec<Dd> {
    match nu {
        // 2 U_1(t) - T_1 = e^{-2t^2}/2 - 1/4
        Nu::One => {
            let m4 = gauss_moments(Dd::new(4.0), len);
            let m2 = gauss_moments(Dd::new(2.0), len);
            m4.iter().zip(&m2).map(|(a, b)| a.ldexp(-1) - b.ldexp(-2)).collect()
        }
        // 2 U_0(t) - T_0 = sqrt(pi/8) (1 - 2 erf(sqrt 2 t))
        Nu::Zero => {
            let s2 = Dd::new(2.0).sqrt();
            let c = (dd::PI.ldexp(-3)).sqrt();
            weighted_moments(len, 0.5, |t| c * (Dd::ONE - (s2 * t).erf().ldexp(1)))
        }
    }
}

/// `A_u(x)` for `u < len`.
pub fn transform_moments(nu: Nu, c: &Consts, x: f64, len: usize) -> Vec<Dd> {
    let d = c.sqrt_eps * Dd::new(x);
    let b = Dd::new(2.0).sqrt() / c.a;
    // 2c' with c' = (a/2) sqrt(pi/2)
    let cc = c.a * (dd::PI.ldexp(-1)).sqrt();
    let ebd = (b * d).erf();
    let kappa = |t: Dd| -> Dd {
        let e1 = (b * (t - d)).erf();
        let e2 = (b * (t + d)).erf();
        match nu {
            Nu::Zero => cc * (e1 + e2 - Dd::ONE),
            Nu::One => cc * (e1 - e2 + ebd),
        }
    };
    weighted_moments(len, c.a.hi / 2.0, kappa)
}

/// `pre(x) = (1/4) sqrt(pi a^2 / 2) eps x^nu e^{-2x^2}`.
pub fn transform_prefactor(nu: Nu, c: &Consts, x: f64) -> Dd {
    let x = Dd::new(x);
    let xn = if nu == Nu::One { x } else { Dd::ONE };
    (dd::PI * c.a2).ldexp(-1).sqrt().ldexp(-2) * c.eps * xn * (-(x * x).ldexp(1)).exp()
}

/// `g_nu(y)`.
pub fn g(nu: Nu, c: &Consts, y: f64) -> Dd {
    let y = Dd::new(y.abs());
    let pre = (dd::PI * c.a2 * c.eps).ldexp(-3).sqrt() * (-(y * y).ldexp(1)).exp();
    match nu {
        Nu::Zero => pre,
        Nu::One => pre * y * (Dd::new(2.0).sqrt() * c.sqrt_eps / c.a * y).erf(),
    }
}

/// `sqrt(pi a^2 eps / 8)`, the factor turning `int M_f e^{-2t^2}` into `<f>_g`.
pub fn mean_factor(c: &Consts) -> Dd {
    (dd::PI * c.a2 * c.eps).ldexp(-3).sqrt()
}

/// `sum_u m_u v_u`.
pub fn dot(m: &[Dd], v: &[Dd]) -> Dd {
    m.iter().zip(v).map(|(a, b)| *a * *b).sum()
}

/// `sum_u |m_u v_u|` in double precision.
pub fn dot_abs(m: &[Dd], v: &[Dd]) -> f64 {
    m.iter().zip(v).map(|(a, b)| (a.hi * b.hi).abs()).sum()
}

/// Horner evaluation in `t = x^2`.
pub fn eval_sq(coeffs: &[Dd], x: f64) -> Dd {
    let t = Dd::prod(x, x);
    coeffs.iter().rev().fold(Dd::ZERO, |acc, c| acc * t + *c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{self, Profile};
    use crate::sop;

    #[test]
    fn polynomials_match_double_route() {
        let c = Consts::new(0.6).unwrap();
        for nu in [Nu::Zero, Nu::One] {
            for j in 0..5 {
                let p = p_poly(j, nu, &c);
                let pd = sop::p_poly(j, nu, 0.6).unwrap();
                let q = q_poly(j, nu, &c, Dd::new(0.3));
                let qd = sop::q_poly(j, nu, 0.6, 0.3).unwrap();
                for (a, b) in p.iter().zip(pd.coeffs()).chain(q.iter().zip(qd.coeffs())) {
                    assert!((a.to_f64() - b).abs() < 1e-12 * b.abs().max(1.0), "{j} {a:?} {b}");
                }
                let h = norm_h(j, nu, &c).to_f64();
                assert!((h / sop::norm_h(j, nu, 0.6).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transforms_match_double_route() {
        let a = 0.7;
        let c = Consts::new(a).unwrap();
        for nu in [Nu::Zero, Nu::One] {
            for j in 0..3 {
                let m = q_profile(j, nu, &c, Dd::ZERO);
                let prof = Profile::structured_q(j, nu, a, sop::kernel_gauge(j, nu, a)).unwrap();
                for x in [0.2, 1.1, 2.5] {
                    let want = profile::transforms(&[&prof], nu, a, x).unwrap().values[0];
                    let am = transform_moments(nu, &c, x, m.len());
                    let got = (transform_prefactor(nu, &c, x) * dot(&m, &am)).to_f64();
                    assert!((got - want).abs() < 1e-12 * want.abs().max(1e-3), "{nu} {j} {x}: {got} {want}");
                }
            }
        }
    }

    #[test]
    fn moments_converge_in_panel_width() {
        let c = Consts::new(0.999).unwrap();
        let a1 = transform_moments(Nu::One, &c, 1.3, 12);
        let d = c.sqrt_eps * Dd::new(1.3);
        let b = Dd::new(2.0).sqrt() / c.a;
        let cc = c.a * (dd::PI.ldexp(-1)).sqrt();
        let a2 = weighted_moments(12, 0.1, |t| cc * ((b * (t - d)).erf() - (b * (t + d)).erf() + (b * d).erf()));
        for (x, y) in a1.iter().zip(&a2) {
            assert!(((*x - *y).to_f64()).abs() < 1e-30, "{x:?} {y:?}");
        }
    }

    #[test]
    fn one_moments_match_double_route() {
        for nu in [Nu::Zero, Nu::One] {
            let b = one_moments(nu, 6);
            for (u, bu) in b.iter().enumerate() {
                let want = crate::quad::integrate_halfline_gaussian_ext(
                    |t| {
                        let mut tm = vec![0.0; 2];
                        profile::tail_moments(t, &mut tm);
                        t.powi(u as i32) * (-2.0 * t * t).exp() * tm[nu.value()]
                    },
                    2.0,
                    1.0,
                    &[],
                    &crate::quad::QuadSpec::with_tol(1e-16, 1e-13),
                )
                .unwrap()
                .value;
                assert!((bu.to_f64() - want).abs() < 1e-13, "{nu} {u}");
            }
        }
    }
}
