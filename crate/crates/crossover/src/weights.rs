//! One-point weight `g_nu`, two-point weight `G_nu` and the derived
//! quantities `G_bar`, `g_bar` and `H_nu` used for odd matrix dimension.
//!
//! For `0 < a < 1` with `gamma = sqrt((1 - a^2) / a^2)`:
//!
//! ```text
//! g_nu(y)   = sqrt(pi a^2 (1-a^2) / 8) e^{-2y^2} (y erf(sqrt2 gamma y))^nu
//! G_nu(x,y) = pi a^2 (1-a^2) / 8 (xy)^nu e^{-2(x^2+y^2)}
//!             * ( erf[gamma (y-x)] erf[gamma (x+y)]
//!                 - delta_{nu,1} 2/sqrt(pi) int_{sqrt2 gamma x}^{sqrt2 gamma y}
//!                       erf[sqrt2 gamma (x+y) - u] e^{-u^2} du )
//! ```
//!
//! For `a > 1` the same expressions are continued to real forms with `erfi`.
//! The point `a = 1` is excluded.

use crate::error::{Error, Result};
use crate::quad::{break_list, integrate_breaks, integrate_halfline_gaussian_ext, integrate_quadrant_ext, QuadSpec};
use crate::special::{erf, erfi_scaled};
use crate::Nu;
use std::f64::consts::{PI, SQRT_2};

/// Ensemble dimensions and coupling: `n` singular values, `nu` zero modes,
/// matrix size `N = 2n + nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParams {
    pub n: usize,
    pub nu: Nu,
    pub a: f64,
}

impl TransitionParams {
    pub fn new(n: usize, nu: Nu, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("a must be positive and finite, got {a}")));
        }
        Ok(TransitionParams { n, nu, a })
    }

    /// Matrix dimension `N = 2n + nu`.
    pub fn dim(&self) -> usize {
        2 * self.n + self.nu.value()
    }

    /// Fails unless `0 < a < 1`.
    pub fn require_interpolating(&self) -> Result<()> {
        if self.a >= 1.0 {
            return Err(Error::domain(format!("need 0 < a < 1, got {}", self.a)));
        }
        Ok(())
    }
}

/// Which side of `a = 1` the parameter lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < a < 1`, the interpolating ensemble.
    Below,
    /// `a > 1`, the analytically continued three-matrix model.
    Above,
}

/// Validated `(nu, a)` with precomputed constants.
#[derive(Debug, Clone)]
pub struct Weights {
    nu: Nu,
    a: f64,
    a2: f64,
    /// `|1 - a^2|`
    eps: f64,
    /// `sqrt(|1 - a^2|) / a`
    gamma: f64,
    regime: Regime,
    inner: QuadSpec,
}

impl Weights {
    pub fn new(nu: Nu, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("a must be positive and finite, got {a}")));
        }
        if a == 1.0 {
            return Err(Error::domain("a = 1 is excluded; use a limit instead"));
        }
        let a2 = a * a;
        let regime = if a < 1.0 { Regime::Below } else { Regime::Above };
        let eps = (1.0 - a2).abs();
        Ok(Weights {
            nu,
            a,
            a2,
            eps,
            gamma: eps.sqrt() / a,
            regime,
            inner: QuadSpec::with_tol(1e-17, 1e-13),
        })
    }

    pub fn nu(&self) -> Nu {
        self.nu
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `1 - a^2` (negative above `a = 1`).
    pub fn one_minus_a2(&self) -> f64 {
        1.0 - self.a2
    }

    /// One-point weight at `|y|`.
    pub fn g(&self, y: f64) -> f64 {
        let y = y.abs();
        let pre = (PI * self.a2 * self.eps / 8.0).sqrt() * (-2.0 * y * y).exp();
        match (self.nu, self.regime) {
            (Nu::Zero, _) => pre,
            (Nu::One, Regime::Below) => pre * y * erf(SQRT_2 * self.gamma * y),
            (Nu::One, Regime::Above) => {
                // e^{-2y^2} erfi(z) with z^2 < 2y^2, folded into one exponent
                let z = SQRT_2 * self.gamma * y;
                (PI * self.a2 * self.eps / 8.0).sqrt() * y * erfi_scaled(z) * (z * z - 2.0 * y * y).exp()
            }
        }
    }

    /// Two-point weight, antisymmetric, even in each argument.
    pub fn big_g(&self, x: f64, y: f64) -> f64 {
        let (x, y) = (x.abs(), y.abs());
        if x == y {
            return 0.0;
        }
        let (lo, hi, sign) = if x < y { (x, y, 1.0) } else { (y, x, -1.0) };
        sign * match self.regime {
            Regime::Below => self.big_g_below(lo, hi),
            Regime::Above => self.big_g_above(lo, hi),
        }
    }

    fn big_g_below(&self, x: f64, y: f64) -> f64 {
        let g = self.gamma;
        let pre = PI * self.a2 * self.eps / 8.0 * (-2.0 * (x * x + y * y)).exp();
        let main = erf(g * (y - x)) * erf(g * (x + y));
        match self.nu {
            Nu::Zero => pre * main,
            Nu::One => {
                let k = SQRT_2 * g;
                let c = k * (x + y);
                let j = self.clipped_integral(k * x, k * y, |u| erf(c - u) * (-u * u).exp());
                pre * x * y * (main - 2.0 / PI.sqrt() * j)
            }
        }
    }

    fn big_g_above(&self, x: f64, y: f64) -> f64 {
        let g = self.gamma;
        let pre = PI * self.a2 * self.eps / 8.0;
        let e = -2.0 * (x * x + y * y);
        let (z1, z2) = (g * (y - x), g * (x + y));
        let main = erfi_scaled(z1) * erfi_scaled(z2) * (z1 * z1 + z2 * z2 + e).exp();
        match self.nu {
            Nu::Zero => pre * main,
            Nu::One => {
                let k = SQRT_2 * g;
                let c = k * (x + y);
                // integrand erfi(c - u) e^{u^2} e^{-2(x^2+y^2)}, exponents combined
                let f = |u: f64| {
                    let z = c - u;
                    erfi_scaled(z) * (z * z + u * u + e).exp()
                };
                let j = match integrate_breaks(f, &[k * x, k * y], &self.inner) {
                    Ok(r) => r.value,
                    Err(Error::Convergence { estimate, .. }) => estimate,
                    Err(_) => f64::NAN,
                };
                pre * x * y * (main - 2.0 / PI.sqrt() * j)
            }
        }
    }

    /// `int_lo^hi f(u) du` for an integrand carrying `e^{-u^2}`, with the
    /// range clipped to `u <= 6.5` where that factor is below `1e-18`.
    fn clipped_integral(&self, lo: f64, hi: f64, f: impl FnMut(f64) -> f64) -> f64 {
        const CLIP: f64 = 6.5;
        let (l, h) = (lo.min(CLIP), hi.min(CLIP));
        if l == h {
            return 0.0;
        }
        match integrate_breaks(f, &[l, h], &self.inner) {
            Ok(r) => r.value,
            Err(Error::Convergence { estimate, .. }) => estimate,
            Err(_) => f64::NAN,
        }
    }

    /// `g_bar = int_0^inf g_nu(y) dy`.
    pub fn g_bar(&self) -> f64 {
        match self.regime {
            Regime::Below => {
                let nu = self.nu.as_f64();
                (PI.powi(3) * self.a2 / 32.0).sqrt() * (self.eps / (2.0 * PI)).powf(0.5 * (nu + 1.0))
            }
            Regime::Above => {
                let spec = QuadSpec::with_tol(1e-16, 1e-13);
                integrate_halfline_gaussian_ext(|y| self.g(y), 2.0 / self.a2, 0.0, &[], &spec)
                    .map(|r| r.value)
                    .unwrap_or(f64::NAN)
            }
        }
    }

    /// `G_bar(t) = int_0^inf G_nu(s, t) ds`.
    pub fn big_g_bar(&self, t: f64) -> Result<f64> {
        let t = t.abs();
        if self.regime == Regime::Above {
            let spec = QuadSpec::with_tol(1e-16, 1e-12);
            return integrate_halfline_gaussian_ext(|s| self.big_g(s, t), 2.0, 0.0, &[t], &spec).map(|r| r.value);
        }
        let (a, a2, eps) = (self.a, self.a2, self.eps);
        match self.nu {
            Nu::Zero => {
                let m = (2.0 * eps / a2).sqrt() * t;
                let f = |u: f64| erf(a * u) * ((-(u - m) * (u - m)).exp() + (-(u + m) * (u + m)).exp());
                let spec = QuadSpec::with_tol(1e-16, 1e-13);
                let integral = integrate_halfline_gaussian_ext(f, 1.0, m, &[m], &spec)?.value;
                let e = (-2.0 * t * t).exp();
                Ok(PI * a2 * eps / 2f64.powf(3.5) * e * integral - PI.powf(1.5) * a2 * eps / 2f64.powf(4.5) * e)
            }
            Nu::One => {
                let s = eps.powf(1.5);
                let first = PI * a2 * s / 32.0 * t * (-2.0 * t * t).exp() * erf((2.0 * eps / a2).sqrt() * t);
                let b = 1.0 + a2;
                let second = PI * a2 * s / (16.0 * b.sqrt())
                    * t
                    * (-4.0 * t * t / b).exp()
                    * erf((2.0 * eps / (a2 * b)).sqrt() * t);
                Ok(first - second)
            }
        }
    }

    /// `H(x, y) = G(x, y) - g(x) G_bar(y) / g_bar + g(y) G_bar(x) / g_bar`.
    pub fn h(&self, x: f64, y: f64) -> Result<f64> {
        let gb = self.g_bar();
        Ok(self.big_g(x, y) - self.g(x) * self.big_g_bar(y)? / gb + self.g(y) * self.big_g_bar(x)? / gb)
    }

    /// Definitional one-point weight
    /// `y^nu e^{-2y^2/a^2} int_0^inf e^{-2x^2/(a^2(1-a^2))} f_nu(xy) dx`,
    /// evaluated in log space. Only for `a < 1`.
    pub fn g_def(&self, y: f64) -> Result<f64> {
        self.require_below()?;
        let y = y.abs();
        let (a2, eps) = (self.a2, self.eps);
        let f = |x: f64| {
            let (lf, sign) = f_nu_log(self.nu, self.a, x * y);
            sign * (lf - 2.0 * x * x / (a2 * eps) - 2.0 * y * y / a2).exp()
        };
        let peak = eps * y;
        let spec = QuadSpec::with_tol(1e-17, 1e-12);
        let v = integrate_halfline_gaussian_ext(f, 2.0 / (a2 * eps), peak, &[peak], &spec)?.value;
        Ok(y.powi(self.nu.value() as i32) * v)
    }

    /// Definitional two-point weight
    /// `(lu)^nu e^{-2(l^2+u^2)/a^2} int int sign(y-x) e^{-2(x^2+y^2)/(a^2(1-a^2))} f_nu(x l) f_nu(y u)`.
    pub fn big_g_def(&self, l: f64, u: f64) -> Result<f64> {
        self.require_below()?;
        let (l, u) = (l.abs(), u.abs());
        let (a2, eps) = (self.a2, self.eps);
        let part = |x: f64, s: f64| {
            let (lf, sign) = f_nu_log(self.nu, self.a, x * s);
            (sign, lf - 2.0 * x * x / (a2 * eps) - 2.0 * s * s / a2)
        };
        let f = |x: f64, y: f64| {
            let (s1, e1) = part(x, l);
            let (s2, e2) = part(y, u);
            (y - x).signum() * s1 * s2 * (e1 + e2).exp()
        };
        let spec = QuadSpec::with_tol(1e-17, 1e-11);
        let v = integrate_quadrant_ext(f, 2.0 / (a2 * eps), eps * l.max(u), true, &spec)?.value;
        Ok((l * u).powi(self.nu.value() as i32) * v)
    }

    fn require_below(&self) -> Result<()> {
        if self.regime == Regime::Above {
            return Err(Error::domain("definitional weights are only available for a < 1"));
        }
        Ok(())
    }
}

/// `f_0(x) = cosh(4x/a^2)`, `f_1(x) = sinh(4x/a^2)`.
pub fn f_nu(nu: Nu, a: f64, x: f64) -> f64 {
    let z = 4.0 * x / (a * a);
    match nu {
        Nu::Zero => z.cosh(),
        Nu::One => z.sinh(),
    }
}

/// `(ln |f_nu(x)|, sign f_nu(x))`, stable for large arguments.
pub fn f_nu_log(nu: Nu, a: f64, x: f64) -> (f64, f64) {
    let z = 4.0 * x / (a * a);
    let az = z.abs();
    let e = (-2.0 * az).exp();
    match nu {
        Nu::Zero => (az + (0.5 * (1.0 + e)).ln(), 1.0),
        Nu::One => {
            if z == 0.0 {
                (f64::NEG_INFINITY, 0.0)
            } else {
                (az + (0.5 * (-(-2.0 * az).exp_m1())).ln(), z.signum())
            }
        }
    }
}

fn check_arg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("{name} must be non-negative, got {v}")));
    }
    Ok(())
}

/// One-point weight `g_nu(y)`; `y < 0` is a domain error.
pub fn g_weight(nu: Nu, a: f64, y: f64) -> Result<f64> {
    check_arg("y", y)?;
    Ok(Weights::new(nu, a)?.g(y))
}

/// Two-point weight `G_nu(x, y)` for `x, y >= 0`.
pub fn big_g_weight(nu: Nu, a: f64, x: f64, y: f64) -> Result<f64> {
    check_arg("x", x)?;
    check_arg("y", y)?;
    Ok(Weights::new(nu, a)?.big_g(x, y))
}

/// `int_0^inf g_nu`.
pub fn g_bar(nu: Nu, a: f64) -> Result<f64> {
    Ok(Weights::new(nu, a)?.g_bar())
}

/// `g_bar` in the form `pi sqrt(a^2 (1-a^2)) / 8 ((1-a^2)/(2 pi))^{nu/2}`,
/// from doing the `s` integral first.
pub fn g_bar_direct(nu: Nu, a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    let eps = 1.0 - a * a;
    Ok(PI * (a * a * eps).sqrt() / 8.0 * (eps / (2.0 * PI)).powf(nu.as_f64() / 2.0))
}

/// `int_0^inf G_nu(s, t) ds`.
pub fn big_g_bar(nu: Nu, a: f64, t: f64) -> Result<f64> {
    check_arg("t", t)?;
    Weights::new(nu, a)?.big_g_bar(t)
}

/// Modified two-point weight for odd dimension.
pub fn h_weight(nu: Nu, a: f64, x: f64, y: f64) -> Result<f64> {
    check_arg("x", x)?;
    check_arg("y", y)?;
    Weights::new(nu, a)?.h(x, y)
}

/// Definitional form of `g_nu`, independent of the closed form.
pub fn g_weight_def_oracle(nu: Nu, a: f64, y: f64) -> Result<f64> {
    check_arg("y", y)?;
    Weights::new(nu, a)?.g_def(y)
}

/// Definitional form of `G_nu`, independent of the closed form.
pub fn big_g_weight_def_oracle(nu: Nu, a: f64, x: f64, y: f64) -> Result<f64> {
    check_arg("x", x)?;
    check_arg("y", y)?;
    Weights::new(nu, a)?.big_g_def(x, y)
}

/// Leading small-`a` behaviour of `G_0 / a^2`:
/// `(pi/8) e^{-2(x^2+y^2)} sign(y^2 - x^2)`.
pub fn big_g0_small_a_limit(x: f64, y: f64) -> f64 {
    let d = y * y - x * x;
    let s = if d > 0.0 {
        1.0
    } else if d < 0.0 {
        -1.0
    } else {
        0.0
    };
    PI / 8.0 * (-2.0 * (x * x + y * y)).exp() * s
}

/// Remainder `G~_1` in `G_1(s,t) = s t G_0(s,t) - G~_1(s,t)`:
/// `-(sqrt(pi)/4) a^2 (1-a^2) s t e^{-2(s^2+t^2)}
///  int_{s k}^{t k} erf[u - (s+t) k] e^{-u^2} du` with `k = sqrt(2(1-a^2)/a^2)`.
pub fn big_g1_remainder(a: f64, s: f64, t: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("remainder defined for 0 < a < 1, got {a}")));
    }
    let a2 = a * a;
    let eps = 1.0 - a2;
    let k = (2.0 * eps / a2).sqrt();
    let c = (s + t) * k;
    let spec = QuadSpec::with_tol(1e-17, 1e-13);
    let j = integrate_breaks(|u| erf(u - c) * (-u * u).exp(), &break_list(s * k, t * k, &[]), &spec)?.value;
    Ok(-(PI.sqrt() / 4.0) * a2 * eps * s * t * (-2.0 * (s * s + t * t)).exp() * j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert!((g_weight(Nu::Zero, 0.5, 0.0).unwrap() - 0.271_350_470_459_350_35).abs() < 1e-14);
        assert!((g_bar(Nu::Zero, 0.5).unwrap() - 0.170_043_690_396_957_94).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(g_weight(Nu::Zero, 0.5, -1.0).is_err());
        assert!(g_weight(Nu::Zero, 1.0, 0.3).is_err());
        assert!(g_weight(Nu::Zero, 0.0, 0.3).is_err());
        assert!(big_g_weight(Nu::One, 0.5, -0.1, 0.3).is_err());
    }

    #[test]
    fn log_f_matches_direct() {
        for &x in &[0.01, 0.3, 2.0] {
            for nu in [Nu::Zero, Nu::One] {
                let (l, s) = f_nu_log(nu, 0.7, x);
                assert!((s * l.exp() - f_nu(nu, 0.7, x)).abs() < 1e-12 * f_nu(nu, 0.7, x).abs());
            }
        }
    }

    #[test]
    fn antisymmetry() {
        for nu in [Nu::Zero, Nu::One] {
            for &a in &[0.3, 0.8, 1.7] {
                let w = Weights::new(nu, a).unwrap();
                let (x, y) = (0.37, 1.21);
                assert_eq!(w.big_g(x, y), -w.big_g(y, x));
                assert_eq!(w.big_g(x, x), 0.0);
            }
        }
    }

    #[test]
    fn g_bar_forms_agree() {
        for nu in [Nu::Zero, Nu::One] {
            for &a in &[0.1, 0.5, 0.9] {
                let n = nu.as_f64();
                let eps: f64 = 1.0 - a * a;
                let w = Weights::new(nu, a).unwrap();
                let alt = PI * (a * a * eps).sqrt() / 8.0 * (eps / (2.0 * PI)).powf(n / 2.0);
                let c1 = a * eps.powf((1.0 + n) / 2.0) / 2f64.powf((4.0 + n) / 2.0)
                    * crate::special::gamma(1.5).unwrap()
                    * crate::special::gamma((1.0 + n) / 2.0).unwrap();
                assert!((w.g_bar() - alt).abs() < 1e-12 * alt);
                assert!((w.g_bar() - c1).abs() < 1e-12 * c1);
            }
        }
    }
}
