//! Special functions: error functions, orthogonal polynomials, gamma and the
//! confluent hypergeometric function of the second kind.

use crate::error::{Error, Result};
use crate::quad::{integrate_finite, QuadSpec};
use std::f64::consts::PI;

/// Error function. Backed by the fdlibm rational approximations in `libm`.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

const ERFI_SERIES_MAX: f64 = 6.0;

/// `exp(-x^2) * erfi(x)`, finite for every `x`.
///
/// Maclaurin series below `|x| = 6`, the asymptotic expansion above it. At the
/// switch the smallest asymptotic term is about `3e-16` relative.
pub fn erfi_scaled(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return x;
    }
    let v = if ax < ERFI_SERIES_MAX {
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= x2 / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        2.0 / PI.sqrt() * sum * (-x2).exp()
    } else {
        let inv = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            let next = term * (2.0 * k - 1.0) * inv;
            if next > term || next < 1e-17 * sum {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (PI.sqrt() * ax)
    };
    v.copysign(x)
}

/// Imaginary error function `erfi(x) = -i erf(ix)`.
///
/// Range error once the result overflows (`|x|` beyond about 26.6).
pub fn erfi(x: f64) -> Result<f64> {
    let s = erfi_scaled(x);
    let log_mag = x * x + s.abs().ln();
    if log_mag > 709.0 {
        return Err(Error::Range(format!("erfi({x}) overflows")));
    }
    Ok(s * (x * x).exp())
}

/// Physicists' Hermite polynomial `H_k(x)` by the three-term recurrence.
pub fn hermite_h(k: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if k == 0 {
        return h0;
    }
    for m in 1..k {
        let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Monomial coefficients of `H_k`, lowest degree first.
pub fn hermite_coeffs(k: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 2.0];
    for m in 1..k {
        let mut next = vec![0.0; m + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= 2.0 * m as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalised Laguerre polynomial `L_k^{(alpha)}(x)`, leading coefficient
/// `(-1)^k / k!`.
pub fn laguerre(k: usize, alpha: f64, x: f64) -> f64 {
    let mut l0 = 1.0;
    if k == 0 {
        return l0;
    }
    let mut l1 = 1.0 + alpha - x;
    for m in 1..k {
        let mf = m as f64;
        let l2 = ((2.0 * mf + 1.0 + alpha - x) * l1 - (mf + alpha) * l0) / (mf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// `L_k^{(alpha)}` for possibly negative `k`, which is identically zero.
pub fn laguerre_signed(k: i64, alpha: f64, x: f64) -> f64 {
    if k < 0 {
        0.0
    } else {
        laguerre(k as usize, alpha, x)
    }
}

/// Monomial coefficients of `L_k^{(alpha)}`, lowest degree first.
pub fn laguerre_coeffs(k: usize, alpha: f64) -> Vec<f64> {
    // c_m = (-1)^m binom(k + alpha, k - m) / m!
    let mut out = vec![0.0; k + 1];
    for (m, c) in out.iter_mut().enumerate() {
        let mut binom = 1.0;
        for i in 0..(k - m) {
            binom *= (alpha + (m + 1 + i) as f64) / (i + 1) as f64;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * binom / factorial(m);
    }
    out
}

/// `int_{-inf}^{inf} y^{2k} exp(-c y^2) dy = (2k-1)!! sqrt(pi) / (2^k c^{k+1/2})`.
pub fn gaussian_moment(k: usize, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("Gaussian moment needs c > 0, got {c}")));
    }
    let mut m = (PI / c).sqrt();
    for i in 1..=k {
        m *= (2 * i - 1) as f64 / (2.0 * c);
    }
    Ok(m)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Gamma(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(f64::exp)
}

/// `k!` as a float (exact up to 22!).
pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |p, i| p * i as f64)
}

pub fn ln_factorial(k: usize) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma_pos(k as f64 + 1.0)
    }
}

/// `(2r - 1)!!`, with `(-1)!! = 1`.
pub fn double_factorial_odd(r: usize) -> f64 {
    (1..=r).fold(1.0, |p, i| p * (2 * i - 1) as f64)
}

/// `binom(n, k)` as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |p, i| p * (n - i) as f64 / (i + 1) as f64)
}

/// Tricomi confluent hypergeometric function `U(alpha, b, z)` for
/// `alpha > 0`, `z >= 0`, from
/// `Gamma(alpha)^{-1} int_0^inf e^{-zt} t^{alpha-1} (1+t)^{b-alpha-1} dt`.
pub fn tricomi_u(alpha: f64, b: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("tricomi_u needs alpha > 0, got {alpha}")));
    }
    if !(z >= 0.0) {
        return Err(Error::domain(format!("tricomi_u needs z >= 0, got {z}")));
    }
    if z == 0.0 {
        if b < 1.0 {
            return Ok((ln_gamma_pos(1.0 - b) - ln_gamma_pos(alpha - b + 1.0)).exp());
        }
        return Err(Error::Range(format!("U({alpha}, {b}, 0) is infinite")));
    }
    // t = u^{1/alpha} removes the t^{alpha-1} endpoint singularity,
    // u = s / (1 - s) maps the half line onto [0, 1).
    let inv = 1.0 / alpha;
    let f = |s: f64| {
        let u = s / (1.0 - s);
        let t = u.powf(inv);
        let log = -z * t + (b - alpha - 1.0) * t.ln_1p();
        log.exp() / ((1.0 - s) * (1.0 - s))
    };
    let spec = QuadSpec {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        ..QuadSpec::default()
    };
    let r = integrate_finite(f, 0.0, 1.0, &spec)?;
    Ok(r.value / (alpha * ln_gamma_pos(alpha).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_values() {
        assert_eq!(hermite_h(3, 1.0), -4.0);
        assert_eq!(hermite_coeffs(3), vec![0.0, -12.0, 0.0, 8.0]);
    }

    #[test]
    fn laguerre_values() {
        assert!((laguerre(2, 1.0, 0.0) - 3.0).abs() < 1e-15);
        let c = laguerre_coeffs(2, 1.0);
        assert!((c[0] - 3.0).abs() < 1e-15 && (c[1] + 3.0).abs() < 1e-15);
        assert!((c[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        let m = gaussian_moment(1, 2.0).unwrap();
        assert!((m - (PI / 2.0).sqrt() / 4.0).abs() < 1e-15);
        let m = gaussian_moment(2, 1.0).unwrap();
        assert!((m - 3.0 * PI.sqrt() / 4.0).abs() < 1e-15);
        assert!(gaussian_moment(1, 0.0).is_err());
    }

    #[test]
    fn log_gamma() {
        assert!((ln_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        let mut want = PI.sqrt().ln();
        for k in 0..7 {
            want += (k as f64 + 0.5).ln();
        }
        assert!((ln_gamma(7.5).unwrap() - want).abs() < 1e-12);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.0).is_err());
    }

    #[test]
    fn tricomi_closed_form() {
        // U(a, a + 1, z) = z^{-a}
        assert!((tricomi_u(1.0, 2.0, 2.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((tricomi_u(0.5, 1.5, 3.0).unwrap() - 3f64.powf(-0.5)).abs() < 1e-12);
        assert!((tricomi_u(2.5, 3.5, 0.7).unwrap() - 0.7f64.powf(-2.5)).abs() < 1e-10);
    }

    #[test]
    fn erfi_switch_is_continuous() {
        let below = erfi_scaled(ERFI_SERIES_MAX - 1e-12);
        let above = erfi_scaled(ERFI_SERIES_MAX);
        assert!((below - above).abs() < 1e-10 * above);
        assert!(erfi(30.0).is_err());
        assert_eq!(erfi_scaled(0.0), 0.0);
        assert!((erfi(1.0).unwrap() - 1.650_425_758_797_542_8).abs() < 1e-14);
    }
}
