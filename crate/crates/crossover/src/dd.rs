//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64` with
//! `|lo| <= ulp(hi)/2`, about 31 significant digits.
//!
//! Only what the extended-precision kernel route needs: the four operations,
//! `sqrt`, `exp`, `erf` and Gauss-Legendre nodes.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Relative rounding unit, `2^-104`.
pub const EPS: f64 = 4.930380657631324e-32;

pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
pub const LN_2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two doubles.
    pub fn prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplication by `2^k`, exact.
    pub fn ldexp(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn powi(self, n: u32) -> Dd {
        let (mut base, mut e, mut acc) = (self, n, Dd::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        let r = self - Dd::prod(s, s);
        let (hi, lo) = quick_two_sum(s, r.hi / (2.0 * s));
        Dd { hi, lo }
    }

    pub fn exp(self) -> Dd {
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        let k = (self.hi / LN_2.hi).round();
        // |r| <= ln2/2, scaled down by 2^4 before the series
        let r = (self - LN_2 * Dd::new(k)).ldexp(-4);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..=24 {
            term = term * r / Dd::new(i as f64);
            sum += term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..4 {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    /// Error function from the series
    /// `erf z = 2/sqrt(pi) e^{-z^2} sum_n 2^n z^{2n+1} / (2n+1)!!`,
    /// whose terms are all positive. For `|z| > 9`, `1 - |erf z| < 1e-36`.
    pub fn erf(self) -> Dd {
        if self.hi.abs() > 9.0 {
            return Dd::new(self.hi.signum());
        }
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let z2 = self * self;
        let two_z2 = z2.ldexp(1);
        let mut term = self;
        let mut sum = self;
        let mut n = 0u32;
        loop {
            n += 1;
            term = term * two_z2 / Dd::new((2 * n + 1) as f64);
            sum += term;
            if term.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
        }
        two_over_sqrt_pi() * (-z2).exp() * sum
    }
}

fn two_over_sqrt_pi() -> Dd {
    static C: OnceLock<Dd> = OnceLock::new();
    *C.get_or_init(|| Dd::new(2.0) / PI.sqrt())
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::new(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::new(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, b: Dd) {
        *self = *self + b;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, b: Dd) {
        *self = *self - b;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, b: Dd) {
        *self = *self * b;
    }
}

impl std::iter::Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::ZERO, |a, b| a + b)
    }
}

/// Number of nodes in [`gauss_legendre`].
pub const GL_NODES: usize = 32;

/// 32-point Gauss-Legendre rule on `[-1, 1]`, nodes refined by Newton steps
/// in double-double.
pub fn gauss_legendre() -> &'static (Vec<Dd>, Vec<Dd>) {
    static RULE: OnceLock<(Vec<Dd>, Vec<Dd>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_NODES;
        let (x0, _) = crate::quad::gauss_legendre(n);
        let mut xs = Vec::with_capacity(n);
        let mut ws = Vec::with_capacity(n);
        for &x0 in &x0 {
            let mut x = Dd::new(x0);
            let mut dp = Dd::ONE;
            for _ in 0..3 {
                let (p, d) = legendre(n, x);
                x -= p / d;
                dp = d;
            }
            let (_, d) = legendre(n, x);
            dp = if d.hi != 0.0 { d } else { dp };
            xs.push(x);
            ws.push(Dd::new(2.0) / ((Dd::ONE - x * x) * dp * dp));
        }
        (xs, ws)
    })
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: Dd) -> (Dd, Dd) {
    let (mut p0, mut p1) = (Dd::ONE, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (Dd::new(2.0 * kf - 1.0) * x * p1 - Dd::new(kf - 1.0) * p0) / Dd::new(kf);
        p0 = p1;
        p1 = p2;
    }
    let d = Dd::new(n as f64) * (x * p1 - p0) / (x * x - Dd::ONE);
    (p1, d)
}

/// `int_lo^hi f` by the 32-point rule on `panels` equal panels.
pub fn integrate(mut f: impl FnMut(Dd) -> Dd, lo: f64, hi: f64, panels: usize) -> Dd {
    let (xs, ws) = gauss_legendre();
    let width = (hi - lo) / panels as f64;
    let mut total = Dd::ZERO;
    for p in 0..panels {
        let a = Dd::new(lo) + Dd::prod(width, p as f64);
        let half = Dd::new(width / 2.0);
        let mid = a + half;
        let mut s = Dd::ZERO;
        for (x, w) in xs.iter().zip(ws) {
            s += *w * f(mid + half * *x);
        }
        total += s * half;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, hi: f64, lo: f64, tol: f64) -> bool {
        ((a - Dd { hi, lo }).to_f64()).abs() <= tol * hi.abs()
    }

    #[test]
    fn arithmetic_identities() {
        let two = Dd::new(2.0);
        let r = two.sqrt();
        assert!(((r * r - two).to_f64()).abs() < 1e-31);
        let third = Dd::ONE / Dd::new(3.0);
        assert!(((third * Dd::new(3.0) - Dd::ONE).to_f64()).abs() < 1e-31);
        assert!(((PI.sqrt() * PI.sqrt() - PI).to_f64()).abs() < 1e-30);
    }

    #[test]
    fn exp_matches_reference() {
        // e = 2.718281828459045235360287471352662497757..., lo part below
        assert!(close(Dd::ONE.exp(), std::f64::consts::E, 1.4456468917292501e-16, 1e-30));
        let x = Dd::new(-3.7);
        assert!((((x.exp() * (-x).exp()) - Dd::ONE).to_f64()).abs() < 1e-30);
    }

    #[test]
    fn erf_matches_reference() {
        // erf(1/2) = 0.520499877813046537682746653891964528736...
        let v = Dd::new(0.5).erf();
        assert!(close(v, 0.5204998778130465, 1.900077467916287e-17, 1e-30));
        // erf(3) = 0.999977909503001414558627223870417679...; check 1 - erf
        let e3 = Dd::new(3.0).erf();
        let c = (Dd::ONE - e3).to_f64();
        assert!((c - 2.2090496998585441e-5).abs() < 1e-20);
        assert_eq!(Dd::new(-0.5).erf(), -v);
    }

    #[test]
    fn rule_integrates_gaussian() {
        // int_0^8 e^{-t^2} = sqrt(pi)/2 erf(8)
        let v = integrate(|t| (-(t * t)).exp(), 0.0, 8.0, 16);
        let want = PI.sqrt().ldexp(-1) * Dd::new(8.0).erf();
        assert!(((v - want).to_f64()).abs() < 1e-29);
    }
}
