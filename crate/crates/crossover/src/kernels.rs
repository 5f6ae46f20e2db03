//! Matrix kernel `(I, S, D)` of the Pfaffian point process, correlation
//! functions built from it, and reference curves at `a = 0` and `a = 1`.
//!
//! Even `n = 2m` uses the polynomial pairs `J = 0, 2, ..., 2m-2`; odd
//! `n = 2m-1` uses `J = 1, 3, ..., 2m-3` together with the border term
//! `g(x)/g_bar` and the modified weight `H`. With `pt`, `qt` the transforms
//! of `p_J`, `q_J` against `G` (even) or `H` (odd):
//!
//! ```text
//! S(x,y) = sum_J [p(x) qt(y) - q(x) pt(y)] / h_J   (+ g(y)/g_bar)
//! D(x,y) = sum_J [qt(x) pt(y) - pt(x) qt(y)] / h_J + G(x,y) or H(x,y)
//! I(x,y) = sum_J [q(x) p(y) - p(x) q(y)] / h_J
//! ```
//!
//! `R_k` is the Pfaffian of the `2k x 2k` matrix with blocks
//! `[[I(xi,xj), S(xi,xj)], [-S(xj,xi), D(xi,xj)]]`. The border term of `S`
//! sits on the transform side, next to `qt(y)`; only with that placement do
//! `R_2` and higher agree with integrals of the joint density.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::extended::{self, Consts};
use crate::linalg::{pfaffian, AntisymMatrix};
use crate::profile::{self, Profile};
use crate::quad::{integrate_finite, integrate_halfline_gaussian_ext, integrate_quadrant_ext, QuadSpec};
use crate::sop::{kernel_gauge, norm_h, p_poly, q_poly, weighted_mean, SqPolynomial};
use crate::special::{hermite_h, laguerre_signed, ln_factorial, ln_gamma, tricomi_u};
use crate::weights::{Regime, TransitionParams, Weights};
use crate::Nu;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

/// Largest `n` accepted by the kernel. Beyond it the spread of `h_J`
/// (powers of `1 - a^2` up to `2n`) leaves too few digits near `a = 1`.
pub const MAX_N: usize = 16;

/// Largest tolerated estimate of the absolute rounding error in `R_1`.
pub const CONDITIONING_LIMIT: f64 = 1e-6;

/// Kernel values at a point pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSlice {
    pub i: f64,
    pub s_xy: f64,
    pub s_yx: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelOptions {
    /// Gauge of the `q` polynomials. `None` picks the gauge in which the
    /// transforms are best conditioned; densities do not depend on it.
    pub c_tilde: Option<f64>,
    /// Allow `a > 1`, evaluated by direct quadrature against the continued
    /// weights. No accuracy claims.
    pub experimental: bool,
    pub precision: Precision,
}

/// Working precision of the kernel sums at `0 < a < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Double-double once `(1-a^2)^{-(J+1+nu/2)}` for the largest index
    /// exceeds [`EXTENDED_THRESHOLD`], double otherwise.
    #[default]
    Auto,
    Double,
    Extended,
}

/// Predicted cancellation factor above which `Precision::Auto` switches to
/// double-double.
pub const EXTENDED_THRESHOLD: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Profile,
    Extended,
    Direct,
}

/// Per-index data of the double-double route.
#[derive(Debug)]
struct ExtTerm {
    p: Vec<Dd>,
    q: Vec<Dd>,
    mp: Vec<Dd>,
    mq: Vec<Dd>,
    /// `sum_u |m_u| T_u`
    mp_size: f64,
    mq_size: f64,
    p_one: Dd,
    q_one: Dd,
    p_mean: Dd,
    q_mean: Dd,
}

#[derive(Debug)]
struct ExtData {
    c: Consts,
    terms: Vec<ExtTerm>,
    len: usize,
}

#[derive(Debug)]
struct Term {
    p: SqPolynomial,
    q: SqPolynomial,
    h: f64,
    // odd n: <1, f>_e and int f g for f = p, q
    p_one: f64,
    p_mean: f64,
    q_one: f64,
    q_mean: f64,
}

#[derive(Debug)]
struct Point {
    g: Dd,
    /// `G_bar(x)`, only filled for odd `n`.
    big_g_bar: Dd,
    p: Vec<Dd>,
    q: Vec<Dd>,
    pt: Vec<Dd>,
    qt: Vec<Dd>,
    pt_err: Vec<f64>,
    qt_err: Vec<f64>,
}

/// Kernel for fixed `(n, nu, a)` with transforms cached per point.
///
/// Construction is cheap; each new evaluation point costs one vector
/// quadrature, later lookups are free. Safe to share between threads.
#[derive(Debug)]
pub struct Kernel {
    params: TransitionParams,
    weights: Weights,
    route: Route,
    terms: Vec<Term>,
    profiles: Vec<Profile>,
    ext: Option<ExtData>,
    h: Vec<Dd>,
    g_bar: Dd,
    cache: RwLock<HashMap<u64, Arc<Point>>>,
}

impl Kernel {
    pub fn new(params: TransitionParams) -> Result<Self> {
        Kernel::with_options(params, KernelOptions::default())
    }

    pub fn with_options(params: TransitionParams, opts: KernelOptions) -> Result<Self> {
        let TransitionParams { n, nu, a } = params;
        if n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if n > MAX_N {
            return Err(Error::SizeLimit(format!("kernel supports n <= {MAX_N}, got {n}")));
        }
        let odd = n % 2 == 1;
        let indices: Vec<usize> = if odd {
            (1..n.div_ceil(2)).map(|j| 2 * j - 1).collect()
        } else {
            (0..n / 2).map(|j| 2 * j).collect()
        };
        let route = if a < 1.0 {
            let top = indices.last().copied().unwrap_or(0) as f64;
            let amp = (1.0 - a * a).powf(-(top + 1.0 + nu.as_f64() / 2.0));
            match opts.precision {
                Precision::Double => Route::Profile,
                Precision::Extended => Route::Extended,
                Precision::Auto if amp > EXTENDED_THRESHOLD => Route::Extended,
                Precision::Auto => Route::Profile,
            }
        } else if a > 1.0 && opts.experimental {
            Route::Direct
        } else if a > 1.0 {
            return Err(Error::domain(format!("kernels at a = {a} > 1 need the experimental flag")));
        } else {
            return Err(Error::domain("a = 1 is served by density_gaoe_ref"));
        };
        let weights = Weights::new(nu, a)?;
        if route == Route::Extended {
            return Kernel::extended(params, opts, weights, &indices);
        }
        let g_bar = weights.g_bar();
        let mut terms = Vec::with_capacity(indices.len());
        let mut profiles = Vec::with_capacity(2 * indices.len() + 1);
        for &jj in &indices {
            let c = opts.c_tilde.unwrap_or_else(|| kernel_gauge(jj, nu, a));
            let p = p_poly(jj, nu, a)?;
            let q = match route {
                Route::Direct => q_poly_continued(jj, nu, a, c)?,
                _ => q_poly(jj, nu, a, c)?,
            };
            if route == Route::Profile {
                profiles.push(Profile::structured_p(jj, nu, a)?);
                profiles.push(Profile::structured_q(jj, nu, a, c)?);
            }
            terms.push(Term { p, q, h: 0.0, p_one: 0.0, p_mean: 0.0, q_one: 0.0, q_mean: 0.0 });
        }
        if route == Route::Profile {
            profiles.push(Profile::smooth(&SqPolynomial::one(), nu, a));
        }
        let one = SqPolynomial::one();
        for (k, t) in terms.iter_mut().enumerate() {
            let jj = indices[k];
            match route {
                Route::Profile => {
                    let one_prof = &profiles[2 * indices.len()];
                    if odd {
                        t.p_one = profile::skew(one_prof, &profiles[2 * k], a)?;
                        t.q_one = profile::skew(one_prof, &profiles[2 * k + 1], a)?;
                        t.p_mean = weighted_mean(&t.p, nu, a)?;
                        t.q_mean = weighted_mean(&t.q, nu, a)?;
                    }
                    t.h = norm_h(jj, nu, a)?;
                }
                Route::Extended => unreachable!("handled by Kernel::extended"),
                Route::Direct => {
                    let pq = skew_direct(&weights, &t.p, &t.q)?;
                    if odd {
                        t.p_one = skew_direct(&weights, &one, &t.p)?;
                        t.q_one = skew_direct(&weights, &one, &t.q)?;
                        t.p_mean = mean_direct(&weights, &t.p)?;
                        t.q_mean = mean_direct(&weights, &t.q)?;
                        t.h = pq - t.p_mean * t.q_one / g_bar + t.q_mean * t.p_one / g_bar;
                    } else {
                        t.h = pq;
                    }
                }
            }
        }
        Ok(Kernel {
            params,
            weights,
            route,
            h: terms.iter().map(|t| Dd::new(t.h)).collect(),
            terms,
            profiles,
            ext: None,
            g_bar: Dd::new(g_bar),
            cache: RwLock::new(HashMap::new()),
        })
    }

    fn extended(params: TransitionParams, opts: KernelOptions, weights: Weights, indices: &[usize]) -> Result<Self> {
        let TransitionParams { nu, a, .. } = params;
        let c = Consts::new(a)?;
        let v = nu.value();
        let len = indices.iter().map(|j| 2 * j + v + 3).max().unwrap_or(0).max(v + 1);
        let tm = extended::full_moments(len);
        let bm = extended::one_moments(nu, len);
        let mf = extended::mean_factor(&c);
        // eps^{nu/2}, the profile of the constant 1
        let one = if nu == Nu::One { c.sqrt_eps } else { Dd::ONE };
        let skew_pre = -(crate::dd::PI * c.a2 * c.eps).ldexp(-3) * one;
        let size = |m: &[Dd]| m.iter().zip(&tm).map(|(x, t)| (x.hi * t.hi).abs()).sum::<f64>();
        let mut terms = Vec::with_capacity(indices.len());
        let mut ext = Vec::with_capacity(indices.len());
        let mut h = Vec::with_capacity(indices.len());
        for &jj in indices {
            let gauge = extended::kernel_gauge(jj, nu, &c);
            let (ct, shift) = match opts.c_tilde {
                Some(ct) => (Dd::new(ct), Dd::new(ct) - gauge),
                None => (gauge, Dd::ZERO),
            };
            let p = extended::p_poly(jj, nu, &c);
            let q = extended::q_poly(jj, nu, &c, ct);
            let mp = extended::p_profile(jj, nu, &c);
            let mq = extended::q_profile(jj, nu, &c, shift);
            let hj = extended::norm_h(jj, nu, &c);
            terms.push(Term {
                p: SqPolynomial::new(p.iter().map(|x| x.to_f64()).collect()),
                q: SqPolynomial::new(q.iter().map(|x| x.to_f64()).collect()),
                h: hj.to_f64(),
                p_one: 0.0,
                p_mean: 0.0,
                q_one: 0.0,
                q_mean: 0.0,
            });
            h.push(hj);
            ext.push(ExtTerm {
                p_one: skew_pre * extended::dot(&mp, &bm),
                q_one: skew_pre * extended::dot(&mq, &bm),
                p_mean: mf * extended::dot(&mp, &tm),
                q_mean: mf * extended::dot(&mq, &tm),
                mp_size: size(&mp),
                mq_size: size(&mq),
                p,
                q,
                mp,
                mq,
            });
        }
        let g_bar = mf * one * tm[v];
        Ok(Kernel {
            params,
            weights,
            route: Route::Extended,
            terms,
            profiles: Vec::new(),
            ext: Some(ExtData { c, terms: ext, len }),
            h,
            g_bar,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Whether the kernel sums run in double-double.
    pub fn is_extended(&self) -> bool {
        self.route == Route::Extended
    }

    pub fn params(&self) -> TransitionParams {
        self.params
    }

    fn odd(&self) -> bool {
        self.params.n % 2 == 1
    }

    fn point(&self, x: f64) -> Result<Arc<Point>> {
        let x = x.abs();
        if !x.is_finite() {
            return Err(Error::domain(format!("evaluation point must be finite, got {x}")));
        }
        let key = x.to_bits();
        if let Some(p) = self.cache.read().expect("kernel cache poisoned").get(&key) {
            return Ok(p.clone());
        }
        let p = Arc::new(self.compute_point(x)?);
        self.cache.write().expect("kernel cache poisoned").insert(key, p.clone());
        Ok(p)
    }

    fn compute_point_extended(&self, x: f64) -> Point {
        let nu = self.params.nu;
        let ext = self.ext.as_ref().expect("extended data");
        let c = &ext.c;
        let am = extended::transform_moments(nu, c, x, ext.len);
        let pre = extended::transform_prefactor(nu, c, x);
        let kernel_mass = c.a.hi * (PI / 2.0).sqrt();
        let scale = extended::REL_ERR * pre.hi.abs() * kernel_mass;
        let mut pt: Vec<Dd> = ext.terms.iter().map(|t| pre * extended::dot(&t.mp, &am)).collect();
        let mut qt: Vec<Dd> = ext.terms.iter().map(|t| pre * extended::dot(&t.mq, &am)).collect();
        let mut pt_err: Vec<f64> = ext.terms.iter().map(|t| scale * t.mp_size).collect();
        let mut qt_err: Vec<f64> = ext.terms.iter().map(|t| scale * t.mq_size).collect();
        let g = extended::g(nu, c, x);
        let one = if nu == Nu::One { c.sqrt_eps } else { Dd::ONE };
        let big_g_bar = -(pre * one * am[nu.value()]);
        if self.odd() {
            let (a1, a2) = (g / self.g_bar, big_g_bar / self.g_bar);
            for (k, t) in ext.terms.iter().enumerate() {
                let (u, w) = (a1 * t.p_one, a2 * t.p_mean);
                pt[k] += w - u;
                pt_err[k] += extended::REL_ERR * (u.hi.abs() + w.hi.abs());
                let (u, w) = (a1 * t.q_one, a2 * t.q_mean);
                qt[k] += w - u;
                qt_err[k] += extended::REL_ERR * (u.hi.abs() + w.hi.abs());
            }
        }
        Point {
            g,
            big_g_bar,
            p: ext.terms.iter().map(|t| extended::eval_sq(&t.p, x)).collect(),
            q: ext.terms.iter().map(|t| extended::eval_sq(&t.q, x)).collect(),
            pt,
            qt,
            pt_err,
            qt_err,
        }
    }

    fn compute_point(&self, x: f64) -> Result<Point> {
        if self.route == Route::Extended {
            return Ok(self.compute_point_extended(x));
        }
        let TransitionParams { nu, a, .. } = self.params;
        let m = self.terms.len();
        let (mut pt, mut qt, mut pt_err, mut qt_err) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        let (one_bar, one_err) = match self.route {
            Route::Profile => {
                let refs: Vec<&Profile> = self.profiles.iter().collect();
                let tr = profile::transforms(&refs, nu, a, x)?;
                for k in 0..m {
                    pt[k] = tr.values[2 * k];
                    qt[k] = tr.values[2 * k + 1];
                    pt_err[k] = tr.errors[2 * k];
                    qt_err[k] = tr.errors[2 * k + 1];
                }
                (tr.values[2 * m], tr.errors[2 * m])
            }
            Route::Extended => unreachable!("handled by compute_point_extended"),
            Route::Direct => {
                for (k, t) in self.terms.iter().enumerate() {
                    pt[k] = transform_direct(&self.weights, &t.p, x)?;
                    qt[k] = transform_direct(&self.weights, &t.q, x)?;
                }
                let one = if self.odd() { transform_direct(&self.weights, &SqPolynomial::one(), x)? } else { 0.0 };
                (one, 0.0)
            }
        };
        let g = self.weights.g(x);
        let big_g_bar = -one_bar;
        if self.odd() {
            let gb = self.g_bar.hi;
            for (k, t) in self.terms.iter().enumerate() {
                pt[k] += -g / gb * t.p_one + big_g_bar / gb * t.p_mean;
                qt[k] += -g / gb * t.q_one + big_g_bar / gb * t.q_mean;
                pt_err[k] += one_err * (t.p_mean / gb).abs();
                qt_err[k] += one_err * (t.q_mean / gb).abs();
            }
        }
        let dd = |v: Vec<f64>| v.into_iter().map(Dd::new).collect();
        Ok(Point {
            g: Dd::new(g),
            big_g_bar: Dd::new(big_g_bar),
            p: self.terms.iter().map(|t| Dd::new(t.p.eval(x))).collect(),
            q: self.terms.iter().map(|t| Dd::new(t.q.eval(x))).collect(),
            pt: dd(pt),
            qt: dd(qt),
            pt_err,
            qt_err,
        })
    }

    /// `(I(x,y), S(x,y), S(y,x), D(x,y))`.
    pub fn slice(&self, x: f64, y: f64) -> Result<KernelSlice> {
        let (px, py) = (self.point(x)?, self.point(y)?);
        let (mut i, mut s_xy, mut s_yx, mut d) = (Dd::ZERO, Dd::ZERO, Dd::ZERO, Dd::ZERO);
        for (k, h) in self.h.iter().enumerate() {
            i += (px.q[k] * py.p[k] - px.p[k] * py.q[k]) / *h;
            s_xy += (px.p[k] * py.qt[k] - px.q[k] * py.pt[k]) / *h;
            s_yx += (py.p[k] * px.qt[k] - py.q[k] * px.pt[k]) / *h;
            d += (px.qt[k] * py.pt[k] - px.pt[k] * py.qt[k]) / *h;
        }
        d += Dd::new(self.weights.big_g(x, y));
        if self.odd() {
            s_xy += py.g / self.g_bar;
            s_yx += px.g / self.g_bar;
            d += (py.g * px.big_g_bar - px.g * py.big_g_bar) / self.g_bar;
        }
        Ok(KernelSlice { i: i.to_f64(), s_xy: s_xy.to_f64(), s_yx: s_yx.to_f64(), d: d.to_f64() })
    }

    /// Spectral density `R_1(x) = S(x,x)`.
    pub fn density(&self, x: f64) -> Result<f64> {
        let pt = self.point(x)?;
        let mut sum = Dd::ZERO;
        let mut err = 0.0;
        for (k, h) in self.h.iter().enumerate() {
            sum += (pt.p[k] * pt.qt[k] - pt.q[k] * pt.pt[k]) / *h;
            err += (pt.p[k].hi.abs() * pt.qt_err[k] + pt.q[k].hi.abs() * pt.pt_err[k]) / h.hi;
        }
        if self.odd() {
            sum += pt.g / self.g_bar;
        }
        let s = sum.to_f64();
        if err > CONDITIONING_LIMIT {
            return Err(Error::Conditioning(format!(
                "density at x = {x} carries an estimated error {err:e} at a = {}, n = {}",
                self.params.a, self.params.n
            )));
        }
        if s < 0.0 {
            if s < -1e-9 {
                return Err(Error::Conditioning(format!("density at x = {x} is negative: {s:e}")));
            }
            return Ok(0.0);
        }
        Ok(s)
    }

    /// `R_k` as the Pfaffian of the `2k x 2k` kernel matrix.
    pub fn corr(&self, points: &[f64]) -> Result<f64> {
        let k = points.len();
        if k == 0 || k > self.params.n {
            return Err(Error::domain(format!("need 1 <= k <= n = {}, got k = {k}", self.params.n)));
        }
        let mut sl = vec![KernelSlice { i: 0.0, s_xy: 0.0, s_yx: 0.0, d: 0.0 }; k * k];
        for i in 0..k {
            for j in i..k {
                sl[i * k + j] = self.slice(points[i], points[j])?;
            }
        }
        let m = AntisymMatrix::from_upper_fn(2 * k, |r, c| {
            let (i, j) = (r / 2, c / 2);
            let s = &sl[i * k + j];
            match (r % 2, c % 2) {
                (0, 0) => s.i,
                (0, 1) => s.s_xy,
                (1, 0) => -s.s_yx,
                _ => s.d,
            }
        });
        pfaffian(&m)
    }

    /// `R_2(x,y) = S(x,x) S(y,y) - I(x,y) D(x,y) - S(x,y) S(y,x)`.
    pub fn corr2(&self, x: f64, y: f64) -> Result<f64> {
        if self.params.n < 2 {
            return Err(Error::domain("R_2 needs n >= 2"));
        }
        let s = self.slice(x, y)?;
        let sxx = self.slice(x, x)?.s_xy;
        let syy = self.slice(y, y)?.s_xy;
        Ok(sxx * syy - s.i * s.d - s.s_xy * s.s_yx)
    }

    /// Smallest-eigenvalue density from the first `order` terms of the
    /// expansion in correlation functions, `R_1(s) - int_0^s R_2(s,x) dx`.
    pub fn smallest_truncated(&self, s: f64, order: usize) -> Result<Truncated> {
        if !(s >= 0.0) {
            return Err(Error::domain(format!("need s >= 0, got {s}")));
        }
        if !(order == 1 || order == 2) {
            return Err(Error::domain(format!("order must be 1 or 2, got {order}")));
        }
        let mut v = self.density(s)?;
        if order == 2 && self.params.n >= 2 && s > 0.0 {
            let spec = QuadSpec::with_tol(1e-12, 1e-9);
            let mut fail = None;
            let r = integrate_finite(
                |x| match self.corr2(s, x) {
                    Ok(v) => v,
                    Err(e) => {
                        fail.get_or_insert(e);
                        0.0
                    }
                },
                0.0,
                s,
                &spec,
            )?;
            if let Some(e) = fail {
                return Err(e);
            }
            v -= r.value;
        }
        Ok(Truncated { value: v, valid: v >= 0.0 })
    }
}

/// Truncated smallest-eigenvalue density. Negative values mark where the
/// truncation has broken down; they are reported, not clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: f64,
    pub valid: bool,
}

fn decay(w: &Weights) -> f64 {
    match w.regime() {
        Regime::Below => 2.0,
        Regime::Above => 2.0 / (w.a() * w.a()),
    }
}

fn direct_spec() -> QuadSpec {
    QuadSpec::with_tol(1e-15, 1e-11)
}

fn transform_direct(w: &Weights, f: &SqPolynomial, x: f64) -> Result<f64> {
    let extent = (f.degree() as f64 + 1.0).sqrt().max(x);
    integrate_halfline_gaussian_ext(|y| f.eval(y) * w.big_g(x, y), decay(w), extent, &[x], &direct_spec())
        .map(|r| r.value)
}

fn skew_direct(w: &Weights, f: &SqPolynomial, g: &SqPolynomial) -> Result<f64> {
    let extent = ((f.degree() + g.degree() + 1) as f64).sqrt();
    let spec = QuadSpec::with_tol(1e-16, 1e-10);
    integrate_quadrant_ext(|x, y| f.eval(x) * g.eval(y) * w.big_g(x, y), decay(w), extent, true, &spec)
        .map(|r| r.value)
}

fn mean_direct(w: &Weights, f: &SqPolynomial) -> Result<f64> {
    let extent = (f.degree() as f64 + 1.0).sqrt();
    integrate_halfline_gaussian_ext(|y| f.eval(y) * w.g(y), decay(w), extent, &[], &direct_spec()).map(|r| r.value)
}

/// `q_j` for `a > 1`: the same algebraic expression, without the range check.
fn q_poly_continued(j: usize, nu: Nu, a: f64, c: f64) -> Result<SqPolynomial> {
    crate::sop::q_poly_unchecked(j, nu, a, c)
}

/// `int_0^inf f(y) G_nu(x, y) dy` by direct quadrature. Oracle for the
/// cached transforms.
pub fn transform_bar(f: &SqPolynomial, nu: Nu, a: f64, x: f64) -> Result<f64> {
    check_below(a)?;
    let w = Weights::new(nu, a)?;
    transform_direct(&w, f, x.abs())
}

/// `int_0^inf f(y) H_nu(x, y) dy` by direct quadrature.
pub fn transform_tilde(f: &SqPolynomial, nu: Nu, a: f64, x: f64) -> Result<f64> {
    check_below(a)?;
    let w = Weights::new(nu, a)?;
    let x = x.abs();
    let gb = w.g_bar();
    let (gx, bx) = (w.g(x), w.big_g_bar(x)?);
    let mut fail = None;
    let mut h = |y: f64| {
        let by = w.big_g_bar(y).unwrap_or_else(|e| {
            fail.get_or_insert(e);
            0.0
        });
        w.big_g(x, y) - gx * by / gb + w.g(y) * bx / gb
    };
    let extent = (f.degree() as f64 + 1.0).sqrt().max(x);
    let r = integrate_halfline_gaussian_ext(|y| f.eval(y) * h(y), 2.0, extent, &[x], &direct_spec())?;
    if let Some(e) = fail {
        return Err(e);
    }
    Ok(r.value)
}

fn check_below(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    Ok(())
}

fn params(n: usize, nu: Nu, a: f64) -> Result<TransitionParams> {
    let p = TransitionParams::new(n, nu, a)?;
    p.require_interpolating()?;
    Ok(p)
}

pub fn kernel_slice(n: usize, nu: Nu, a: f64, x: f64, y: f64) -> Result<KernelSlice> {
    Kernel::new(params(n, nu, a)?)?.slice(x, y)
}

pub fn density_r1(n: usize, nu: Nu, a: f64, x: f64) -> Result<f64> {
    Kernel::new(params(n, nu, a)?)?.density(x)
}

pub fn corr_rk(n: usize, nu: Nu, a: f64, points: &[f64]) -> Result<f64> {
    Kernel::new(params(n, nu, a)?)?.corr(points)
}

pub fn corr_r2(n: usize, nu: Nu, a: f64, x: f64, y: f64) -> Result<f64> {
    Kernel::new(params(n, nu, a)?)?.corr2(x, y)
}

pub fn smallest_p1_truncated(n: usize, nu: Nu, a: f64, s: f64, order: usize) -> Result<Truncated> {
    Kernel::new(params(n, nu, a)?)?.smallest_truncated(s, order)
}

/// Spectral density at `a = 0` for even `n`, from the Laguerre form of the
/// kernel with the inner integral done by quadrature.
pub fn density_chgoe_ref(n: usize, nu: Nu, x: f64) -> Result<f64> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::domain(format!("the a = 0 reference needs even n >= 2, got {n}")));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!("need x >= 0, got {x}")));
    }
    let v = nu.value();
    let vf = nu.as_f64();
    let mut total = 0.0;
    for j in 0..n / 2 {
        let k = 2 * j;
        let b = |z: f64| {
            (k + 1) as f64 * laguerre_signed(k as i64 + 1, vf, z)
                - (k + v) as f64 * (laguerre_signed(k as i64, vf, z) + laguerre_signed(k as i64 - 1, vf, z))
        };
        let (lx, bx) = (laguerre_signed(k as i64, vf, 4.0 * x * x), b(4.0 * x * x));
        let f = |u: f64| {
            let z = 4.0 * u * u;
            (x * u).powi(v as i32)
                * (-2.0 * u * u - 2.0 * x * x).exp()
                * (x - u).signum()
                * (lx * b(z) - laguerre_signed(k as i64, vf, z) * bx)
        };
        let spec = QuadSpec::with_tol(1e-15, 1e-12);
        let extent = ((k + 1) as f64).sqrt().max(x);
        let r = integrate_halfline_gaussian_ext(f, 2.0, extent, &[x], &spec)?;
        let c = ((2 * v + 2) as f64 * 2f64.ln() + ln_factorial(k) - ln_factorial(k + v)).exp();
        total += c * r.value;
    }
    Ok(total)
}

/// Spectral density at `a = 1`:
/// `sum_{j<n} e^{-2x^2} H_{2j+nu}(sqrt2 x)^2 / (sqrt(pi) 2^{2j+nu-3/2} (2j+nu)!)`.
pub fn density_gaoe_ref(n: usize, nu: Nu, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let mut s = 0.0;
    for j in 0..n {
        let k = 2 * j + nu.value();
        let h = hermite_h(k, 2f64.sqrt() * x);
        let ln_den = 0.5 * PI.ln() + (k as f64 - 1.5) * 2f64.ln() + ln_factorial(k);
        s += h * h * (-2.0 * x * x - ln_den).exp();
    }
    Ok(s)
}

/// Exact smallest-singular-value density at `a = 0`.
///
/// `nu = 1`: `4 n s e^{-2 n s^2}`; `nu = 0`:
/// `n sqrt(8/pi) Gamma((n+1)/2) e^{-2 n s^2} U((n-1)/2, -1/2, 2 s^2)`.
pub fn smallest_exact_chgoe(n: usize, nu: Nu, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    if !(s >= 0.0) {
        return Err(Error::domain(format!("need s >= 0, got {s}")));
    }
    let nf = n as f64;
    let e = (-2.0 * nf * s * s).exp();
    match nu {
        Nu::One => Ok(4.0 * nf * s * e),
        Nu::Zero => {
            let u = if n == 1 { 1.0 } else { tricomi_u((nf - 1.0) / 2.0, -0.5, 2.0 * s * s)? };
            Ok(nf * (8.0 / PI).sqrt() * ln_gamma((nf + 1.0) / 2.0)?.exp() * e * u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_halfline_gaussian;

    fn integral(f: impl Fn(f64) -> f64) -> f64 {
        let spec = QuadSpec::with_tol(1e-13, 1e-11);
        integrate_halfline_gaussian_ext(f, 2.0, 2.0, &[], &spec).unwrap().value
    }

    #[test]
    fn n1_density_is_half_normal() {
        for nu_a in [0.2, 0.5, 0.9] {
            let k = Kernel::new(TransitionParams::new(1, Nu::Zero, nu_a).unwrap()).unwrap();
            for x in [0.0f64, 0.4, 1.2] {
                let want = 2.0 * (2.0 / PI).sqrt() * (-2.0 * x * x).exp();
                assert!((k.density(x).unwrap() - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn densities_integrate_to_n() {
        for nu in [Nu::Zero, Nu::One] {
            for n in 1..=5 {
                for a in [0.2, 0.5, 0.9] {
                    let k = Kernel::new(TransitionParams::new(n, nu, a).unwrap()).unwrap();
                    let m = integral(|x| k.density(x).unwrap());
                    assert!((m - n as f64).abs() < 1e-6, "{n} {nu} {a} {m}");
                }
            }
        }
    }

    #[test]
    fn pfaffian_matches_r2_and_r1() {
        for nu in [Nu::Zero, Nu::One] {
            for n in [2, 3, 4] {
                let k = Kernel::new(TransitionParams::new(n, nu, 0.5).unwrap()).unwrap();
                let (x, y) = (0.4, 1.1);
                let a = k.corr(&[x, y]).unwrap();
                let b = k.corr2(x, y).unwrap();
                assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "{a} {b}");
                assert!((k.corr(&[x]).unwrap() - k.density(x).unwrap()).abs() < 1e-14);
                assert!(k.corr2(x, x).unwrap().abs() < 1e-8);
            }
        }
    }

    #[test]
    fn transforms_match_direct_quadrature() {
        let one = SqPolynomial::one();
        for nu in [Nu::Zero, Nu::One] {
            let a = 0.5;
            let w = Weights::new(nu, a).unwrap();
            let prof = Profile::smooth(&one, nu, a);
            for x in [0.3, 0.7, 1.6] {
                let t = profile::transforms(&[&prof], nu, a, x).unwrap().values[0];
                let d = transform_bar(&one, nu, a, x).unwrap();
                assert!((t - d).abs() < 1e-12, "{t} {d}");
                assert!((d + w.big_g_bar(x).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gaoe_reference_is_normalised() {
        for nu in [Nu::Zero, Nu::One] {
            let spec = QuadSpec::with_tol(1e-13, 1e-12);
            let m = integrate_halfline_gaussian(|x| density_gaoe_ref(4, nu, x).unwrap(), 2.0, &spec).unwrap();
            assert!((m.value - 4.0).abs() < 1e-8, "{}", m.value);
        }
    }

    #[test]
    fn chgoe_smallest_laws() {
        let spec = QuadSpec::with_tol(1e-12, 1e-10);
        for nu in [Nu::Zero, Nu::One] {
            for n in [1, 2, 4] {
                let m = integrate_halfline_gaussian(|s| smallest_exact_chgoe(n, nu, s).unwrap(), 2.0, &spec).unwrap();
                assert!((m.value - 1.0).abs() < 1e-8, "{n} {nu} {}", m.value);
            }
        }
    }

    fn with_precision(n: usize, nu: Nu, a: f64, precision: Precision) -> Kernel {
        let opts = KernelOptions { precision, ..Default::default() };
        Kernel::with_options(TransitionParams::new(n, nu, a).unwrap(), opts).unwrap()
    }

    #[test]
    fn extended_route_agrees_with_double() {
        for nu in [Nu::Zero, Nu::One] {
            for n in [3, 4, 5] {
                let kd = with_precision(n, nu, 0.7, Precision::Double);
                let ke = with_precision(n, nu, 0.7, Precision::Extended);
                assert!(ke.is_extended() && !kd.is_extended());
                for (x, y) in [(0.2, 1.3), (0.9, 0.5), (1.8, 2.4)] {
                    let (a, b) = (kd.density(x).unwrap(), ke.density(x).unwrap());
                    assert!((a - b).abs() < 1e-10, "{n} {nu} {x}: {a} {b}");
                    let (a, b) = (kd.corr2(x, y).unwrap(), ke.corr2(x, y).unwrap());
                    assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{n} {nu} ({x},{y}): {a} {b}");
                }
            }
        }
    }

    #[test]
    fn extended_route_reaches_gaoe_limit() {
        for nu in [Nu::Zero, Nu::One] {
            let k = Kernel::new(TransitionParams::new(4, nu, 1.0 - 1e-6).unwrap()).unwrap();
            assert!(k.is_extended());
            for x in [0.05, 0.6, 1.4, 2.5] {
                let d = k.density(x).unwrap() - density_gaoe_ref(4, nu, x).unwrap();
                assert!(d.abs() < 1e-5, "{nu} {x} {d}");
            }
        }
    }
}
