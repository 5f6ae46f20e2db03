//! Adaptive Gauss-Legendre quadrature on finite intervals, Gaussian-weighted
//! half lines and the positive quadrant.
//!
//! Each panel is integrated with a 15-point Gauss-Legendre rule and compared
//! against the sum over its two halves. The panel with the largest error
//! estimate is bisected until the summed estimate meets
//! `max(abs_tol, rel_tol * |I|)`.

use crate::error::{Error, Result};
use std::cell::RefCell;
use std::sync::OnceLock;

/// Tolerances and truncation margin for the adaptive rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half lines with Gaussian decay `exp(-c y^2)` are cut at
    /// `margin / sqrt(c)` plus a caller-supplied offset.
    pub margin: f64,
    /// Bisection depth limit per panel.
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            abs_tol: 1e-11,
            rel_tol: 1e-9,
            margin: 7.0,
            max_depth: 50,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadSpec {
            abs_tol,
            rel_tol,
            ..QuadSpec::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_EVALUATIONS: usize = 4_000_000;
const ROUNDOFF: f64 = 50.0 * f64::EPSILON;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

fn panel_sum<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (x, w) = gl15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let (mut s, mut sa) = (0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        let v = f(mid + half * xi);
        s += wi * v;
        sa += wi * v.abs();
    }
    (s * half, sa * half.abs())
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    fine: f64,
    err: f64,
    left: f64,
    right: f64,
}

fn split_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, coarse: f64, depth: u32) -> Panel {
    let mid = 0.5 * (a + b);
    let (left, la) = panel_sum(f, a, mid);
    let (right, ra) = panel_sum(f, mid, b);
    let fine = left + right;
    let mut err = (fine - coarse).abs();
    if err <= ROUNDOFF * (la + ra) {
        err = 0.0;
    }
    Panel {
        a,
        b,
        depth,
        fine,
        err,
        left,
        right,
    }
}

/// Adaptive integral of `f` over `[lo, hi]`.
pub fn integrate_finite<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadSpec) -> Result<QuadResult> {
    integrate_breaks(f, &[lo, hi], spec)
}

/// Adaptive integral over consecutive intervals `[p_0, p_1], [p_1, p_2], ...`.
///
/// Breakpoints are where the caller knows the integrand has a kink or a sharp
/// feature.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], spec: &QuadSpec) -> Result<QuadResult> {
    if points.len() < 2 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut panels = Vec::with_capacity(32);
    let mut evals = 0;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (coarse, _) = panel_sum(&mut f, w[0], w[1]);
        panels.push(split_panel(&mut f, w[0], w[1], coarse, 0));
        evals += 45;
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.fine).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if err <= tol {
            return Ok(QuadResult {
                value: total,
                error: err,
                evaluations: evals,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < spec.max_depth && p.err > 0.0)
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return Err(Error::convergence("adaptive quadrature depth", total, err));
        };
        if evals > MAX_EVALUATIONS {
            return Err(Error::convergence("adaptive quadrature budget", total, err));
        }
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        panels.push(split_panel(&mut f, p.a, mid, p.left, p.depth + 1));
        panels.push(split_panel(&mut f, mid, p.b, p.right, p.depth + 1));
        evals += 60;
    }
}

/// Result of a vector-valued integral.
#[derive(Debug, Clone, PartialEq)]
pub struct VecQuadResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

struct VecPanel {
    a: f64,
    b: f64,
    depth: u32,
    fine: Vec<f64>,
    err: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn vec_panel_sum<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, buf: &mut [f64], sum: &mut [f64], abs: &mut [f64]) {
    let (x, w) = gl15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    sum.fill(0.0);
    abs.fill(0.0);
    for (xi, wi) in x.iter().zip(w) {
        f(mid + half * xi, buf);
        for k in 0..buf.len() {
            sum[k] += wi * buf[k];
            abs[k] += wi * buf[k].abs();
        }
    }
    for k in 0..buf.len() {
        sum[k] *= half;
        abs[k] *= half.abs();
    }
}

fn vec_split<F: FnMut(f64, &mut [f64])>(f: &mut F, dim: usize, a: f64, b: f64, coarse: &[f64], depth: u32) -> VecPanel {
    let mid = 0.5 * (a + b);
    let mut buf = vec![0.0; dim];
    let mut left = vec![0.0; dim];
    let mut right = vec![0.0; dim];
    let mut la = vec![0.0; dim];
    let mut ra = vec![0.0; dim];
    vec_panel_sum(f, a, mid, &mut buf, &mut left, &mut la);
    vec_panel_sum(f, mid, b, &mut buf, &mut right, &mut ra);
    let mut fine = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    for k in 0..dim {
        fine[k] = left[k] + right[k];
        let e = (fine[k] - coarse[k]).abs();
        err[k] = if e <= ROUNDOFF * (la[k] + ra[k]) { 0.0 } else { e };
    }
    VecPanel {
        a,
        b,
        depth,
        fine,
        err,
        left,
        right,
    }
}

/// Adaptive integral of a vector-valued integrand; every component must meet
/// the tolerance. The integrand writes its `dim` components into the slice.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(f: F, dim: usize, points: &[f64], spec: &QuadSpec) -> Result<VecQuadResult> {
    integrate_vec_scaled(f, dim, points, spec, &vec![1.0; dim])
}

/// [`integrate_vec`] with component `k` held to `abs_tol * scales[k]`.
pub fn integrate_vec_scaled<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    points: &[f64],
    spec: &QuadSpec,
    scales: &[f64],
) -> Result<VecQuadResult> {
    if scales.len() != dim {
        return Err(Error::Dimension(format!("{} scales for {dim} components", scales.len())));
    }
    let mut panels: Vec<VecPanel> = Vec::with_capacity(32);
    let mut evals = 0;
    let mut buf = vec![0.0; dim];
    let mut coarse = vec![0.0; dim];
    let mut abs = vec![0.0; dim];
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        vec_panel_sum(&mut f, w[0], w[1], &mut buf, &mut coarse, &mut abs);
        panels.push(vec_split(&mut f, dim, w[0], w[1], &coarse, 0));
        evals += 45;
    }
    let mut total = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut tol = vec![0.0; dim];
    loop {
        total.fill(0.0);
        err.fill(0.0);
        for p in &panels {
            for k in 0..dim {
                total[k] += p.fine[k];
                err[k] += p.err[k];
            }
        }
        let mut done = true;
        for k in 0..dim {
            tol[k] = (spec.abs_tol * scales[k]).max(spec.rel_tol * total[k].abs());
            if err[k] > tol[k] {
                done = false;
            }
        }
        if done {
            return Ok(VecQuadResult {
                values: total,
                errors: err,
                evaluations: evals,
            });
        }
        let score = |p: &VecPanel| -> f64 { (0..dim).map(|k| p.err[k] / tol[k]).fold(0.0, f64::max) };
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.depth < spec.max_depth && score(p) > 0.0)
            .max_by(|x, y| score(x.1).total_cmp(&score(y.1)))
            .map(|(i, _)| i);
        let worst_component = (0..dim).max_by(|&i, &j| (err[i] / tol[i]).total_cmp(&(err[j] / tol[j]))).unwrap_or(0);
        let Some(i) = worst else {
            return Err(Error::convergence(
                "vector quadrature depth",
                total[worst_component],
                err[worst_component],
            ));
        };
        if evals > MAX_EVALUATIONS {
            return Err(Error::convergence(
                "vector quadrature budget",
                total[worst_component],
                err[worst_component],
            ));
        }
        let p = panels.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        panels.push(vec_split(&mut f, dim, p.a, mid, &p.left, p.depth + 1));
        panels.push(vec_split(&mut f, dim, mid, p.b, &p.right, p.depth + 1));
        evals += 60;
    }
}

/// Truncation point `margin / sqrt(c) + extent` for a half line with
/// Gaussian decay `exp(-c y^2)`.
pub fn halfline_cutoff(c: f64, extent: f64, spec: &QuadSpec) -> f64 {
    spec.margin / c.sqrt() + extent.max(0.0)
}

/// `int_0^inf f(y) dy` for an integrand decaying at least like `exp(-c y^2)`.
pub fn integrate_halfline_gaussian<F: FnMut(f64) -> f64>(f: F, c: f64, spec: &QuadSpec) -> Result<QuadResult> {
    integrate_halfline_gaussian_ext(f, c, 0.0, &[], spec)
}

/// Half-line rule with the cutoff shifted by `extent` (for integrands whose
/// Gaussian is centred away from the origin) and extra breakpoints.
pub fn integrate_halfline_gaussian_ext<F: FnMut(f64) -> f64>(
    f: F,
    c: f64,
    extent: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<QuadResult> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("Gaussian decay rate must be positive, got {c}")));
    }
    let cut = halfline_cutoff(c, extent, spec);
    integrate_breaks(f, &break_list(0.0, cut, breaks), spec)
}

/// Sorted `[lo, interior breaks..., hi]`.
pub fn break_list(lo: f64, hi: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(breaks.len() + 2);
    pts.push(lo);
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);
    pts
}

/// `int_0^inf int_0^inf f(x, y) dy dx` for integrands decaying like
/// `exp(-c (x^2 + y^2))`, as nested half-line rules.
pub fn integrate_quadrant<F: FnMut(f64, f64) -> f64>(f: F, c: f64, spec: &QuadSpec) -> Result<QuadResult> {
    integrate_quadrant_ext(f, c, 0.0, false, spec)
}

/// Quadrant rule with shifted cutoff; with `split_diagonal` the inner
/// integral is broken at `y = x`, where kernels with `sign(y - x)` kink.
pub fn integrate_quadrant_ext<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    c: f64,
    extent: f64,
    split_diagonal: bool,
    spec: &QuadSpec,
) -> Result<QuadResult> {
    if !(c > 0.0) {
        return Err(Error::domain(format!("Gaussian decay rate must be positive, got {c}")));
    }
    let cut = halfline_cutoff(c, extent, spec);
    // inner rule one order tighter so its error does not pollute the outer one
    let inner_spec = QuadSpec {
        abs_tol: spec.abs_tol * 0.1,
        rel_tol: spec.rel_tol * 0.1,
        ..*spec
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let mut evals = 0usize;
    let outer = integrate_breaks(
        |x| {
            let pts = if split_diagonal {
                break_list(0.0, cut, &[x])
            } else {
                vec![0.0, cut]
            };
            match integrate_breaks(|y| f(x, y), &pts, &inner_spec) {
                Ok(r) => {
                    evals += r.evaluations;
                    r.value
                }
                Err(e) => {
                    let mut slot = failure.borrow_mut();
                    if slot.is_none() {
                        *slot = Some(e);
                    }
                    0.0
                }
            }
        },
        &[0.0, cut],
        spec,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(QuadResult {
        evaluations: evals,
        ..outer
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(15);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn finite_sine() {
        let r = integrate_finite(f64::sin, 0.0, PI, &QuadSpec::with_tol(1e-14, 1e-14)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_line_gaussians() {
        let spec = QuadSpec::with_tol(1e-14, 1e-13);
        let r = integrate_halfline_gaussian(|y| (-y * y).exp(), 1.0, &spec).unwrap();
        assert!((r.value - PI.sqrt() / 2.0).abs() < 1e-12);
        let r = integrate_halfline_gaussian(|y| y * (-2.0 * y * y).exp(), 2.0, &spec).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        let r = integrate_halfline_gaussian(|y| y * y * (-y * y).exp(), 1.0, &spec).unwrap();
        assert!((r.value - PI.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn quadrant_gaussians() {
        let spec = QuadSpec::with_tol(1e-13, 1e-12);
        let r = integrate_quadrant(|x, y| (-x * x - y * y).exp(), 1.0, &spec).unwrap();
        assert!((r.value - PI / 4.0).abs() < 1e-10);
        let r = integrate_quadrant(|x, y| x * y * (-2.0 * (x * x + y * y)).exp(), 2.0, &spec).unwrap();
        assert!((r.value - 1.0 / 16.0).abs() < 1e-10);
        let r = integrate_quadrant_ext(
            |x, y| (y - x).signum() * x * (-x * x - y * y).exp(),
            1.0,
            0.0,
            true,
            &spec,
        )
        .unwrap();
        // swapping the variables must give the same number
        let r2 = integrate_quadrant_ext(
            |x, y| (x - y).signum() * y * (-x * x - y * y).exp(),
            1.0,
            0.0,
            true,
            &spec,
        )
        .unwrap();
        assert!((r.value - r2.value).abs() < 1e-10);
    }

    #[test]
    fn antisymmetric_integrand_vanishes() {
        let spec = QuadSpec::with_tol(1e-13, 1e-12);
        let r = integrate_quadrant_ext(
            |x, y| (y - x).signum() * (-x * x - y * y).exp() * (1.0 + x * y),
            1.0,
            0.0,
            true,
            &spec,
        )
        .unwrap();
        assert!(r.value.abs() < 1e-11);
    }

    #[test]
    fn vector_rule_matches_scalar() {
        let spec = QuadSpec::with_tol(1e-14, 1e-13);
        let r = integrate_vec(
            |x, out| {
                out[0] = x.sin();
                out[1] = (x * x).exp();
            },
            2,
            &[0.0, 1.0, 2.0],
            &spec,
        )
        .unwrap();
        assert!((r.values[0] - (1.0 - 2f64.cos())).abs() < 1e-13);
        let s = integrate_finite(|x| (x * x).exp(), 0.0, 2.0, &spec).unwrap();
        assert!((r.values[1] - s.value).abs() < 1e-12);
    }

    #[test]
    fn depth_exhaustion_reports_estimate() {
        let spec = QuadSpec {
            max_depth: 2,
            ..QuadSpec::with_tol(1e-15, 1e-15)
        };
        match integrate_finite(|x| x.abs().sqrt(), -1.0, 1.0, &spec) {
            Err(Error::Convergence { estimate, .. }) => assert!((estimate - 4.0 / 3.0).abs() < 1e-3),
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }
}
