//! Monte Carlo side: samplers for the two equivalent matrix models,
//! spectral histograms, characteristic-polynomial averages and the
//! large-`a` factorisation test.
//!
//! Randomness comes from one ChaCha8 stream per stream index, all sharing the
//! master seed. Streams run in parallel and are merged in index order, so
//! results depend only on `(seed, streams)`.

use crate::error::{Error, Result};
use crate::linalg::{singular_values_antisym, AntisymMatrix};
use crate::quad::gauss_legendre;
use crate::weights::TransitionParams;
use crate::Nu;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Which matrix model to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// `M = H + [[0, W], [-W^T, 0]]`, requires `0 < a < 1`.
    TwoMatrix,
    /// `M = [[a A, W], [-W^T, a B]]`, any `a > 0`.
    ThreeMatrix,
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Model> {
        match s {
            "two" => Ok(Model::TwoMatrix),
            "three" => Ok(Model::ThreeMatrix),
            _ => Err(Error::domain(format!("model must be 'two' or 'three', got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub model: Model,
    pub params: TransitionParams,
    pub samples: u64,
    pub seed: u64,
    pub streams: u32,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::domain("need at least one sample"));
        }
        if self.streams == 0 {
            return Err(Error::domain("need at least one stream"));
        }
        if self.model == Model::TwoMatrix && !(self.params.a < 1.0) {
            return Err(Error::domain(format!("the two-matrix model needs 0 < a < 1, got {}", self.params.a)));
        }
        Ok(())
    }
}

/// Standard normal draws by Box-Muller: exactly two uniforms per pair of
/// draws, no rejection.
#[derive(Debug, Clone)]
pub struct Gaussian<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> Gaussian<R> {
    pub fn new(rng: R) -> Self {
        Gaussian { rng, spare: None }
    }

    pub fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// `N(0, sigma^2)`.
    pub fn scaled(&mut self, sigma: f64) -> f64 {
        sigma * self.next()
    }
}

/// Generator for stream `index` under master `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Two-matrix model. `H` has independent upper entries `N(0, a^2/4)`, the
/// `n x (n+nu)` block `W` entries `N(0, (1-a^2)/4)`.
pub fn sample_two_matrix<R: RngCore>(params: &TransitionParams, g: &mut Gaussian<R>) -> Result<AntisymMatrix> {
    let a = params.a;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("the two-matrix model needs 0 < a < 1, got {a}")));
    }
    let n = params.n;
    let (sh, sw) = (a / 2.0, (1.0 - a * a).sqrt() / 2.0);
    Ok(AntisymMatrix::from_upper_fn(params.dim(), |i, j| {
        let h = g.scaled(sh);
        if i < n && j >= n {
            h + g.scaled(sw)
        } else {
            h
        }
    }))
}

/// Three-matrix model `[[a A, W], [-W^T, a B]]` with `A` (`n x n`) and `B`
/// (`(n+nu) x (n+nu)`) antisymmetric and all independent entries `N(0, 1/4)`.
pub fn sample_three_matrix<R: RngCore>(params: &TransitionParams, g: &mut Gaussian<R>) -> Result<AntisymMatrix> {
    let a = params.a;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("a must be positive and finite, got {a}")));
    }
    let n = params.n;
    Ok(AntisymMatrix::from_upper_fn(params.dim(), |i, j| {
        let z = g.scaled(0.5);
        if i < n && j >= n {
            z
        } else {
            a * z
        }
    }))
}

/// `k x k` antisymmetric matrix with independent upper entries `N(0, 1/4)`.
pub fn sample_gaoe<R: RngCore>(k: usize, g: &mut Gaussian<R>) -> AntisymMatrix {
    AntisymMatrix::from_upper_fn(k, |_, _| g.scaled(0.5))
}

/// Draws one matrix of the configured model.
pub fn sample<R: RngCore>(model: Model, params: &TransitionParams, g: &mut Gaussian<R>) -> Result<AntisymMatrix> {
    match model {
        Model::TwoMatrix => sample_two_matrix(params, g),
        Model::ThreeMatrix => sample_three_matrix(params, g),
    }
}

/// Singular values of one sampled matrix, descending.
pub fn sample_singular_values<R: RngCore>(model: Model, params: &TransitionParams, g: &mut Gaussian<R>) -> Result<Vec<f64>> {
    let m = sample(model, params, g)?;
    Ok(singular_values_antisym(&m, params.nu.value())?.singular_values)
}

/// Fixed-range histogram of sampled values.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    /// Values that fell inside `[lo, hi)`; equals the sum of `counts`.
    pub total_values: u64,
    /// Values outside the range.
    pub outside: u64,
    /// Number of sampled matrices.
    pub matrices: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("histogram range needs lo < hi, got {lo}..{hi}")));
        }
        if bins == 0 {
            return Err(Error::domain("histogram needs at least one bin"));
        }
        Ok(Histogram { lo, hi, counts: vec![0; bins], total_values: 0, outside: 0, matrices: 0 })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self, k: usize) -> (f64, f64) {
        let w = self.width();
        (self.lo + k as f64 * w, self.lo + (k + 1) as f64 * w)
    }

    pub fn add(&mut self, x: f64) {
        let k = ((x - self.lo) / self.width()).floor();
        if x >= self.lo && x < self.hi && k >= 0.0 && (k as usize) < self.bins() {
            self.counts[k as usize] += 1;
            self.total_values += 1;
        } else {
            self.outside += 1;
        }
    }

    /// Adds the counts of `other`, which must share the binning.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if other.lo != self.lo || other.hi != self.hi || other.bins() != self.bins() {
            return Err(Error::Dimension("histograms with different binning".into()));
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.total_values += other.total_values;
        self.outside += other.outside;
        self.matrices += other.matrices;
        Ok(())
    }

    /// Density per matrix: `counts / (matrices * width)`, so the densities
    /// integrate to the number of values recorded per matrix.
    pub fn density(&self, k: usize) -> f64 {
        self.counts[k] as f64 / (self.matrices as f64 * self.width())
    }

    /// Poisson error of [`Histogram::density`], `sqrt(counts)` scaled alike.
    pub fn poisson_err(&self, k: usize) -> f64 {
        (self.counts[k] as f64).sqrt() / (self.matrices as f64 * self.width())
    }
}

/// One bin of a histogram set against an analytic density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinComparison {
    pub lo: f64,
    pub hi: f64,
    pub observed: f64,
    /// Bin average of the analytic density.
    pub expected: f64,
    /// Poisson error from the expected count, at least one count.
    pub sigma: f64,
}

impl BinComparison {
    /// `|observed - expected| / sigma`.
    pub fn pull(&self) -> f64 {
        (self.observed - self.expected).abs() / self.sigma
    }
}

/// Compares every bin with the average of `f` over it (Gauss-Legendre, 8 nodes).
///
/// The error uses the expected rather than the observed count, so empty bins
/// in a region of small but nonzero density are still judged fairly.
pub fn compare_histogram(h: &Histogram, mut f: impl FnMut(f64) -> Result<f64>) -> Result<Vec<BinComparison>> {
    let (x, w) = gauss_legendre(8);
    let scale = h.matrices as f64 * h.width();
    (0..h.bins())
        .map(|k| {
            let (lo, hi) = h.edges(k);
            let (c, r) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
            let mut avg = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                avg += wi * f(c + r * xi)?;
            }
            avg /= 2.0;
            let count = (avg * scale).max(1.0);
            Ok(BinComparison { lo, hi, observed: h.density(k), expected: avg, sigma: count.sqrt() / scale })
        })
        .collect()
}

/// Number of samples handled by `stream` out of `streams`.
pub fn stream_share(samples: u64, streams: u32, stream: u32) -> u64 {
    let s = streams as u64;
    samples / s + u64::from((stream as u64) < samples % s)
}

/// Runs `work` once per stream in parallel and folds the results in stream
/// order.
pub fn run_streams<T: Send>(
    seed: u64,
    streams: u32,
    samples: u64,
    work: impl Fn(&mut Gaussian<ChaCha8Rng>, u64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut g = Gaussian::new(stream_rng(seed, s as u64));
            work(&mut g, stream_share(samples, streams, s))
        })
        .collect()
}

/// Binning of a histogram: `[lo, hi)` split into `bins` equal bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binning {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Binning {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        Binning { lo, hi, bins }
    }
}

/// Histograms of all singular values and of the smallest one, filled from
/// the same sampled matrices.
pub fn mc_histograms(config: &SamplerConfig, all: Binning, smallest: Binning) -> Result<(Histogram, Histogram)> {
    config.validate()?;
    let base_all = Histogram::new(all.lo, all.hi, all.bins)?;
    let base_min = Histogram::new(smallest.lo, smallest.hi, smallest.bins)?;
    let parts = run_streams(config.seed, config.streams, config.samples, |g, count| {
        let (mut ha, mut hm) = (base_all.clone(), base_min.clone());
        for _ in 0..count {
            let sv = sample_singular_values(config.model, &config.params, g)?;
            hm.add(*sv.last().expect("n >= 1"));
            for v in sv {
                ha.add(v);
            }
            ha.matrices += 1;
            hm.matrices += 1;
        }
        Ok((ha, hm))
    })?;
    let (mut ha, mut hm) = (base_all, base_min);
    for (a, m) in &parts {
        ha.merge(a)?;
        hm.merge(m)?;
    }
    Ok((ha, hm))
}

/// Histogram of all `n` singular values per matrix.
pub fn mc_density_histogram(config: &SamplerConfig, lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    let b = Binning::new(lo, hi, bins);
    mc_histograms(config, b, b).map(|h| h.0)
}

/// Histogram of the smallest singular value per matrix.
pub fn mc_smallest_histogram(config: &SamplerConfig, lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    let b = Binning::new(lo, hi, bins);
    mc_histograms(config, b, b).map(|h| h.1)
}

/// Per-bin comparison of two histograms with the same binning, returning
/// `|d_1 - d_2| / sqrt(err_1^2 + err_2^2)` per bin (0 where both are empty).
pub fn histogram_pulls(h1: &Histogram, h2: &Histogram) -> Result<Vec<f64>> {
    if h1.lo != h2.lo || h1.hi != h2.hi || h1.bins() != h2.bins() {
        return Err(Error::Dimension("histograms with different binning".into()));
    }
    Ok((0..h1.bins())
        .map(|k| {
            let e = h1.poisson_err(k).hypot(h2.poisson_err(k));
            if e == 0.0 {
                0.0
            } else {
                (h1.density(k) - h2.density(k)).abs() / e
            }
        })
        .collect())
}

/// Which polynomial a characteristic-polynomial average estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeineKind {
    /// `x^{-nu} <det(x - J)>`.
    P,
    /// `x^{-nu} <det(x - J) (x^2 + Tr J^2 / 2 + c)>`.
    Q { c: f64 },
}

/// Mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Largest `j` accepted by [`heine_mc`]; the variance grows quickly with `j`.
pub const MAX_HEINE_J: usize = 6;

/// Averages over the two-matrix model of size `2j + nu` at each `x`,
/// sharing one set of samples across all `x`.
///
/// `det(x - J) = x^nu prod_k (x^2 - lambda_k^2)` and `Tr J^2 = 2 sum lambda_k^2`,
/// both from the singular values.
pub fn heine_mc(j: usize, nu: Nu, a: f64, xs: &[f64], kind: HeineKind, samples: u64, seed: u64, streams: u32) -> Result<Vec<Estimate>> {
    if j > MAX_HEINE_J {
        return Err(Error::SizeLimit(format!("Heine averages support j <= {MAX_HEINE_J}, got {j}")));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!("need 0 < a < 1, got {a}")));
    }
    if samples < 2 || streams == 0 {
        return Err(Error::domain("need at least two samples and one stream"));
    }
    let extra = |s2: f64, x: f64| match kind {
        HeineKind::P => 1.0,
        HeineKind::Q { c } => x * x + s2 + c,
    };
    if j == 0 {
        // J is zero (nu = 0: empty; nu = 1: 1x1)
        return Ok(xs.iter().map(|&x| Estimate { mean: extra(0.0, x), std_error: 0.0 }).collect());
    }
    let params = TransitionParams::new(j, nu, a)?;
    let k = xs.len();
    let parts = run_streams(seed, streams, samples, |g, count| {
        let mut sum = vec![0.0; k];
        let mut sq = vec![0.0; k];
        for _ in 0..count {
            let sv = sample_singular_values(Model::TwoMatrix, &params, g)?;
            let s2: f64 = sv.iter().map(|l| l * l).sum();
            for (i, &x) in xs.iter().enumerate() {
                let d: f64 = sv.iter().map(|l| x * x - l * l).product();
                let v = d * extra(s2, x);
                sum[i] += v;
                sq[i] += v * v;
            }
        }
        Ok((sum, sq))
    })?;
    let (mut sum, mut sq) = (vec![0.0; k], vec![0.0; k]);
    for (s, q) in &parts {
        for i in 0..k {
            sum[i] += s[i];
            sq[i] += q[i];
        }
    }
    let nf = samples as f64;
    Ok((0..k)
        .map(|i| {
            let mean = sum[i] / nf;
            let var = (sq[i] / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
            Estimate { mean, std_error: (var / nf).sqrt() }
        })
        .collect())
}

/// Two-sample Kolmogorov-Smirnov statistic with its 1% critical value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub critical_1pct: f64,
}

impl KsResult {
    /// The samples are compatible at the 1% level.
    pub fn passes(&self) -> bool {
        self.statistic < self.critical_1pct
    }
}

/// `sup |F_1 - F_2|` of the empirical distribution functions.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("KS test needs two nonempty samples"));
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    // c(0.01) = sqrt(-ln(0.005) / 2)
    let c = (-(0.005f64).ln() / 2.0).sqrt();
    Ok(KsResult { statistic: d, critical_1pct: c * ((na + nb) / (na * nb)).sqrt() })
}

/// Compares the singular values of `M / a` from the three-matrix model with
/// the union of singular values of independent antisymmetric Gaussian blocks
/// of sizes `n` and `n + nu`.
///
/// Blocks of odd size contribute a zero mode each. When both blocks are odd
/// (`n` odd, `nu = 0`) the coupling lifts one of these to `O(1/a)`, so the
/// block side is padded with a zero to keep `n` values per matrix.
pub fn mc_split_compare(n: usize, nu: Nu, a: f64, samples: u64, seed: u64, streams: u32) -> Result<KsResult> {
    let params = TransitionParams::new(n, nu, a)?;
    if samples == 0 || streams == 0 {
        return Err(Error::domain("need at least one sample and one stream"));
    }
    let (k1, k2) = (n, n + nu.value());
    let parts = run_streams(seed, streams, samples, |g, count| {
        let mut full = Vec::with_capacity(count as usize * n);
        let mut split = Vec::with_capacity(count as usize * n);
        for _ in 0..count {
            let m = sample_three_matrix(&params, g)?;
            let sv = singular_values_antisym(&m, nu.value())?.singular_values;
            full.extend(sv.iter().map(|v| v / a));
            let mut mine = Vec::with_capacity(n);
            for k in [k1, k2] {
                let b = sample_gaoe(k, g);
                mine.extend(singular_values_antisym(&b, k % 2)?.singular_values);
            }
            mine.resize(n, 0.0);
            split.extend(mine);
        }
        Ok((full, split))
    })?;
    let (mut full, mut split) = (Vec::new(), Vec::new());
    for (f, s) in parts {
        full.extend(f);
        split.extend(s);
    }
    ks_two_sample(full, split)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_muller_moments() {
        let mut g = Gaussian::new(stream_rng(1, 0));
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = g.next();
            s += z;
            s2 += z * z;
        }
        let (m, v) = (s / n as f64, s2 / n as f64);
        assert!(m.abs() < 5.0 / (n as f64).sqrt());
        assert!((v - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn streams_are_deterministic() {
        let p = TransitionParams::new(3, Nu::One, 0.9).unwrap();
        let cfg = SamplerConfig { model: Model::ThreeMatrix, params: p, samples: 2_000, seed: 42, streams: 3 };
        let a = mc_density_histogram(&cfg, 0.0, 4.0, 30).unwrap();
        let b = mc_density_histogram(&cfg, 0.0, 4.0, 30).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().sum::<u64>(), a.total_values);
        assert_eq!(a.total_values + a.outside, 3 * 2_000);
    }

    #[test]
    fn two_matrix_block_variances() {
        let a = 0.6;
        let p = TransitionParams::new(2, Nu::Zero, a).unwrap();
        let mut g = Gaussian::new(stream_rng(7, 0));
        let n = 20_000;
        let (mut diag, mut off) = (0.0, 0.0);
        for _ in 0..n {
            let m = sample_two_matrix(&p, &mut g).unwrap();
            diag += m.matrix()[(0, 1)].powi(2);
            off += m.matrix()[(0, 2)].powi(2);
        }
        let (vd, vo) = (diag / n as f64, off / n as f64);
        assert!((vd - a * a / 4.0).abs() < 5.0 * a * a / 4.0 * (2.0 / n as f64).sqrt());
        assert!((vo - 0.25).abs() < 5.0 * 0.25 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn ks_detects_shift() {
        let mut g = Gaussian::new(stream_rng(3, 0));
        let a: Vec<f64> = (0..5000).map(|_| g.next()).collect();
        let b: Vec<f64> = (0..5000).map(|_| g.next()).collect();
        let c: Vec<f64> = (0..5000).map(|_| g.next() + 0.2).collect();
        assert!(ks_two_sample(a.clone(), b).unwrap().passes());
        assert!(!ks_two_sample(a, c).unwrap().passes());
    }

    #[test]
    fn heine_trivial_index() {
        let e = heine_mc(0, Nu::Zero, 0.5, &[1.0], HeineKind::P, 10, 1, 1).unwrap();
        assert_eq!(e[0], Estimate { mean: 1.0, std_error: 0.0 });
    }
}
