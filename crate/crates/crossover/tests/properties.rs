use crossover::ensemble::{mc_density_histogram, Model, SamplerConfig};
use crossover::jpdf::jpdf_eval;
use crossover::kernels::{Kernel, KernelOptions};
use crossover::linalg::{determinant, pfaffian, pfaffian_recursive, singular_values_antisym, AntisymMatrix, Matrix};
use crossover::quad::{integrate_halfline_gaussian, QuadSpec};
use crossover::sop::{p_poly, q_poly};
use crossover::special::{gaussian_moment, laguerre};
use crossover::weights::{TransitionParams, Weights};
use crossover::Nu;
use proptest::prelude::*;

fn nu_strategy() -> impl Strategy<Value = Nu> {
    prop_oneof![Just(Nu::Zero), Just(Nu::One)]
}

fn antisym(dim: usize) -> impl Strategy<Value = AntisymMatrix> {
    prop::collection::vec(-1.0f64..1.0, dim * (dim - 1) / 2).prop_map(move |u| AntisymMatrix::from_upper(dim, &u).unwrap())
}

fn even_antisym() -> impl Strategy<Value = AntisymMatrix> {
    (1usize..=4).prop_flat_map(|h| antisym(2 * h))
}

/// Orthogonal matrix from Gram-Schmidt on the columns of `g`.
fn orthogonal(dim: usize, g: &[f64]) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for c in 0..dim {
        let mut v: Vec<f64> = (0..dim).map(|r| g[r * dim + c]).collect();
        for _ in 0..2 {
            for u in &cols {
                let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
        }
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|a| a / n).collect());
    }
    Matrix::from_fn(dim, dim, |r, c| cols[c][r])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squared_is_determinant(m in even_antisym()) {
        let pf = pfaffian(&m).unwrap();
        let det = determinant(m.matrix()).unwrap();
        prop_assume!(det.abs() > 1e-10);
        prop_assert!((pf * pf - det).abs() <= 1e-8 * det.abs());
    }

    #[test]
    fn parlett_reid_matches_expansion(m in even_antisym()) {
        let (a, b) = (pfaffian(&m).unwrap(), pfaffian_recursive(&m).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-3));
    }

    #[test]
    fn singular_values_are_orthogonally_invariant(
        (m, g) in (2usize..=8).prop_flat_map(|d| (antisym(d), prop::collection::vec(-1.0f64..1.0, d * d)))
    ) {
        let dim = m.dim();
        let nu = dim % 2;
        let o = orthogonal(dim, &g);
        let s1 = singular_values_antisym(&m, nu).unwrap();
        let s2 = singular_values_antisym(&m.conjugate(&o).unwrap(), nu).unwrap();
        let scale = s1.singular_values[0].max(1e-3);
        for (x, y) in s1.singular_values.iter().zip(&s2.singular_values) {
            prop_assert!((x - y).abs() <= 1e-9 * scale);
        }
        prop_assert!(s1.max_pair_gap <= 1e-8 * scale * scale);
    }

    #[test]
    fn laguerre_lowering_identity(j in 1usize..=10, nu in 0usize..=1, z in 0.0f64..20.0) {
        let v = nu as f64;
        let lhs = laguerre(j, v - 1.0, z);
        let (l1, l0) = (laguerre(j, v, z), laguerre(j - 1, v, z));
        prop_assert!((lhs - (l1 - l0)).abs() <= 1e-12 * l1.abs().max(l0.abs()).max(1.0));
    }

    #[test]
    fn two_point_weight_is_antisymmetric(nu in nu_strategy(), a in 0.05f64..0.95, x in 0.0f64..3.0, y in 0.0f64..3.0) {
        let w = Weights::new(nu, a).unwrap();
        prop_assert_eq!(w.big_g(x, y) + w.big_g(y, x), 0.0);
    }

    #[test]
    fn jpdf_is_permutation_symmetric(
        nu in nu_strategy(),
        a in 0.1f64..0.9,
        start in 0.0f64..0.5,
        gaps in prop::collection::vec(0.1f64..0.7, 3),
        k in 0usize..4,
    ) {
        // nearly equal arguments make the Pfaffian nearly singular, so keep them apart
        let l: Vec<f64> = std::iter::once(start).chain(gaps.iter().scan(start, |s, g| { *s += g; Some(*s) })).collect();
        let mut p = l.clone();
        p.rotate_left(k);
        p.swap(0, 3);
        let (u, v) = (jpdf_eval(4, nu, a, &l).unwrap(), jpdf_eval(4, nu, a, &p).unwrap());
        // relative to C |Delta| max|G|^2: near a = 1 the Pfaffian itself cancels
        let w = Weights::new(nu, a).unwrap();
        let g = l.iter().flat_map(|x| l.iter().map(|y| w.big_g(*x, *y).abs())).fold(0.0, f64::max);
        let scale = u.log_constant.exp() * u.vandermonde_part.abs() * g * g;
        prop_assert!((u.value - v.value).abs() <= 1e-12 * scale.max(u.value.abs()));
    }

    #[test]
    fn polynomials_are_monic(j in 0usize..=12, nu in nu_strategy(), a in 0.01f64..0.99, c in -2.0f64..2.0) {
        prop_assert_eq!(*p_poly(j, nu, a).unwrap().coeffs().last().unwrap(), 1.0);
        prop_assert_eq!(*q_poly(j, nu, a, c).unwrap().coeffs().last().unwrap(), 1.0);
    }

    #[test]
    fn tighter_tolerance_does_not_hurt(k in 0usize..6, c in 0.3f64..4.0) {
        let want = 0.5 * gaussian_moment(k, c).unwrap();
        let err = |tol: f64| {
            let r = integrate_halfline_gaussian(|y| y.powi(2 * k as i32), c, &QuadSpec::with_tol(1e-300, tol)).unwrap();
            (r.value - want).abs() / want
        };
        let (coarse, fine) = (err(1e-6), err(5e-7));
        prop_assert!(fine <= coarse.max(1e-15));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_identities(n in 2usize..=6, nu in nu_strategy(), a in 0.05f64..0.95, x in 0.0f64..3.0, y in 0.0f64..3.0) {
        let k = Kernel::new(TransitionParams::new(n, nu, a).unwrap()).unwrap();
        let (sxy, syx) = (k.slice(x, y).unwrap(), k.slice(y, x).unwrap());
        prop_assert!((sxy.i + syx.i).abs() <= 1e-9 * sxy.i.abs().max(1.0));
        prop_assert!(k.density(x).unwrap() >= -1e-9);
        let r2 = k.corr2(x, y).unwrap();
        prop_assert!(r2 >= -1e-8);
        let pf = k.corr(&[x, y]).unwrap();
        prop_assert!((pf - r2).abs() <= 1e-10 * r2.abs().max(1.0));
    }

    #[test]
    fn density_is_gauge_independent(n in 2usize..=6, nu in nu_strategy(), a in 0.1f64..0.9, x in 0.0f64..3.0) {
        let p = TransitionParams::new(n, nu, a).unwrap();
        let base = Kernel::new(p).unwrap().density(x).unwrap();
        for c in [-1.0, 0.0, 1.0] {
            let opts = KernelOptions { c_tilde: Some(c), ..KernelOptions::default() };
            let d = Kernel::with_options(p, opts).unwrap().density(x).unwrap();
            prop_assert!((d - base).abs() <= 1e-10 * base.abs().max(1.0));
        }
    }
}

#[test]
fn histograms_do_not_depend_on_thread_count() {
    let cfg = SamplerConfig {
        model: Model::ThreeMatrix,
        params: TransitionParams::new(3, Nu::One, 0.7).unwrap(),
        samples: 4000,
        seed: 9,
        streams: 5,
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_density_histogram(&cfg, 0.0, 3.0, 30).unwrap())
    };
    assert_eq!(run(1), run(3));
}
