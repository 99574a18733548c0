mod common;

use pathwise::analysis::{ks_pvalue, ks_statistic, mean_stderr, normal_cdf};
use pathwise::coupling::*;
use pathwise::Error;
use proptest::prelude::*;

fn var_se(x: &[f64]) -> (f64, f64) {
    // variance of a zero-mean sample and its standard error
    let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
    mean_stderr(&sq)
}

fn within(x: &[f64], target: f64, k: f64) -> bool {
    let (v, se) = var_se(x);
    (v - target).abs() <= k * se
}

fn fixed_w(n: usize, w: &[f64], h: f64) -> BrownianBlocks<f64> {
    let inc: Vec<f64> = (0..n).flat_map(|_| w.iter().copied()).collect();
    BrownianBlocks::from_increments(w.len(), h, inc).unwrap()
}

#[test]
fn brownian_and_reference_area_moments() {
    let h = 1.0 / 64.0;
    let mut r = stream_rng(1, Purpose::Test, 0);
    let n = 100_000;
    let w = sample_brownian(n, 2, h, &mut r).unwrap();
    let (a, parts) = sample_area_reference_parts(&w, 64, &mut r).unwrap();
    let w1: Vec<f64> = (0..n).map(|j| w.block(j)[0]).collect();
    let zeta: Vec<f64> = parts.zeta.iter().copied().collect();
    let k: Vec<f64> = (0..n).map(|j| parts.k.block(j)[0]).collect();
    let av: Vec<f64> = (0..n).map(|j| a.block(j)[0]).collect();
    assert!(within(&w1, h, 3.0));
    assert!(within(&zeta, h / 12.0, 3.0));
    assert!(within(&k, h * h / 12.0, 3.0));
    assert!(within(&av, h * h / 4.0, 3.0));
    let aw: Vec<f64> = (0..n).map(|j| a.block(j)[0] * w.block(j)[1]).collect();
    let (m, se) = mean_stderr(&aw);
    assert!(m.abs() <= 3.0 * se);
}

#[test]
fn gaussian_substitute_moments() {
    let h = 1.0 / 32.0;
    let mut r = stream_rng(2, Purpose::Test, 0);
    let n = 100_000;
    let w = sample_brownian(n, 3, h, &mut r).unwrap();
    let (b, parts) = sample_gaussian_area_parts(&w, &mut r);
    assert!(within(&parts.z, h / 12.0, 3.0));
    let lam: Vec<f64> = parts.lambda.as_slice().to_vec();
    assert!(within(&lam, h * h / 12.0, 3.0));
    for p in 0..3 {
        let bp: Vec<f64> = (0..n).map(|j| b.block(j)[p]).collect();
        assert!(within(&bp, h * h / 4.0, 3.0), "pair {p}");
    }
}

#[test]
fn area_arrays_are_antisymmetric() {
    let mut r = stream_rng(3, Purpose::Test, 0);
    let w = sample_brownian(16, 4, 1.0 / 16.0, &mut r).unwrap();
    let a = sample_area_reference(&w, 8, &mut r).unwrap();
    for j in 0..16 {
        for k in 0..4 {
            assert_eq!(a.get(j, k, k), 0.0);
            for l in 0..4 {
                assert_eq!(a.get(j, k, l), -a.get(j, l, k));
            }
        }
    }
}

#[test]
fn coarsened_areas_follow_chen() {
    let mut r = stream_rng(4, Purpose::Test, 0);
    let h = 1.0 / 8.0;
    let w = sample_brownian(8, 2, h, &mut r).unwrap();
    let a = sample_area_reference(&w, 4, &mut r).unwrap();
    let c = a.coarsen(&w, 8).unwrap();
    // area of the concatenation: sum A_r + 1/2 sum_{r<s} (W_r^1 W_s^2 - W_r^2 W_s^1)
    let mut want = 0.0f64;
    let (mut x1, mut x2) = (0.0, 0.0);
    for j in 0..8 {
        let (u, v) = (w.block(j)[0], w.block(j)[1]);
        want += a.block(j)[0] + 0.5 * (x1 * v - x2 * u);
        x1 += u;
        x2 += v;
    }
    assert!((c.block(0)[0] - want).abs() < 1e-15);
}

#[test]
fn area_cf_matches_sampler() {
    let h: f64 = 1.0 / 16.0;
    let n = 40_000;
    for wv in [[0.0, 0.0], [0.8, -0.3], [1.7, 1.1]] {
        let wv = [wv[0] * h.sqrt(), wv[1] * h.sqrt()];
        let w = fixed_w(n, &wv, h);
        let mut r = stream_rng(5, Purpose::Test, 0);
        let a = sample_area_reference(&w, 64, &mut r).unwrap();
        let sbar = (wv[0] * wv[0] + wv[1] * wv[1]) / h;
        for v in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let c: Vec<f64> = (0..n).map(|j| (v * a.block(j)[0] / h).cos()).collect();
            let (m, se) = mean_stderr(&c);
            let want = levy_area_cf(1, sbar, v);
            assert!((m - want).abs() <= 4.0 * se + 1e-3, "w={wv:?} v={v}: {m} vs {want} (se {se})");
        }
    }
}

/// Density by direct Fourier inversion of the characteristic function.
fn quad_density(n: usize, s: f64, x: f64) -> f64 {
    let sbar = s / n as f64;
    let dv = 0.01;
    let mut acc = 0.5;
    let mut v = dv;
    loop {
        let f = levy_area_cf(n, sbar, v);
        acc += f * (v * x).cos();
        if f.abs() < 1e-18 && v > 10.0 {
            break;
        }
        v += dv;
    }
    acc * dv / std::f64::consts::PI
}

#[test]
fn tabulated_density_and_cdf_match_fourier_inversion() {
    for (n, s) in [(1usize, 0.0), (1, 0.37), (2, 1.3), (4, 10.0), (16, 3.0)] {
        let sd = ((n as f64 + s) / 12.0).sqrt();
        for i in -20..=20 {
            let x = i as f64 * 0.3 * sd;
            let (a, b) = (levy_sum_density(n, s, x), quad_density(n, s, x));
            assert!((a - b).abs() * sd < 1e-4, "n={n} s={s} x={x}: {a} vs {b}");
        }
        // Simpson integral of the inverted density from far in the left tail
        for i in -4..=4 {
            let x = i as f64 * sd;
            let lo = -14.0 * sd;
            let m = 400;
            let dx = (x - lo) / m as f64;
            let c: f64 = (0..=m)
                .map(|k| {
                    let wgt = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
                    wgt * quad_density(n, s, lo + k as f64 * dx)
                })
                .sum::<f64>()
                * dx
                / 3.0;
            assert!((levy_sum_cdf(n, s, x) - c).abs() < 1e-4, "n={n} s={s} x={x}");
        }
    }
}

#[test]
fn block_covariance_examples() {
    let h = 1.0 / 4.0;
    let zero = fixed_w(4, &[0.0, 0.0, 0.0], h);
    let cov = build_block_covariance(&zero, DyadicSet { scale: 2, index: 0 }).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 / 12.0 } else { 0.0 };
            assert!((cov.h_e[(i, j)] - want).abs() < 1e-15);
        }
    }
    let one = BrownianBlocks::from_increments(2, 1.0, vec![1.0, 0.0]).unwrap();
    let cov = build_block_covariance(&one, DyadicSet { scale: 0, index: 0 }).unwrap();
    assert!((cov.h_e[(0, 0)] - 1.0 / 6.0).abs() < 1e-15);
    let mut r = stream_rng(6, Purpose::Test, 0);
    for _ in 0..50 {
        let w = sample_brownian(8, 3, 0.125, &mut r).unwrap();
        for scale in 0..=3 {
            let cov = build_block_covariance(&w, DyadicSet { scale, index: 0 }).unwrap();
            assert!(cov.inverse_norm() <= 12.0 + 1e-9);
            assert!(cov.min_eigenvalue() >= 1.0 / 12.0 - 1e-12);
        }
    }
    assert!(matches!(build_block_covariance(&zero, DyadicSet { scale: 3, index: 0 }), Err(Error::InvalidParameter(_))));
    let six = fixed_w(6, &[0.0, 0.0], h);
    assert!(build_block_covariance(&six, DyadicSet { scale: 0, index: 0 }).is_err());
}

/// z-scores of sums of B over `width` consecutive blocks, which are exactly
/// N(0, (width h + S)/12 h) given W when B is conditionally Gaussian.
fn z_scores(w: &BrownianBlocks<f64>, b: &AreaBlocks<f64>, width: usize, out: &mut Vec<(f64, f64)>) {
    let h = w.h();
    for g in 0..w.n() / width {
        let r = g * width..(g + 1) * width;
        let s: f64 = r.clone().map(|j| w.block(j).iter().map(|x| x * x).sum::<f64>()).sum::<f64>() / h;
        let sum: f64 = r.map(|j| b.block(j)[0]).sum();
        out.push((s / width as f64, sum / (h * ((width as f64 + s) / 12.0).sqrt())));
    }
}

fn binned_ks(samples: &[(f64, f64)], bins: usize) -> Vec<(f64, f64)> {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.chunks(v.len().div_ceil(bins))
        .map(|c| {
            let z: Vec<f64> = c.iter().map(|p| p.1).collect();
            let d = ks_statistic(&z, normal_cdf).unwrap();
            (d, ks_pvalue(z.len(), d))
        })
        .collect()
}

#[test]
fn exact_2d_coupling_preserves_conditional_gaussian_law() {
    // 1600 replications of 64 blocks: 102400 single-block scores
    let (mut single, mut pairs) = (Vec::new(), Vec::new());
    let mut levy = Vec::new();
    for rep in 0..1600 {
        let mut r = stream_rng(7, Purpose::Test, rep);
        let c = dyadic_coupling::<f64, _>(6, 2, CouplingMode::Exact2d, 32, &mut r).unwrap();
        z_scores(&c.w, &c.b, 1, &mut single);
        z_scores(&c.w, &c.b, 2, &mut pairs);
        for j in 0..c.w.n() {
            let s = c.w.block(j).iter().map(|x| x * x).sum::<f64>() / c.w.h();
            levy.push(levy_sum_cdf(1, s, c.a.block(j)[0] / c.w.h()));
        }
    }
    assert!(single.len() >= 100_000);
    let tests: Vec<(f64, f64)> = binned_ks(&single, 4).into_iter().chain(binned_ks(&pairs, 2)).collect();
    // family-wise level 0.01
    let alpha = 0.01 / tests.len() as f64;
    for (d, p) in &tests {
        assert!(*p > alpha, "KS d={d} p={p}");
    }
    // the reference areas themselves follow the tabulated conditional law
    let d = ks_statistic(&levy, |u| u.clamp(0.0, 1.0)).unwrap();
    assert!(ks_pvalue(levy.len(), d) > 0.01, "PIT of A: d={d}");
}

#[test]
fn approx_nd_uses_zeta_and_gaussian_bridge_areas() {
    let mut r = stream_rng(8, Purpose::Test, 0);
    let c = dyadic_coupling::<f64, _>(10, 3, CouplingMode::ApproxNd, 16, &mut r).unwrap();
    assert_eq!(c.b.d(), 3);
    let h = c.w.h();
    let mut all = Vec::new();
    for rep in 0..40 {
        let mut r = stream_rng(9, Purpose::Test, rep);
        let c = dyadic_coupling::<f64, _>(10, 3, CouplingMode::ApproxNd, 16, &mut r).unwrap();
        all.extend_from_slice(c.b.as_slice());
    }
    // Var(B) = h^2/4 for every pair
    assert!(within(&all, h * h / 4.0, 3.0));
}

#[test]
fn coupling_keeps_dyadic_deviations_small() {
    let cfg = StudyConfig { m: 8, replications: 300, seed: 11, ..StudyConfig::default() };
    let s = coupling_study(&cfg).unwrap();
    for sc in s.scales.iter().filter(|x| x.scale >= 4) {
        assert!(sc.coupled < sc.baseline);
        assert!(sc.paired_diff + 3.0 * sc.paired_diff_se < 0.0);
    }
    assert!(s.growth(2, 8).unwrap() <= 4.0);
    assert!(s.baseline_growth(2, 8).unwrap() >= 4.0);
    assert!(s.max_partial < s.baseline_max_partial);
}

#[test]
fn single_block_coupling() {
    let mut r = stream_rng(12, Purpose::Test, 0);
    let c = dyadic_coupling::<f64, _>(0, 2, CouplingMode::Exact2d, 64, &mut r).unwrap();
    assert_eq!(c.diagnostics.len(), 1);
    let dev = (c.a.block(0)[0] - c.b.block(0)[0]).abs() * 2f64.sqrt();
    assert!((c.diagnostics[0].deviation - dev).abs() < 1e-15);
    let devs: Vec<f64> = (0..2000)
        .map(|rep| {
            let mut r = stream_rng(12, Purpose::Test, rep + 1);
            let c = dyadic_coupling::<f64, _>(0, 2, CouplingMode::Exact2d, 64, &mut r).unwrap();
            c.diagnostics[0].deviation
        })
        .collect();
    // O(h) with h = 1: bounded L^{5/2} norm
    let l = (devs.iter().map(|d| d.powf(2.5)).sum::<f64>() / devs.len() as f64).powf(0.4);
    assert!(l < 0.5, "{l}");
}

#[test]
fn deviations_match_direct_sums() {
    let mut r = stream_rng(13, Purpose::Test, 0);
    let c = dyadic_coupling::<f64, _>(4, 3, CouplingMode::ApproxNd, 8, &mut r).unwrap();
    assert_eq!(c.diagnostics.len(), 31);
    for dv in &c.diagnostics {
        let mut s = [0.0; 3];
        for j in dv.set.range() {
            for p in 0..3 {
                s[p] += c.a.block(j)[p] - c.b.block(j)[p];
            }
        }
        let want = 2f64.sqrt() * s.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((dv.deviation - want).abs() < 1e-15);
    }
    let mut best: f64 = 0.0;
    for j in 1..=16 {
        let mut s = [0.0; 3];
        for r in 0..j {
            for p in 0..3 {
                s[p] += c.a.block(r)[p] - c.b.block(r)[p];
            }
        }
        best = best.max(2f64.sqrt() * s.iter().map(|x| x * x).sum::<f64>().sqrt());
    }
    assert!((max_partial_sum_deviation(&c.a, &c.b) - best).abs() < 1e-15);
}

#[test]
fn coupling_argument_errors() {
    let mut r = stream_rng(14, Purpose::Test, 0);
    assert!(matches!(dyadic_coupling::<f64, _>(3, 3, CouplingMode::Exact2d, 8, &mut r), Err(Error::InvalidParameter(_))));
    assert!(matches!(dyadic_coupling::<f64, _>(3, 1, CouplingMode::ApproxNd, 8, &mut r), Err(Error::InvalidParameter(_))));
    let w = sample_brownian(6, 2, 1.0 / 6.0, &mut r).unwrap();
    let a = sample_area_reference(&w, 8, &mut r).unwrap();
    assert!(couple_areas(&w, &a, None, CouplingMode::Exact2d).is_err());
    assert!(sample_area_reference(&w, 1, &mut r).is_err());
    assert!("exact-2d".parse::<CouplingMode>().is_ok());
    assert!("nope".parse::<CouplingMode>().is_err());
}

#[test]
fn coupling_is_deterministic_across_thread_counts() {
    let mut r1 = stream_rng(15, Purpose::Brownian, 3);
    let mut r2 = stream_rng(15, Purpose::Brownian, 3);
    let a = dyadic_coupling::<f64, _>(7, 2, CouplingMode::Exact2d, 16, &mut r1).unwrap();
    let b = dyadic_coupling::<f64, _>(7, 2, CouplingMode::Exact2d, 16, &mut r2).unwrap();
    assert_eq!(a.b.as_slice(), b.b.as_slice());
    assert_eq!(a.a.as_slice(), b.a.as_slice());
    let cfg = StudyConfig { m: 5, replications: 40, seed: 3, ..StudyConfig::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| coupling_study(&cfg).unwrap())
    };
    let (x, y) = (run(1), run(3));
    assert_eq!(x.scales, y.scales);
    assert_eq!(x.max_partial.to_bits(), y.max_partial.to_bits());
}

#[test]
fn f32_sampling() {
    let mut r = stream_rng(16, Purpose::Test, 0);
    let c = dyadic_coupling::<f32, _>(5, 2, CouplingMode::Exact2d, 16, &mut r).unwrap();
    assert_eq!(c.b.n(), 32);
    assert!(c.b.as_slice().iter().all(|v| v.is_finite()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coupled_sums_share_root_sign_and_areas_stay_antisymmetric(seed in 0u64..1000, m in 0u32..6) {
        let mut r = stream_rng(seed, Purpose::Test, 0);
        let c = dyadic_coupling::<f64, _>(m, 2, CouplingMode::Exact2d, 8, &mut r).unwrap();
        let (sa, sb): (f64, f64) = (c.a.as_slice().iter().sum(), c.b.as_slice().iter().sum());
        // the root map is monotone and odd
        prop_assert!(sa * sb >= 0.0);
        for j in 0..c.b.n() {
            prop_assert_eq!(c.b.get(j, 0, 1), -c.b.get(j, 1, 0));
        }
    }

    #[test]
    fn stream_rng_is_reproducible(seed in any::<u64>(), rep in 0u64..1000) {
        use rand::RngCore;
        let (mut a, mut b) = (stream_rng(seed, Purpose::Scheme, rep), stream_rng(seed, Purpose::Scheme, rep));
        prop_assert_eq!(a.next_u64(), b.next_u64());
        let mut c = stream_rng(seed, Purpose::Scheme, rep + 1);
        prop_assert_ne!(stream_rng(seed, Purpose::Scheme, rep).next_u64(), c.next_u64());
    }
}
