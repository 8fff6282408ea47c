use gpaf::graphstats::fit_weighted;
use gpaf::theory::{
    limit_degree_distribution, powerlaw_exponent, selfloop_degree_pmf, selfloop_degree_pmf_printed, theta,
    TheoryPrediction, DEFAULT_K_MAX,
};
use gpaf::{FitnessKernel, ProcessParams};
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

#[test]
fn limit_law_sums_to_one() {
    let law = limit_degree_distribution(2, 3.0, 0.0, DEFAULT_K_MAX).unwrap();
    let total: f64 = law.p.iter().sum();
    assert!((total - 1.0).abs() < 1e-6, "{total}");
    assert!(law.deficit.abs() < 1e-6);
    assert!(law.p.iter().all(|&p| p >= 0.0));
    assert!(law.p[..2].iter().all(|&p| p == 0.0));
}

#[test]
fn head_values_for_reference_parameters() {
    let law = limit_degree_distribution(2, 3.0f64, 0.0, 100).unwrap();
    for (k, v) in [(2, 0.2667), (3, 0.3111), (4, 0.1810)] {
        assert!((law.get(k) - v).abs() < 1e-4, "p_{k} = {}", law.get(k));
    }
    assert!((law.get(20) - 7.15e-4).abs() < 1e-5);
}

#[test]
fn log_slope_matches_exponent() {
    for (m, alpha, delta) in [(2, 3.0, 0.0), (2, 3.0, -1.0), (3, 4.5, 2.0)] {
        let law = limit_degree_distribution(m, alpha, delta, 100_000).unwrap();
        let slope = law.log_slope(1000, 100_000);
        let gamma = powerlaw_exponent(m, alpha, delta);
        assert!((slope + gamma).abs() < 0.01, "{slope} vs -{gamma}");
    }
}

#[test]
fn gamma_ratio_cross_check() {
    // p_k = p_{2m} Γ(k+δ) Γ(2m+1+δ+c) / (Γ(2m+δ) Γ(k+1+δ+c)), c = αΘ/m
    let (m, alpha, delta) = (2usize, 3.0, 0.5);
    let c = alpha * theta(m, delta) / m as f64;
    let law = limit_degree_distribution(m, alpha, delta, 5000).unwrap();
    let base = law.get(2 * m);
    let two_m = 2.0 * m as f64;
    for k in [2 * m + 1, 50, 400, 5000] {
        let kf = k as f64;
        let ln_ratio = ln_gamma(kf + delta) + ln_gamma(two_m + 1.0 + delta + c)
            - ln_gamma(two_m + delta)
            - ln_gamma(kf + 1.0 + delta + c);
        let expect = base * ln_ratio.exp();
        assert!((law.get(k) / expect - 1.0).abs() < 1e-9, "k = {k}");
    }
}

#[test]
fn tail_mass_bound() {
    let (m, alpha, delta) = (2, 3.0, 0.0);
    let law = limit_degree_distribution(m, alpha, delta, DEFAULT_K_MAX).unwrap();
    let e = alpha * (1.0 + delta / (2.0 * m as f64));
    let mut tail = vec![0.0; law.p.len() + 1];
    for k in (0..law.p.len()).rev() {
        tail[k] = tail[k + 1] + law.p[k];
    }
    let ratios: Vec<f64> = [100usize, 1000, 10_000]
        .iter()
        .map(|&k| (tail[k + 1] + law.deficit.max(0.0)) * (k as f64).powf(e))
        .collect();
    // K^{α(1+δ/2m)} Σ_{k>K} p_k stays bounded
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min < 1.2, "{ratios:?}");
}

/// Coefficients of `(q + p x)^m` by repeated convolution.
fn convolution(m: usize, p: f64) -> Vec<f64> {
    let mut c = vec![1.0];
    for _ in 0..m {
        let mut next = vec![0.0; c.len() + 1];
        for (i, &v) in c.iter().enumerate() {
            next[i] += v * (1.0 - p);
            next[i + 1] += v * p;
        }
        c = next;
    }
    c
}

#[test]
fn selfloop_pmf_equals_convolution() {
    for m in 1..12 {
        for alpha in [2.5, 3.0, 4.0, 10.0] {
            let oracle = convolution(m, 1.0 - 2.0 / alpha);
            for (j, &c) in oracle.iter().enumerate() {
                assert!((selfloop_degree_pmf(m, alpha, m + j) - c).abs() < 1e-14);
            }
            let total: f64 = (m..=2 * m).map(|k| selfloop_degree_pmf(m, alpha, k)).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn printed_binomial_exponent_fails_normalization() {
    for m in 1..6 {
        let total: f64 = (m..=2 * m).map(|k| selfloop_degree_pmf_printed(m, 4.0, k)).sum();
        assert!((total - 1.0).abs() > 1e-3, "m = {m}: {total}");
    }
}

#[test]
fn prediction_bundle() {
    let p = ProcessParams::new(1000, 2, 4.0, 0.0, FitnessKernel::Constant, 0);
    let t = TheoryPrediction::new(&p, 1000).unwrap();
    assert_eq!(t.tail_exponent, 5.0);
    assert_eq!(t.degree_growth_a, 0.25);
    assert_eq!(t.expected_t_slope, 4.0);
    assert_eq!(t.selfloop_pmf, vec![0.25, 0.5, 0.25]);
}

#[test]
fn fit_on_exact_table_recovers_exponent() {
    let law = limit_degree_distribution(2, 3.0, 0.0, DEFAULT_K_MAX).unwrap();
    let data: Vec<(u64, f64)> = law.rows().map(|(k, p)| (k as u64, p * 1e12)).collect();
    let fit = fit_weighted(&data, 1000).unwrap();
    assert!((fit.mle - 4.0).abs() < 0.01, "{fit:?}");
    assert!((fit.ls - 4.0).abs() < 0.01, "{fit:?}");
}

proptest! {
    #[test]
    fn exponent_identity(m in 1usize..50, alpha in 0.01f64..20.0, frac in 0.001f64..5.0) {
        let delta = -(m as f64) + frac * m as f64;
        let lhs = powerlaw_exponent(m, alpha, delta);
        let rhs = 1.0 + alpha * theta(m, delta) / m as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
    }

    #[test]
    fn recursion_residual(m in 1usize..6, alpha in 2.05f64..10.0, frac in 0.05f64..3.0) {
        let delta = -(m as f64) + frac * m as f64;
        let law = limit_degree_distribution(m, alpha, delta, 500).unwrap();
        for k in 0..=500 {
            prop_assert!(law.residual(alpha, delta, k).abs() < 1e-14);
            prop_assert!(law.get(k) >= 0.0);
        }
    }
}
