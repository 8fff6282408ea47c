use gpaf::coupling::{build_urns, run_coupled, CouplingEngine, CouplingOptions};
use gpaf::graphstats::{connected_components, DegreeHistogram};
use gpaf::kernel::FitnessKernel;
use gpaf::process::{
    attachment_distribution, fast_sampler_law, grow_one_step, run, GraphState, Model, ProcessParams, RunOptions,
    SamplerKind,
};
use gpaf::sphere::sample_uniform;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kernel() -> impl Strategy<Value = FitnessKernel<f64>> {
    prop_oneof![
        Just(FitnessKernel::Constant),
        (0.05f64..3.14).prop_map(|r_n| FitnessKernel::RangeIndicator { r_n }),
        (0.2f64..1.9, 0.0f64..0.45).prop_map(|(beta, psi)| FitnessKernel::PowerLaw { beta, psi, n: 1000 }),
    ]
}

fn params() -> impl Strategy<Value = ProcessParams<f64>> {
    (1usize..300, 1usize..5, 0.2f64..8.0, 0.01f64..3.0, kernel(), any::<u64>())
        .prop_map(|(n, m, alpha, frac, k, seed)| ProcessParams::new(n, m, alpha, -(m as f64) + frac * m as f64, k, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn runs_conserve(p in params(), fast in any::<bool>()) {
        let sampler = if fast { SamplerKind::fast() } else { SamplerKind::Exact };
        let out = run(&p, &RunOptions { sampler, ..RunOptions::default() }).unwrap();
        out.state.check_invariants().unwrap();
        let h = DegreeHistogram::from_state(&out.state);
        h.check().unwrap();
        prop_assert_eq!(h.counts.iter().sum::<u64>(), p.n as u64);
        prop_assert_eq!(connected_components(&out.state).sizes.iter().sum::<usize>(), p.n);
    }

    #[test]
    fn laws_normalized_and_equal(p in params(), steps in 1usize..10, seed in any::<u64>()) {
        let model = Model::new(p.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut state = GraphState::new(p.m);
        for _ in 0..steps {
            grow_one_step(&mut state, &model, &mut rng);
        }
        let u = sample_uniform(&mut rng);
        let exact = attachment_distribution(&state, &u, &model);
        let fast = fast_sampler_law(&state, &u, &model);
        prop_assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let tv: f64 = 0.5 * exact.iter().zip(&fast).map(|(a, b)| (a - b).abs()).sum::<f64>();
        prop_assert!(tv < 1e-12);
    }

    #[test]
    fn urn_identities_hold_along_coupled_runs(
        kernel in kernel(),
        alpha in 0.5f64..8.0,
        seed in any::<u64>(),
        tau in 1usize..12,
    ) {
        let params = ProcessParams::new(25, 2, alpha, 0.4, kernel, seed);
        let model = Model::new(params.clone()).unwrap();
        let opts = CouplingOptions { engine: CouplingEngine::Materialized, ..Default::default() };
        let run = run_coupled(&params, tau, 0, &opts).unwrap();
        for sigma in tau..25 {
            let a = run.state.truncated(sigma);
            let b = run.state_hat.truncated(sigma);
            let pair = build_urns(&a, &b, run.state.position(sigma), tau - 1, &model).unwrap();
            pair.check(1e-9).unwrap();
            let k = model.floor_mass(sigma);
            prop_assert!((pair.norm_u() - pair.total.max(k)).abs() < 1e-9 * k.max(1.0));
            prop_assert!((pair.norm_hat() - pair.total_hat.max(k)).abs() < 1e-9 * k.max(1.0));
        }
    }
}
