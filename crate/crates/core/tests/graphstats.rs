use gpaf::graphstats::{
    compare_empirical_theory, connected_components, diameter, tail_exponent_fit, DegreeHistogram, DiameterMethod,
    UndirectedGraph,
};
use gpaf::process::{run, run_ensemble, GraphState, RunOptions, SamplerKind};
use gpaf::sphere::SpherePoint;
use gpaf::theory::limit_degree_distribution;
use gpaf::{FitnessKernel, ProcessParams};

#[test]
fn histogram_of_single_vertex() {
    let p = ProcessParams::new(1, 3, 3.0, 0.0, FitnessKernel::Constant, 1);
    let out = run(&p, &RunOptions::default()).unwrap();
    let h = DegreeHistogram::from_state(&out.state);
    assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![(6, 1)]);
    h.check().unwrap();
}

#[test]
fn histogram_conservation_on_runs() {
    for seed in 0..5 {
        let p = ProcessParams::new(3000, 3, 3.0, -1.0, FitnessKernel::RangeIndicator { r_n: 0.2 }, seed);
        let out = run(&p, &RunOptions { sampler: SamplerKind::fast(), ..RunOptions::default() }).unwrap();
        let h = DegreeHistogram::from_state(&out.state);
        h.check().unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 3000);
        let c = connected_components(&out.state);
        assert_eq!(c.sizes.iter().sum::<usize>(), 3000);
    }
    let bad = DegreeHistogram { sigma: 2, m: 1, counts: vec![0, 1, 1] };
    assert!(bad.check().is_err());
}

#[test]
fn all_self_loops_are_singletons() {
    let mut s = GraphState::<f64>::new(2);
    for v in 0..5 {
        s.push_vertex(SpherePoint::north_pole(), &[v, v]);
    }
    let c = connected_components(&s);
    assert_eq!(c.sizes, vec![1; 5]);
    let g = UndirectedGraph::from_state(&s);
    let r = diameter(&g, DiameterMethod::Ifub).unwrap();
    assert_eq!(r.diameter, 0);
    assert!(!r.connected);
}

#[test]
fn parid_graphs_are_connected() {
    let p = ProcessParams::new(5000, 2, 2.0, 0.0, FitnessKernel::Constant, 3);
    let out = run(&p, &RunOptions { sampler: SamplerKind::fast(), ..RunOptions::default() }).unwrap();
    assert!(connected_components(&out.state).is_connected());
}

#[test]
fn ifub_matches_exact_on_generated_graphs() {
    for seed in 0..5 {
        let p = ProcessParams::new(1500, 2, 3.0, 0.0, FitnessKernel::RangeIndicator { r_n: 0.25 }, seed);
        let out = run(&p, &RunOptions { sampler: SamplerKind::fast(), ..RunOptions::default() }).unwrap();
        let g = UndirectedGraph::from_state(&out.state);
        let exact = diameter(&g, DiameterMethod::Exact).unwrap();
        let ifub = diameter(&g, DiameterMethod::Ifub).unwrap();
        assert_eq!(exact.diameter, ifub.diameter);
        assert_eq!(exact.component_size, ifub.component_size);
        let sampled = diameter(&g, DiameterMethod::Sampled { sweeps: 5, seed }).unwrap();
        assert!(sampled.diameter <= exact.diameter);
    }
}

#[test]
fn ensemble_comparison() {
    let p = ProcessParams::new(4000, 2, 3.0, 0.0, FitnessKernel::Constant, 9);
    let opts = RunOptions { sampler: SamplerKind::fast(), ..RunOptions::default() };
    let hists: Vec<_> = run_ensemble(&p, 8, &opts)
        .unwrap()
        .iter()
        .map(|o| DegreeHistogram::from_state(&o.state))
        .collect();
    let law = limit_degree_distribution(2, 3.0, 0.0, 1000).unwrap();
    let c = compare_empirical_theory(&hists, Some(&law.p), 2..=10).unwrap();
    assert!(c.theory_available);
    for r in &c.rows {
        assert!(r.stderr > 0.0);
        assert!(r.z_score.unwrap().abs() < 6.0, "{r:?}");
    }
    let same = vec![hists[0].clone(), hists[0].clone()];
    let c = compare_empirical_theory(&same, None, 2..=10).unwrap();
    assert!(c.rows.iter().all(|r| r.stderr == 0.0));
}

#[test]
fn tail_fit_on_generated_graph() {
    let p = ProcessParams::new(50_000, 2, 3.0, 0.0, FitnessKernel::Constant, 4);
    let out = run(&p, &RunOptions { sampler: SamplerKind::fast(), ..RunOptions::default() }).unwrap();
    let fit = tail_exponent_fit(&DegreeHistogram::from_state(&out.state), 20).unwrap();
    assert!((fit.mle - 4.0).abs() < 0.5, "{fit:?}");
    assert!(tail_exponent_fit(&DegreeHistogram::from_state(&out.state), 10_000).is_err());
}
