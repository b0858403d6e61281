mod common;

use planar_ising::ising::{empirical_moments, IsingModel};
use planar_ising::kacward::brute_force_inference;
use planar_ising::planar::{is_outerplanar, is_planar, Graph};
use planar_ising::sampling::{gen_model, gibbs_sample, GenConfig, GenKind, SampleConfig};

#[test]
fn zero_couplings_give_uncorrelated_spins() {
    let m = IsingModel::zero_field(Graph::cycle(5), vec![0.0; 5]).unwrap();
    let s = 20_000;
    let cfg = SampleConfig {
        num_samples: s,
        thin: 0,
        burn_in: 10,
        seed: 3,
    };
    let mom = empirical_moments(&gibbs_sample(&m, &cfg).unwrap()).unwrap();
    let tol = 4.0 / (s as f64).sqrt();
    for i in 0..5 {
        assert!(mom.mean(i).abs() < tol);
        for j in i + 1..5 {
            assert!(mom.get(i, j).abs() < tol);
        }
    }
}

#[test]
fn single_edge_correlation() {
    let m = IsingModel::zero_field(Graph::from_edges(2, [(0, 1)]).unwrap(), vec![1.0]).unwrap();
    let cfg = SampleConfig {
        num_samples: 100_000,
        seed: 17,
        ..SampleConfig::default()
    };
    let mom = empirical_moments(&gibbs_sample(&m, &cfg).unwrap()).unwrap();
    assert!((mom.get(0, 1) - 1f64.tanh()).abs() < 0.01);
    assert_eq!(mom.sample_count(), Some(100_000));
}

#[test]
fn field_model_moments_match_enumeration() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let m = IsingModel::with_fields(g, vec![0.5, -0.3, 0.2], vec![0.4, 0.0, -0.6]).unwrap();
    let cfg = SampleConfig {
        num_samples: 100_000,
        thin: 2,
        seed: 8,
        ..SampleConfig::default()
    };
    let emp = empirical_moments(&gibbs_sample(&m, &cfg).unwrap()).unwrap();
    let (_, exact) = brute_force_inference(&m).unwrap();
    for i in 0..3 {
        assert!((emp.mean(i) - exact.mean(i)).abs() < 0.015);
        for j in i + 1..3 {
            assert!((emp.get(i, j) - exact.get(i, j)).abs() < 0.015);
        }
    }
}

#[test]
fn different_seeds_differ() {
    let m = IsingModel::independent(6);
    let a = SampleConfig {
        num_samples: 20,
        seed: 1,
        ..SampleConfig::default()
    };
    let b = SampleConfig { seed: 2, ..a.clone() };
    assert_ne!(gibbs_sample(&m, &a).unwrap(), gibbs_sample(&m, &b).unwrap());
}

#[test]
fn generators_respect_their_shapes() {
    for seed in 0..10 {
        let (m, _) = gen_model(&GenConfig::new(GenKind::Grid { rows: 4, cols: 6 }, seed)).unwrap();
        assert!(is_planar(m.graph()));
        assert_eq!(m.graph().num_edges(), 4 * 5 + 3 * 6);
        let (m, _) = gen_model(&GenConfig::new(GenKind::OuterPlanar { n: 12 }, seed)).unwrap();
        assert!(is_outerplanar(m.graph()));
        assert!(!m.is_zero_field());
        let (m, emb) = gen_model(&GenConfig::new(GenKind::RandomPlanar { n: 20 }, seed)).unwrap();
        assert!(is_planar(m.graph()));
        assert!(emb.matches(m.graph()));
        for t in m.theta_edges().iter().chain(m.theta_nodes()) {
            assert!(*t == 0.0 || (0.05..=1.0).contains(&t.abs()));
        }
    }
    let a = gen_model(&GenConfig::new(GenKind::RandomPlanar { n: 10 }, 4)).unwrap();
    let b = gen_model(&GenConfig::new(GenKind::RandomPlanar { n: 10 }, 4)).unwrap();
    assert_eq!(a.0, b.0);
}

#[test]
fn custom_range_and_threshold() {
    let mut c = GenConfig::new(GenKind::Grid { rows: 5, cols: 5 }, 2);
    c.range = (0.2, 0.6);
    c.min_abs = 0.3;
    let (m, _) = gen_model(&c).unwrap();
    assert!(m.theta_edges().iter().all(|t| (0.3..=0.6).contains(t)));
}
