mod common;

use planar_ising::fit::{average_log_likelihood, fit_parameters, objective, FitConfig};
use planar_ising::ising::{IsingModel, MomentSet};
use planar_ising::kacward::brute_force_inference;
use planar_ising::planar::{draw, Graph};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::LN_2;

fn exact(m: &IsingModel) -> (f64, MomentSet) {
    brute_force_inference(m).unwrap()
}

#[test]
fn objective_matches_enumerated_log_partition() {
    let mut rng = common::rng(1);
    for _ in 0..10 {
        let n = rng.random_range(3..10);
        let g = common::random_planar(n, 0.7, &mut rng);
        let th = common::random_thetas(g.num_edges(), -1.5, 1.5, &mut rng);
        let target = common::random_thetas(g.num_edges(), -0.9, 0.9, &mut rng);
        let emb = draw(&g).unwrap();
        let v = objective(&g, &emb, &th, &target).unwrap();
        let (lz, _) = exact(&IsingModel::zero_field(g, th.clone()).unwrap());
        let lin: f64 = target.iter().zip(&th).map(|(a, b)| a * b).sum();
        assert!((v - n as f64 * LN_2 - (lin - lz)).abs() < 1e-9);
    }
}

#[test]
fn tree_fit_inverts_tanh() {
    // star plus path, a tree on 7 vertices
    let g = Graph::from_edges(7, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
    let emb = draw(&g).unwrap();
    let mu = [0.5, -0.3, 0.8, 0.1, -0.95, 0.6];
    let r = fit_parameters(&g, &emb, &mu, &FitConfig::default()).unwrap();
    assert!(r.converged);
    for (t, m) in r.theta.iter().zip(mu) {
        assert!((t - m.atanh()).abs() < 1e-6);
    }
}

#[test]
fn four_cycle_recovers_generating_parameters() {
    let g = Graph::cycle(4);
    let theta0 = vec![0.8, -0.4, 1.1, 0.3];
    let (_, mom) = exact(&IsingModel::zero_field(g.clone(), theta0.clone()).unwrap());
    let emb = draw(&g).unwrap();
    let r = fit_parameters(&g, &emb, &mom.on_edges(g.edges()), &FitConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.iterations <= 25);
    for (a, b) in r.theta.iter().zip(&theta0) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn single_edge_likelihood_at_mle() {
    let th: f64 = 0.7;
    let mu = th.tanh();
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let m = IsingModel::zero_field(g, vec![th]).unwrap();
    let mut data = MomentSet::zeros(2);
    data.set(0, 1, mu);
    let ll = average_log_likelihood(&m, &data).unwrap();
    assert!((ll - (-2.0 * LN_2 + mu * th - th.cosh().ln())).abs() < 1e-12);
}

#[test]
fn likelihood_from_samples_matches_direct_sum() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let m = IsingModel::with_fields(g, vec![0.4, -0.6], vec![0.2, 0.0, -0.1]).unwrap();
    let samples = vec![vec![1i8, 1, -1], vec![-1, 1, 1], vec![1, -1, -1]];
    let data = planar_ising::ising::empirical_moments(&samples).unwrap();
    let (lz, _) = exact(&m);
    let direct: f64 = samples.iter().map(|x| m.energy(x) - lz).sum::<f64>() / 3.0;
    assert!((average_log_likelihood(&m, &data).unwrap() - direct).abs() < 1e-12);
}

#[test]
fn hessian_reuse_reaches_same_optimum() {
    let g = Graph::grid(3, 3);
    let mut rng = common::rng(4);
    let th0 = common::random_thetas(g.num_edges(), -1.0, 1.0, &mut rng);
    let (_, mom) = exact(&IsingModel::zero_field(g.clone(), th0.clone()).unwrap());
    let emb = draw(&g).unwrap();
    let cfg = FitConfig {
        hessian_refresh_every: 3,
        ..FitConfig::default()
    };
    let r = fit_parameters(&g, &emb, &mom.on_edges(g.edges()), &cfg).unwrap();
    assert!(r.converged);
    for (a, b) in r.theta.iter().zip(&th0) {
        assert!((a - b).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fit_matches_moments_and_is_a_local_max(seed in 0u64..10_000, n in 3usize..10) {
        let mut rng = common::rng(seed);
        let g = common::random_planar(n, 0.7, &mut rng);
        let th0 = common::random_thetas(g.num_edges(), -1.0, 1.0, &mut rng);
        let (_, mom) = exact(&IsingModel::zero_field(g.clone(), th0.clone()).unwrap());
        let target = mom.on_edges(g.edges());
        let emb = draw(&g).unwrap();
        let cfg = FitConfig::default();
        let r = fit_parameters(&g, &emb, &target, &cfg).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.iterations <= 25);
        for w in r.history.windows(2) {
            prop_assert!(w[1] >= w[0] - 4.0 * f64::EPSILON * w[0].abs().max(1.0));
        }
        for (a, b) in r.theta.iter().zip(&th0) {
            prop_assert!((a - b).abs() < 1e-6);
        }
        let (_, fitted) = exact(&IsingModel::zero_field(g.clone(), r.theta.clone()).unwrap());
        for (a, b) in fitted.on_edges(g.edges()).iter().zip(&target) {
            prop_assert!((a - b).abs() <= 10.0 * cfg.grad_tol);
        }
        for _ in 0..5 {
            let dir = common::random_thetas(g.num_edges(), -1.0, 1.0, &mut rng);
            for s in [0.5, 0.1, 0.01] {
                let probe: Vec<f64> = r.theta.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                prop_assert!(objective(&g, &emb, &probe, &target).unwrap() <= r.objective + 1e-12);
            }
        }
        let warm = FitConfig {
            theta_init: Some(common::random_thetas(g.num_edges(), -2.0, 2.0, &mut rng)),
            ..FitConfig::default()
        };
        let rw = fit_parameters(&g, &emb, &target, &warm).unwrap();
        for (a, b) in rw.theta.iter().zip(&r.theta) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn nested_graphs_do_not_lose_likelihood(seed in 0u64..10_000, n in 3usize..9) {
        let mut rng = common::rng(seed);
        let g = common::random_planar(n, 0.9, &mut rng);
        let th0 = common::random_thetas(g.num_edges(), -1.0, 1.0, &mut rng);
        let (_, mom) = exact(&IsingModel::zero_field(g.clone(), th0).unwrap());
        let kept: Vec<_> = g.edges().iter().copied().filter(|_| rng.random::<bool>()).collect();
        let sub = Graph::from_edges(n, kept).unwrap();
        let ll = |h: &Graph| {
            let emb = draw(h).unwrap();
            let r = fit_parameters(h, &emb, &mom.on_edges(h.edges()), &FitConfig::default()).unwrap();
            average_log_likelihood(&IsingModel::zero_field(h.clone(), r.theta).unwrap(), &mom).unwrap()
        };
        prop_assert!(ll(&g) >= ll(&sub) - 1e-10);
    }
}
