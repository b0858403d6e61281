#![allow(dead_code)]

use planar_ising::planar::{is_planar, Graph, Pair};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random planar graph: shuffled maximal planar graph thinned with keep
/// probability `keep`.
pub fn random_planar(n: usize, keep: f64, rng: &mut impl Rng) -> Graph {
    let mut pairs = Graph::empty(n).non_edges();
    pairs.shuffle(rng);
    let mut g = Graph::empty(n);
    for p in pairs {
        let t = g.with_edge(p.0, p.1).unwrap();
        if is_planar(&t) {
            g = t;
        }
    }
    let kept: Vec<Pair> = g.edges().iter().copied().filter(|_| rng.random::<f64>() < keep).collect();
    Graph::from_edges(n, kept).unwrap()
}

pub fn random_thetas(m: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    (0..m).map(|_| rng.random_range(lo..hi)).collect()
}
