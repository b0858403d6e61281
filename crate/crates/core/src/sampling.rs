//! Gibbs sampling and synthetic model generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so outputs
//! are bit-identical across platforms for a given seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::planar::{draw, is_planar, Graph, PlanarEmbedding};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleConfig {
    pub num_samples: usize,
    pub burn_in: usize,
    /// Extra sweeps discarded between kept samples.
    pub thin: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            num_samples: 1000,
            burn_in: 1000,
            thin: 10,
            seed: 0,
        }
    }
}

/// Single-site Gibbs sampler sweeping vertices in index order. Returns
/// `num_samples` rows of ±1 spins.
pub fn gibbs_sample(model: &IsingModel, cfg: &SampleConfig) -> Result<Vec<Vec<i8>>> {
    if cfg.num_samples == 0 {
        return Err(Error::BadDims("num_samples must be at least 1".into()));
    }
    let n = model.n();
    let mut nbrs: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (p, &t) in model.graph().edges().iter().zip(model.theta_edges()) {
        nbrs[p.0].push((p.1, t));
        nbrs[p.1].push((p.0, t));
    }
    let fields = model.theta_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();

    let sweep = |x: &mut [i8], rng: &mut ChaCha8Rng| {
        for i in 0..n {
            let h = fields[i] + nbrs[i].iter().map(|&(j, t)| t * f64::from(x[j])).sum::<f64>();
            let p_up = 1.0 / (1.0 + (-2.0 * h).exp());
            x[i] = if rng.random::<f64>() < p_up { 1 } else { -1 };
        }
    };

    for _ in 0..cfg.burn_in {
        sweep(&mut x, &mut rng);
    }
    let mut out = Vec::with_capacity(cfg.num_samples);
    for _ in 0..cfg.num_samples {
        for _ in 0..=cfg.thin {
            sweep(&mut x, &mut rng);
        }
        out.push(x.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Grid { rows: usize, cols: usize },
    /// Cycle with random non-crossing chords and node fields.
    OuterPlanar { n: usize },
    RandomPlanar { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub kind: GenKind,
    /// Parameters are drawn uniformly from `[lo, hi]`.
    pub range: (f64, f64),
    /// Draws with `|θ| < min_abs` are rejected.
    pub min_abs: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(kind: GenKind, seed: u64) -> Self {
        GenConfig {
            kind,
            range: (-1.0, 1.0),
            min_abs: 0.05,
            seed,
        }
    }
}

fn draw_param(rng: &mut ChaCha8Rng, lo: f64, hi: f64, min_abs: f64) -> f64 {
    loop {
        let t = if lo == hi { lo } else { rng.random_range(lo..=hi) };
        if t.abs() >= min_abs {
            return t;
        }
    }
}

fn check_range(lo: f64, hi: f64, min_abs: f64) -> Result<()> {
    let admissible = lo.is_finite()
        && hi.is_finite()
        && lo <= hi
        && min_abs >= 0.0
        && (hi >= min_abs || lo <= -min_abs)
        && !(lo == hi && lo.abs() < min_abs);
    if admissible {
        Ok(())
    } else {
        Err(Error::BadDims(format!(
            "no parameter in [{lo}, {hi}] has magnitude at least {min_abs}"
        )))
    }
}

/// Triangulates the polygon `poly` at random, pushing every diagonal.
fn random_diagonals(poly: &[usize], rng: &mut ChaCha8Rng, out: &mut Vec<(usize, usize)>) {
    let k = poly.len();
    if k < 4 {
        return;
    }
    // a random diagonal (i, j) with j not adjacent to i splits the polygon
    let i = rng.random_range(0..k);
    let mut j = rng.random_range(0..k - 3);
    j = (i + 2 + j) % k;
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    out.push((poly[a], poly[b]));
    random_diagonals(&poly[a..=b], rng, out);
    let mut rest: Vec<usize> = poly[b..].to_vec();
    rest.extend_from_slice(&poly[..=a]);
    random_diagonals(&rest, rng, out);
}

fn random_maximal_planar(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut pairs = Graph::empty(n).non_edges();
    pairs.shuffle(rng);
    let bound = Graph::planar_edge_bound(n);
    let mut g = Graph::empty(n);
    for p in pairs {
        if g.num_edges() >= bound {
            break;
        }
        let t = g.with_edge(p.0, p.1).unwrap();
        if is_planar(&t) {
            g = t;
        }
    }
    g
}

/// Random model of the requested shape with a straight-line drawing.
///
/// Grids are zero-field and drawn on the lattice. Outer-planar models carry
/// node fields and are drawn on a circle. Random planar models keep each
/// edge of a random maximal planar graph with probability 1/2.
pub fn gen_model(cfg: &GenConfig) -> Result<(IsingModel, PlanarEmbedding)> {
    let (lo, hi) = cfg.range;
    check_range(lo, hi, cfg.min_abs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match cfg.kind {
        GenKind::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(Error::BadDims(format!("grid {rows}x{cols}")));
            }
            let g = Graph::grid(rows, cols);
            let theta = (0..g.num_edges()).map(|_| draw_param(&mut rng, lo, hi, cfg.min_abs)).collect();
            let coords = (0..rows * cols)
                .map(|v| [(v % cols) as f64, -((v / cols) as f64)])
                .collect();
            let emb = PlanarEmbedding::from_coords(&g, coords)?;
            Ok((IsingModel::zero_field(g, theta)?, emb))
        }
        GenKind::OuterPlanar { n } => {
            if n == 0 {
                return Err(Error::BadDims("outerplanar needs at least one vertex".into()));
            }
            let mut g = if n >= 3 {
                Graph::cycle(n)
            } else {
                Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))?
            };
            let poly: Vec<usize> = (0..n).collect();
            let mut diags = Vec::new();
            random_diagonals(&poly, &mut rng, &mut diags);
            for (u, v) in diags {
                if rng.random::<bool>() {
                    g.add_edge(u, v)?;
                }
            }
            let theta = (0..g.num_edges()).map(|_| draw_param(&mut rng, lo, hi, cfg.min_abs)).collect();
            let fields = (0..n).map(|_| draw_param(&mut rng, lo, hi, cfg.min_abs)).collect();
            let coords = (0..n)
                .map(|v| {
                    let a = std::f64::consts::TAU * v as f64 / n as f64;
                    [a.cos(), a.sin()]
                })
                .collect();
            let emb = PlanarEmbedding::from_coords(&g, coords)?;
            Ok((IsingModel::with_fields(g, theta, fields)?, emb))
        }
        GenKind::RandomPlanar { n } => {
            if n == 0 {
                return Err(Error::BadDims("random planar needs at least one vertex".into()));
            }
            let full = random_maximal_planar(n, &mut rng);
            let kept: Vec<_> = full.edges().iter().copied().filter(|_| rng.random::<bool>()).collect();
            let g = Graph::from_edges(n, kept)?;
            let theta = (0..g.num_edges()).map(|_| draw_param(&mut rng, lo, hi, cfg.min_abs)).collect();
            let emb = draw(&g)?;
            Ok((IsingModel::zero_field(g, theta)?, emb))
        }
    }
}
