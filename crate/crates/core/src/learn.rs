//! Greedy planar structure learning.
//!
//! Each step scores every planarity-preserving non-edge by the divergence
//! between its target pair table and the pair table of the current model,
//! adds the best one and refits all couplings. The pair divergence is a lower
//! bound on the likelihood gain of adding that edge.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::fit::{fit_parameters, FitConfig};
use crate::ising::{extend_moments, pair_divergence, restrict_extended, IsingModel, MomentSet, MOMENT_CLAMP};
use crate::kacward::KacWardSystem;
use crate::planar::{candidate_edges, draw, greedy_planar_augmentation, is_planar, Graph, Pair};

/// Bounds below this count as zero when deciding whether to keep going.
const ZERO_BOUND: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LearnMode {
    /// Zero-mean targets, planar graph over the variables.
    ZeroFieldPlanar,
    /// Node means through an auxiliary vertex joined to every variable.
    OuterPlanar,
    /// Auxiliary edges compete with ordinary edges.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Add edges until the graph is maximal planar or `max_edges` is hit.
    Maximal,
    /// Stop when the total log-likelihood gain of the next edge is below γ.
    Threshold(f64),
    Aic,
    Bic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    pub mode: LearnMode,
    pub stop: StopRule,
    /// Edge cap on the working graph, auxiliary edges included. Defaults to
    /// `3N - 6` for the working vertex count `N`.
    pub max_edges: Option<usize>,
    pub fit: FitConfig,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            mode: LearnMode::ZeroFieldPlanar,
            stop: StopRule::Maximal,
            max_edges: None,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub step: usize,
    /// Edge in working-graph labels; the auxiliary vertex is `n`.
    pub edge: Pair,
    pub bound_gain: f64,
    /// Per-sample log-likelihood gain after refitting.
    pub realized_gain: f64,
    /// Training log-likelihood per sample after this step.
    pub avg_ll: f64,
    pub num_edges: usize,
    pub newton_iters: usize,
    /// The stopping rule refused this edge; it is not in the result.
    pub rejected: bool,
    /// Working-model couplings after the step, in working-graph edge order.
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnTrace {
    /// Working graph before the first step.
    pub initial_graph: Graph,
    pub initial_theta: Vec<f64>,
    pub initial_ll: f64,
    pub aux_vertex: Option<usize>,
    pub steps: Vec<TraceStep>,
}

impl LearnTrace {
    pub fn accepted(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| !s.rejected)
    }

    /// The model after `k` accepted steps, over the original variables.
    pub fn model_at(&self, k: usize) -> Result<IsingModel> {
        let mut g = self.initial_graph.clone();
        let mut theta = &self.initial_theta;
        for s in self.accepted().take(k) {
            g.add_edge(s.edge.0, s.edge.1)?;
            theta = &s.theta;
        }
        let working = IsingModel::zero_field(g, theta.clone())?;
        match self.aux_vertex {
            Some(aux) => restrict_extended(&working, aux),
            None => Ok(working),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnResult {
    /// Learned model over the original variables.
    pub model: IsingModel,
    /// Zero-field working model, with the auxiliary vertex when there is one.
    pub working: IsingModel,
    pub trace: LearnTrace,
    /// Every parameter fit met its gradient tolerance.
    pub converged: bool,
}

/// A scored candidate edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub pair: Pair,
    /// Current model's `E[x_i x_j]`.
    pub model_moment: f64,
    pub bound: f64,
}

/// Model correlations of the current zero-field model on a batch of
/// non-edges, read off the augmented graph with zero couplings on the batch.
pub fn batch_correlations(current: &IsingModel, batch: &[Pair]) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Ok(Vec::new());
    }
    let mut aug = current.clone();
    for p in batch {
        aug = aug.with_edge(p.0, p.1, 0.0)?;
    }
    let mu = KacWardSystem::from_model(&aug)?.edge_moments()?;
    Ok(mu[current.graph().num_edges()..].to_vec())
}

/// Scores every pair of `delta` against `targets`, grouping the pairs into
/// maximal planar batches. Output follows the canonical pair order.
pub fn score_candidates(current: &IsingModel, targets: &MomentSet, delta: &[Pair]) -> Result<Vec<Candidate>> {
    if !current.is_zero_field() {
        return Err(Error::NonZeroField);
    }
    let mut remaining: Vec<Pair> = delta.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let batch = greedy_planar_augmentation(current.graph(), &remaining);
        if batch.is_empty() {
            return Err(Error::InvalidGraph("candidate pairs do not preserve planarity".into()));
        }
        let mu = batch_correlations(current, &batch)?;
        for (p, m) in batch.iter().zip(mu) {
            let bound = pair_divergence((0.0, 0.0, targets.pair(*p)), (0.0, 0.0, m))?;
            out.push(Candidate {
                pair: *p,
                model_moment: m,
                bound,
            });
        }
        remaining.retain(|p| !batch.contains(p));
    }
    out.sort_by(|a, b| a.pair.cmp(&b.pair));
    Ok(out)
}

fn argmax(cands: &[Candidate]) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for c in cands {
        if best.is_none_or(|b| c.bound > b.bound) {
            best = Some(*c);
        }
    }
    best
}

fn penalty(stop: StopRule, samples: Option<usize>) -> Result<(f64, f64)> {
    let s = samples.unwrap_or(1) as f64;
    match stop {
        StopRule::Maximal => Ok((s, f64::NEG_INFINITY)),
        StopRule::Threshold(g) => Ok((s, g)),
        StopRule::Aic => Ok((s, 1.0)),
        StopRule::Bic => match samples {
            Some(n) => Ok((s, 0.5 * (n as f64).ln())),
            None => Err(Error::InvalidTargets("BIC needs a sample count".into())),
        },
    }
}

struct Fitted {
    model: IsingModel,
    ll: f64,
    iters: usize,
    converged: bool,
}

fn refit(g: Graph, targets: &MomentSet, theta_init: Vec<f64>, cfg: &FitConfig) -> Result<Fitted> {
    let emb = draw(&g)?;
    let mu = targets.on_edges(g.edges());
    let fcfg = FitConfig {
        theta_init: Some(theta_init),
        ..cfg.clone()
    };
    let r = fit_parameters(&g, &emb, &mu, &fcfg)?;
    if !r.converged {
        log::warn!("fit stopped after {} iterations, gradient {:.3e}", r.iterations, r.grad_norm);
    }
    let ll = r.objective - g.n() as f64 * LN_2;
    Ok(Fitted {
        model: IsingModel::zero_field(g, r.theta)?,
        ll,
        iters: r.iterations,
        converged: r.converged,
    })
}

/// Greedy search from `start` (already a subgraph of the answer) against
/// zero-mean `targets` over the working vertices.
fn greedy_loop(start: Graph, targets: &MomentSet, cfg: &LearnConfig, aux: Option<usize>) -> Result<LearnResult> {
    let n = start.n();
    let (s, pen) = penalty(cfg.stop, targets.sample_count())?;
    let max_edges = cfg.max_edges.unwrap_or(Graph::planar_edge_bound(n));
    // log-likelihood over the original variables is one bit larger when
    // the auxiliary spin is symmetrized out
    let offset = if aux.is_some() { LN_2 } else { 0.0 };

    let m0 = start.num_edges();
    let mut cur = refit(start.clone(), targets, vec![0.0; m0], &cfg.fit)?;
    let mut converged = cur.converged;
    let mut trace = LearnTrace {
        initial_graph: start,
        initial_theta: cur.model.theta_edges().to_vec(),
        initial_ll: cur.ll + offset,
        aux_vertex: aux,
        steps: Vec::new(),
    };

    while cur.model.graph().num_edges() < max_edges {
        let delta = candidate_edges(cur.model.graph());
        if delta.is_empty() {
            break;
        }
        let cands = score_candidates(&cur.model, targets, &delta)?;
        let best = argmax(&cands).expect("non-empty candidate set");
        if best.bound <= ZERO_BOUND && cfg.stop != StopRule::Maximal {
            log::info!("all candidate bounds vanish; stopping");
            break;
        }
        let (u, v) = (best.pair.0, best.pair.1);
        let g = cur.model.graph().with_edge(u, v)?;
        let mut init = cur.model.theta_edges().to_vec();
        init.push(0.0);
        let next = refit(g, targets, init, &cfg.fit)?;
        let gain = next.ll - cur.ll;
        let rejected = gain * s < pen;
        trace.steps.push(TraceStep {
            step: trace.steps.len() + 1,
            edge: best.pair,
            bound_gain: best.bound,
            realized_gain: gain,
            avg_ll: next.ll + offset,
            num_edges: next.model.graph().num_edges(),
            newton_iters: next.iters,
            rejected,
            theta: next.model.theta_edges().to_vec(),
        });
        if rejected {
            log::info!("edge ({u}, {v}) gains {gain:.3e} per sample; stopping");
            break;
        }
        log::debug!("step {}: added ({u}, {v}), bound {:.4e}, gain {gain:.4e}", trace.steps.len(), best.bound);
        converged &= next.converged;
        cur = next;
    }

    debug_assert!(is_planar(cur.model.graph()));
    let working = cur.model.with_aux_vertex(aux)?;
    let model = match aux {
        Some(a) => restrict_extended(&working, a)?,
        None => working.clone(),
    };
    Ok(LearnResult {
        model,
        working,
        trace,
        converged,
    })
}

fn prepare(targets: &MomentSet) -> Result<MomentSet> {
    targets.validate()?;
    Ok(targets.clamped(MOMENT_CLAMP))
}

/// Greedy planar graph selection for zero-mean targets.
pub fn greedy_planar_select(targets: &MomentSet, cfg: &LearnConfig) -> Result<LearnResult> {
    let t = prepare(targets)?;
    if !t.is_zero_mean(1e-9) {
        log::warn!("targets have non-zero means; the zero-field model ignores them");
    }
    greedy_loop(Graph::empty(t.n()), &t, cfg, None)
}

/// Learning with node means: every variable is joined to the auxiliary
/// vertex from the start, so the learned graph is outer-planar.
pub fn learn_outer_planar(targets: &MomentSet, cfg: &LearnConfig) -> Result<LearnResult> {
    let t = extend_moments(&prepare(targets)?);
    let n = targets.n();
    let mut g = Graph::empty(n + 1);
    for i in 0..n {
        g.add_edge(i, n)?;
    }
    greedy_loop(g, &t, cfg, Some(n))
}

/// Learning with node means where auxiliary edges compete with the rest.
pub fn learn_mixed(targets: &MomentSet, cfg: &LearnConfig) -> Result<LearnResult> {
    let t = extend_moments(&prepare(targets)?);
    let n = targets.n();
    greedy_loop(Graph::empty(n + 1), &t, cfg, Some(n))
}

/// Dispatches on `cfg.mode`.
pub fn learn(targets: &MomentSet, cfg: &LearnConfig) -> Result<LearnResult> {
    match cfg.mode {
        LearnMode::ZeroFieldPlanar => greedy_planar_select(targets, cfg),
        LearnMode::OuterPlanar => learn_outer_planar(targets, cfg),
        LearnMode::Mixed => learn_mixed(targets, cfg),
    }
}
