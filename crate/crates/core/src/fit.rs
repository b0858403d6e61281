//! Maximum-likelihood couplings on a fixed planar graph.
//!
//! The objective `f(θ) = Σ (μ_ij θ_ij − log cosh θ_ij) − ½ log det(I − W(θ))`
//! is concave; its gradient is `μ − μ(θ)` and its Hessian is `−H(θ)`, so the
//! ascent step is `H⁻¹ (μ − μ(θ))` with Armijo backtracking.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, MomentSet};
use crate::kacward::{infer_model, transition_matrix, DirectedEdgeIndex, KacWardSystem};
use crate::planar::{Graph, PlanarEmbedding};

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Stop when `‖μ − μ(θ)‖∞` falls below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Armijo sufficient-increase fraction, in (0, 0.5).
    pub alpha: f64,
    /// Backtracking shrink factor, in (0, 1).
    pub beta: f64,
    /// Recompute the Hessian every this many iterations.
    pub hessian_refresh_every: usize,
    /// Warm start; zeros when `None`.
    pub theta_init: Option<Vec<f64>>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            grad_tol: 1e-8,
            max_iters: 100,
            alpha: 0.25,
            beta: 0.5,
            hessian_refresh_every: 1,
            theta_init: None,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.grad_tol > 0.0
            && self.alpha > 0.0
            && self.alpha < 0.5
            && self.beta > 0.0
            && self.beta < 1.0
            && self.hessian_refresh_every >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTargets(format!("invalid fit configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta: Vec<f64>,
    /// Final objective value, without the constant `n log 2`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final `‖μ − μ(θ)‖∞`.
    pub grad_norm: f64,
    /// Objective value at the start and after every accepted step.
    pub history: Vec<f64>,
}

/// The concave likelihood objective on one drawn graph.
pub struct PlanarObjective {
    n: usize,
    base: KacWardSystem,
    target: Vec<f64>,
}

impl PlanarObjective {
    pub fn new(g: &Graph, emb: &PlanarEmbedding, target: &[f64]) -> Result<Self> {
        if target.len() != g.num_edges() {
            return Err(Error::BadDims(format!(
                "{} targets for {} edges",
                target.len(),
                g.num_edges()
            )));
        }
        if !emb.matches(g) || emb.coords().is_none() {
            return Err(Error::EmbeddingMismatch);
        }
        let index = DirectedEdgeIndex::new(g);
        let a = transition_matrix(&index, emb)?;
        let base = KacWardSystem::from_parts(g.n(), index, a, vec![0.0; g.num_edges()]);
        Ok(PlanarObjective {
            n: g.n(),
            base,
            target: target.to_vec(),
        })
    }

    fn n_log2(&self) -> f64 {
        self.n as f64 * std::f64::consts::LN_2
    }

    pub fn system(&self, theta: &[f64]) -> KacWardSystem {
        self.base.with_theta(theta.to_vec())
    }

    fn linear(&self, theta: &[f64]) -> f64 {
        self.target.iter().zip(theta).map(|(m, t)| m * t).sum()
    }

    pub fn value(&self, theta: &[f64]) -> Result<f64> {
        let lz = self.system(theta).log_partition()?;
        Ok(self.linear(theta) - lz + self.n_log2())
    }
}

/// `Σ (μ_ij θ_ij − log cosh θ_ij) − ½ log det(I − W(θ))`.
pub fn objective(g: &Graph, emb: &PlanarEmbedding, theta: &[f64], target: &[f64]) -> Result<f64> {
    if theta.len() != g.num_edges() {
        return Err(Error::BadDims("parameter count".into()));
    }
    PlanarObjective::new(g, emb, target)?.value(theta)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Solves `H d = g`, adding `εI` (ε from 1e-8, ×10) until `d` is an ascent
/// direction.
fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> Result<DVector<f64>> {
    if let Some(ch) = h.clone().cholesky() {
        let d = ch.solve(g);
        if d.dot(g) > 0.0 && d.iter().all(|x| x.is_finite()) {
            return Ok(d);
        }
    }
    let mut eps = 1e-8;
    while eps < 1e8 {
        let mut reg = h.clone();
        for k in 0..reg.nrows() {
            reg[(k, k)] += eps;
        }
        if let Some(ch) = reg.cholesky() {
            let d = ch.solve(g);
            if d.dot(g) > 0.0 && d.iter().all(|x| x.is_finite()) {
                return Ok(d);
            }
        }
        eps *= 10.0;
    }
    Err(Error::NumericalFailure("no ascent direction from the Hessian".into()))
}

/// Newton's method with backtracking for the maximum-likelihood couplings.
///
/// Returns the last iterate with `converged = false` when `max_iters` is
/// exhausted or the line search stalls.
pub fn fit_parameters(g: &Graph, emb: &PlanarEmbedding, target: &[f64], cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if let Some(k) = target.iter().position(|m| !(m.abs() < 1.0)) {
        return Err(Error::InvalidTargets(format!(
            "edge target {} = {} must lie strictly inside (-1, 1)",
            k, target[k]
        )));
    }
    let obj = PlanarObjective::new(g, emb, target)?;
    let m = g.num_edges();
    let n_log2 = g.n() as f64 * std::f64::consts::LN_2;
    let mut theta = match &cfg.theta_init {
        Some(t) if t.len() == m => t.clone(),
        Some(_) => return Err(Error::BadDims("theta_init length".into())),
        None => vec![0.0; m],
    };

    let mut r = obj.system(&theta).infer(true)?;
    let mut f = obj.linear(&theta) - r.log_z + n_log2;
    let mut grad: Vec<f64> = target.iter().zip(&r.edge_moments).map(|(a, b)| a - b).collect();
    let mut hess = r.hessian.take().unwrap();
    let mut history = vec![f];
    let mut iterations = 0;
    let mut converged = inf_norm(&grad) <= cfg.grad_tol;

    while !converged && iterations < cfg.max_iters {
        let gv = DVector::from_column_slice(&grad);
        let dir = newton_direction(&hess, &gv)?;
        let slope = dir.dot(&gv);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-12 {
            let trial: Vec<f64> = theta.iter().zip(dir.iter()).map(|(a, d)| a + t * d).collect();
            if let Ok(lz) = obj.system(&trial).log_partition() {
                let ft = obj.linear(&trial) - lz + n_log2;
                let slack = 4.0 * f64::EPSILON * f.abs().max(1.0);
                if ft >= f + cfg.alpha * t * slope - slack {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            t *= cfg.beta;
        }
        let Some((next, fnext)) = accepted else {
            log::debug!("line search stalled at iteration {iterations}");
            break;
        };
        iterations += 1;
        theta = next;
        f = fnext;
        history.push(f);
        let refresh = iterations % cfg.hessian_refresh_every == 0;
        let mut r = obj.system(&theta).infer(refresh)?;
        grad = target.iter().zip(&r.edge_moments).map(|(a, b)| a - b).collect();
        if let Some(h) = r.hessian.take() {
            hess = h;
        }
        converged = inf_norm(&grad) <= cfg.grad_tol;
    }

    Ok(FitResult {
        theta,
        objective: f,
        iterations,
        converged,
        grad_norm: inf_norm(&grad),
        history,
    })
}

/// Average per-sample log-likelihood `Σ θ_i μ_i + Σ θ_ij μ_ij − log Z(θ)`
/// of data summarized by its moments. Exact for empirical distributions,
/// since the sufficient statistics are the spins and edge products.
///
/// A model carrying an auxiliary vertex is scored on data over the other
/// vertices by restricting it first.
pub fn average_log_likelihood(model: &IsingModel, data: &MomentSet) -> Result<f64> {
    let restricted;
    let model = match model.aux_vertex() {
        Some(aux) if data.n() + 1 == model.n() => {
            restricted = crate::ising::restrict_extended(model, aux)?;
            &restricted
        }
        _ => model,
    };
    if data.n() != model.n() {
        return Err(Error::BadDims(format!(
            "data has {} variables, model has {}",
            data.n(),
            model.n()
        )));
    }
    let lz = infer_model(model)?.log_z;
    let mut ll = -lz;
    for (i, &t) in model.theta_nodes().iter().enumerate() {
        ll += t * data.mean(i);
    }
    for (e, &t) in model.graph().edges().iter().zip(model.theta_edges()) {
        ll += t * data.pair(*e);
    }
    Ok(ll)
}
