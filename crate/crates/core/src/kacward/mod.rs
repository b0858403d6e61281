//! Exact zero-field inference on planar graphs through the Kac-Ward
//! determinant.
//!
//! For a straight-line drawing of the graph, index the `2|E|` directed edges
//! and set `A[(i→j), (j→l)] = exp(i·φ/2)` for every non-reversing transition,
//! where `φ` is the clockwise turning angle at `j`. With `D = diag(tanh θ)`
//! and `W = A·D`,
//!
//! ```text
//! log Z = n log 2 + Σ log cosh θ_ij + ½ log det(I − W)
//! ```
//!
//! and, with `S = (I − W)⁻¹ A`, the edge moments and the Hessian of `log Z`
//! follow from the diagonal and the entries of `S`.

pub mod enumerate;

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::ising::{extend_zero_field, IsingModel};
use crate::planar::{draw, is_planar, Graph, PlanarEmbedding};

pub use enumerate::{brute_force_inference, state_probabilities};

type C64 = Complex<f64>;

/// Couplings beyond this magnitude are clamped before taking `tanh`.
pub const THETA_SATURATION: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on the relative imaginary residue of `log det` and of moments.
    pub imag_rel: f64,
    /// Slack on the sign of `det(I − W)`.
    pub det_neg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            imag_rel: 1e-6,
            det_neg: 1e-10,
        }
    }
}

/// Directed edges of a graph: edge `k = {u, v}` with `u < v` yields darts
/// `2k = (u, v)` and `2k + 1 = (v, u)`, so reversal flips the low bit.
#[derive(Debug, Clone)]
pub struct DirectedEdgeIndex {
    darts: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
}

impl DirectedEdgeIndex {
    pub fn new(g: &Graph) -> Self {
        let mut darts = Vec::with_capacity(2 * g.num_edges());
        for e in g.edges() {
            darts.push((e.0, e.1));
            darts.push((e.1, e.0));
        }
        let lookup = darts.iter().enumerate().map(|(k, &d)| (d, k)).collect();
        DirectedEdgeIndex { darts, lookup }
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn dart(&self, k: usize) -> (usize, usize) {
        self.darts[k]
    }

    pub fn index(&self, tail: usize, head: usize) -> Option<usize> {
        self.lookup.get(&(tail, head)).copied()
    }

    /// Index of the reversed dart; an involution without fixed points.
    pub fn reversal(&self, k: usize) -> usize {
        k ^ 1
    }

    pub fn edge_of(&self, k: usize) -> usize {
        k / 2
    }
}

/// Kac-Ward matrices for one zero-field model and one drawing.
#[derive(Debug, Clone)]
pub struct KacWardSystem {
    n: usize,
    index: DirectedEdgeIndex,
    a: DMatrix<C64>,
    /// `tanh θ` per undirected edge (after saturation clamp).
    w: Vec<f64>,
    theta: Vec<f64>,
    tol: Tolerances,
}

/// Output of a full inference pass.
#[derive(Debug, Clone)]
pub struct InferenceResult {
    pub log_z: f64,
    pub edge_moments: Vec<f64>,
    pub hessian: Option<DMatrix<f64>>,
}

/// Transition phases `A` for a drawing, independent of the parameters.
pub fn transition_matrix(index: &DirectedEdgeIndex, emb: &PlanarEmbedding) -> Result<DMatrix<C64>> {
    let m = index.len();
    let mut a = DMatrix::<C64>::zeros(m, m);
    for row in 0..m {
        let (i, j) = index.dart(row);
        for &l in emb.rotation(j) {
            if l == i {
                continue;
            }
            let col = index.index(j, l).ok_or(Error::EmbeddingMismatch)?;
            let phi = emb.turning_angle(i, j, l)?;
            a[(row, col)] = C64::from_polar(1.0, 0.5 * phi);
        }
    }
    Ok(a)
}

impl KacWardSystem {
    /// Builds the system for a zero-field model on a drawn planar graph.
    pub fn build(model: &IsingModel, emb: &PlanarEmbedding) -> Result<Self> {
        if !model.is_zero_field() {
            return Err(Error::NonZeroField);
        }
        if !emb.matches(model.graph()) || emb.coords().is_none() {
            return Err(Error::EmbeddingMismatch);
        }
        let index = DirectedEdgeIndex::new(model.graph());
        let a = transition_matrix(&index, emb)?;
        Ok(Self::from_parts(model.n(), index, a, model.theta_edges().to_vec()))
    }

    /// Draws the model's graph and builds the system.
    pub fn from_model(model: &IsingModel) -> Result<Self> {
        let emb = draw(model.graph())?;
        Self::build(model, &emb)
    }

    pub(crate) fn from_parts(n: usize, index: DirectedEdgeIndex, a: DMatrix<C64>, theta: Vec<f64>) -> Self {
        let w = theta
            .iter()
            .map(|t| t.clamp(-THETA_SATURATION, THETA_SATURATION).tanh())
            .collect();
        KacWardSystem {
            n,
            index,
            a,
            w,
            theta,
            tol: Tolerances::default(),
        }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Same drawing, new couplings.
    pub fn with_theta(&self, theta: Vec<f64>) -> Self {
        assert_eq!(theta.len(), self.theta.len());
        Self::from_parts(self.n, self.index.clone(), self.a.clone(), theta)
    }

    pub fn index(&self) -> &DirectedEdgeIndex {
        &self.index
    }

    pub fn transitions(&self) -> &DMatrix<C64> {
        &self.a
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// `W = A·D`.
    pub fn w_matrix(&self) -> DMatrix<C64> {
        let mut w = self.a.clone();
        for col in 0..w.ncols() {
            let s = self.w[self.index.edge_of(col)];
            w.column_mut(col).scale_mut(s);
        }
        w
    }

    fn log_cosh_sum(&self) -> f64 {
        self.theta
            .iter()
            .map(|t| {
                let a = t.abs();
                // log cosh a = a + log(1 + e^{-2a}) - log 2
                a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
            })
            .sum()
    }

    fn factor(&self) -> Result<Factored> {
        let m = self.index.len();
        let mut i_w = -self.w_matrix();
        for k in 0..m {
            i_w[(k, k)] += 1.0;
        }
        let lu = i_w.lu();
        let u = lu.u();
        let mut log_abs = 0.0;
        let mut phase = C64::new(lu.p().determinant::<f64>(), 0.0);
        for k in 0..m {
            let d = u[(k, k)];
            let r = d.norm();
            if r == 0.0 || !r.is_finite() {
                return Err(Error::NumericalFailure("I - W is singular".into()));
            }
            log_abs += r.ln();
            phase *= d / r;
        }
        let arg = phase.im.atan2(phase.re);
        if phase.re < -self.tol.det_neg || arg.abs() > self.tol.imag_rel * log_abs.abs().max(1.0) {
            return Err(Error::NumericalFailure(format!(
                "det(I - W) has phase {arg:e}; the drawing or angle convention is inconsistent"
            )));
        }
        Ok(Factored { lu, log_det: log_abs })
    }

    /// `log Z` in nats.
    pub fn log_partition(&self) -> Result<f64> {
        let f = self.factor()?;
        Ok(self.log_partition_from(&f))
    }

    fn log_partition_from(&self, f: &Factored) -> f64 {
        self.n as f64 * std::f64::consts::LN_2 + self.log_cosh_sum() + 0.5 * f.log_det
    }

    fn s_matrix(&self, f: &Factored) -> Result<DMatrix<C64>> {
        f.lu
            .solve(&self.a)
            .ok_or_else(|| Error::NumericalFailure("I - W is singular".into()))
    }

    fn moments_from(&self, s: &DMatrix<C64>) -> Result<Vec<f64>> {
        let mut mu = Vec::with_capacity(self.w.len());
        for (e, &w) in self.w.iter().enumerate() {
            let d = s[(2 * e, 2 * e)] + s[(2 * e + 1, 2 * e + 1)];
            if d.im.abs() > self.tol.imag_rel * d.re.abs().max(1.0) {
                return Err(Error::NumericalFailure(format!(
                    "edge moment has imaginary residue {:e}",
                    d.im
                )));
            }
            mu.push(w - 0.5 * (1.0 - w * w) * d.re);
        }
        Ok(mu)
    }

    /// `E[x_i x_j]` for every edge, in edge order.
    pub fn edge_moments(&self) -> Result<Vec<f64>> {
        let f = self.factor()?;
        let s = self.s_matrix(&f)?;
        self.moments_from(&s)
    }

    /// Hessian of `log Z` with respect to the edge couplings.
    pub fn hessian(&self) -> Result<DMatrix<f64>> {
        Ok(self.infer(true)?.hessian.unwrap())
    }

    fn hessian_from(&self, s: &DMatrix<C64>, mu: &[f64]) -> DMatrix<f64> {
        let m = self.w.len();
        let mut h = DMatrix::<f64>::zeros(m, m);
        for e in 0..m {
            h[(e, e)] = 1.0 - mu[e] * mu[e];
            let ce = 1.0 - self.w[e] * self.w[e];
            for f in e + 1..m {
                let mut t = C64::new(0.0, 0.0);
                for a in [2 * e, 2 * e + 1] {
                    for b in [2 * f, 2 * f + 1] {
                        t += s[(a, b)] * s[(b, a)];
                    }
                }
                let cf = 1.0 - self.w[f] * self.w[f];
                let v = -0.5 * ce * t.re * cf;
                h[(e, f)] = v;
                h[(f, e)] = v;
            }
        }
        h
    }

    /// `log Z`, edge moments and optionally the Hessian from one factorization.
    pub fn infer(&self, with_hessian: bool) -> Result<InferenceResult> {
        let f = self.factor()?;
        let log_z = self.log_partition_from(&f);
        let s = self.s_matrix(&f)?;
        let edge_moments = self.moments_from(&s)?;
        let hessian = with_hessian.then(|| self.hessian_from(&s, &edge_moments));
        Ok(InferenceResult {
            log_z,
            edge_moments,
            hessian,
        })
    }
}

/// How [`infer_model`] obtained its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferenceRoute {
    /// Zero-field model on a planar graph.
    KacWard,
    /// Field model whose auxiliary-vertex extension is planar.
    ExtendedKacWard,
    /// Exhaustive enumeration (non-planar, small).
    Enumeration,
}

/// Exact moments of an arbitrary model, in the model's own edge order.
#[derive(Debug, Clone)]
pub struct ModelInference {
    pub log_z: f64,
    pub edge_moments: Vec<f64>,
    pub node_moments: Vec<f64>,
    pub route: InferenceRoute,
}

/// Exact inference for any model: Kac-Ward when the (possibly extended)
/// graph is planar, enumeration for small non-planar models.
pub fn infer_model(model: &IsingModel) -> Result<ModelInference> {
    let n = model.n();
    if model.is_zero_field() && is_planar(model.graph()) {
        let r = KacWardSystem::from_model(model)?.infer(false)?;
        return Ok(ModelInference {
            log_z: r.log_z,
            edge_moments: r.edge_moments,
            node_moments: vec![0.0; n],
            route: InferenceRoute::KacWard,
        });
    }
    if !model.is_zero_field() {
        let ext = extend_zero_field(model);
        if is_planar(ext.graph()) {
            let r = KacWardSystem::from_model(&ext)?.infer(false)?;
            let m = model.graph().num_edges();
            let mut node_moments = vec![0.0; n];
            // aux edges follow the original edges, one per non-zero field
            let mut k = m;
            for (i, &t) in model.theta_nodes().iter().enumerate() {
                if t != 0.0 {
                    node_moments[i] = r.edge_moments[k];
                    k += 1;
                }
            }
            return Ok(ModelInference {
                log_z: r.log_z - std::f64::consts::LN_2,
                edge_moments: r.edge_moments[..m].to_vec(),
                node_moments,
                route: InferenceRoute::ExtendedKacWard,
            });
        }
    }
    if n <= enumerate::MAX_ENUMERATION_VERTICES {
        let (log_z, mom) = brute_force_inference(model)?;
        return Ok(ModelInference {
            log_z,
            edge_moments: mom.on_edges(model.graph().edges()),
            node_moments: mom.first().to_vec(),
            route: InferenceRoute::Enumeration,
        });
    }
    Err(Error::NonPlanar)
}

struct Factored {
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    log_det: f64,
}
