//! Ising models, moment data, and the conversions between parameterizations.

use crate::error::{Error, Result};
use crate::planar::{Graph, Pair};

/// Ising model `P(x) ∝ exp(Σ θ_i x_i + Σ θ_ij x_i x_j)` over spins in {-1, +1}.
///
/// `theta_edges[k]` belongs to `graph.edges()[k]`. A model produced by
/// [`extend_zero_field`] records its auxiliary vertex in `aux_vertex`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    graph: Graph,
    theta_edges: Vec<f64>,
    theta_nodes: Vec<f64>,
    aux_vertex: Option<usize>,
}

impl IsingModel {
    pub fn zero_field(graph: Graph, theta_edges: Vec<f64>) -> Result<Self> {
        let n = graph.n();
        Self::with_fields(graph, theta_edges, vec![0.0; n])
    }

    pub fn with_fields(graph: Graph, theta_edges: Vec<f64>, theta_nodes: Vec<f64>) -> Result<Self> {
        if theta_edges.len() != graph.num_edges() {
            return Err(Error::BadDims(format!(
                "{} edge parameters for {} edges",
                theta_edges.len(),
                graph.num_edges()
            )));
        }
        if theta_nodes.len() != graph.n() {
            return Err(Error::BadDims(format!(
                "{} node parameters for {} vertices",
                theta_nodes.len(),
                graph.n()
            )));
        }
        if theta_edges.iter().chain(&theta_nodes).any(|t| !t.is_finite()) {
            return Err(Error::InvalidGraph("non-finite parameter".into()));
        }
        Ok(IsingModel {
            graph,
            theta_edges,
            theta_nodes,
            aux_vertex: None,
        })
    }

    /// Independent uniform spins on `n` vertices.
    pub fn independent(n: usize) -> Self {
        IsingModel::zero_field(Graph::empty(n), Vec::new()).unwrap()
    }

    pub fn with_aux_vertex(mut self, aux: Option<usize>) -> Result<Self> {
        if let Some(a) = aux {
            if a >= self.n() {
                return Err(Error::BadDims(format!("aux vertex {a} out of range")));
            }
        }
        self.aux_vertex = aux;
        Ok(self)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn theta_edges(&self) -> &[f64] {
        &self.theta_edges
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta_nodes
    }

    pub fn aux_vertex(&self) -> Option<usize> {
        self.aux_vertex
    }

    pub fn is_zero_field(&self) -> bool {
        self.theta_nodes.iter().all(|&t| t == 0.0)
    }

    pub fn theta(&self, u: usize, v: usize) -> Option<f64> {
        self.graph.edge_index(u, v).map(|k| self.theta_edges[k])
    }

    /// Exponent `Σ θ_i x_i + Σ θ_ij x_i x_j` for a spin configuration.
    pub fn energy(&self, x: &[i8]) -> f64 {
        let mut e: f64 = self
            .theta_nodes
            .iter()
            .zip(x)
            .map(|(t, &s)| t * f64::from(s))
            .sum();
        for (p, t) in self.graph.edges().iter().zip(&self.theta_edges) {
            e += t * f64::from(x[p.0] * x[p.1]);
        }
        e
    }

    /// Same model with one more edge `{u, v}` carrying `theta`.
    pub fn with_edge(&self, u: usize, v: usize, theta: f64) -> Result<Self> {
        let mut m = self.clone();
        m.graph.add_edge(u, v)?;
        m.theta_edges.push(theta);
        Ok(m)
    }

    pub fn set_theta_edges(&mut self, theta: Vec<f64>) -> Result<()> {
        if theta.len() != self.graph.num_edges() {
            return Err(Error::BadDims("edge parameter count".into()));
        }
        self.theta_edges = theta;
        Ok(())
    }
}

/// First moments `μ_i` and symmetric pairwise moments `μ_ij` over all pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    n: usize,
    first: Vec<f64>,
    second: Vec<f64>,
    sample_count: Option<usize>,
}

impl MomentSet {
    /// All moments zero (independent fair spins).
    pub fn zeros(n: usize) -> Self {
        let mut second = vec![0.0; n * n];
        for i in 0..n {
            second[i * n + i] = 1.0;
        }
        MomentSet {
            n,
            first: vec![0.0; n],
            second,
            sample_count: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn first(&self) -> &[f64] {
        &self.first
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.first[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.second[i * self.n + j]
    }

    pub fn pair(&self, p: Pair) -> f64 {
        self.get(p.0, p.1)
    }

    pub fn set(&mut self, i: usize, j: usize, mu: f64) {
        self.second[i * self.n + j] = mu;
        self.second[j * self.n + i] = mu;
    }

    pub fn set_mean(&mut self, i: usize, mu: f64) {
        self.first[i] = mu;
    }

    pub fn sample_count(&self) -> Option<usize> {
        self.sample_count
    }

    pub fn with_sample_count(mut self, s: Option<usize>) -> Self {
        self.sample_count = s;
        self
    }

    /// Moments restricted to an edge list, in edge order.
    pub fn on_edges(&self, edges: &[Pair]) -> Vec<f64> {
        edges.iter().map(|&p| self.pair(p)).collect()
    }

    pub fn is_zero_mean(&self, tol: f64) -> bool {
        self.first.iter().all(|m| m.abs() <= tol)
    }

    /// Checks `|μ| ≤ 1` everywhere.
    pub fn validate(&self) -> Result<()> {
        for (k, &m) in self.first.iter().enumerate() {
            if !(m.abs() <= 1.0) {
                return Err(Error::InvalidTargets(format!("|mu_{k}| = {m} exceeds 1")));
            }
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                let m = self.get(i, j);
                if !(m.abs() <= 1.0) {
                    return Err(Error::InvalidTargets(format!("|mu_{i}{j}| = {m} exceeds 1")));
                }
            }
        }
        Ok(())
    }

    /// Pairwise moments clamped to `|μ_ij| ≤ 1 - margin`.
    pub fn clamped(&self, margin: f64) -> MomentSet {
        let mut out = self.clone();
        let lim = 1.0 - margin;
        for i in 0..self.n {
            for j in i + 1..self.n {
                out.set(i, j, self.get(i, j).clamp(-lim, lim));
            }
            out.first[i] = self.first[i].clamp(-lim, lim);
        }
        out
    }
}

/// Moment clamping margin applied to targets before fitting.
pub const MOMENT_CLAMP: f64 = 1e-6;

/// Pairwise Gibbs model with log-potentials. Index 0 of every table stands
/// for spin +1 and index 1 for spin -1; edge tables are `f[x_u][x_v]` for the
/// edge `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseModel {
    pub graph: Graph,
    pub node: Vec<[f64; 2]>,
    pub edge: Vec<[[f64; 2]; 2]>,
}

const SPIN: [f64; 2] = [1.0, -1.0];

pub fn pairwise_to_ising(pm: &PairwiseModel) -> Result<IsingModel> {
    if pm.node.len() != pm.graph.n() || pm.edge.len() != pm.graph.num_edges() {
        return Err(Error::BadDims("pairwise tables do not match the graph".into()));
    }
    let mut nodes: Vec<f64> = pm
        .node
        .iter()
        .map(|f| 0.5 * (SPIN[0] * f[0] + SPIN[1] * f[1]))
        .collect();
    let mut edges = Vec::with_capacity(pm.edge.len());
    for (p, f) in pm.graph.edges().iter().zip(&pm.edge) {
        let mut tij = 0.0;
        let (mut ti, mut tj) = (0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                tij += SPIN[a] * SPIN[b] * f[a][b];
                ti += SPIN[a] * f[a][b];
                tj += SPIN[b] * f[a][b];
            }
        }
        nodes[p.0] += 0.25 * ti;
        nodes[p.1] += 0.25 * tj;
        edges.push(0.25 * tij);
    }
    IsingModel::with_fields(pm.graph.clone(), edges, nodes)
}

/// Pair marginal table `P(x_i, x_j) = ¼(1 + μ_i x_i + μ_j x_j + μ_ij x_i x_j)`
/// in state order `(++, +-, -+, --)`.
pub fn moments_to_marginals(mu_i: f64, mu_j: f64, mu_ij: f64) -> Result<[f64; 4]> {
    const TOL: f64 = 1e-12;
    let mut t = [0.0; 4];
    for (k, (a, b)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        let p = 0.25 * (1.0 + mu_i * a + mu_j * b + mu_ij * a * b);
        if p < -TOL || !p.is_finite() {
            return Err(Error::NotRealizable(mu_i, mu_j, mu_ij));
        }
        t[k] = p.max(0.0);
    }
    Ok(t)
}

/// `D(target ‖ model)` between the pair tables of two moment triples, in nats.
pub fn pair_divergence(target: (f64, f64, f64), model: (f64, f64, f64)) -> Result<f64> {
    let p = moments_to_marginals(target.0, target.1, target.2)?;
    let q = moments_to_marginals(model.0, model.1, model.2)?;
    let mut d = 0.0;
    for k in 0..4 {
        if p[k] == 0.0 {
            continue;
        }
        if q[k] == 0.0 {
            return Err(Error::InfiniteDivergence);
        }
        d += p[k] * (p[k] / q[k]).ln();
    }
    Ok(d.max(0.0))
}

/// Sample moments of a `S × n` matrix of ±1 spins.
pub fn empirical_moments(samples: &[Vec<i8>]) -> Result<MomentSet> {
    let s = samples.len();
    if s == 0 {
        return Err(Error::BadDims("no samples".into()));
    }
    let n = samples[0].len();
    let mut first = vec![0i64; n];
    let mut second = vec![0i64; n * n];
    for (r, row) in samples.iter().enumerate() {
        if row.len() != n {
            return Err(Error::BadDims(format!("sample {r} has {} values, expected {n}", row.len())));
        }
        for (c, &x) in row.iter().enumerate() {
            if x != 1 && x != -1 {
                return Err(Error::BadValue {
                    row: r,
                    col: c,
                    value: f64::from(x),
                });
            }
            first[c] += i64::from(x);
        }
        for i in 0..n {
            for j in i + 1..n {
                second[i * n + j] += i64::from(row[i] * row[j]);
            }
        }
    }
    let sf = s as f64;
    let mut m = MomentSet::zeros(n);
    for i in 0..n {
        m.first[i] = first[i] as f64 / sf;
        for j in i + 1..n {
            m.set(i, j, second[i * n + j] as f64 / sf);
        }
    }
    m.sample_count = Some(s);
    Ok(m)
}

/// Zero-field model on `n + 1` vertices equivalent to `m`: every non-zero
/// field `θ_i` becomes an edge `{i, n}` to the auxiliary vertex `n`.
pub fn extend_zero_field(m: &IsingModel) -> IsingModel {
    let n = m.n();
    let mut g = m.graph.with_extra_vertex();
    let mut theta = m.theta_edges.clone();
    for (i, &t) in m.theta_nodes.iter().enumerate() {
        if t != 0.0 {
            g.add_edge(i, n).unwrap();
            theta.push(t);
        }
    }
    IsingModel {
        graph: g,
        theta_edges: theta,
        theta_nodes: vec![0.0; n + 1],
        aux_vertex: Some(n),
    }
}

/// Zero-mean moments on `n + 1` vertices with `μ̂_{i,n} = μ_i`.
pub fn extend_moments(m: &MomentSet) -> MomentSet {
    let n = m.n;
    let mut out = MomentSet::zeros(n + 1);
    for i in 0..n {
        for j in i + 1..n {
            out.set(i, j, m.get(i, j));
        }
        out.set(i, n, m.first[i]);
    }
    out.sample_count = m.sample_count;
    out
}

fn drop_index(v: usize, aux: usize) -> usize {
    if v > aux {
        v - 1
    } else {
        v
    }
}

/// Inverse of [`extend_zero_field`]: edges to `aux` become node fields and
/// the remaining vertices are relabeled without the auxiliary one.
pub fn restrict_extended(m: &IsingModel, aux: usize) -> Result<IsingModel> {
    if aux >= m.n() {
        return Err(Error::BadDims(format!("aux vertex {aux} out of range")));
    }
    if !m.is_zero_field() {
        return Err(Error::NonZeroField);
    }
    let n = m.n() - 1;
    let mut g = Graph::empty(n);
    let mut edges = Vec::new();
    let mut nodes = vec![0.0; n];
    for (p, &t) in m.graph.edges().iter().zip(&m.theta_edges) {
        if p.contains(aux) {
            nodes[drop_index(p.other(aux), aux)] = t;
        } else {
            g.add_edge(drop_index(p.0, aux), drop_index(p.1, aux))?;
            edges.push(t);
        }
    }
    IsingModel::with_fields(g, edges, nodes)
}

/// Inverse of [`extend_moments`].
pub fn restrict_moments(m: &MomentSet, aux: usize) -> Result<MomentSet> {
    if aux >= m.n {
        return Err(Error::BadDims(format!("aux vertex {aux} out of range")));
    }
    let keep: Vec<usize> = (0..m.n).filter(|&v| v != aux).collect();
    let mut out = MomentSet::zeros(keep.len());
    for (a, &i) in keep.iter().enumerate() {
        out.first[a] = m.get(i, aux);
        for (b, &j) in keep.iter().enumerate().skip(a + 1) {
            out.set(a, b, m.get(i, j));
        }
    }
    out.sample_count = m.sample_count;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn marginal_tables() {
        assert_eq!(moments_to_marginals(0.0, 0.0, 0.0).unwrap(), [0.25; 4]);
        assert_eq!(moments_to_marginals(0.0, 0.0, 1.0).unwrap(), [0.5, 0.0, 0.0, 0.5]);
        let t = moments_to_marginals(0.2, -0.1, 0.05).unwrap();
        let expect = [0.2875, 0.3125, 0.1625, 0.2375];
        for k in 0..4 {
            assert!(close(t[k], expect[k], 1e-15));
        }
        // a distribution with exactly these moments reproduces them
        let mi = t[0] + t[1] - t[2] - t[3];
        let mj = t[0] - t[1] + t[2] - t[3];
        let mij = t[0] - t[1] - t[2] + t[3];
        assert!(close(mi, 0.2, 1e-15) && close(mj, -0.1, 1e-15) && close(mij, 0.05, 1e-15));
        assert!(matches!(
            moments_to_marginals(0.9, 0.9, -0.9),
            Err(Error::NotRealizable(..))
        ));
    }

    #[test]
    fn divergence_values() {
        assert_eq!(pair_divergence((0.1, 0.2, 0.3), (0.1, 0.2, 0.3)).unwrap(), 0.0);
        let d = pair_divergence((0.0, 0.0, 0.5), (0.0, 0.0, 0.0)).unwrap();
        let oracle = 2.0 * 0.375 * (0.375f64 / 0.25).ln() + 2.0 * 0.125 * (0.125f64 / 0.25).ln();
        assert!(close(d, oracle, 1e-15));
        assert!(close(d, 0.130812, 1e-6));
        assert_eq!(pair_divergence((0.0, 0.0, 1.0), (0.0, 0.0, 1.0)).unwrap(), 0.0);
        assert!(matches!(
            pair_divergence((0.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
            Err(Error::InfiniteDivergence)
        ));
    }

    #[test]
    fn empirical_examples() {
        let m = empirical_moments(&[vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        assert_eq!(m.mean(0), 1.0);
        assert_eq!(m.get(0, 2), 1.0);
        let m = empirical_moments(&[vec![1, -1], vec![-1, 1]]).unwrap();
        assert_eq!(m.first(), &[0.0, 0.0]);
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.sample_count(), Some(2));
        assert!(matches!(
            empirical_moments(&[vec![1, 0]]),
            Err(Error::BadValue { row: 0, col: 1, .. })
        ));
    }

    #[test]
    fn pairwise_identity_embedding() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let pm = PairwiseModel {
            graph: g,
            node: vec![[0.0; 2]; 2],
            edge: vec![[[1.0, -1.0], [-1.0, 1.0]]],
        };
        let m = pairwise_to_ising(&pm).unwrap();
        assert_eq!(m.theta_edges(), &[1.0]);
        assert_eq!(m.theta_nodes(), &[0.0, 0.0]);
        let pm = PairwiseModel {
            graph: Graph::empty(1),
            node: vec![[1.0, -1.0]],
            edge: vec![],
        };
        assert_eq!(pairwise_to_ising(&pm).unwrap().theta_nodes(), &[1.0]);
    }

    #[test]
    fn extension_examples() {
        let m = IsingModel::with_fields(Graph::empty(1), vec![], vec![0.7]).unwrap();
        let e = extend_zero_field(&m);
        assert_eq!(e.n(), 2);
        assert_eq!(e.theta(0, 1), Some(0.7));
        assert_eq!(e.aux_vertex(), Some(1));
        assert!(e.is_zero_field());

        let z = IsingModel::zero_field(Graph::cycle(3), vec![0.1, 0.2, 0.3]).unwrap();
        let e = extend_zero_field(&z);
        assert_eq!(e.graph().degree(3), 0);
        let r = restrict_extended(&e, 3).unwrap();
        assert_eq!(r, z);
    }

    #[test]
    fn restriction_with_interior_aux() {
        // aux at vertex 1 of 3
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let m = IsingModel::zero_field(g, vec![0.3, -0.4, 0.5]).unwrap();
        let r = restrict_extended(&m, 1).unwrap();
        assert_eq!(r.theta_nodes(), &[0.3, -0.4]);
        assert_eq!(r.theta(0, 1), Some(0.5));
    }
}
