use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unordered vertex pair stored as `(min, max)`.
///
/// The derived `Ord` is the canonical lexicographic pair order used for every
/// scan and tie-break in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pair(pub usize, pub usize);

impl Pair {
    pub fn new(u: usize, v: usize) -> Self {
        if u <= v {
            Pair(u, v)
        } else {
            Pair(v, u)
        }
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint opposite `v`.
    pub fn other(self, v: usize) -> usize {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

impl From<(usize, usize)> for Pair {
    fn from((u, v): (usize, usize)) -> Self {
        Pair::new(u, v)
    }
}

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are kept in insertion order; that order fixes the parameter layout
/// of every model built on the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Pair>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges<I, P>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: Into<Pair>,
    {
        let mut g = Graph::empty(n);
        for e in edges {
            let e = e.into();
            g.add_edge(e.0, e.1)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.push_unchecked(Pair(u, v));
            }
        }
        g
    }

    /// `r × c` lattice with vertex `row * c + col`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut g = Graph::empty(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.push_unchecked(Pair(v, v + 1));
                }
                if r + 1 < rows {
                    g.push_unchecked(Pair(v, v + cols));
                }
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        if n >= 3 {
            for v in 0..n {
                g.push_unchecked(Pair::new(v, (v + 1) % n));
            }
        } else if n == 2 {
            g.push_unchecked(Pair(0, 1));
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Pair] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].contains(&b)
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let p = Pair::new(u, v);
        self.edges.iter().position(|&e| e == p)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge {{{u}, {v}}} out of range for n = {}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at {u}")));
        }
        if self.has_edge(u, v) {
            return Err(Error::InvalidGraph(format!("parallel edge {{{u}, {v}}}")));
        }
        self.push_unchecked(Pair::new(u, v));
        Ok(())
    }

    fn push_unchecked(&mut self, e: Pair) {
        self.edges.push(e);
        self.adj[e.0].push(e.1);
        self.adj[e.1].push(e.0);
    }

    /// `self + uv` as a new graph.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph> {
        let mut g = self.clone();
        g.add_edge(u, v)?;
        Ok(g)
    }

    /// Copy of the graph with one extra isolated vertex appended.
    pub fn with_extra_vertex(&self) -> Graph {
        let mut g = self.clone();
        g.n += 1;
        g.adj.push(Vec::new());
        g
    }

    pub fn edge_set(&self) -> BTreeSet<Pair> {
        self.edges.iter().copied().collect()
    }

    /// All pairs `{u, v}` not in the graph, in canonical order.
    pub fn non_edges(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    out.push(Pair(u, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted ascending; components ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Induced subgraph on `vertices`, relabeled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut g = Graph::empty(vertices.len());
        for e in &self.edges {
            let (a, b) = (local[e.0], local[e.1]);
            if a != usize::MAX && b != usize::MAX {
                g.push_unchecked(Pair::new(a, b));
            }
        }
        g
    }

    /// Maximum edge count of a planar graph on `n` vertices.
    pub fn planar_edge_bound(n: usize) -> usize {
        if n >= 3 {
            3 * n - 6
        } else {
            n * n.saturating_sub(1) / 2
        }
    }
}
