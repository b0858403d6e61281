//! Left-right planarity test with embedding extraction.
//!
//! Follows the formulation of Brandes, "The Left-Right Planarity Test" (2009):
//! a DFS orientation with lowpoints and nesting depths, a constraint phase over
//! a stack of conflict pairs, and a final DFS that turns the left/right side
//! assignment into a rotation system.

use std::collections::HashMap;

use super::graph::Graph;

#[derive(Clone, Copy, Default, Debug)]
struct Interval {
    low: Option<usize>,
    high: Option<usize>,
}

impl Interval {
    fn new(low: usize, high: usize) -> Self {
        Interval {
            low: Some(low),
            high: Some(high),
        }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default, Debug)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

/// Cyclic neighbor order under construction. `cw[(v, w)]` is the neighbor
/// following `w` clockwise around `v`.
#[derive(Default)]
struct RotationBuilder {
    cw: HashMap<(usize, usize), usize>,
    ccw: HashMap<(usize, usize), usize>,
    first: HashMap<usize, usize>,
}

impl RotationBuilder {
    fn insert_cw(&mut self, v: usize, w: usize, reference: Option<usize>) {
        match reference {
            None => {
                if self.first.contains_key(&v) {
                    // attach after the current first neighbor
                    let r = self.first[&v];
                    self.insert_cw(v, w, Some(r));
                    return;
                }
                self.cw.insert((v, w), w);
                self.ccw.insert((v, w), w);
                self.first.insert(v, w);
            }
            Some(r) => {
                let next = self.cw[&(v, r)];
                self.cw.insert((v, r), w);
                self.cw.insert((v, w), next);
                self.ccw.insert((v, next), w);
                self.ccw.insert((v, w), r);
            }
        }
    }

    fn insert_ccw(&mut self, v: usize, w: usize, reference: Option<usize>) {
        match reference {
            None => self.insert_cw(v, w, None),
            Some(r) => {
                let prev = self.ccw[&(v, r)];
                self.insert_cw(v, w, Some(prev));
                if self.first.get(&v) == Some(&r) {
                    self.first.insert(v, w);
                }
            }
        }
    }

    fn insert_first(&mut self, v: usize, w: usize) {
        match self.first.get(&v).copied() {
            Some(r) => {
                self.insert_ccw(v, w, Some(r));
                self.first.insert(v, w);
            }
            None => self.insert_cw(v, w, None),
        }
    }

    fn into_rotation(self, n: usize) -> Vec<Vec<usize>> {
        (0..n)
            .map(|v| match self.first.get(&v) {
                None => Vec::new(),
                Some(&start) => {
                    let mut out = vec![start];
                    let mut cur = self.cw[&(v, start)];
                    while cur != start {
                        out.push(cur);
                        cur = self.cw[&(v, cur)];
                    }
                    out
                }
            })
            .collect()
    }
}

struct LrState<'g> {
    g: &'g Graph,
    // undirected edge id -> oriented (tail, head)
    tail: Vec<usize>,
    head: Vec<usize>,
    oriented: Vec<bool>,
    out: Vec<Vec<usize>>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    roots: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    ref_: Vec<Option<usize>>,
    side: Vec<i64>,
    lowpt_edge: Vec<Option<usize>>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
    left_ref: Vec<usize>,
    right_ref: Vec<usize>,
}

impl<'g> LrState<'g> {
    fn new(g: &'g Graph) -> Self {
        let m = g.num_edges();
        let n = g.n();
        LrState {
            g,
            tail: vec![0; m],
            head: vec![0; m],
            oriented: vec![false; m],
            out: vec![Vec::new(); n],
            height: vec![None; n],
            parent_edge: vec![None; n],
            roots: Vec::new(),
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            ref_: vec![None; m],
            side: vec![1; m],
            lowpt_edge: vec![None; m],
            stack_bottom: vec![0; m],
            stack: Vec::new(),
            left_ref: vec![0; n],
            right_ref: vec![0; n],
        }
    }

    fn orient(&mut self, incidence: &[Vec<(usize, usize)>]) {
        for v in 0..self.g.n() {
            if self.height[v].is_none() {
                self.height[v] = Some(0);
                self.roots.push(v);
                self.dfs_orientation(v, incidence);
            }
        }
    }

    fn dfs_orientation(&mut self, v: usize, incidence: &[Vec<(usize, usize)>]) {
        let e = self.parent_edge[v];
        let hv = self.height[v].unwrap();
        for &(w, id) in &incidence[v] {
            if self.oriented[id] {
                continue;
            }
            self.oriented[id] = true;
            self.tail[id] = v;
            self.head[id] = w;
            self.out[v].push(id);
            self.lowpt[id] = hv;
            self.lowpt2[id] = hv;
            match self.height[w] {
                None => {
                    self.parent_edge[w] = Some(id);
                    self.height[w] = Some(hv + 1);
                    self.dfs_orientation(w, incidence);
                }
                Some(hw) => {
                    self.lowpt[id] = hw;
                }
            }
            self.nesting_depth[id] = 2 * self.lowpt[id] as i64;
            if self.lowpt2[id] < hv {
                // chordal
                self.nesting_depth[id] += 1;
            }
            if let Some(e) = e {
                if self.lowpt[id] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[id]);
                    self.lowpt[e] = self.lowpt[id];
                } else if self.lowpt[id] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[id]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[id]);
                }
            }
        }
    }

    fn sort_by_nesting(&mut self) {
        for v in 0..self.g.n() {
            let nd = &self.nesting_depth;
            self.out[v].sort_by_key(|&id| nd[id]);
        }
    }

    fn conflicting(&self, iv: &Interval, b: usize) -> bool {
        !iv.is_empty() && self.lowpt[iv.high.unwrap()] > self.lowpt[b]
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        if p.left.is_empty() {
            return self.lowpt[p.right.low.unwrap()];
        }
        if p.right.is_empty() {
            return self.lowpt[p.left.low.unwrap()];
        }
        self.lowpt[p.left.low.unwrap()].min(self.lowpt[p.right.low.unwrap()])
    }

    fn dfs_testing(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        let hv = self.height[v].unwrap();
        let out = self.out[v].clone();
        for (k, &ei) in out.iter().enumerate() {
            let w = self.head[ei];
            self.stack_bottom[ei] = self.stack.len();
            if self.parent_edge[w] == Some(ei) {
                if !self.dfs_testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval::new(ei, ei),
                });
            }
            if self.lowpt[ei] < hv {
                let e = e.expect("edge with return edge below its tail has a parent");
                if k == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = e {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: usize, e: usize) -> bool {
        let mut p = ConflictPair::default();
        // merge return edges of ei into p.right
        loop {
            let mut q = self.stack.pop().expect("conflict stack underflow");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.unwrap();
            if self.lowpt[qlow] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else {
                    self.ref_[p.right.low.unwrap()] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.ref_[qlow] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(prl) = p.right.low {
                self.ref_[prl] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(pll) = p.left.low {
                self.ref_[pll] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: usize) {
        let u = self.tail[e];
        let hu = self.height[u].unwrap();
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != hu {
                break;
            }
            let p = self.stack.pop().unwrap();
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            // trim left interval
            while let Some(h) = p.left.high {
                if self.head[h] != u {
                    break;
                }
                p.left.high = self.ref_[h];
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.ref_[l] = p.right.low;
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            // trim right interval
            while let Some(h) = p.right.high {
                if self.head[h] != u {
                    break;
                }
                p.right.high = self.ref_[h];
            }
            if p.right.high.is_none() {
                if let Some(r) = p.right.low {
                    self.ref_[r] = p.left.low;
                    self.side[r] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        // side of e is the side of a highest return edge
        if self.lowpt[e] < hu {
            let top = self.stack.last().expect("return edge implies a conflict pair");
            let hl = top.left.high;
            let hr = top.right.high;
            self.ref_[e] = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                _ => hr,
            };
        }
    }

    fn sign(&mut self, e: usize) -> i64 {
        // iterative resolution of the ref chain
        let mut chain = Vec::new();
        let mut cur = e;
        while let Some(r) = self.ref_[cur] {
            chain.push(cur);
            cur = r;
        }
        let mut s = self.side[cur];
        while let Some(c) = chain.pop() {
            self.side[c] *= s;
            self.ref_[c] = None;
            s = self.side[c];
        }
        self.side[e]
    }

    fn dfs_embedding(&mut self, v: usize, rot: &mut RotationBuilder) {
        let out = self.out[v].clone();
        for ei in out {
            let w = self.head[ei];
            if self.parent_edge[w] == Some(ei) {
                rot.insert_first(w, v);
                self.left_ref[v] = w;
                self.right_ref[v] = w;
                self.dfs_embedding(w, rot);
            } else if self.side[ei] == 1 {
                rot.insert_cw(w, v, Some(self.right_ref[w]));
            } else {
                rot.insert_ccw(w, v, Some(self.left_ref[w]));
                self.left_ref[w] = v;
            }
        }
    }
}

fn incidence(g: &Graph) -> Vec<Vec<(usize, usize)>> {
    let mut inc = vec![Vec::new(); g.n()];
    for (id, e) in g.edges().iter().enumerate() {
        inc[e.0].push((e.1, id));
        inc[e.1].push((e.0, id));
    }
    inc
}

fn run_test(g: &Graph) -> Option<LrState<'_>> {
    if g.num_edges() > Graph::planar_edge_bound(g.n()) {
        return None;
    }
    let inc = incidence(g);
    let mut st = LrState::new(g);
    st.orient(&inc);
    st.sort_by_nesting();
    let roots = st.roots.clone();
    for r in roots {
        if !st.dfs_testing(r) {
            return None;
        }
    }
    Some(st)
}

pub(crate) fn is_planar(g: &Graph) -> bool {
    run_test(g).is_some()
}

/// Clockwise rotation system of a planar embedding, or `None` if `g` is not
/// planar.
pub(crate) fn rotation_system(g: &Graph) -> Option<Vec<Vec<usize>>> {
    let mut st = run_test(g)?;
    for id in 0..g.num_edges() {
        let s = st.sign(id);
        st.nesting_depth[id] *= s;
    }
    st.sort_by_nesting();
    let mut rot = RotationBuilder::default();
    for v in 0..g.n() {
        let mut prev = None;
        for &id in &st.out[v] {
            let w = st.head[id];
            rot.insert_cw(v, w, prev);
            prev = Some(w);
        }
    }
    let roots = st.roots.clone();
    for r in roots {
        st.dfs_embedding(r, &mut rot);
    }
    Some(rot.into_rotation(g.n()))
}
