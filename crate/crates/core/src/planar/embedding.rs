use std::f64::consts::PI;

use super::graph::Graph;
use super::lr;
use crate::error::{Error, Result};

/// Combinatorial embedding (clockwise rotation system) with optional
/// straight-line coordinates.
///
/// Coordinates use the mathematical orientation: x grows to the right and y
/// grows upwards, so "clockwise" means decreasing polar angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarEmbedding {
    rotation: Vec<Vec<usize>>,
    coords: Option<Vec<[f64; 2]>>,
}

impl PlanarEmbedding {
    /// Builds an embedding from explicit coordinates. The rotation system is
    /// derived by sorting neighbors clockwise; the drawing is *not* checked
    /// for crossings here (see [`PlanarEmbedding::has_crossings`]).
    pub fn from_coords(g: &Graph, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != g.n() {
            return Err(Error::BadDims(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                g.n()
            )));
        }
        let rotation = rotation_from_coords(g, &coords);
        Ok(PlanarEmbedding {
            rotation,
            coords: Some(coords),
        })
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn num_edges(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Clockwise neighbor order around `v`.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.rotation[u].contains(&v)
    }

    /// True if the rotation system has exactly the edges of `g`.
    pub fn matches(&self, g: &Graph) -> bool {
        self.n() == g.n()
            && self.num_edges() == g.num_edges()
            && g.edges().iter().all(|e| self.has_edge(e.0, e.1))
    }

    fn cw_successor(&self, w: usize, v: usize) -> usize {
        let rot = &self.rotation[w];
        let k = rot.iter().position(|&x| x == v).expect("dart in rotation");
        rot[(k + 1) % rot.len()]
    }

    /// Face boundaries as cyclic vertex sequences. Each face lies to the left
    /// of its darts, so bounded faces of a drawing run counterclockwise.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut visited: Vec<Vec<bool>> = self.rotation.iter().map(|r| vec![false; r.len()]).collect();
        let mut faces = Vec::new();
        for u in 0..n {
            for k in 0..self.rotation[u].len() {
                if visited[u][k] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (u, self.rotation[u][k]);
                loop {
                    let pos = self.rotation[a].iter().position(|&x| x == b).unwrap();
                    if visited[a][pos] {
                        break;
                    }
                    visited[a][pos] = true;
                    face.push(a);
                    let c = self.cw_successor(b, a);
                    a = b;
                    b = c;
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Number of faces, counting dart orbits plus one face per isolated
    /// vertex; every connected component contributes its own outer face.
    pub fn num_faces(&self) -> usize {
        let isolated = self.rotation.iter().filter(|r| r.is_empty()).count();
        self.faces().len() + isolated
    }

    /// Euler check per component: `V - E + F = 2` for every component.
    pub fn satisfies_euler(&self) -> bool {
        let g = self.to_graph();
        let comps = g.components();
        let mut comp_of = vec![0; self.n()];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                comp_of[v] = c;
            }
        }
        let mut faces = vec![0i64; comps.len()];
        for f in self.faces() {
            faces[comp_of[f[0]]] += 1;
        }
        comps.iter().enumerate().all(|(c, vs)| {
            let v = vs.len() as i64;
            let e: i64 = vs.iter().map(|&x| self.rotation[x].len() as i64).sum::<i64>() / 2;
            let f = if e == 0 { 1 } else { faces[c] };
            v - e + f == 2
        })
    }

    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::empty(self.n());
        for u in 0..self.n() {
            for &v in &self.rotation[u] {
                if u < v {
                    g.add_edge(u, v).expect("rotation system is a simple graph");
                }
            }
        }
        g
    }

    /// Signed clockwise rotation from heading `i -> j` to heading `j -> l`,
    /// in `(-pi, pi]`.
    pub fn turning_angle(&self, i: usize, j: usize, l: usize) -> Result<f64> {
        if !self.has_edge(i, j) {
            return Err(Error::MissingEdge(i, j));
        }
        if !self.has_edge(j, l) {
            return Err(Error::MissingEdge(j, l));
        }
        let c = self
            .coords
            .as_ref()
            .ok_or_else(|| Error::InvalidGraph("embedding has no coordinates".into()))?;
        Ok(turn(c[i], c[j], c[l]))
    }

    /// True if two edges of the drawing properly cross, or if an edge passes
    /// through a vertex, or two vertices coincide.
    pub fn has_crossings(&self) -> bool {
        let Some(c) = &self.coords else {
            return false;
        };
        for a in 0..c.len() {
            for b in a + 1..c.len() {
                if c[a] == c[b] {
                    return true;
                }
            }
        }
        let edges = self.to_graph().edges().to_vec();
        for (k, e) in edges.iter().enumerate() {
            for v in 0..c.len() {
                if !e.contains(v) && on_segment(c[e.0], c[e.1], c[v]) {
                    return true;
                }
            }
            for f in &edges[k + 1..] {
                if e.0 == f.0 || e.0 == f.1 || e.1 == f.0 || e.1 == f.1 {
                    continue;
                }
                if segments_cross(c[e.0], c[e.1], c[f.0], c[f.1]) {
                    return true;
                }
            }
        }
        false
    }
}

pub(crate) fn turn(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1]];
    let v = [c[0] - b[0], c[1] - b[1]];
    // counterclockwise change of heading
    let ccw = (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
    let phi = -ccw;
    if phi <= -PI {
        phi + 2.0 * PI
    } else {
        phi
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    orient(a, b, p) == 0.0
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    // collinear overlap
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn rotation_from_coords(g: &Graph, coords: &[[f64; 2]]) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|v| {
            let mut nb: Vec<(f64, usize)> = g
                .neighbors(v)
                .iter()
                .map(|&w| {
                    let a = (coords[w][1] - coords[v][1]).atan2(coords[w][0] - coords[v][0]);
                    (a, w)
                })
                .collect();
            // clockwise = decreasing angle
            nb.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            nb.into_iter().map(|(_, w)| w).collect()
        })
        .collect()
}

/// Combinatorial planar embedding of `g` (coordinates unset).
pub fn planar_embedding(g: &Graph) -> Result<PlanarEmbedding> {
    let rotation = lr::rotation_system(g).ok_or(Error::NonPlanar)?;
    Ok(PlanarEmbedding {
        rotation,
        coords: None,
    })
}

/// Adds non-edges in canonical order while the graph stays planar. For three
/// or more vertices the result is a maximal planar graph.
fn triangulate(g: &Graph) -> Graph {
    let mut t = g.clone();
    let bound = Graph::planar_edge_bound(g.n());
    for p in g.non_edges() {
        if t.num_edges() >= bound {
            break;
        }
        t.add_edge(p.0, p.1).unwrap();
        if !lr::is_planar(&t) {
            t = remove_last(&t);
        }
    }
    t
}

fn remove_last(g: &Graph) -> Graph {
    let edges = &g.edges()[..g.num_edges() - 1];
    Graph::from_edges(g.n(), edges.iter().copied()).unwrap()
}

/// Canonical ordering of a maximal planar graph (`n >= 3`) given its
/// rotation system. Returns the order with `order[0], order[1]` the base edge.
fn canonical_order(t: &Graph, rot: &[Vec<usize>]) -> Vec<usize> {
    let n = t.n();
    let emb = PlanarEmbedding {
        rotation: rot.to_vec(),
        coords: None,
    };
    let v1 = 0;
    let v2 = rot[0][0];
    let vn = emb.cw_successor(v2, v1);
    if n == 3 {
        return vec![v1, v2, vn];
    }
    let step = |v: usize, from: usize, dir: isize| -> usize {
        let r = &rot[v];
        let k = r.iter().position(|&x| x == from).unwrap() as isize;
        let len = r.len() as isize;
        r[((k + dir).rem_euclid(len)) as usize]
    };
    // the rotational sense that sweeps the interior from the path predecessor
    let dir: isize = if step(vn, v1, 1) == v2 { -1 } else { 1 };

    let mut removed = vec![false; n];
    let mut on_path = vec![false; n];
    let mut path = vec![v1, vn, v2];
    for &v in &path {
        on_path[v] = true;
    }
    let mut reversed = Vec::with_capacity(n);
    while path.len() > 2 {
        let idx = (1..path.len() - 1)
            .find(|&i| {
                let v = path[i];
                !t.neighbors(v).iter().any(|&w| {
                    !removed[w] && on_path[w] && w != path[i - 1] && w != path[i + 1]
                })
            })
            .expect("canonical ordering: a chord-free contour vertex exists");
        let v = path[idx];
        let (prev, next) = (path[idx - 1], path[idx + 1]);
        let mut segment = Vec::new();
        let mut cur = step(v, prev, dir);
        while cur != next {
            debug_assert!(!removed[cur]);
            segment.push(cur);
            cur = step(v, cur, dir);
        }
        removed[v] = true;
        on_path[v] = false;
        for &w in &segment {
            on_path[w] = true;
        }
        path.splice(idx..=idx, segment);
        reversed.push(v);
    }
    let mut order = vec![v1, v2];
    order.extend(reversed.into_iter().rev());
    order
}

/// Shift-method placement on the integer grid for a canonical ordering.
fn shift_drawing(t: &Graph, order: &[usize]) -> Vec<[i64; 2]> {
    let n = t.n();
    let mut pos = vec![[0i64; 2]; n];
    let mut placed = vec![false; n];
    let mut shift_set: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let (v1, v2, v3) = (order[0], order[1], order[2]);
    pos[v1] = [0, 0];
    pos[v2] = [2, 0];
    pos[v3] = [1, 1];
    placed[v1] = true;
    placed[v2] = true;
    placed[v3] = true;
    let mut contour = vec![v1, v3, v2];
    for &vk in &order[3..] {
        let idx: Vec<usize> = contour
            .iter()
            .enumerate()
            .filter(|(_, &c)| t.has_edge(c, vk))
            .map(|(i, _)| i)
            .collect();
        let p = *idx.first().expect("canonical vertex has contour neighbors");
        let q = *idx.last().unwrap();
        for &c in &contour[p + 1..q] {
            for &u in &shift_set[c] {
                pos[u][0] += 1;
            }
        }
        for &c in &contour[q..] {
            for &u in &shift_set[c] {
                pos[u][0] += 2;
            }
        }
        let (wp, wq) = (pos[contour[p]], pos[contour[q]]);
        let x = (wp[0] + wq[0] + wq[1] - wp[1]) / 2;
        let y = (wq[0] - wp[0] + wp[1] + wq[1]) / 2;
        pos[vk] = [x, y];
        placed[vk] = true;
        let mut set = vec![vk];
        for &c in &contour[p + 1..q] {
            set.extend_from_slice(&shift_set[c]);
        }
        shift_set[vk] = set;
        contour.splice(p + 1..q, [vk]);
    }
    debug_assert!(placed.iter().all(|&b| b));
    pos
}

/// Straight-line drawing of one connected graph on the integer grid.
fn draw_connected(g: &Graph) -> Vec<[i64; 2]> {
    match g.n() {
        0 => Vec::new(),
        1 => vec![[0, 0]],
        2 => vec![[0, 0], [2, 0]],
        _ => {
            let t = triangulate(g);
            let rot = lr::rotation_system(&t).expect("triangulation of a planar graph is planar");
            let order = canonical_order(&t, &rot);
            shift_drawing(&t, &order)
        }
    }
}

/// Fills in straight-line coordinates for a planar graph.
///
/// Each connected component is triangulated with dummy edges, drawn with the
/// shift method on an integer grid, and placed in its own horizontal band.
/// The returned rotation system is the one realized by the drawing, which may
/// be the mirror image of `emb`'s.
pub fn straight_line_drawing(g: &Graph, emb: &PlanarEmbedding) -> Result<PlanarEmbedding> {
    if !emb.matches(g) {
        return Err(Error::EmbeddingMismatch);
    }
    let mut coords = vec![[0.0; 2]; g.n()];
    let mut y_offset = 0i64;
    for comp in g.components() {
        let local = g.induced(&comp);
        let pts = draw_connected(&local);
        let height = pts.iter().map(|p| p[1]).max().unwrap_or(0);
        for (k, &v) in comp.iter().enumerate() {
            coords[v] = [pts[k][0] as f64, (pts[k][1] + y_offset) as f64];
        }
        y_offset += height + 2;
    }
    PlanarEmbedding::from_coords(g, coords)
}

/// Embedding plus drawing in one call.
pub fn draw(g: &Graph) -> Result<PlanarEmbedding> {
    let emb = planar_embedding(g)?;
    straight_line_drawing(g, &emb)
}
