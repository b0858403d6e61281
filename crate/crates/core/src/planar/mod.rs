//! Graphs, planarity testing, embeddings and straight-line drawings.

mod embedding;
mod graph;
mod lr;

pub use embedding::{draw, planar_embedding, straight_line_drawing, PlanarEmbedding};
pub use graph::{Graph, Pair};

/// Left-right planarity test.
pub fn is_planar(g: &Graph) -> bool {
    lr::is_planar(g)
}

/// True if `g` plus a vertex adjacent to every vertex is planar.
pub fn is_outerplanar(g: &Graph) -> bool {
    let mut ext = g.with_extra_vertex();
    let apex = g.n();
    for v in 0..g.n() {
        ext.add_edge(v, apex).unwrap();
    }
    lr::is_planar(&ext)
}

/// Non-edges whose individual addition keeps `g` planar, in canonical order.
pub fn candidate_edges(g: &Graph) -> Vec<Pair> {
    if g.num_edges() >= Graph::planar_edge_bound(g.n()) {
        return Vec::new();
    }
    g.non_edges()
        .into_iter()
        .filter(|p| lr::is_planar(&g.with_edge(p.0, p.1).unwrap()))
        .collect()
}

/// Scans `pairs` in canonical order, keeping each one whose addition leaves
/// the augmented graph planar. The kept set is maximal by inclusion.
pub fn greedy_planar_augmentation(g: &Graph, pairs: &[Pair]) -> Vec<Pair> {
    let mut sorted: Vec<Pair> = pairs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut aug = g.clone();
    let mut kept = Vec::new();
    let bound = Graph::planar_edge_bound(g.n());
    for p in sorted {
        if aug.num_edges() >= bound {
            break;
        }
        if aug.has_edge(p.0, p.1) {
            continue;
        }
        let trial = aug.with_edge(p.0, p.1).unwrap();
        if lr::is_planar(&trial) {
            aug = trial;
            kept.push(p);
        }
    }
    kept
}
