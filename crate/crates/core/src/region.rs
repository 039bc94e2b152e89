//! Finite vertex sets and their edge boundaries.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::embedding::{EdgeId, PlanarEmbedding, VertexId};

/// A vertex set `S` with its edge boundary `∂S`, the edges with exactly one
/// endpoint in `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    /// Sorted member vertices.
    pub members: Vec<VertexId>,
    /// Sorted boundary edge ids.
    pub boundary: Vec<EdgeId>,
    pub connected: bool,
}

impl Region {
    pub fn new(emb: &PlanarEmbedding, members: impl IntoIterator<Item = VertexId>) -> Self {
        let mut members: Vec<_> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let mask = membership(emb.vertex_count(), &members);
        let boundary = boundary_by_edges(emb, &mask);
        let connected = is_connected_subset(emb, &mask, &members);
        Self {
            members,
            boundary,
            connected,
        }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }
}

pub fn membership(n: usize, members: &[VertexId]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in members {
        mask[v] = true;
    }
    mask
}

/// `∂S` by scanning every edge once.
pub fn boundary_by_edges(emb: &PlanarEmbedding, mask: &[bool]) -> Vec<EdgeId> {
    (0..emb.edge_count())
        .filter(|&e| {
            let (u, v) = emb.endpoints(e);
            mask[u] != mask[v]
        })
        .collect()
}

/// `∂S` by scanning the darts leaving each member.
pub fn boundary_by_vertices(emb: &PlanarEmbedding, mask: &[bool]) -> Vec<EdgeId> {
    let mut out = Vec::new();
    for v in (0..emb.vertex_count()).filter(|&v| mask[v]) {
        for d in emb.darts_of(v) {
            if !mask[emb.head(d)] {
                out.push(emb.edge_of(d));
            }
        }
    }
    out.sort_unstable();
    out
}

/// Number of edges leaving the set, without materializing them.
pub fn boundary_size(emb: &PlanarEmbedding, mask: &[bool], members: &[VertexId]) -> usize {
    members
        .iter()
        .map(|&v| emb.neighbors(v).filter(|&w| !mask[w]).count())
        .sum()
}

pub fn is_connected_subset(emb: &PlanarEmbedding, mask: &[bool], members: &[VertexId]) -> bool {
    let Some(&start) = members.first() else {
        return true;
    };
    let mut seen = vec![false; emb.vertex_count()];
    seen[start] = true;
    let mut reached = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for w in emb.neighbors(u) {
            if mask[w] && !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == members.len()
}

/// The component of `start` after deleting the edges flagged in `removed`.
pub fn component_without(emb: &PlanarEmbedding, start: VertexId, removed: &[bool]) -> Vec<VertexId> {
    let mut seen = vec![false; emb.vertex_count()];
    seen[start] = true;
    let mut out = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for d in emb.darts_of(u) {
            let w = emb.head(d);
            if !removed[emb.edge_of(d)] && !seen[w] {
                seen[w] = true;
                out.push(w);
                queue.push_back(w);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{grid_box, path};
    use proptest::prelude::*;

    #[test]
    fn middle_of_path_has_two_boundary_edges() {
        let p = path(5).unwrap();
        let r = Region::new(&p, [1, 2, 3]);
        assert_eq!(r.boundary_len(), 2);
        assert!(r.connected);
    }

    #[test]
    fn disconnected_region_is_flagged() {
        let p = path(5).unwrap();
        assert!(!Region::new(&p, [0, 2]).connected);
    }

    proptest! {
        #[test]
        fn boundary_scans_agree(bits in proptest::collection::vec(any::<bool>(), 25)) {
            let g = grid_box(5).unwrap();
            let members: Vec<_> = (0..25).filter(|&v| bits[v]).collect();
            let mask = membership(25, &members);
            let a = boundary_by_edges(&g, &mask);
            let b = boundary_by_vertices(&g, &mask);
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(a.len(), boundary_size(&g, &mask, &members));
        }
    }
}
