//! Direct enumeration: connected regions around `v` with connected outside.
//!
//! Regions are grown in Redelmeier order, so each connected set containing
//! `v` is reached once. A branch is cut as soon as the regions below it
//! cannot be enclosed by `n_max` edges, using the minimum edge cut between
//! the current region and everything it is forbidden to absorb.

use std::collections::{BTreeSet, VecDeque};

use super::{prepare, CutRecord, CutsetCensus, CutsetWindow, Method, DEFAULT_SEARCH_GUARD};
use crate::embedding::{PlanarEmbedding, Truncation, VertexId};
use crate::error::{Error, Result};
use crate::region::Region;

pub fn enumerate_cutsets_direct(trunc: &Truncation, v: VertexId, n_max: usize) -> Result<CutsetCensus> {
    enumerate_cutsets_direct_with(trunc, v, n_max, CutsetWindow::Truncation, DEFAULT_SEARCH_GUARD)
}

pub fn enumerate_cutsets_direct_with(
    trunc: &Truncation,
    v: VertexId,
    n_max: usize,
    window: CutsetWindow<'_>,
    guard: u64,
) -> Result<CutsetCensus> {
    prepare(trunc, v, n_max, window)?;
    let emb = &trunc.emb;
    let n = emb.vertex_count();
    let mut search = Search {
        emb,
        boundary: trunc.boundary_mask(),
        n_max,
        in_s: vec![false; n],
        seen: trunc.boundary_mask().to_vec(),
        sink: trunc.boundary_mask().to_vec(),
        members: Vec::new(),
        found: BTreeSet::new(),
        nodes: 0,
        guard,
        flow: Flow::new(emb),
    };
    search.seen[v] = true;
    search.in_s[v] = true;
    search.members.push(v);
    let mut untried = Vec::new();
    for w in emb.neighbors(v) {
        if !search.seen[w] {
            search.seen[w] = true;
            untried.push(w);
        }
    }
    if search.visit()? {
        search.grow(untried)?;
    }
    Ok(CutsetCensus::assemble(trunc, v, n_max, Method::Direct, search.found))
}

struct Search<'a> {
    emb: &'a PlanarEmbedding,
    boundary: &'a [bool],
    n_max: usize,
    in_s: Vec<bool>,
    /// Vertices that are in `S`, excluded, queued, or on the boundary.
    seen: Vec<bool>,
    /// Vertices the region may never absorb: excluded ones and the boundary.
    sink: Vec<bool>,
    members: Vec<VertexId>,
    found: BTreeSet<CutRecord>,
    nodes: u64,
    guard: u64,
    flow: Flow,
}

impl Search<'_> {
    fn grow(&mut self, mut untried: Vec<VertexId>) -> Result<()> {
        let mut excluded = Vec::new();
        while let Some(u) = untried.pop() {
            self.in_s[u] = true;
            self.members.push(u);
            let mut next = untried.clone();
            let mut discovered = Vec::new();
            for w in self.emb.neighbors(u) {
                if !self.seen[w] {
                    self.seen[w] = true;
                    next.push(w);
                    discovered.push(w);
                }
            }
            if self.visit()? {
                self.grow(next)?;
            }
            for w in discovered {
                self.seen[w] = false;
            }
            self.in_s[u] = false;
            self.members.pop();
            self.sink[u] = true;
            excluded.push(u);
        }
        for u in excluded {
            self.sink[u] = false;
        }
        Ok(())
    }

    /// Records the current region if it qualifies; returns whether to extend it.
    fn visit(&mut self) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.guard {
            return Err(Error::GuardExceeded {
                explored: self.nodes,
                limit: self.guard,
                context: format!("connected regions with boundary at most {}", self.n_max),
            });
        }
        let emb = self.emb;
        let mut fixed = 0;
        for &u in &self.members {
            fixed += emb.neighbors(u).filter(|&w| self.sink[w]).count();
        }
        if fixed > self.n_max {
            return Ok(false);
        }
        if self.flow.min_cut(emb, &self.in_s, &self.sink, &self.members, self.n_max) > self.n_max {
            return Ok(false);
        }
        let boundary: usize = self
            .members
            .iter()
            .map(|&u| emb.neighbors(u).filter(|&w| !self.in_s[w]).count())
            .sum();
        if boundary <= self.n_max && self.outside_reaches_boundary() {
            let region = Region::new(emb, self.members.iter().copied());
            self.found.insert(CutRecord {
                edges: region.boundary,
                region_size: region.members.len(),
            });
        }
        Ok(true)
    }

    fn outside_reaches_boundary(&self) -> bool {
        let n = self.emb.vertex_count();
        let mut reached = vec![false; n];
        let mut queue: VecDeque<VertexId> = (0..n).filter(|&u| self.boundary[u]).collect();
        for &u in &queue {
            reached[u] = true;
        }
        let mut count = queue.len();
        while let Some(u) = queue.pop_front() {
            for w in self.emb.neighbors(u) {
                if !reached[w] && !self.in_s[w] {
                    reached[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count + self.members.len() == n
    }
}

/// Unit-capacity maximum flow on the undirected graph, by augmenting paths.
struct Flow {
    /// Flow along each edge from its lower endpoint to its higher one.
    along: Vec<i8>,
    parent: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl Flow {
    fn new(emb: &PlanarEmbedding) -> Self {
        Self {
            along: vec![0; emb.edge_count()],
            parent: vec![NONE; emb.vertex_count()],
        }
    }

    /// Maximum number of edge-disjoint paths from `source` to `sink`,
    /// stopping once it exceeds `limit`.
    fn min_cut(&mut self, emb: &PlanarEmbedding, source: &[bool], sink: &[bool], sources: &[VertexId], limit: usize) -> usize {
        self.along.iter_mut().for_each(|f| *f = 0);
        let mut total = 0;
        while total <= limit {
            match self.augment(emb, source, sink, sources) {
                true => total += 1,
                false => break,
            }
        }
        total
    }

    fn augment(&mut self, emb: &PlanarEmbedding, source: &[bool], sink: &[bool], sources: &[VertexId]) -> bool {
        self.parent.iter_mut().for_each(|p| *p = NONE);
        let mut queue = VecDeque::new();
        // parent holds the dart used to enter a vertex; sources point to themselves
        for &s in sources {
            self.parent[s] = s;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for d in emb.darts_of(u) {
                let w = emb.head(d);
                if self.parent[w] != NONE || source[w] {
                    continue;
                }
                if self.residual(emb, d) == 0 {
                    continue;
                }
                self.parent[w] = d;
                if sink[w] {
                    self.push_back_from(emb, w, source);
                    return true;
                }
                queue.push_back(w);
            }
        }
        false
    }

    fn residual(&self, emb: &PlanarEmbedding, d: usize) -> i8 {
        let e = emb.edge_of(d);
        let forward = emb.origin(d) < emb.head(d);
        let f = if forward { self.along[e] } else { -self.along[e] };
        1 - f
    }

    fn push_back_from(&mut self, emb: &PlanarEmbedding, mut w: VertexId, source: &[bool]) {
        while !source[w] {
            let d = self.parent[w];
            let e = emb.edge_of(d);
            if emb.origin(d) < emb.head(d) {
                self.along[e] += 1;
            } else {
                self.along[e] -= 1;
            }
            w = emb.origin(d);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::grid_box;

    #[test]
    fn flow_counts_edge_disjoint_paths() {
        let g = grid_box(3).unwrap();
        let mut f = Flow::new(&g);
        let mut source = vec![false; 9];
        source[4] = true;
        let mut sink = vec![false; 9];
        for u in [0, 1, 2, 3, 5, 6, 7, 8] {
            sink[u] = true;
        }
        assert_eq!(f.min_cut(&g, &source, &sink, &[4], 10), 4);
        assert_eq!(f.min_cut(&g, &source, &sink, &[4], 2), 3);
        // corner to opposite corner: degree 2 limits the flow
        let mut source = vec![false; 9];
        source[0] = true;
        let mut sink = vec![false; 9];
        sink[8] = true;
        assert_eq!(f.min_cut(&g, &source, &sink, &[0], 10), 2);
    }
}
