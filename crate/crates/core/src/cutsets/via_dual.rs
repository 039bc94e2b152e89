//! Enumeration through the dual: a cut-set containing `e` is `e*` closed up
//! by a simple dual path of length `n - 1`.
//!
//! Every finite side around `v` is crossed by a fixed shortest path from `v`
//! to the boundary. Each cycle is generated once, from the first edge of that
//! path it contains, by closing the edge with simple dual paths that avoid
//! all earlier path edges and the faces at infinity.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;

use super::{prepare, CutRecord, CutsetCensus, CutsetWindow, Method, DEFAULT_SEARCH_GUARD};
use crate::dual::DualGraph;
use crate::embedding::{EdgeId, FaceId, Truncation, VertexId, UNREACHABLE};
use crate::error::{Error, Result};
use crate::region::{component_without, Region};

pub fn enumerate_cutsets_via_dual(
    trunc: &Truncation,
    dual: &DualGraph,
    v: VertexId,
    n_max: usize,
) -> Result<CutsetCensus> {
    enumerate_cutsets_via_dual_with(trunc, dual, v, n_max, CutsetWindow::Truncation, DEFAULT_SEARCH_GUARD)
}

pub fn enumerate_cutsets_via_dual_with(
    trunc: &Truncation,
    dual: &DualGraph,
    v: VertexId,
    n_max: usize,
    window: CutsetWindow<'_>,
    guard: u64,
) -> Result<CutsetCensus> {
    prepare(trunc, v, n_max, window)?;
    if dual.edge_count() != trunc.emb.edge_count() || dual.vertex_count() != trunc.faces.count() {
        return Err(Error::Inconsistent("dual does not belong to this embedding".into()));
    }
    let ray = ray_to_boundary(trunc, v);
    let inc = dual.incidence();
    let at_infinity: Vec<bool> = (0..dual.vertex_count()).map(|f| trunc.face_at_infinity(f)).collect();
    let per_edge: Vec<Vec<CutRecord>> = (0..ray.len())
        .into_par_iter()
        .map(|i| {
            let ctx = Closing {
                trunc,
                dual,
                inc: &inc,
                at_infinity: &at_infinity,
                forbidden: ray[..=i].iter().map(|&e| dual.star(e)).collect(),
                v,
                n_max,
                guard,
            };
            ctx.cycles_through(dual.star(ray[i]))
        })
        .collect::<Result<_>>()?;
    let found: BTreeSet<CutRecord> = per_edge.into_iter().flatten().collect();
    Ok(CutsetCensus::assemble(trunc, v, n_max, Method::ViaDual, found))
}

/// Edges of a shortest path from `v` to the boundary, nearest `v` first.
fn ray_to_boundary(trunc: &Truncation, v: VertexId) -> Vec<EdgeId> {
    let emb = &trunc.emb;
    let mut via = vec![UNREACHABLE; emb.vertex_count()];
    let mut seen = vec![false; emb.vertex_count()];
    seen[v] = true;
    let mut queue = VecDeque::from([v]);
    let mut end = v;
    'bfs: while let Some(u) = queue.pop_front() {
        for d in emb.darts_of(u) {
            let w = emb.head(d);
            if !seen[w] {
                seen[w] = true;
                via[w] = d;
                if trunc.is_boundary(w) {
                    end = w;
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
    }
    let mut edges = Vec::new();
    while end != v {
        let d = via[end];
        edges.push(emb.edge_of(d));
        end = emb.origin(d);
    }
    edges.reverse();
    edges
}

struct Closing<'a> {
    trunc: &'a Truncation,
    dual: &'a DualGraph,
    inc: &'a [Vec<(FaceId, EdgeId)>],
    at_infinity: &'a [bool],
    /// Dual edges of the ray up to and including the current one.
    forbidden: Vec<EdgeId>,
    v: VertexId,
    n_max: usize,
    guard: u64,
}

impl Closing<'_> {
    fn cycles_through(&self, start: EdgeId) -> Result<Vec<CutRecord>> {
        let [f1, f2] = self.dual.endpoints(start);
        if self.at_infinity[f1] || self.at_infinity[f2] {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        if f1 == f2 {
            self.accept(vec![start], &mut out)?;
            return Ok(out);
        }
        if self.n_max < 2 {
            return Ok(out);
        }
        let budget = self.n_max - 1;
        let dist = self.distances_to(f1);
        if dist[f2] > budget {
            return Ok(out);
        }
        let mut visited = vec![false; self.dual.vertex_count()];
        visited[f2] = true;
        let mut path = vec![start];
        let mut steps = 0u64;
        self.extend(f2, f1, budget, &dist, &mut visited, &mut path, &mut steps, &mut out)?;
        Ok(out)
    }

    fn usable(&self, e: EdgeId, w: FaceId, u: FaceId) -> bool {
        w != u && !self.at_infinity[w] && !self.forbidden.contains(&e)
    }

    fn distances_to(&self, target: FaceId) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.dual.vertex_count()];
        dist[target] = 0;
        let mut queue = VecDeque::from([target]);
        while let Some(u) = queue.pop_front() {
            for &(w, e) in &self.inc[u] {
                if self.usable(e, w, u) && dist[w] == UNREACHABLE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        u: FaceId,
        target: FaceId,
        budget: usize,
        dist: &[usize],
        visited: &mut [bool],
        path: &mut Vec<EdgeId>,
        steps: &mut u64,
        out: &mut Vec<CutRecord>,
    ) -> Result<()> {
        let used = path.len() - 1;
        for &(w, e) in &self.inc[u] {
            if !self.usable(e, w, u) || visited[w] || dist[w] == UNREACHABLE || used + 1 + dist[w] > budget {
                continue;
            }
            *steps += 1;
            if *steps > self.guard {
                return Err(Error::GuardExceeded {
                    explored: *steps,
                    limit: self.guard,
                    context: format!("dual cycles of length at most {}", self.n_max),
                });
            }
            path.push(e);
            if w == target {
                self.accept(path.clone(), out)?;
            } else {
                visited[w] = true;
                self.extend(w, target, budget, dist, visited, path, steps, out)?;
                visited[w] = false;
            }
            path.pop();
        }
        Ok(())
    }

    /// Keeps the cycle if its finite side contains `v`.
    fn accept(&self, cycle: Vec<EdgeId>, out: &mut Vec<CutRecord>) -> Result<()> {
        let emb = &self.trunc.emb;
        let mut cut: Vec<EdgeId> = cycle.iter().map(|&e| self.dual.unstar(e)).collect();
        cut.sort_unstable();
        let mut removed = vec![false; emb.edge_count()];
        for &e in &cut {
            removed[e] = true;
        }
        let side = component_without(emb, self.v, &removed);
        if side.iter().any(|&u| self.trunc.is_boundary(u)) {
            return Ok(());
        }
        let region = Region::new(emb, side);
        if region.boundary != cut {
            return Err(Error::Inconsistent(format!(
                "dual cycle of length {} bounds a region with {} boundary edges",
                cut.len(),
                region.boundary.len()
            )));
        }
        out.push(CutRecord {
            edges: cut,
            region_size: region.members.len(),
        });
        Ok(())
    }
}
