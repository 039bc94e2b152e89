//! Minimal cut-sets of a vertex: exact enumeration two ways, and the
//! counting bound that feeds the Peierls threshold.
//!
//! A minimal cut-set of `v` is `∂S` for a connected `S ∋ v` avoiding the
//! truncation boundary `B` such that every component of `V ∖ S` reaches `B`.
//! The direct method searches such `S`; the dual method searches simple
//! dual cycles. Their agreement is the exhaustive check of the cut/cycle
//! correspondence.

mod bound;
mod direct;
mod via_dual;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use bound::{
    geometric_constants, peierls_count_bound, peierls_pipeline, peierls_threshold, series_start, BoundRow,
    PathData, PeierlsBound, Threshold, ThresholdInput,
};
pub use direct::{enumerate_cutsets_direct, enumerate_cutsets_direct_with};
pub use via_dual::{enumerate_cutsets_via_dual, enumerate_cutsets_via_dual_with};

use crate::embedding::{EdgeId, Truncation, VertexId};
use crate::error::{Error, Result};
use crate::profiles::{BoundaryPoint, ConstantsProfile};

/// Default budget of search nodes for one enumeration.
pub const DEFAULT_SEARCH_GUARD: u64 = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "direct")]
    Direct,
    #[serde(rename = "via-dual")]
    ViaDual,
}

/// How far the truncation is trusted.
#[derive(Debug, Clone, Copy)]
pub enum CutsetWindow<'a> {
    /// Count cut-sets of the finite graph as given.
    Truncation,
    /// Require `margin(v) >= (n_max/k)^{1/ε}` so every counted cut-set is one
    /// of the infinite graph.
    Certified(&'a ConstantsProfile),
}

/// One minimal cut-set and the size of its finite side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CutRecord {
    pub edges: Vec<EdgeId>,
    pub region_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutsetCensus {
    pub vertex: VertexId,
    pub n_max: usize,
    pub method: Method,
    pub margin: usize,
    /// `counts[n]` is the number of minimal cut-sets of size `n`.
    pub counts: Vec<u64>,
    /// Set when some finite side reaches a vertex adjacent to the boundary,
    /// so a larger window might hold more cut-sets.
    pub window_limited: bool,
    /// Every cut-set found, ordered by size then edge ids.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cuts: Vec<CutRecord>,
}

impl CutsetCensus {
    fn assemble(trunc: &Truncation, v: VertexId, n_max: usize, method: Method, found: BTreeSet<CutRecord>) -> Self {
        let mut counts = vec![0u64; n_max + 1];
        for c in &found {
            counts[c.edges.len()] += 1;
        }
        let mut cuts: Vec<CutRecord> = found.into_iter().collect();
        cuts.sort_by(|a, b| (a.edges.len(), &a.edges).cmp(&(b.edges.len(), &b.edges)));
        let depth = trunc.depth();
        let emb = &trunc.emb;
        // the region is the component of v after deleting the cut
        let window_limited = cuts.iter().any(|c| {
            let mut removed = vec![false; emb.edge_count()];
            for &e in &c.edges {
                removed[e] = true;
            }
            crate::region::component_without(emb, v, &removed)
                .iter()
                .any(|&u| depth[u] <= 1)
        });
        Self {
            vertex: v,
            n_max,
            method,
            margin: trunc.margin(v),
            counts,
            window_limited,
            cuts,
        }
    }

    /// `N(v; n)`, zero beyond `n_max`.
    pub fn count(&self, n: usize) -> u64 {
        self.counts.get(n).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Smallest size with a cut-set.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0)
    }

    /// Largest finite side per cut size, as `(size, boundary)` pairs for
    /// certifying isoperimetry on cut-set regions.
    pub fn extreme_regions(&self) -> Vec<BoundaryPoint> {
        let mut best: Vec<Option<usize>> = vec![None; self.n_max + 1];
        for c in &self.cuts {
            let n = c.edges.len();
            best[n] = Some(best[n].map_or(c.region_size, |s: usize| s.max(c.region_size)));
        }
        best.iter()
            .enumerate()
            .filter_map(|(n, s)| s.map(|size| BoundaryPoint { size, boundary: n }))
            .collect()
    }

    /// Same counts and the same cut-sets.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.counts == other.counts && self.cuts == other.cuts
    }

    pub fn without_cuts(mut self) -> Self {
        self.cuts.clear();
        self
    }
}

/// Shared preconditions; returns the margin of `v`.
fn prepare(trunc: &Truncation, v: VertexId, n_max: usize, window: CutsetWindow<'_>) -> Result<usize> {
    trunc.emb.check_vertex(v)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be positive".into()));
    }
    let margin = trunc.margin(v);
    if trunc.is_boundary(v) {
        return Err(Error::WindowInsufficient {
            reason: format!("vertex {v} lies on the truncation boundary"),
            required_radius: 1,
        });
    }
    if let CutsetWindow::Certified(c) = window {
        c.validate()?;
        let required = c.region_bound(n_max).ceil() as usize;
        if margin < required {
            return Err(Error::WindowInsufficient {
                reason: format!(
                    "cut-sets of size {n_max} may enclose regions of radius up to {required}, but vertex {v} is only {margin} from the boundary"
                ),
                required_radius: required,
            });
        }
    }
    Ok(margin)
}
