//! Bernoulli bond percolation on a finite window.
//!
//! Each edge carries a uniform variate that is a pure function of
//! `(seed, trial, edge)`, and is open at level `p` when its variate is below
//! `p`. All levels of one trial therefore share one configuration, so the
//! connection event is monotone in `p` exactly. A trial is summarised by its
//! threshold: the least `p` at which the center reaches the target set.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{PlanarEmbedding, Truncation, VertexId};
use crate::error::{Error, Result};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based uniform variates keyed by `(seed, trial, edge)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyedUniform {
    pub seed: u64,
}

impl KeyedUniform {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// A variate in `[0, 1)` with 53 random bits.
    pub fn uniform(&self, trial: u64, edge: usize) -> f64 {
        let h = splitmix64(self.seed ^ splitmix64(trial ^ splitmix64(edge as u64 ^ 0x5bd1_e995)));
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn is_open(&self, trial: u64, edge: usize, p: f64) -> bool {
        self.uniform(trial, edge) < p
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Center vertex and the target set it must reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationDomain {
    pub center: VertexId,
    /// Graph distance of the target sphere, or `None` for the truncation boundary.
    pub radius: Option<usize>,
    #[serde(skip)]
    targets: Vec<bool>,
}

impl PercolationDomain {
    /// Targets the truncation boundary, or the sphere of the given radius.
    pub fn new(trunc: &Truncation, center: VertexId, radius: Option<usize>) -> Result<Self> {
        let emb = &trunc.emb;
        emb.check_vertex(center)?;
        let targets: Vec<bool> = match radius {
            None => trunc.boundary_mask().to_vec(),
            Some(0) => return Err(Error::InvalidParameter("radius must be at least 1".into())),
            Some(r) => emb.distances(center).iter().map(|&d| d == r).collect(),
        };
        if !targets.iter().any(|&t| t) {
            return Err(Error::WindowInsufficient {
                reason: format!("no vertex at distance {} from {center}", radius.unwrap_or(0)),
                required_radius: radius.unwrap_or(1),
            });
        }
        if targets[center] {
            return Err(Error::InvalidParameter(format!("center {center} is itself a target")));
        }
        Ok(Self { center, radius, targets })
    }

    pub fn is_target(&self, v: VertexId) -> bool {
        self.targets[v]
    }

    pub fn target_count(&self) -> usize {
        self.targets.iter().filter(|&&t| t).count()
    }

    fn sink(&self, emb: &PlanarEmbedding) -> usize {
        emb.vertex_count()
    }

    fn union_find(&self, emb: &PlanarEmbedding) -> UnionFind {
        let mut uf = UnionFind::new(emb.vertex_count() + 1);
        let sink = self.sink(emb);
        for (v, _) in self.targets.iter().enumerate().filter(|(_, &t)| t) {
            uf.union(v, sink);
        }
        uf
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationConfig {
    pub p: f64,
    pub seed: u64,
    pub trial: u64,
}

/// Whether the center reaches a target through open edges.
pub fn sample_and_query(emb: &PlanarEmbedding, domain: &PercolationDomain, config: PercolationConfig) -> bool {
    let rng = KeyedUniform::new(config.seed);
    let mut uf = domain.union_find(emb);
    for e in 0..emb.edge_count() {
        if rng.is_open(config.trial, e, config.p) {
            let (a, b) = emb.endpoints(e);
            uf.union(a, b);
        }
    }
    uf.same(domain.center, domain.sink(emb))
}

/// Least variate level at which the center reaches a target in this trial;
/// the center is connected at `p` exactly when the threshold is below `p`.
pub fn trial_threshold(emb: &PlanarEmbedding, domain: &PercolationDomain, seed: u64, trial: u64) -> f64 {
    let rng = KeyedUniform::new(seed);
    let mut order: Vec<(f64, usize)> = (0..emb.edge_count()).map(|e| (rng.uniform(trial, e), e)).collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut uf = domain.union_find(emb);
    let sink = domain.sink(emb);
    for (u, e) in order {
        let (a, b) = emb.endpoints(e);
        uf.union(a, b);
        if uf.same(domain.center, sink) {
            return u;
        }
    }
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub theta_hat: f64,
    /// 95% Wilson score interval.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub seed: u64,
    pub center: VertexId,
    pub radius: Option<usize>,
    pub rows: Vec<SweepRow>,
    /// Set when `θ̂` drops by more than three standard errors between levels.
    pub monotonicity_violation: bool,
    /// Per-trial thresholds, in trial order.
    pub thresholds: Vec<f64>,
}

fn wilson(k: u64, n: u64) -> (f64, f64) {
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let phat = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let mid = (phat + z * z / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (mid - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (mid + half).min(1.0) };
    (lo, hi)
}

fn theta(thresholds: &[f64], p: f64) -> u64 {
    thresholds.iter().filter(|&&t| t < p).count() as u64
}

/// `θ̂(p)` on each grid level from `trials` coupled trials.
pub fn sweep(
    emb: &PlanarEmbedding,
    domain: &PercolationDomain,
    p_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SweepResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if p_grid.is_empty() {
        return Err(Error::InvalidParameter("probability grid is empty".into()));
    }
    if p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) || p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("probability grid must be strictly increasing within [0, 1]".into()));
    }
    let thresholds: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| trial_threshold(emb, domain, seed, t))
        .collect();
    let rows: Vec<SweepRow> = p_grid
        .iter()
        .map(|&p| {
            let k = theta(&thresholds, p);
            let (ci_lo, ci_hi) = wilson(k, trials);
            SweepRow {
                p,
                theta_hat: k as f64 / trials as f64,
                ci_lo,
                ci_hi,
                trials,
            }
        })
        .collect();
    let sigma = |r: &SweepRow| (r.theta_hat * (1.0 - r.theta_hat) / r.trials as f64).sqrt();
    let monotonicity_violation = rows.windows(2).any(|w| {
        let spread = (sigma(&w[0]).powi(2) + sigma(&w[1]).powi(2)).sqrt();
        w[1].theta_hat < w[0].theta_hat - 3.0 * spread
    });
    Ok(SweepResult {
        seed,
        center: domain.center,
        radius: domain.radius,
        rows,
        monotonicity_violation,
        thresholds,
    })
}

/// Evenly spaced levels `lo, lo + step, ..., hi`.
pub fn p_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || lo > hi || lo < 0.0 || hi > 1.0 {
        return Err(Error::InvalidParameter(format!("bad grid {lo}..{hi} step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingKind {
    Bracketed,
    /// `θ̂ >= 1/2` already at the lowest level.
    OpenBelow,
    /// `θ̂ < 1/2` at every level.
    OpenAbove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    pub kind: CrossingKind,
    /// Interpolated level where `θ̂` crosses 1/2.
    pub point: f64,
    /// Grid levels bracketing the crossing.
    pub bracket: (f64, f64),
    /// Bootstrap 95% percentile interval of the crossing.
    pub bootstrap: (f64, f64),
    /// Hull of the bracket and the bootstrap interval.
    pub interval: (f64, f64),
    pub replicates: usize,
}

impl PcEstimate {
    pub fn open_ended(&self) -> bool {
        self.kind != CrossingKind::Bracketed
    }
}

fn crossing(grid: &[f64], theta: &[f64]) -> (CrossingKind, f64, (f64, f64)) {
    if theta[0] >= 0.5 {
        return (CrossingKind::OpenBelow, grid[0], (0.0, grid[0]));
    }
    for i in 0..grid.len() - 1 {
        if theta[i] < 0.5 && theta[i + 1] >= 0.5 {
            let t = (0.5 - theta[i]) / (theta[i + 1] - theta[i]);
            let point = grid[i] + t * (grid[i + 1] - grid[i]);
            return (CrossingKind::Bracketed, point, (grid[i], grid[i + 1]));
        }
    }
    let last = grid[grid.len() - 1];
    (CrossingKind::OpenAbove, last, (last, 1.0))
}

/// Crossing of `θ̂ = 1/2` with a bootstrap over trials.
pub fn estimate_pc(sweep: &SweepResult, replicates: usize, seed: u64) -> Result<PcEstimate> {
    if sweep.rows.is_empty() || sweep.thresholds.is_empty() {
        return Err(Error::InvalidParameter("empty sweep".into()));
    }
    let grid: Vec<f64> = sweep.rows.iter().map(|r| r.p).collect();
    let observed: Vec<f64> = sweep.rows.iter().map(|r| r.theta_hat).collect();
    let (kind, point, bracket) = crossing(&grid, &observed);
    let n = sweep.thresholds.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(replicates);
    let mut sample = vec![0.0; n];
    for _ in 0..replicates {
        for s in sample.iter_mut() {
            *s = sweep.thresholds[rng.gen_range(0..n)];
        }
        let th: Vec<f64> = grid.iter().map(|&p| theta(&sample, p) as f64 / n as f64).collect();
        points.push(crossing(&grid, &th).1);
    }
    points.sort_by(f64::total_cmp);
    let bootstrap = if points.is_empty() {
        (point, point)
    } else {
        let q = |f: f64| points[((f * (points.len() - 1) as f64).round() as usize).min(points.len() - 1)];
        (q(0.025), q(0.975))
    };
    let interval = (bracket.0.min(bootstrap.0), bracket.1.max(bootstrap.1));
    Ok(PcEstimate {
        kind,
        point,
        bracket,
        bootstrap,
        interval,
        replicates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The whole empirical interval lies at or below `p_star`.
    Consistent,
    /// The interval straddles `p_star`.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfrontReport {
    pub pc_interval: (f64, f64),
    pub pc_point: f64,
    pub p_star: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Compares the empirical crossing with the rigorous threshold.
///
/// An interval lying wholly above `p_star` contradicts a proven bound and is
/// reported as an inconsistency.
pub fn confront(estimate: &PcEstimate, p_star: Option<f64>) -> Result<ConfrontReport> {
    let p_star = p_star.ok_or_else(|| Error::HypothesesFail("no rigorous threshold exists for this family".into()))?;
    if !(p_star < 1.0) || !(p_star > 0.0) {
        return Err(Error::InvalidParameter(format!("p_star must lie in (0, 1), got {p_star}")));
    }
    let (lo, hi) = estimate.interval;
    if lo > p_star {
        return Err(Error::Inconsistent(format!(
            "empirical crossing interval [{lo}, {hi}] lies above the rigorous bound {p_star}"
        )));
    }
    Ok(ConfrontReport {
        pc_interval: estimate.interval,
        pc_point: estimate.point,
        p_star,
        margin: p_star - hi,
        verdict: if hi <= p_star { Verdict::Consistent } else { Verdict::Inconclusive },
    })
}

/// Breadth-first check of the open cluster, independent of union-find.
pub fn reaches_by_search(emb: &PlanarEmbedding, domain: &PercolationDomain, config: PercolationConfig) -> bool {
    let rng = KeyedUniform::new(config.seed);
    let mut seen = vec![false; emb.vertex_count()];
    seen[domain.center] = true;
    let mut queue = VecDeque::from([domain.center]);
    while let Some(u) = queue.pop_front() {
        if domain.is_target(u) {
            return true;
        }
        for d in emb.darts_of(u) {
            let w = emb.head(d);
            if !seen[w] && rng.is_open(config.trial, emb.edge_of(d), config.p) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{grid_box, Family};

    fn box_domain(side: usize) -> (Truncation, PercolationDomain) {
        let t = Truncation::new(grid_box(side).unwrap());
        let c = t.center();
        let d = PercolationDomain::new(&t, c, None).unwrap();
        (t, d)
    }

    #[test]
    fn extremes() {
        let (t, d) = box_domain(9);
        for trial in 0..20 {
            assert!(sample_and_query(&t.emb, &d, PercolationConfig { p: 1.0, seed: 3, trial }));
            assert!(!sample_and_query(&t.emb, &d, PercolationConfig { p: 0.0, seed: 3, trial }));
        }
        let s = sweep(&t.emb, &d, &[0.0, 1.0], 50, 1).unwrap();
        assert_eq!((s.rows[0].theta_hat, s.rows[1].theta_hat), (0.0, 1.0));
    }

    #[test]
    fn threshold_matches_direct_queries() {
        let (t, d) = box_domain(7);
        for trial in 0..50 {
            let th = trial_threshold(&t.emb, &d, 11, trial);
            for p in [0.2, 0.4, 0.5, 0.6, 0.8] {
                let cfg = PercolationConfig { p, seed: 11, trial };
                let a = sample_and_query(&t.emb, &d, cfg);
                assert_eq!(a, th < p);
                assert_eq!(a, reaches_by_search(&t.emb, &d, cfg));
            }
        }
    }

    #[test]
    fn uniforms_are_reproducible_and_spread() {
        let r = KeyedUniform::new(42);
        assert_eq!(r.uniform(3, 7), KeyedUniform::new(42).uniform(3, 7));
        assert_ne!(r.uniform(3, 7), r.uniform(3, 8));
        assert_ne!(r.uniform(3, 7), KeyedUniform::new(43).uniform(3, 7));
        let mean: f64 = (0..10_000).map(|e| r.uniform(0, e)).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn path_never_crosses() {
        let t = Family::Path.truncation(20).unwrap();
        let d = PercolationDomain::new(&t, 20, None).unwrap();
        let grid = p_grid(0.05, 0.9, 0.05).unwrap();
        let s = sweep(&t.emb, &d, &grid, 200, 5).unwrap();
        let e = estimate_pc(&s, 100, 1).unwrap();
        assert_eq!(e.kind, CrossingKind::OpenAbove);
        assert!(e.open_ended());
    }

    #[test]
    fn sweep_is_deterministic() {
        let (t, d) = box_domain(11);
        let grid = p_grid(0.3, 0.7, 0.05).unwrap();
        let a = sweep(&t.emb, &d, &grid, 64, 9).unwrap();
        let b = sweep(&t.emb, &d, &grid, 64, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(estimate_pc(&a, 50, 2).unwrap(), estimate_pc(&b, 50, 2).unwrap());
        assert!(!a.monotonicity_violation);
    }

    #[test]
    fn grid_levels() {
        let g = p_grid(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[50], 0.5);
        assert!(p_grid(0.5, 0.2, 0.1).is_err());
    }

    #[test]
    fn sphere_targets() {
        let t = Truncation::new(grid_box(9).unwrap());
        let d = PercolationDomain::new(&t, 40, Some(2)).unwrap();
        assert_eq!(d.target_count(), 8);
        assert!(PercolationDomain::new(&t, 40, Some(30)).is_err());
    }

    #[test]
    fn confront_rules() {
        let est = PcEstimate {
            kind: CrossingKind::OpenBelow,
            point: 1.0,
            bracket: (0.0, 1.0),
            bootstrap: (1.0, 1.0),
            interval: (0.0, 1.0),
            replicates: 0,
        };
        let r = confront(&est, Some(0.9)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(matches!(confront(&est, None), Err(Error::HypothesesFail(_))));
        let high = PcEstimate { interval: (0.95, 0.97), ..est.clone() };
        assert!(matches!(confront(&high, Some(0.9)), Err(Error::Inconsistent(_))));
        let low = PcEstimate { interval: (0.45, 0.55), ..est };
        assert_eq!(confront(&low, Some(0.9)).unwrap().verdict, Verdict::Consistent);
    }
}
