//! Exact simple-path counts in the dual and the doubling inequality they obey.
//!
//! A path of length `n` is a sequence of `n` dual edges visiting `n + 1`
//! distinct dual vertices. Parallel edges are distinct steps and loops never
//! extend a simple path. `p(a, b; n)` counts such paths from `a` to `b`, and
//! `p(n)` is its maximum over ordered pairs `a != b` of a window.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual::DualGraph;
use crate::embedding::FaceId;
use crate::error::{Error, Result};
use crate::profiles::ConstantsProfile;

/// Default per-source budget of dart steps for one enumeration.
pub const DEFAULT_STEP_GUARD: u64 = 100_000_000;

/// Which dual vertices paths may use, and which may serve as endpoints.
#[derive(Debug, Clone)]
pub struct PathScope {
    domain: Vec<bool>,
    window: Vec<FaceId>,
}

impl PathScope {
    /// Every dual vertex, as both domain and window.
    pub fn whole(dual: &DualGraph) -> Self {
        Self {
            domain: vec![true; dual.vertex_count()],
            window: (0..dual.vertex_count()).collect(),
        }
    }

    /// Paths avoid the outer face; endpoints range over the interior faces.
    ///
    /// In a finite window the outer face collects the whole perimeter and
    /// would act as a shortcut that the infinite graph does not have.
    pub fn interior(dual: &DualGraph) -> Self {
        let mut domain = vec![true; dual.vertex_count()];
        domain[dual.outer()] = false;
        Self {
            domain,
            window: dual.interior_faces().to_vec(),
        }
    }

    pub fn new(dual: &DualGraph, domain: &[FaceId], window: Vec<FaceId>) -> Result<Self> {
        let mut mask = vec![false; dual.vertex_count()];
        for &f in domain {
            dual.check_face(f)?;
            mask[f] = true;
        }
        for &f in &window {
            dual.check_face(f)?;
            if !mask[f] {
                return Err(Error::InvalidParameter(format!("window face {f} is outside the path domain")));
            }
        }
        Ok(Self { domain: mask, window })
    }

    pub fn window(&self) -> &[FaceId] {
        &self.window
    }

    pub fn allows(&self, f: FaceId) -> bool {
        self.domain[f]
    }
}

/// The two enumeration strategies, kept independent so they can check each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counter {
    /// Recursive search over incidence lists rebuilt from the dual edge list.
    EdgeList,
    /// Iterative search over face-boundary crossings (primal darts).
    Darts,
}

fn guard_error(explored: u64, limit: u64, source: FaceId, n: usize) -> Error {
    Error::GuardExceeded {
        explored,
        limit,
        context: format!("simple paths of length {n} from dual vertex {source}"),
    }
}

/// `p(source, b; n)` for every `b`, counted by the chosen strategy.
pub fn paths_from(
    dual: &DualGraph,
    scope: &PathScope,
    source: FaceId,
    n: usize,
    counter: Counter,
    guard: u64,
) -> Result<Vec<u64>> {
    dual.check_face(source)?;
    if !scope.allows(source) {
        return Err(Error::InvalidParameter(format!("source {source} is outside the path domain")));
    }
    match counter {
        Counter::EdgeList => edge_list_count(dual, scope, source, n, guard),
        Counter::Darts => dart_count(dual, scope, source, n, guard),
    }
}

fn edge_list_count(dual: &DualGraph, scope: &PathScope, source: FaceId, n: usize, guard: u64) -> Result<Vec<u64>> {
    struct Walk<'a> {
        inc: Vec<Vec<(FaceId, usize)>>,
        domain: &'a [bool],
        visited: Vec<bool>,
        counts: Vec<u64>,
        steps: u64,
        guard: u64,
    }
    impl Walk<'_> {
        fn go(&mut self, u: FaceId, left: usize) -> bool {
            if left == 0 {
                self.counts[u] += 1;
                return true;
            }
            for i in 0..self.inc[u].len() {
                let (w, _) = self.inc[u][i];
                if w == u || self.visited[w] || !self.domain[w] {
                    continue;
                }
                self.steps += 1;
                if self.steps > self.guard {
                    return false;
                }
                self.visited[w] = true;
                let ok = self.go(w, left - 1);
                self.visited[w] = false;
                if !ok {
                    return false;
                }
            }
            true
        }
    }
    let mut walk = Walk {
        inc: dual.incidence(),
        domain: &scope.domain,
        visited: vec![false; dual.vertex_count()],
        counts: vec![0; dual.vertex_count()],
        steps: 0,
        guard,
    };
    walk.visited[source] = true;
    if walk.go(source, n) {
        Ok(walk.counts)
    } else {
        Err(guard_error(walk.steps, guard, source, n))
    }
}

fn dart_count(dual: &DualGraph, scope: &PathScope, source: FaceId, n: usize, guard: u64) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; dual.vertex_count()];
    if n == 0 {
        counts[source] = 1;
        return Ok(counts);
    }
    let mut visited = vec![false; dual.vertex_count()];
    visited[source] = true;
    // stack of (face, next crossing index in its boundary walk)
    let mut stack: Vec<(FaceId, usize)> = vec![(source, 0)];
    let mut steps = 0u64;
    while let Some(top) = stack.last_mut() {
        let (face, idx) = *top;
        let crossings = dual.rotation(face);
        if idx == crossings.len() {
            visited[face] = false;
            stack.pop();
            continue;
        }
        top.1 += 1;
        let (next, _) = crossings[idx];
        if next == face || visited[next] || !scope.domain[next] {
            continue;
        }
        steps += 1;
        if steps > guard {
            return Err(guard_error(steps, guard, source, n));
        }
        if stack.len() == n {
            counts[next] += 1;
        } else {
            visited[next] = true;
            stack.push((next, 0));
        }
    }
    Ok(counts)
}

/// `p(a, b; n)` over the whole dual.
pub fn count_simple_paths(dual: &DualGraph, a: FaceId, b: FaceId, n: usize) -> Result<u64> {
    count_simple_paths_in(dual, &PathScope::whole(dual), a, b, n, Counter::EdgeList)
}

pub fn count_simple_paths_in(
    dual: &DualGraph,
    scope: &PathScope,
    a: FaceId,
    b: FaceId,
    n: usize,
    counter: Counter,
) -> Result<u64> {
    dual.check_face(b)?;
    if a == b {
        return Err(Error::InvalidParameter("path endpoints must differ".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("path length must be at least 1".into()));
    }
    Ok(paths_from(dual, scope, a, n, counter, DEFAULT_STEP_GUARD)?[b])
}

/// `p(n)` with the ordered pair attaining it (first in window order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathMax {
    pub n: usize,
    pub value: u64,
    pub pair: Option<(FaceId, FaceId)>,
}

/// `p(n) = max p(a, b; n)` over ordered pairs `a != b` of the scope's window.
///
/// `p(0) = 1` by convention (the empty path).
pub fn max_path_count(dual: &DualGraph, n: usize, scope: &PathScope) -> Result<PathMax> {
    max_path_count_with(dual, n, scope, Counter::EdgeList, DEFAULT_STEP_GUARD)
}

pub fn max_path_count_with(
    dual: &DualGraph,
    n: usize,
    scope: &PathScope,
    counter: Counter,
    guard: u64,
) -> Result<PathMax> {
    if scope.window.is_empty() {
        return Err(Error::InvalidParameter("path window is empty".into()));
    }
    if n == 0 {
        return Ok(PathMax {
            n,
            value: 1,
            pair: None,
        });
    }
    let mut in_window = vec![false; dual.vertex_count()];
    for &f in &scope.window {
        in_window[f] = true;
    }
    let per_source: Vec<(FaceId, Vec<u64>)> = scope
        .window
        .par_iter()
        .map(|&a| paths_from(dual, scope, a, n, counter, guard).map(|c| (a, c)))
        .collect::<Result<_>>()?;
    let mut best = PathMax {
        n,
        value: 0,
        pair: None,
    };
    for (a, counts) in per_source {
        for &b in &scope.window {
            if b != a && counts[b] > best.value {
                best.value = counts[b];
                best.pair = Some((a, b));
            }
        }
    }
    Ok(best)
}

/// `p(n)` for a list of lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathCountTable {
    pub entries: Vec<PathMax>,
}

impl PathCountTable {
    /// Counts every requested length with both strategies and insists they agree.
    pub fn compute(dual: &DualGraph, scope: &PathScope, lengths: &[usize]) -> Result<Self> {
        let mut lengths = lengths.to_vec();
        lengths.sort_unstable();
        lengths.dedup();
        let entries = lengths
            .into_iter()
            .map(|n| cross_checked_max(dual, scope, n))
            .collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn get(&self, n: usize) -> Option<u64> {
        if n == 0 {
            return Some(1);
        }
        self.entries.iter().find(|e| e.n == n).map(|e| e.value)
    }
}

fn cross_checked_max(dual: &DualGraph, scope: &PathScope, n: usize) -> Result<PathMax> {
    let a = max_path_count_with(dual, n, scope, Counter::EdgeList, DEFAULT_STEP_GUARD)?;
    let b = max_path_count_with(dual, n, scope, Counter::Darts, DEFAULT_STEP_GUARD)?;
    if a != b {
        return Err(Error::Inconsistent(format!(
            "path counters disagree at n={n}: edge-list {} vs dart {}",
            a.value, b.value
        )));
    }
    Ok(a)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionRow {
    pub n: usize,
    pub p_n: u64,
    /// Left-hand side, `p(2n)`.
    pub p_2n: u64,
    /// Right-hand side, `8n K² (8n/k)^{D/ε} p(n)²`.
    pub rhs: f64,
    pub holds: bool,
    /// `rhs / lhs`, absent when `p(2n) = 0`.
    pub slack: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionBoundReport {
    pub rows: Vec<RecursionRow>,
    /// Exact `p(1)` on the window.
    pub p1_exact: u64,
    /// The base-case bound `(2/k)^{1/ε}`, recorded alongside the exact value.
    pub p1_bound: f64,
    /// Set when some row fails: the constants' window did not cover the
    /// regions involved.
    pub window_diagnostic: Option<String>,
}

/// `8n K² (8n/k)^{D/ε} x²`.
pub fn doubling_rhs(c: &ConstantsProfile, n: usize, p_n: u64) -> f64 {
    let n = n as f64;
    let p = p_n as f64;
    8.0 * n
        * c.volume_constant.powi(2)
        * (8.0 * n / c.boundary_constant).powf(c.volume_exponent / c.epsilon)
        * p
        * p
}

/// Window needed to apply the doubling inequality at `n`: growth radius
/// `(4n/k)^{1/ε}` (and 2 for the degree bound) and isoperimetry for every
/// region enclosed by at most `4n` dual edges.
pub fn required_window(c: &ConstantsProfile, n: usize) -> (usize, usize) {
    let radius = c.region_bound(4 * n).floor() as usize;
    (radius.max(2), 4 * n)
}

/// Checks `p(2n) <= 8n K² (8n/k)^{D/ε} p(n)²` for each `n`, with both path
/// counters required to agree.
pub fn check_recursion(
    dual: &DualGraph,
    constants: &ConstantsProfile,
    n_list: &[usize],
    scope: &PathScope,
) -> Result<RecursionBoundReport> {
    constants.validate()?;
    if n_list.contains(&0) {
        return Err(Error::InvalidParameter("recursion lengths must be positive".into()));
    }
    for &n in n_list {
        let (radius, cut) = required_window(constants, n);
        if constants.window.r_max < radius || constants.window.cut_max < cut {
            return Err(Error::WindowInsufficient {
                reason: format!(
                    "n={n} needs growth certified to radius {radius} (have {}) and isoperimetry for cuts up to {cut} (have {})",
                    constants.window.r_max, constants.window.cut_max
                ),
                required_radius: radius,
            });
        }
    }
    let mut lengths: Vec<usize> = n_list.iter().flat_map(|&n| [n, 2 * n]).collect();
    lengths.push(1);
    let table = PathCountTable::compute(dual, scope, &lengths)?;
    let p = |n: usize| table.get(n).expect("length was counted");

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &n in n_list {
        let p_n = p(n);
        let p_2n = p(2 * n);
        let rhs = doubling_rhs(constants, n, p_n);
        let holds = (p_2n as f64) <= rhs;
        if !holds {
            failures.push(n);
        }
        rows.push(RecursionRow {
            n,
            p_n,
            p_2n,
            rhs,
            holds,
            slack: (p_2n > 0).then(|| rhs / p_2n as f64),
        });
    }
    let window_diagnostic = (!failures.is_empty()).then(|| {
        format!("inequality fails at n in {failures:?}: the constants are not valid on the regions these paths enclose")
    });
    Ok(RecursionBoundReport {
        rows,
        p1_exact: p(1),
        p1_bound: (2.0 / constants.boundary_constant).powf(1.0 / constants.epsilon),
        window_diagnostic,
    })
}

/// The constant `C` with `p(2^m) <= exp(C 2^m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConstant {
    pub horizon: usize,
    /// `q(m)` for `m = 0..=horizon`.
    pub q: Vec<f64>,
    /// `max q(m) / 2^m` over the horizon.
    pub partial: f64,
    /// Bound on the further increase of `q(m) / 2^m` beyond the horizon.
    pub tail: f64,
    /// The supremum of `q(m) / 2^m` over all `m`.
    pub c: f64,
}

impl BoundConstant {
    /// `exp(C n)`, the exponential bound on `p(n)`.
    pub fn path_bound(&self, n: usize) -> f64 {
        (self.c * n as f64).exp()
    }
}

/// Iterates `q(m+1) = 2 q(m) + ln(8·2^m K² (8·2^m/k)^{D/ε})` from
/// `q(0) = (1/ε) ln(2/k)` and returns the supremum of `q(m)/2^m`.
///
/// Beyond the horizon the increments `t_m / 2^{m+1}` form an
/// arithmetico-geometric series, summed in closed form.
pub fn bound_constant(c: &ConstantsProfile, horizon: usize) -> Result<BoundConstant> {
    if !(c.boundary_constant > 0.0) || !(c.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k and epsilon must be positive (k={}, epsilon={})",
            c.boundary_constant, c.epsilon
        )));
    }
    if !(c.volume_constant > 0.0) || !(c.volume_exponent > 0.0) {
        return Err(Error::InvalidParameter("K and D must be positive".into()));
    }
    let ratio = c.volume_exponent / c.epsilon;
    let ln2 = std::f64::consts::LN_2;
    // t_m = a + b m
    let a = 8f64.ln() + 2.0 * c.volume_constant.ln() + ratio * (8.0 / c.boundary_constant).ln();
    let b = (1.0 + ratio) * ln2;
    let t = |m: usize| a + b * m as f64;

    let mut q = Vec::with_capacity(horizon + 1);
    q.push((2.0 / c.boundary_constant).ln() / c.epsilon);
    let mut scaled = q[0];
    let mut partial = scaled;
    for m in 0..horizon {
        q.push(2.0 * q[m] + t(m));
        scaled += t(m) / 2f64.powi(m as i32 + 1);
        partial = partial.max(scaled);
    }

    // increments are increasing in m; only the positive ones can raise the supremum
    let first_positive = if b > 0.0 {
        let root = (-a / b).floor() + 1.0;
        (root.max(0.0) as usize).max(horizon)
    } else {
        horizon
    };
    let tail = if t(first_positive) > 0.0 {
        let j = first_positive as f64;
        (a + b * (j + 1.0)) / 2f64.powf(j)
    } else {
        0.0
    };
    let c_value = partial.max(scaled + tail);
    Ok(BoundConstant {
        horizon,
        q,
        partial,
        tail,
        c: c_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::dualize;
    use crate::embedding::Truncation;
    use crate::lattice::{cycle, grid_box};
    use crate::profiles::ProfileWindow;

    fn z2_constants() -> ConstantsProfile {
        ConstantsProfile::from_constants(
            5.0,
            2.0,
            4.0,
            0.5,
            ProfileWindow {
                r_max: 16,
                s_max: 9,
                cut_max: 16,
            },
        )
        .unwrap()
    }

    #[test]
    fn c4_dual_counts() {
        let d = dualize(&Truncation::new(cycle(4).unwrap())).unwrap();
        assert_eq!(count_simple_paths(&d, 0, 1, 1).unwrap(), 4);
        assert_eq!(count_simple_paths(&d, 0, 1, 2).unwrap(), 0);
        let scope = PathScope::whole(&d);
        assert_eq!(max_path_count(&d, 1, &scope).unwrap().value, 4);
        assert!(count_simple_paths(&d, 0, 0, 1).is_err());
        assert!(count_simple_paths(&d, 0, 1, 0).is_err());
    }

    #[test]
    fn adjacent_box_faces_have_one_edge() {
        let t = Truncation::new(grid_box(3).unwrap());
        let d = dualize(&t).unwrap();
        let inner: Vec<_> = (0..d.vertex_count()).filter(|&f| f != d.outer()).collect();
        let (a, b) = inner
            .iter()
            .flat_map(|&a| inner.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| a != b && d.multiplicity(a, b) > 0)
            .unwrap();
        assert_eq!(count_simple_paths(&d, a, b, 1).unwrap(), 1);
        // simple dual graph away from the outer face: p(1) = 1
        let scope = PathScope::interior(&dualize(&Truncation::new(grid_box(5).unwrap())).unwrap());
        let d5 = dualize(&Truncation::new(grid_box(5).unwrap())).unwrap();
        assert_eq!(max_path_count(&d5, 1, &scope).unwrap().value, 1);
    }

    #[test]
    fn guard_reports_progress() {
        let d = dualize(&Truncation::new(grid_box(6).unwrap())).unwrap();
        let scope = PathScope::whole(&d);
        let err = paths_from(&d, &scope, 0, 6, Counter::EdgeList, 10).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { explored: 11, limit: 10, .. }));
        let err = paths_from(&d, &scope, 0, 6, Counter::Darts, 10).unwrap_err();
        assert!(matches!(err, Error::GuardExceeded { .. }));
    }

    #[test]
    fn z2_rhs_at_one() {
        let c = z2_constants();
        assert_eq!(doubling_rhs(&c, 1, 1), 3200.0);
        assert_eq!(doubling_rhs(&c, 1, 0), 0.0);
    }

    #[test]
    fn recursion_refuses_short_windows() {
        let d = dualize(&Truncation::new(grid_box(5).unwrap())).unwrap();
        let mut c = z2_constants();
        c.window.cut_max = 4;
        let err = check_recursion(&d, &c, &[2], &PathScope::interior(&d)).unwrap_err();
        assert!(matches!(err, Error::WindowInsufficient { .. }));
    }

    #[test]
    fn bound_constant_base_case() {
        let c = z2_constants();
        let b = bound_constant(&c, 0).unwrap();
        assert!((b.partial - 2.0 * 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(b.q, vec![2.0 * 0.5f64.ln()]);
        assert!(b.c > b.partial);
    }

    #[test]
    fn bound_constant_rejects_nonpositive() {
        let mut c = z2_constants();
        c.boundary_constant = 0.0;
        assert!(bound_constant(&c, 5).is_err());
        let mut c = z2_constants();
        c.epsilon = -0.5;
        assert!(bound_constant(&c, 5).is_err());
    }

    #[test]
    fn bound_constant_unit_constants_closed_form() {
        let c = ConstantsProfile::from_constants(1.0, 1.0, 1.0, 1.0, ProfileWindow { r_max: 1, s_max: 1, cut_max: 0 }).unwrap();
        // q(0) + Σ 2^{-m-1} ln(64·4^m) = ln 2 + ln 64 + ln 4
        let series: f64 = (0..200).map(|m| (64.0f64.ln() + m as f64 * 4f64.ln()) / 2f64.powi(m + 1)).sum();
        let expected = 2f64.ln() + series;
        assert!((expected - 512f64.ln()).abs() < 1e-12);
        for h in [0, 1, 5, 30] {
            let b = bound_constant(&c, h).unwrap();
            assert!((b.c - expected).abs() < 1e-9, "horizon {h}: {} vs {expected}", b.c);
        }
    }

    mod props {
        use super::*;
        use crate::lattice::triangular_ball;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn counters_agree_and_are_symmetric(side in 3usize..6, n in 1usize..6, a in 0usize..64, b in 0usize..64) {
                let d = dualize(&Truncation::new(grid_box(side).unwrap())).unwrap();
                let f = d.vertex_count();
                let (a, b) = (a % f, b % f);
                prop_assume!(a != b);
                let scope = PathScope::whole(&d);
                let x = paths_from(&d, &scope, a, n, Counter::EdgeList, DEFAULT_STEP_GUARD).unwrap();
                let y = paths_from(&d, &scope, a, n, Counter::Darts, DEFAULT_STEP_GUARD).unwrap();
                prop_assert_eq!(&x, &y);
                let back = count_simple_paths(&d, b, a, n).unwrap();
                prop_assert_eq!(x[b], back);
            }

            #[test]
            fn counters_agree_on_triangular(r in 1usize..3, n in 1usize..5, a in 0usize..64) {
                let d = dualize(&Truncation::new(triangular_ball(r).unwrap())).unwrap();
                let a = a % d.vertex_count();
                let scope = PathScope::interior(&d);
                prop_assume!(scope.allows(a));
                let x = paths_from(&d, &scope, a, n, Counter::EdgeList, DEFAULT_STEP_GUARD).unwrap();
                let y = paths_from(&d, &scope, a, n, Counter::Darts, DEFAULT_STEP_GUARD).unwrap();
                prop_assert_eq!(x, y);
            }

            #[test]
            fn bound_constant_is_monotone(
                k_vol in 1.0f64..10.0, dk in 0.0f64..5.0,
                d in 1.0f64..3.0, dd in 0.0f64..1.0,
                k in 1.0f64..4.0, dk2 in 0.0f64..2.0,
                eps in 0.25f64..1.0,
            ) {
                let w = ProfileWindow { r_max: 1, s_max: 1, cut_max: 0 };
                let c = |kv, dv, kb| bound_constant(&ConstantsProfile::from_constants(kv, dv, kb, eps, w).unwrap(), 30).unwrap().c;
                let base = c(k_vol, d, k + dk2);
                prop_assert!(c(k_vol + dk, d, k + dk2) >= base - 1e-9);
                prop_assert!(c(k_vol, d + dd, k + dk2) >= base - 1e-9);
                prop_assert!(c(k_vol, d, k) >= base - 1e-9);
            }
        }
    }
}
