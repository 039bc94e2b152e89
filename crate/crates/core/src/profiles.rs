//! Growth and isoperimetric profiles, and the constants fitted to them.
//!
//! Everything here is exact on a finite window: volume counts come from
//! breadth-first search and minimal boundaries from exhaustive enumeration of
//! connected vertex sets. The fitted constants are the tightest ones valid on
//! the measured window and carry that window with them; they say nothing
//! about sizes outside it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{Truncation, VertexId, UNREACHABLE};
use crate::error::{Error, Result};
use crate::region::Region;

/// Largest region size accepted by [`min_boundary`] unless overridden.
pub const DEFAULT_SIZE_GUARD: usize = 12;

/// Node budget for one exhaustive minimal-boundary search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 500_000_000;

const SLOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub radius: usize,
    pub volume: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub size: usize,
    pub boundary: usize,
}

/// `|B(v, r)|` for `r = 0..=r_max`.
///
/// Balls that reach past the truncation boundary would undercount, so
/// `r_max` may not exceed the distance from `v` to the boundary.
pub fn growth_profile(trunc: &Truncation, v: VertexId, r_max: usize) -> Result<Vec<GrowthPoint>> {
    trunc.emb.check_vertex(v)?;
    let margin = trunc.margin(v);
    if r_max > margin {
        return Err(Error::WindowInsufficient {
            reason: format!("ball of radius {r_max} around vertex {v} leaves the truncation (margin {margin})"),
            required_radius: r_max,
        });
    }
    let dist = trunc.emb.distances(v);
    let mut counts = vec![0usize; r_max + 1];
    for &d in &dist {
        if d != UNREACHABLE && d <= r_max {
            counts[d] += 1;
        }
    }
    let mut acc = 0;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(radius, c)| {
            acc += c;
            GrowthPoint { radius, volume: acc }
        })
        .collect())
}

/// Least-squares slope of `ln y` against `ln x`; `None` without two distinct abscissae.
fn log_log_slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// `K` in `|B(v, r)| <= K r^D`.
    pub constant: f64,
    /// `D`, always an integer `>= 1`.
    pub exponent: f64,
    /// Raw log-log slope before rounding up.
    pub slope: Option<f64>,
}

/// Fits `|B(v, r)| <= K r^D` on the radii `r >= 1` of the table.
///
/// `D` is the least-squares log-log slope rounded up (at least 1) and `K` the
/// smallest constant covering every point at that exponent.
pub fn fit_growth(table: &[GrowthPoint]) -> Result<GrowthFit> {
    let pts: Vec<_> = table.iter().filter(|p| p.radius >= 1).collect();
    if pts.is_empty() {
        return Err(Error::InvalidParameter("growth table has no radius >= 1".into()));
    }
    let slope = log_log_slope(pts.iter().map(|p| (p.radius as f64, p.volume as f64)));
    let exponent = slope.map_or(1.0, |s| (s - SLOPE_TOL).ceil().max(1.0));
    let constant = pts
        .iter()
        .map(|p| p.volume as f64 / (p.radius as f64).powf(exponent))
        .fold(0.0, f64::max);
    Ok(GrowthFit {
        constant,
        exponent,
        slope,
    })
}

/// Connected region of exactly `size` vertices containing `v` and avoiding the
/// truncation boundary, with the fewest boundary edges.
///
/// Ties go to the lexicographically smallest sorted member list.
pub fn min_boundary(trunc: &Truncation, v: VertexId, size: usize) -> Result<Region> {
    min_boundary_with(trunc, v, size, DEFAULT_SIZE_GUARD, DEFAULT_SEARCH_BUDGET)
}

pub fn min_boundary_with(
    trunc: &Truncation,
    v: VertexId,
    size: usize,
    size_guard: usize,
    budget: u64,
) -> Result<Region> {
    let emb = &trunc.emb;
    emb.check_vertex(v)?;
    if size == 0 {
        return Err(Error::InvalidParameter("region size must be positive".into()));
    }
    if size > size_guard {
        return Err(Error::GuardExceeded {
            explored: 0,
            limit: size_guard as u64,
            context: format!("exhaustive search over regions of size {size}"),
        });
    }
    if trunc.is_boundary(v) {
        return Err(Error::WindowInsufficient {
            reason: format!("vertex {v} lies on the truncation boundary"),
            required_radius: 1,
        });
    }
    let mut search = MinBoundarySearch {
        trunc,
        target: size,
        in_set: vec![false; emb.vertex_count()],
        seen: vec![false; emb.vertex_count()],
        members: Vec::with_capacity(size),
        boundary: 0,
        best: None,
        nodes: 0,
        budget,
    };
    search.seen[v] = true;
    search.run(vec![v])?;
    match search.best {
        Some((_, members)) => Ok(Region::new(emb, members)),
        None => Err(Error::WindowInsufficient {
            reason: format!("no connected region of size {size} around vertex {v} avoids the boundary"),
            required_radius: size,
        }),
    }
}

/// Redelmeier-style enumeration: every connected set containing the root is
/// visited exactly once.
struct MinBoundarySearch<'a> {
    trunc: &'a Truncation,
    target: usize,
    in_set: Vec<bool>,
    seen: Vec<bool>,
    members: Vec<VertexId>,
    boundary: usize,
    best: Option<(usize, Vec<VertexId>)>,
    nodes: u64,
    budget: u64,
}

impl MinBoundarySearch<'_> {
    fn run(&mut self, mut untried: Vec<VertexId>) -> Result<()> {
        let emb = &self.trunc.emb;
        while let Some(u) = untried.pop() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::GuardExceeded {
                    explored: self.nodes,
                    limit: self.budget,
                    context: format!("minimal boundary search at size {}", self.target),
                });
            }
            let inside = emb.neighbors(u).filter(|&w| self.in_set[w]).count();
            let delta_plus = emb.degree(u) - inside;
            self.boundary = self.boundary + delta_plus - inside;
            self.in_set[u] = true;
            self.members.push(u);

            if self.members.len() == self.target {
                self.offer();
            } else {
                let mut next = untried.clone();
                let mut added = Vec::new();
                for w in emb.neighbors(u) {
                    if !self.seen[w] && !self.trunc.is_boundary(w) {
                        self.seen[w] = true;
                        next.push(w);
                        added.push(w);
                    }
                }
                self.run(next)?;
                for w in added {
                    self.seen[w] = false;
                }
            }

            self.members.pop();
            self.in_set[u] = false;
            self.boundary = self.boundary + inside - delta_plus;
        }
        Ok(())
    }

    fn offer(&mut self) {
        let better = match &self.best {
            None => true,
            Some((b, _)) => self.boundary <= *b,
        };
        if !better {
            return;
        }
        let mut sorted = self.members.clone();
        sorted.sort_unstable();
        let replace = match &self.best {
            None => true,
            Some((b, m)) => self.boundary < *b || sorted < *m,
        };
        if replace {
            self.best = Some((self.boundary, sorted));
        }
    }
}

/// `min |∂S|` over connected `S ∋ v` of each size `1..=s_max`.
pub fn isoperimetric_profile(trunc: &Truncation, v: VertexId, s_max: usize) -> Result<Vec<BoundaryPoint>> {
    (1..=s_max)
        .into_par_iter()
        .map(|size| {
            min_boundary(trunc, v, size).map(|r| BoundaryPoint {
                size,
                boundary: r.boundary_len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// Constants are positive and valid on the window.
    Satisfied,
    /// The boundary does not grow with the size: `ε` is zero on the window.
    Fails,
    /// Too few points to fit an exponent.
    InsufficientWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoperimetryFit {
    /// `k` in `|∂S| >= k |S|^ε`.
    pub constant: f64,
    /// `ε`, in `[0, 1]`.
    pub exponent: f64,
    /// Isoperimetric dimension `d` with `ε = (d - 1) / d`; `None` when `ε = 1`.
    pub dimension: Option<u32>,
    pub slope: Option<f64>,
    pub status: HypothesisStatus,
}

/// Fits `|∂S| >= k |S|^ε` to a minimal-boundary table.
///
/// The exponent is read off the log-log slope and floored onto the ladder
/// `ε = (d - 1)/d`, `d = 1, 2, 3, ...` (capped at 1), so that `d` is the
/// isoperimetric dimension seen on the window. `k` is then the smallest
/// ratio `|∂S| / |S|^ε` over the table. A slope below `1/2` gives `d = 1`
/// and `ε = 0`, reported as [`HypothesisStatus::Fails`].
pub fn fit_isoperimetry(table: &[BoundaryPoint]) -> Result<IsoperimetryFit> {
    if table.is_empty() {
        return Err(Error::InvalidParameter("isoperimetric table is empty".into()));
    }
    if table.iter().any(|p| p.size == 0) {
        return Err(Error::InvalidParameter("region sizes must be positive".into()));
    }
    let min_ratio = |eps: f64| {
        table
            .iter()
            .map(|p| p.boundary as f64 / (p.size as f64).powf(eps))
            .fold(f64::INFINITY, f64::min)
    };
    if table.iter().any(|p| p.boundary == 0) {
        return Ok(IsoperimetryFit {
            constant: 0.0,
            exponent: 0.0,
            dimension: Some(1),
            slope: None,
            status: HypothesisStatus::Fails,
        });
    }
    let slope = log_log_slope(table.iter().map(|p| (p.size as f64, p.boundary as f64)));
    let Some(sigma) = slope else {
        return Ok(IsoperimetryFit {
            constant: min_ratio(1.0),
            exponent: 1.0,
            dimension: None,
            slope: None,
            status: HypothesisStatus::InsufficientWindow,
        });
    };
    let (exponent, dimension) = if sigma >= 1.0 - SLOPE_TOL {
        (1.0, None)
    } else {
        let d = ((1.0 / (1.0 - sigma)) + SLOPE_TOL).floor().max(1.0) as u32;
        ((d as f64 - 1.0) / d as f64, Some(d))
    };
    let status = if exponent <= 0.0 {
        HypothesisStatus::Fails
    } else {
        HypothesisStatus::Satisfied
    };
    Ok(IsoperimetryFit {
        constant: min_ratio(exponent),
        exponent,
        dimension,
        slope,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileWindow {
    /// Radii `1..=r_max` certify the growth bound.
    pub r_max: usize,
    /// Sizes `1..=s_max` certify the isoperimetric bound.
    pub s_max: usize,
    /// Every minimal cut-set of length `<= cut_max` encloses a region obeying
    /// the isoperimetric bound. Zero when not certified.
    #[serde(default)]
    pub cut_max: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileTables {
    pub growth: Vec<GrowthPoint>,
    pub isoperimetry: Vec<BoundaryPoint>,
    /// `(cut length, largest enclosed region)` from a cut-set census.
    #[serde(default)]
    pub cuts: Vec<BoundaryPoint>,
}

/// Window-certified constants `(K, D, k, ε)` for one vertex of one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    #[serde(rename = "K")]
    pub volume_constant: f64,
    #[serde(rename = "D")]
    pub volume_exponent: f64,
    #[serde(rename = "k")]
    pub boundary_constant: f64,
    pub epsilon: f64,
    pub dimension: Option<u32>,
    pub status: HypothesisStatus,
    pub vertex: VertexId,
    pub degree: usize,
    pub max_degree: usize,
    pub window: ProfileWindow,
    pub tables: ProfileTables,
}

impl ConstantsProfile {
    /// Constants given directly, e.g. known values for a lattice, with an
    /// explicit claimed window.
    pub fn from_constants(k_volume: f64, d: f64, k_boundary: f64, epsilon: f64, window: ProfileWindow) -> Result<Self> {
        let p = Self {
            volume_constant: k_volume,
            volume_exponent: d,
            boundary_constant: k_boundary,
            epsilon,
            dimension: None,
            status: HypothesisStatus::Satisfied,
            vertex: 0,
            degree: 0,
            max_degree: 0,
            window,
            tables: ProfileTables::default(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks given constants against measured tables at `v` and adopts the
    /// measured window.
    pub fn certify(mut self, trunc: &Truncation, v: VertexId, r_max: usize, s_max: usize) -> Result<Self> {
        let measured = Self::measure(trunc, v, r_max, s_max)?;
        self.vertex = v;
        self.degree = measured.degree;
        self.max_degree = measured.max_degree;
        self.window = measured.window;
        self.tables = measured.tables;
        if !self.holds_on_window() {
            return Err(Error::Inconsistent(format!(
                "K={}, D={}, k={}, epsilon={} do not hold on radii 1..={r_max} and sizes 1..={s_max}",
                self.volume_constant, self.volume_exponent, self.boundary_constant, self.epsilon
            )));
        }
        Ok(self)
    }

    /// Measures growth on radii `0..=r_max` and minimal boundaries on sizes `1..=s_max` at `v`.
    pub fn measure(trunc: &Truncation, v: VertexId, r_max: usize, s_max: usize) -> Result<Self> {
        if r_max == 0 || s_max == 0 {
            return Err(Error::InvalidParameter("r_max and s_max must be positive".into()));
        }
        let growth = growth_profile(trunc, v, r_max)?;
        let iso = isoperimetric_profile(trunc, v, s_max)?;
        let g = fit_growth(&growth)?;
        let i = fit_isoperimetry(&iso)?;
        let status = if iso.len() < 2 {
            HypothesisStatus::InsufficientWindow
        } else {
            i.status
        };
        Ok(Self {
            volume_constant: g.constant,
            volume_exponent: g.exponent,
            boundary_constant: i.constant,
            epsilon: i.exponent,
            dimension: i.dimension,
            status,
            vertex: v,
            degree: trunc.emb.degree(v),
            max_degree: trunc.emb.max_degree(),
            window: ProfileWindow {
                r_max,
                s_max,
                cut_max: 0,
            },
            tables: ProfileTables {
                growth,
                isoperimetry: iso,
                cuts: Vec::new(),
            },
        })
    }

    /// Checks the constants are in their admissible ranges.
    pub fn validate(&self) -> Result<()> {
        let ok = self.volume_constant > 0.0
            && self.volume_exponent >= 1.0
            && self.boundary_constant > 0.0
            && self.epsilon > 0.0
            && self.epsilon <= 1.0
            && [self.volume_constant, self.volume_exponent, self.boundary_constant, self.epsilon]
                .iter()
                .all(|x| x.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "constants out of range: K={}, D={}, k={}, epsilon={}",
                self.volume_constant, self.volume_exponent, self.boundary_constant, self.epsilon
            )))
        }
    }

    /// Refuses to go further when the hypotheses are not met on the window.
    pub fn require_hypotheses(&self) -> Result<()> {
        match self.status {
            HypothesisStatus::Satisfied => self.validate(),
            HypothesisStatus::Fails => Err(Error::HypothesesFail(format!(
                "isoperimetric exponent is {} on sizes 1..={}: boundaries do not grow",
                self.epsilon, self.window.s_max
            ))),
            HypothesisStatus::InsufficientWindow => Err(Error::HypothesesFail(format!(
                "window of {} sizes is too small to fit an isoperimetric exponent",
                self.tables.isoperimetry.len()
            ))),
        }
    }

    /// Whether `|B(v, r)| <= K r^D` and `|∂S| >= k |S|^ε` hold on every table point.
    pub fn holds_on_window(&self) -> bool {
        let tol = 1e-9;
        let growth_ok = self.tables.growth.iter().filter(|p| p.radius >= 1).all(|p| {
            p.volume as f64 <= self.volume_constant * (p.radius as f64).powf(self.volume_exponent) * (1.0 + tol)
        });
        let iso_ok = self
            .tables
            .isoperimetry
            .iter()
            .chain(&self.tables.cuts)
            .all(|p| p.boundary as f64 * (1.0 + tol) >= self.isoperimetric_floor(p.size));
        growth_ok && iso_ok
    }

    /// `k s^ε`, the least boundary a region of `s` vertices may have.
    pub fn isoperimetric_floor(&self, size: usize) -> f64 {
        self.boundary_constant * (size as f64).powf(self.epsilon)
    }

    /// `(n / k)^{1/ε}`, the largest region a boundary of `n` edges can enclose.
    pub fn region_bound(&self, boundary: usize) -> f64 {
        (boundary as f64 / self.boundary_constant).powf(1.0 / self.epsilon)
    }

    /// `K 2^D`, the degree bound implied by growth at radius 2.
    pub fn degree_bound(&self) -> f64 {
        self.volume_constant * 2f64.powf(self.volume_exponent)
    }

    /// Records a cut-length certification: every `(length, region)` pair must
    /// obey the isoperimetric bound.
    pub fn certify_cut_lengths(&mut self, n_max: usize, table: Vec<BoundaryPoint>) -> Result<()> {
        for p in &table {
            if (p.boundary as f64) * (1.0 + 1e-9) < self.isoperimetric_floor(p.size) {
                return Err(Error::Inconsistent(format!(
                    "a cut of length {} encloses {} vertices, violating k={} epsilon={}",
                    p.boundary, p.size, self.boundary_constant, self.epsilon
                )));
            }
        }
        self.window.cut_max = n_max;
        self.tables.cuts = table;
        Ok(())
    }

    /// Isoperimetric dimension implied by `ε = (d - 1)/d`.
    pub fn dimension_from_epsilon(epsilon: f64) -> Option<f64> {
        (epsilon < 1.0).then(|| 1.0 / (1.0 - epsilon))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{grid_ball, Family};

    fn z2(r: usize) -> Truncation {
        Truncation::new(grid_ball(r).unwrap())
    }

    #[test]
    fn grid_growth_counts() {
        // the L1 ball of radius 9 has margin 8 at the origin
        let t = z2(9);
        let table = growth_profile(&t, 0, 8).unwrap();
        for p in &table {
            let r = p.radius;
            assert_eq!(p.volume, 2 * r * r + 2 * r + 1);
        }
        let fit = fit_growth(&table).unwrap();
        assert_eq!(fit.exponent, 2.0);
        assert_eq!(fit.constant, 5.0);
    }

    #[test]
    fn growth_window_must_stay_inside() {
        let t = z2(4);
        assert!(growth_profile(&t, 0, 3).is_ok());
        assert!(matches!(growth_profile(&t, 0, 4), Err(Error::WindowInsufficient { .. })));
    }

    #[test]
    fn path_growth_is_linear() {
        let t = Family::Path.truncation(10).unwrap();
        let table = growth_profile(&t, 10, 6).unwrap();
        assert!(table.iter().all(|p| p.volume == 2 * p.radius + 1));
        let fit = fit_growth(&table).unwrap();
        assert_eq!(fit.exponent, 1.0);
    }

    #[test]
    fn radius_one_is_degree_plus_one() {
        let t = Truncation::new(crate::lattice::triangular_ball(3).unwrap());
        let table = growth_profile(&t, 0, 1).unwrap();
        assert_eq!(table[1].volume, t.emb.degree(0) + 1);
    }

    #[test]
    fn square_tetromino_minimizes() {
        let t = z2(6);
        let r = min_boundary(&t, 0, 4).unwrap();
        assert_eq!(r.boundary_len(), 8);
        assert!(r.connected);
        assert!(r.members.contains(&0));
    }

    #[test]
    fn size_guard_refuses() {
        let t = z2(6);
        assert!(matches!(min_boundary(&t, 0, 13), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn path_boundary_is_constant() {
        let t = Family::Path.truncation(10).unwrap();
        let table = isoperimetric_profile(&t, 10, 6).unwrap();
        assert!(table.iter().all(|p| p.boundary == 2));
        let fit = fit_isoperimetry(&table).unwrap();
        assert_eq!(fit.exponent, 0.0);
        assert_eq!(fit.status, HypothesisStatus::Fails);
    }

    #[test]
    fn single_point_table_is_insufficient() {
        let fit = fit_isoperimetry(&[BoundaryPoint { size: 1, boundary: 4 }]).unwrap();
        assert_eq!(fit.constant, 4.0);
        assert_eq!(fit.status, HypothesisStatus::InsufficientWindow);
        assert!(fit_isoperimetry(&[]).is_err());
    }

    #[test]
    fn epsilon_and_dimension_are_not_conflated() {
        let table: Vec<_> = [4, 6, 8, 8, 10, 10, 12, 12, 12]
            .iter()
            .enumerate()
            .map(|(i, &b)| BoundaryPoint { size: i + 1, boundary: b })
            .collect();
        let fit = fit_isoperimetry(&table).unwrap();
        assert_eq!(fit.exponent, 0.5);
        assert_eq!(fit.dimension, Some(2));
        assert_eq!(ConstantsProfile::dimension_from_epsilon(fit.exponent), Some(2.0));
        assert_eq!(fit.constant, 4.0);
    }
}
