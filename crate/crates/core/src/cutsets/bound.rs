//! The cut-set counting bound `K²(2n/k)^{D/ε} p(n−1)` and the Peierls threshold.

use serde::{Deserialize, Serialize};

use super::CutsetCensus;
use crate::error::{Error, Result};
use crate::paths::{BoundConstant, PathCountTable};
use crate::profiles::{ConstantsProfile, HypothesisStatus};

/// Where `p(n)` comes from: exact counts where available, else `exp(C n)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct PathData<'a> {
    pub table: Option<&'a PathCountTable>,
    pub constant: Option<&'a BoundConstant>,
}

impl PathData<'_> {
    /// `p(n)`, with `p(0) = 1`.
    pub fn p(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Ok(1.0);
        }
        if let Some(v) = self.table.and_then(|t| t.get(n)) {
            return Ok(v as f64);
        }
        match self.constant {
            Some(c) => Ok(c.path_bound(n)),
            None => Err(Error::InvalidParameter(format!(
                "no path count for length {n} and no bound constant"
            ))),
        }
    }
}

/// `K²(2n/k)^{D/ε} p(n−1)`.
pub fn peierls_count_bound(c: &ConstantsProfile, paths: &PathData<'_>, n: usize) -> Result<f64> {
    c.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("cut-set size must be positive".into()));
    }
    let edges_near = c.volume_constant.powi(2)
        * (2.0 * n as f64 / c.boundary_constant).powf(c.volume_exponent / c.epsilon);
    Ok(edges_near * paths.p(n - 1)?)
}

/// `(A, C)` with `K²(2n/k)^{a} exp(C_b (n−1)) <= A Cⁿ` for all `n >= 1`, where
/// `a = D/ε` and `C_b` is the path bound constant.
///
/// Uses `n^a <= (a/e)^a eⁿ`.
pub fn geometric_constants(c: &ConstantsProfile, b: &BoundConstant) -> (f64, f64) {
    let a = c.volume_exponent / c.epsilon;
    let e = std::f64::consts::E;
    let amplitude = c.volume_constant.powi(2) * (2.0 / c.boundary_constant).powf(a) * (a / e).powf(a) * (-b.c).exp();
    (amplitude, (b.c + 1.0).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdInput {
    /// `N(n) <= A Cⁿ` for `n >= n0`.
    Geometric { a: f64, c: f64, n0: usize },
    /// Exact counts `N(n)` for `n <= counts.len() - 1`, then `A Cⁿ` beyond.
    CensusTail { counts: Vec<u64>, a: f64, c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// `1 − p_star`, the root of the closed-cut-set expectation.
    pub x: f64,
    pub p_star: f64,
}

/// `p_star = 1 − x`, where `x` makes the expected number of closed cut-sets
/// around `v` equal to one. Every `p > p_star` percolates.
pub fn peierls_threshold(input: &ThresholdInput) -> Result<Threshold> {
    let (a, c) = match input {
        ThresholdInput::Geometric { a, c, .. } | ThresholdInput::CensusTail { a, c, .. } => (*a, *c),
    };
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("growth rate C must be positive, got {c}")));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("amplitude A must be positive, got {a}")));
    }
    let expected = |x: f64| -> f64 {
        let cx = c * x;
        if cx >= 1.0 {
            return f64::INFINITY;
        }
        match input {
            ThresholdInput::Geometric { n0, .. } => a * cx.powi(*n0 as i32) / (1.0 - cx),
            ThresholdInput::CensusTail { counts, .. } => {
                let exact: f64 = counts
                    .iter()
                    .enumerate()
                    .map(|(n, &k)| k as f64 * x.powi(n as i32))
                    .sum();
                exact + a * cx.powi(counts.len() as i32) / (1.0 - cx)
            }
        }
    };
    if let ThresholdInput::Geometric { n0, .. } = input {
        if *n0 == 0 {
            return Err(Error::InvalidParameter("n0 must be positive".into()));
        }
    }
    let hi_limit = (1.0 / c).min(1.0);
    if expected(hi_limit) < 1.0 {
        return Ok(Threshold { x: hi_limit, p_star: 1.0 - hi_limit });
    }
    let (mut lo, mut hi) = (0.0f64, hi_limit);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Threshold { x: lo, p_star: 1.0 - lo })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: usize,
    pub bound: f64,
    pub census: Option<u64>,
    pub holds: Option<bool>,
}

/// Where the threshold series starts: the smaller of the degree of `v` and
/// the smallest cut-set in the census, and at least 1.
pub fn series_start(constants: &ConstantsProfile, census: Option<&CutsetCensus>) -> usize {
    let degree = (constants.degree > 0).then_some(constants.degree);
    let smallest = census.and_then(|c| c.first_nonzero());
    match (degree, smallest) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => 1,
    }
    .max(1)
}

/// The whole chain from constants to `p_star`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeierlsBound {
    pub status: HypothesisStatus,
    pub constants: ConstantsProfile,
    pub bound_constant: BoundConstant,
    /// Amplitude `A` of `N(n) <= A Cⁿ`.
    pub amplitude: f64,
    /// Growth rate `C` of `N(n) <= A Cⁿ`.
    pub growth_rate: f64,
    pub n0: usize,
    pub rows: Vec<BoundRow>,
    pub p_star: f64,
}

/// Evaluates the counting bound for `n = 1..=n_rows`, checks it against a
/// census if given, and solves for `p_star` from `n0`.
///
/// Refuses when the constants do not satisfy the hypotheses on their window.
pub fn peierls_pipeline(
    constants: &ConstantsProfile,
    paths: &PathData<'_>,
    census: Option<&CutsetCensus>,
    n0: usize,
    n_rows: usize,
    horizon: usize,
) -> Result<PeierlsBound> {
    constants.require_hypotheses()?;
    let bc = crate::paths::bound_constant(constants, horizon)?;
    let with_constant = PathData {
        table: paths.table,
        constant: Some(&bc),
    };
    let n_rows = n_rows.max(census.map_or(0, |c| c.n_max));
    let mut rows = Vec::with_capacity(n_rows);
    for n in 1..=n_rows {
        let bound = peierls_count_bound(constants, &with_constant, n)?;
        let count = census.filter(|c| n <= c.n_max).map(|c| c.count(n));
        rows.push(BoundRow {
            n,
            bound,
            census: count,
            holds: count.map(|k| k as f64 <= bound),
        });
    }
    if let Some(row) = rows.iter().find(|r| r.holds == Some(false)) {
        return Err(Error::Inconsistent(format!(
            "{} cut-sets of size {} exceed the bound {:.6e}",
            row.census.unwrap_or(0),
            row.n,
            row.bound
        )));
    }
    let (amplitude, growth_rate) = geometric_constants(constants, &bc);
    let t = peierls_threshold(&ThresholdInput::Geometric {
        a: amplitude,
        c: growth_rate,
        n0,
    })?;
    Ok(PeierlsBound {
        status: constants.status,
        constants: constants.clone(),
        bound_constant: bc,
        amplitude,
        growth_rate,
        n0,
        rows,
        p_star: t.p_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{bound_constant, PathMax};
    use crate::profiles::ProfileWindow;
    use proptest::prelude::*;

    fn z2() -> ConstantsProfile {
        ConstantsProfile::from_constants(5.0, 2.0, 4.0, 0.5, ProfileWindow { r_max: 16, s_max: 9, cut_max: 16 }).unwrap()
    }

    fn geo(a: f64, c: f64, n0: usize) -> f64 {
        peierls_threshold(&ThresholdInput::Geometric { a, c, n0 }).unwrap().p_star
    }

    #[test]
    fn geometric_examples() {
        assert!((geo(1.0, 2.0, 1) - 0.75).abs() < 1e-12);
        assert!((geo(1.0, 1.0, 1) - 0.5).abs() < 1e-12);
        assert!(peierls_threshold(&ThresholdInput::Geometric { a: 1.0, c: 0.0, n0: 1 }).is_err());
        assert!(peierls_threshold(&ThresholdInput::Geometric { a: 1.0, c: -1.0, n0: 1 }).is_err());
    }

    #[test]
    fn census_tail_with_no_exact_terms_is_geometric() {
        let t = peierls_threshold(&ThresholdInput::CensusTail { counts: vec![0], a: 1.0, c: 2.0 }).unwrap();
        assert!((t.p_star - 0.75).abs() < 1e-12);
    }

    #[test]
    fn count_bound_at_small_n() {
        let c = z2();
        let none = PathData::default();
        // K²(2/k)^{D/ε} p(0) = 25 / 16
        assert!((peierls_count_bound(&c, &none, 1).unwrap() - 25.0 / 16.0).abs() < 1e-12);
        assert!(peierls_count_bound(&c, &none, 4).is_err());
        let table = PathCountTable {
            entries: vec![PathMax { n: 3, value: 7, pair: Some((0, 1)) }],
        };
        let paths = PathData { table: Some(&table), constant: None };
        assert!((peierls_count_bound(&c, &paths, 4).unwrap() - 400.0 * 7.0).abs() < 1e-9);
    }

    #[test]
    fn geometric_constants_dominate_the_bound() {
        let c = z2();
        let b = bound_constant(&c, 40).unwrap();
        let (a, g) = geometric_constants(&c, &b);
        let paths = PathData { table: None, constant: Some(&b) };
        for n in 1..60 {
            let bound = peierls_count_bound(&c, &paths, n).unwrap();
            assert!(bound <= a * g.powi(n as i32) * (1.0 + 1e-9), "n={n}");
        }
    }

    #[test]
    fn z2_pipeline_gives_p_star_below_one() {
        let b = peierls_pipeline(&z2(), &PathData::default(), None, 4, 8, 40).unwrap();
        assert!(b.p_star < 1.0 && b.p_star > 0.5);
    }

    #[test]
    fn failing_hypotheses_are_refused() {
        let mut c = z2();
        c.status = HypothesisStatus::Fails;
        assert!(matches!(
            peierls_pipeline(&c, &PathData::default(), None, 2, 4, 20),
            Err(Error::HypothesesFail(_))
        ));
    }

    proptest! {
        #[test]
        fn threshold_monotone(a in 0.01f64..10.0, c in 0.5f64..50.0, n0 in 1usize..8, da in 0.01f64..5.0, dc in 0.01f64..5.0) {
            let p = geo(a, c, n0);
            prop_assert!(p < 1.0);
            prop_assert!(geo(a + da, c, n0) >= p);
            prop_assert!(geo(a, c + dc, n0) > p);
            prop_assert!(geo(a, c, n0 + 1) <= p);
        }
    }
}
