//! Covering-lemma machinery for shift-monotone metrics on the naturals.
//!
//! The lemma: if a metric d on N satisfies d(n+1, m+1) >= d(n, m) and, for
//! some rho > 0 and N, the ball B(0, rho) is infinite and contained in the
//! union of the balls B(k, rho/2) for k <= N, then all of N is covered by
//! the balls B(k, rho) with k <= M for some finite M. The checker follows
//! the constructive recipe (least M > N with d(0, M) <= rho/2) and verifies
//! the cover up to the table horizon.
//!
//! Ball membership uses closed balls (d <= radius) throughout this module.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{Point, Space, TOL_METRIC};
use crate::orbit::Orbit;

/// Direction of the shift monotonicity d(n+1, m+1) vs d(n, m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MonotoneDir {
    /// d(n+1, m+1) >= d(n, m): the covering-lemma hypothesis.
    NonDecreasingShift,
    /// d(n+1, m+1) <= d(n, m): orbits of general nonexpansive maps.
    NonIncreasingShift,
    /// Equality within tolerance: orbits of isometries.
    InvariantShift,
}

enum TableSource {
    OrbitBacked { space: Arc<Space>, points: Vec<Point> },
    Dense { size: usize, entries: Vec<f64> },
}

/// Finite-horizon symmetric distance table on {0, ..., horizon}.
pub struct NatMetric {
    horizon: usize,
    source: TableSource,
    monotone_dir: MonotoneDir,
}

impl NatMetric {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn monotone_dir(&self) -> MonotoneDir {
        self.monotone_dir
    }

    /// d(n, m); symmetric, zero on the diagonal.
    pub fn d(&self, n: usize, m: usize) -> f64 {
        debug_assert!(n <= self.horizon && m <= self.horizon);
        if n == m {
            return 0.0;
        }
        match &self.source {
            TableSource::OrbitBacked { space, points } => {
                space.distance_coords(points[n].coords(), points[m].coords())
            }
            TableSource::Dense { size, entries } => {
                let (lo, hi) = (n.min(m), n.max(m));
                entries[lo * size + hi]
            }
        }
    }
}

/// Outcome of the covering check, serialized by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct CalkaReport {
    pub rho: f64,
    pub ball0_count: usize,
    /// Least prefix bound with B(0, rho) inside the union of rho/2-balls.
    #[serde(rename = "N")]
    pub net_prefix: Option<usize>,
    /// Prefix bound whose rho-balls cover every index up to the horizon.
    #[serde(rename = "M")]
    pub cover_prefix: Option<usize>,
    pub conclusion_verified_to: usize,
}

/// Builds the orbit-induced metric d(n, m) = dist(f^n x0, f^m x0).
///
/// Refuses orbits that revisit a point (the table would only be a
/// pseudo-metric; a finite orbit is compact outright). The injectivity scan
/// exploits shift monotonicity: for a fixed index gap the closest pair is
/// the latest one, so only `horizon` pairs need checking.
pub fn from_orbit(orbit: &Orbit) -> Result<NatMetric> {
    let horizon = orbit.horizon();
    for gap in 1..=horizon {
        if orbit.pair_distance(horizon - gap, horizon) <= TOL_METRIC {
            let first = (0..=(horizon - gap))
                .find(|&n| orbit.pair_distance(n, n + gap) <= TOL_METRIC)
                .unwrap_or(horizon - gap);
            return Err(Error::NotInjective { first, second: first + gap });
        }
    }
    let monotone_dir = if orbit.map().claims_isometry() && shift_equality_holds(orbit) {
        MonotoneDir::InvariantShift
    } else {
        MonotoneDir::NonIncreasingShift
    };
    Ok(NatMetric {
        horizon,
        source: TableSource::OrbitBacked {
            space: orbit.map().space().clone(),
            points: orbit.points().to_vec(),
        },
        monotone_dir,
    })
}

/// Sampled audit that d(n+1, m+1) = d(n, m) within tolerance.
fn shift_equality_holds(orbit: &Orbit) -> bool {
    let horizon = orbit.horizon();
    // All gap pairs anchored at 0 plus a deterministic stride sample.
    for gap in 1..horizon.min(512) {
        let d0 = orbit.pair_distance(0, gap);
        let d1 = orbit.pair_distance(1, gap + 1);
        if (d0 - d1).abs() > TOL_METRIC {
            return false;
        }
    }
    let stride = (horizon / 97).max(1);
    let mut n = 0;
    while n + stride + 1 <= horizon {
        let d0 = orbit.pair_distance(n, n + stride);
        let d1 = orbit.pair_distance(n + 1, n + stride + 1);
        if (d0 - d1).abs() > TOL_METRIC {
            return false;
        }
        n += stride;
    }
    true
}

/// Builds a `NatMetric` from explicit triangular entries (n <= m).
/// Classifies the shift direction by a full scan and spot-checks the
/// triangle inequality.
pub fn from_table(horizon: usize, triples: &[(usize, usize, f64)]) -> Result<NatMetric> {
    let size = horizon + 1;
    let mut entries = vec![f64::NAN; size * size];
    for &(n, m, d) in triples {
        if n > horizon || m > horizon {
            return Err(Error::BadParameter(format!(
                "table entry ({n},{m}) exceeds horizon {horizon}"
            )));
        }
        if n > m {
            return Err(Error::BadParameter(format!(
                "table must be triangular with n <= m, got ({n},{m})"
            )));
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::BadParameter(format!("distance at ({n},{m}) must be >= 0")));
        }
        if n == m && d != 0.0 {
            return Err(Error::BadParameter(format!("d({n},{n}) must be zero")));
        }
        entries[n * size + m] = d;
    }
    for n in 0..size {
        entries[n * size + n] = 0.0;
        for m in (n + 1)..size {
            if entries[n * size + m].is_nan() {
                return Err(Error::BadParameter(format!("missing table entry ({n},{m})")));
            }
        }
    }
    let nm = NatMetric {
        horizon,
        source: TableSource::Dense { size, entries },
        monotone_dir: MonotoneDir::InvariantShift, // provisional
    };
    let mut all_ge = true;
    let mut all_le = true;
    for n in 0..horizon {
        for m in (n + 1)..horizon {
            let delta = nm.d(n + 1, m + 1) - nm.d(n, m);
            if delta < -TOL_METRIC {
                all_ge = false;
            }
            if delta > TOL_METRIC {
                all_le = false;
            }
        }
    }
    let monotone_dir = match (all_ge, all_le) {
        (true, true) => MonotoneDir::InvariantShift,
        (true, false) => MonotoneDir::NonDecreasingShift,
        (false, true) => MonotoneDir::NonIncreasingShift,
        (false, false) => return Err(Error::NotShiftMonotone),
    };
    // Triangle-inequality spot check; exhaustive for small tables.
    let budget = 200_000usize;
    let full = size * size * size;
    if full <= budget {
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    if nm.d(a, c) > nm.d(a, b) + nm.d(b, c) + TOL_METRIC {
                        return Err(Error::BadParameter(format!(
                            "triangle inequality fails on ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
    } else {
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = |bound: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as usize) % bound
        };
        for _ in 0..budget {
            let (a, b, c) = (next(size), next(size), next(size));
            if nm.d(a, c) > nm.d(a, b) + nm.d(b, c) + TOL_METRIC {
                return Err(Error::BadParameter(format!(
                    "triangle inequality fails on ({a},{b},{c})"
                )));
            }
        }
    }
    Ok(NatMetric { monotone_dir, ..nm })
}

fn require_hypothesis_direction(nm: &NatMetric) -> Result<()> {
    if nm.monotone_dir == MonotoneDir::NonIncreasingShift {
        return Err(Error::WrongMonotonicity(
            "the lemma needs d(n+1,m+1) >= d(n,m); a non-increasing shift table is the \
             orbit of a general nonexpansive map, where the hypothesis fails"
                .into(),
        ));
    }
    Ok(())
}

/// Counts B(0, rho) within the horizon and, if it has at least
/// `min_ball_count` members, finds the least prefix bound whose rho/2-balls
/// absorb it. Returns `(bound, ball0_count)`; the bound is absent when the
/// ball is too small to witness the "infinite ball" hypothesis.
pub fn check_hypothesis(
    nm: &NatMetric,
    rho: f64,
    min_ball_count: usize,
) -> Result<(Option<usize>, usize)> {
    require_hypothesis_direction(nm)?;
    if rho <= 0.0 {
        return Err(Error::BadParameter("rho must be positive".into()));
    }
    if min_ball_count == 0 {
        return Err(Error::BadParameter("min_ball_count must be positive".into()));
    }
    let members: Vec<usize> = (0..=nm.horizon()).filter(|&k| nm.d(k, 0) <= rho).collect();
    let count = members.len();
    if count < min_ball_count {
        return Ok((None, count));
    }
    let half = rho / 2.0;
    let mut bound = 0usize;
    for &m in &members {
        // d(m, m) = 0, so the scan always terminates by j = m.
        let j = (0..=m).find(|&j| nm.d(m, j) <= half).unwrap();
        bound = bound.max(j);
    }
    Ok((Some(bound), count))
}

/// Follows the constructive proof of the lemma: picks the least M > N with
/// d(0, M) <= rho/2, then verifies that every index up to the horizon lies
/// within rho of some index <= M. A verified cover is the lemma's
/// conclusion at finite horizon; an uncovered index is a `CoverFailure`.
pub fn find_covering_m(nm: &NatMetric, rho: f64, net_prefix: usize) -> Result<CalkaReport> {
    require_hypothesis_direction(nm)?;
    if rho <= 0.0 {
        return Err(Error::BadParameter("rho must be positive".into()));
    }
    let half = rho / 2.0;
    let ball0_count = (0..=nm.horizon()).filter(|&k| nm.d(k, 0) <= rho).count();
    let cover_prefix = ((net_prefix + 1)..=nm.horizon()).find(|&m| nm.d(0, m) <= half);
    let Some(m_bound) = cover_prefix else {
        return Ok(CalkaReport {
            rho,
            ball0_count,
            net_prefix: Some(net_prefix),
            cover_prefix: None,
            conclusion_verified_to: 0,
        });
    };
    for n in 0..=nm.horizon() {
        let covered = (0..=m_bound).any(|k| nm.d(n, k) <= rho);
        if !covered {
            return Err(Error::CoverFailure { uncovered: n });
        }
    }
    Ok(CalkaReport {
        rho,
        ball0_count,
        net_prefix: Some(net_prefix),
        cover_prefix: Some(m_bound),
        conclusion_verified_to: nm.horizon(),
    })
}

/// Checks the proof's inner lemma on one admissible triple n < nu < m:
/// if nu is outside every rho-ball around indices <= n while m is within
/// rho of n, then nu < m - n and d(m-n, 0) <= d(m, n) <= rho.
pub fn sublemma_check(
    nm: &NatMetric,
    n: usize,
    nu: usize,
    m: usize,
    rho: f64,
) -> Result<bool> {
    require_hypothesis_direction(nm)?;
    if !(n < nu && nu < m && m <= nm.horizon()) {
        return Err(Error::PreconditionUnmet(format!(
            "indices must satisfy n < nu < m <= horizon, got ({n},{nu},{m})"
        )));
    }
    if nm.d(m, n) > rho {
        return Err(Error::PreconditionUnmet(format!(
            "m must lie in the rho-ball around n: d({m},{n}) = {} > {rho}",
            nm.d(m, n)
        )));
    }
    if let Some(k) = (0..=n).find(|&k| nm.d(nu, k) <= rho) {
        return Err(Error::PreconditionUnmet(format!(
            "nu must avoid every rho-ball with center <= n, but d({nu},{k}) = {} <= {rho}",
            nm.d(nu, k)
        )));
    }
    let index_conclusion = nu < m - n;
    let distance_conclusion = nm.d(m - n, 0) <= nm.d(m, n) + TOL_METRIC;
    Ok(index_conclusion && distance_conclusion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_map, MapSpec};
    use crate::metric::{make_space, SpaceSpec};
    use crate::orbit::compute_orbit;
    use std::sync::Arc;

    fn golden_orbit(horizon: usize) -> Orbit {
        let s = Arc::new(make_space(&SpaceSpec::new("circle")).unwrap());
        let theta = std::f64::consts::TAU * (5.0_f64.sqrt() - 1.0) / 2.0;
        let map =
            make_map(&MapSpec::new("rotation", serde_json::json!({"theta": theta})), &s).unwrap();
        let start = s.point(&[1.0, 0.0]).unwrap();
        compute_orbit(&map, &start, horizon).unwrap()
    }

    fn capped_metric(horizon: usize) -> NatMetric {
        let mut triples = Vec::new();
        for n in 0..=horizon {
            for m in n..=horizon {
                let d = ((m - n) as f64).min(1.0);
                triples.push((n, m, d));
            }
        }
        from_table(horizon, &triples).unwrap()
    }

    fn line_metric(horizon: usize) -> NatMetric {
        let mut triples = Vec::new();
        for n in 0..=horizon {
            for m in n..=horizon {
                triples.push((n, m, (m - n) as f64));
            }
        }
        from_table(horizon, &triples).unwrap()
    }

    #[test]
    fn golden_orbit_gives_an_invariant_shift_table() {
        let orbit = golden_orbit(500);
        let nm = from_orbit(&orbit).unwrap();
        assert_eq!(nm.monotone_dir(), MonotoneDir::InvariantShift);
        // Full-table oracle over the small horizon.
        for n in 0..nm.horizon() {
            for m in (n + 1)..nm.horizon() {
                assert!((nm.d(n + 1, m + 1) - nm.d(n, m)).abs() <= TOL_METRIC);
            }
        }
    }

    #[test]
    fn contracting_orbit_gives_a_non_increasing_table() {
        let s = Arc::new(make_space(&SpaceSpec::with_dim("euclidean", 1)).unwrap());
        let map = make_map(&MapSpec::new("scale", serde_json::json!({"c": 0.5})), &s).unwrap();
        let start = s.point(&[1.0]).unwrap();
        // Past ~30 halvings the tail collapses below the injectivity
        // tolerance, so keep the horizon short of that.
        let orbit = compute_orbit(&map, &start, 25).unwrap();
        let nm = from_orbit(&orbit).unwrap();
        assert_eq!(nm.monotone_dir(), MonotoneDir::NonIncreasingShift);
        assert!(matches!(
            check_hypothesis(&nm, 0.5, 1),
            Err(Error::WrongMonotonicity(_))
        ));
    }

    #[test]
    fn collapsed_tail_is_reported_as_a_collision() {
        let s = Arc::new(make_space(&SpaceSpec::with_dim("euclidean", 1)).unwrap());
        let map = make_map(&MapSpec::new("scale", serde_json::json!({"c": 0.5})), &s).unwrap();
        let start = s.point(&[1.0]).unwrap();
        let orbit = compute_orbit(&map, &start, 60).unwrap();
        assert!(matches!(from_orbit(&orbit), Err(Error::NotInjective { .. })));
    }

    #[test]
    fn periodic_orbit_is_rejected_as_non_injective() {
        let s = Arc::new(make_space(&SpaceSpec::new("circle")).unwrap());
        let theta = std::f64::consts::TAU / 5.0;
        let map =
            make_map(&MapSpec::new("rotation", serde_json::json!({"theta": theta})), &s).unwrap();
        let start = s.point(&[1.0, 0.0]).unwrap();
        let orbit = compute_orbit(&map, &start, 30).unwrap();
        match from_orbit(&orbit) {
            Err(Error::NotInjective { first, second }) => {
                assert_eq!((first, second), (0, 5));
            }
            Err(other) => panic!("expected NotInjective, got {other:?}"),
            Ok(_) => panic!("expected NotInjective, got a table"),
        }
    }

    #[test]
    fn line_metric_ball_is_finite_so_no_bound_is_returned() {
        let nm = line_metric(100);
        assert_eq!(nm.monotone_dir(), MonotoneDir::InvariantShift);
        let (bound, count) = check_hypothesis(&nm, 0.5, 50).unwrap();
        assert_eq!(count, 1);
        assert!(bound.is_none());
    }

    #[test]
    fn capped_metric_covers_immediately() {
        let nm = capped_metric(200);
        assert_eq!(nm.monotone_dir(), MonotoneDir::InvariantShift);
        let (bound, count) = check_hypothesis(&nm, 2.0, 50).unwrap();
        assert_eq!(count, 201);
        assert_eq!(bound, Some(0));
        let report = find_covering_m(&nm, 2.0, 0).unwrap();
        assert_eq!(report.cover_prefix, Some(1));
        assert_eq!(report.conclusion_verified_to, 200);
    }

    #[test]
    fn golden_rotation_hypothesis_and_cover_regression() {
        let orbit = golden_orbit(10_000);
        let nm = from_orbit(&orbit).unwrap();
        let (bound, count) = check_hypothesis(&nm, 0.5, 50).unwrap();
        assert_eq!(count, 1609);
        assert_eq!(bound, Some(13));
        let report = find_covering_m(&nm, 0.5, 13).unwrap();
        assert_eq!(report.cover_prefix, Some(21));
        assert_eq!(report.conclusion_verified_to, 10_000);

        let (bound_q, count_q) = check_hypothesis(&nm, 0.25, 50).unwrap();
        assert_eq!(count_q, 799);
        assert_eq!(bound_q, Some(21));
        let report_q = find_covering_m(&nm, 0.25, 21).unwrap();
        assert_eq!(report_q.cover_prefix, Some(34));
        assert_eq!(report_q.conclusion_verified_to, 10_000);
    }

    #[test]
    fn sublemma_conclusions_hold_exhaustively_on_the_golden_table() {
        let orbit = golden_orbit(500);
        let nm = from_orbit(&orbit).unwrap();
        let rho = 0.5;
        let horizon = nm.horizon();
        // Prefix minima let admissibility be tested in O(1) per triple.
        let mut checked = 0usize;
        for nu in 1..horizon {
            let mut min_prefix = f64::INFINITY;
            for n in 0..nu {
                min_prefix = min_prefix.min(nm.d(nu, n));
                if min_prefix <= rho {
                    break; // nu in E(n, rho) from here on: inadmissible
                }
                for m in (nu + 1)..=horizon {
                    if nm.d(m, n) <= rho {
                        assert!(
                            sublemma_check(&nm, n, nu, m, rho).unwrap(),
                            "sublemma failed at ({n},{nu},{m})"
                        );
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 0, "the scan must exercise admissible triples");
    }

    #[test]
    fn sublemma_rejects_inadmissible_triples() {
        let nm = capped_metric(50);
        // nu = n + 1 lies within rho of n for rho >= 1, so admissibility fails.
        assert!(matches!(
            sublemma_check(&nm, 0, 1, 2, 1.0),
            Err(Error::PreconditionUnmet(_))
        ));
    }

    #[test]
    fn table_rejects_non_monotone_input() {
        // d(0,1) = 2 but d(1,2) = 1 and d(2,3) = 3: mixed shift directions.
        let triples = vec![
            (0, 0, 0.0),
            (1, 1, 0.0),
            (2, 2, 0.0),
            (3, 3, 0.0),
            (0, 1, 2.0),
            (0, 2, 2.5),
            (0, 3, 3.0),
            (1, 2, 1.0),
            (1, 3, 2.5),
            (2, 3, 3.0),
        ];
        assert!(matches!(from_table(3, &triples), Err(Error::NotShiftMonotone)));
    }
}
