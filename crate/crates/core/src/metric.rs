//! Metric-space abstraction and the catalog of model spaces.
//!
//! A [`Space`] bundles a distance oracle, a base point, a properness policy
//! and a seeded sampler. Points are plain coordinate vectors tagged with the
//! space they belong to; all catalog spaces are proper (closed bounded balls
//! are compact), which is the operational stand-in for local compactness used
//! throughout the crate.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for metric-axiom audits and exactness checks on distances.
pub const TOL_METRIC: f64 = 1e-9;

/// Identifier of the owning space, carried by every point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpaceTag(Arc<str>);

impl fmt::Debug for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of a [`Space`]: finite real coordinates plus the owner tag.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
    tag: SpaceTag,
}

impl Point {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn tag(&self) -> &SpaceTag {
        &self.tag
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.tag.0, self.coords)
    }
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(serializer)
    }
}

/// Geometry selector for the distance oracle.
#[derive(Clone, Debug)]
pub enum SpaceKind {
    /// R^n with the L2 distance.
    Euclidean,
    /// Z^n with the L1 distance; coordinates must be integers.
    IntegerLattice,
    /// Unit circle in R^2 with chordal (Euclidean) distance.
    Circle,
    /// Open unit disk with the hyperbolic distance.
    PoincareDisk,
    /// Product of unit disks; max of per-factor hyperbolic distances.
    Polydisc { factors: usize },
    /// [0, inf) with the absolute difference.
    HalfLine,
    /// Finite product of catalog spaces with the max metric.
    Product { factors: Vec<Space> },
}

/// A proper metric space from the catalog.
#[derive(Clone, Debug)]
pub struct Space {
    name: String,
    kind: SpaceKind,
    dimension: usize,
    base_coords: Vec<f64>,
    properness_radius: Option<f64>,
    tag: SpaceTag,
}

/// JSON description of a catalog space. Part of the CLI contract.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpaceSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

impl SpaceSpec {
    pub fn new(name: &str) -> Self {
        SpaceSpec { name: name.to_string(), dim: None, params: None }
    }

    pub fn with_dim(name: &str, dim: usize) -> Self {
        SpaceSpec { name: name.to_string(), dim: Some(dim), params: None }
    }
}

/// A finite union of open balls with one shared radius.
#[derive(Clone, Debug)]
pub struct BallCover {
    pub centers: Vec<Point>,
    pub radius: f64,
}

/// Builds a catalog space from its JSON spec.
pub fn make_space(spec: &SpaceSpec) -> Result<Space> {
    let dim = spec.dim;
    match spec.name.as_str() {
        "euclidean" => {
            let d = require_dim(dim)?;
            Ok(Space::raw(
                format!("euclidean({d})"),
                SpaceKind::Euclidean,
                d,
                vec![0.0; d],
                None,
            ))
        }
        "integer-lattice" => {
            let d = require_dim(dim)?;
            Ok(Space::raw(
                format!("integer-lattice({d})"),
                SpaceKind::IntegerLattice,
                d,
                vec![0.0; d],
                None,
            ))
        }
        "circle" => Ok(Space::raw(
            "circle".to_string(),
            SpaceKind::Circle,
            2,
            vec![1.0, 0.0],
            None,
        )),
        "poincare-disk" => Ok(Space::raw(
            "poincare-disk".to_string(),
            SpaceKind::PoincareDisk,
            2,
            vec![0.0, 0.0],
            None,
        )),
        "polydisc" => {
            let n = require_dim(dim)?;
            Ok(Space::raw(
                format!("polydisc({n})"),
                SpaceKind::Polydisc { factors: n },
                2 * n,
                vec![0.0; 2 * n],
                None,
            ))
        }
        "half-line" => Ok(Space::raw(
            "half-line".to_string(),
            SpaceKind::HalfLine,
            1,
            vec![0.0],
            None,
        )),
        "product" => {
            let params = spec
                .params
                .as_ref()
                .ok_or_else(|| Error::BadParameter("product space needs params.factors".into()))?;
            let factors_val = params
                .get("factors")
                .ok_or_else(|| Error::BadParameter("product space needs params.factors".into()))?;
            let factor_specs: Vec<SpaceSpec> = serde_json::from_value(factors_val.clone())
                .map_err(|e| Error::BadParameter(format!("invalid product factors: {e}")))?;
            if factor_specs.len() < 2 {
                return Err(Error::BadParameter("product space needs >= 2 factors".into()));
            }
            let factors = factor_specs.iter().map(make_space).collect::<Result<Vec<_>>>()?;
            let dimension = factors.iter().map(|s| s.dimension).sum();
            let base: Vec<f64> = factors.iter().flat_map(|s| s.base_coords.clone()).collect();
            let name = format!(
                "product({})",
                factors.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(",")
            );
            Ok(Space::raw(name, SpaceKind::Product { factors }, dimension, base, None))
        }
        other => Err(Error::UnknownSpace(other.to_string())),
    }
}

fn require_dim(dim: Option<usize>) -> Result<usize> {
    match dim {
        Some(d) if d >= 1 => Ok(d),
        Some(d) => Err(Error::BadParameter(format!("dimension must be positive, got {d}"))),
        None => Err(Error::BadParameter("missing dimension".into())),
    }
}

impl Space {
    fn raw(
        name: String,
        kind: SpaceKind,
        dimension: usize,
        base_coords: Vec<f64>,
        properness_radius: Option<f64>,
    ) -> Space {
        let tag = SpaceTag(Arc::from(name.as_str()));
        Space { name, kind, dimension, base_coords, properness_radius, tag }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tag(&self) -> &SpaceTag {
        &self.tag
    }

    /// Radius up to which closed balls are guaranteed compact; `None` means
    /// unbounded (every catalog space is globally proper).
    pub fn properness_radius(&self) -> Option<f64> {
        self.properness_radius
    }

    pub fn base_point(&self) -> Point {
        Point { coords: self.base_coords.clone(), tag: self.tag.clone() }
    }

    /// Validates raw coordinates and wraps them into a point of this space.
    pub fn point(&self, coords: &[f64]) -> Result<Point> {
        self.validate_coords(coords)?;
        Ok(Point { coords: coords.to_vec(), tag: self.tag.clone() })
    }

    pub(crate) fn point_unchecked(&self, coords: Vec<f64>) -> Point {
        Point { coords, tag: self.tag.clone() }
    }

    pub fn validate_coords(&self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dimension {
            return Err(Error::BadPoint {
                space: self.name.clone(),
                reason: format!("expected {} coordinates, got {}", self.dimension, coords.len()),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::BadPoint {
                space: self.name.clone(),
                reason: "coordinates must be finite".into(),
            });
        }
        match &self.kind {
            SpaceKind::Euclidean => Ok(()),
            SpaceKind::IntegerLattice => {
                if coords.iter().any(|c| c.fract() != 0.0) {
                    return Err(Error::BadPoint {
                        space: self.name.clone(),
                        reason: "lattice coordinates must be integers".into(),
                    });
                }
                Ok(())
            }
            SpaceKind::Circle => {
                let norm2 = coords[0] * coords[0] + coords[1] * coords[1];
                if (norm2 - 1.0).abs() > 1e-8 {
                    return Err(Error::BadPoint {
                        space: self.name.clone(),
                        reason: format!("point is off the unit circle: |p|^2 = {norm2}"),
                    });
                }
                Ok(())
            }
            SpaceKind::PoincareDisk => {
                let norm2 = coords[0] * coords[0] + coords[1] * coords[1];
                if norm2 >= 1.0 {
                    return Err(Error::BadPoint {
                        space: self.name.clone(),
                        reason: format!("point is outside the open unit disk: |p|^2 = {norm2}"),
                    });
                }
                Ok(())
            }
            SpaceKind::Polydisc { factors } => {
                for j in 0..*factors {
                    let (re, im) = (coords[2 * j], coords[2 * j + 1]);
                    if re * re + im * im >= 1.0 {
                        return Err(Error::BadPoint {
                            space: self.name.clone(),
                            reason: format!("factor {j} is outside the open unit disk"),
                        });
                    }
                }
                Ok(())
            }
            SpaceKind::HalfLine => {
                if coords[0] < 0.0 {
                    return Err(Error::BadPoint {
                        space: self.name.clone(),
                        reason: format!("half-line coordinate is negative: {}", coords[0]),
                    });
                }
                Ok(())
            }
            SpaceKind::Product { factors } => {
                let mut offset = 0;
                for f in factors {
                    f.validate_coords(&coords[offset..offset + f.dimension])?;
                    offset += f.dimension;
                }
                Ok(())
            }
        }
    }

    fn check_owned(&self, p: &Point) -> Result<()> {
        if p.tag != self.tag {
            return Err(Error::SpaceMismatch {
                left: self.tag.to_string(),
                right: p.tag.to_string(),
            });
        }
        Ok(())
    }

    /// Distance oracle of the space.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        Ok(self.distance_coords(&a.coords, &b.coords))
    }

    pub(crate) fn distance_coords(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::Euclidean | SpaceKind::Circle => euclidean(a, b),
            SpaceKind::IntegerLattice => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            SpaceKind::PoincareDisk => {
                poincare_distance_coords(Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))
            }
            SpaceKind::Polydisc { factors } => {
                let mut max = 0.0_f64;
                for j in 0..*factors {
                    let z = Complex64::new(a[2 * j], a[2 * j + 1]);
                    let w = Complex64::new(b[2 * j], b[2 * j + 1]);
                    max = max.max(poincare_distance_coords(z, w));
                }
                max
            }
            SpaceKind::HalfLine => (a[0] - b[0]).abs(),
            SpaceKind::Product { factors } => {
                let mut max = 0.0_f64;
                let mut offset = 0;
                for f in factors {
                    let d = f.distance_coords(
                        &a[offset..offset + f.dimension],
                        &b[offset..offset + f.dimension],
                    );
                    max = max.max(d);
                    offset += f.dimension;
                }
                max
            }
        }
    }

    /// Seeded sampler; the same seed and count always yield the same points.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_one(&mut rng)).collect()
    }

    fn sample_one(&self, rng: &mut ChaCha8Rng) -> Point {
        let coords = self.sample_coords(rng);
        Point { coords, tag: self.tag.clone() }
    }

    fn sample_coords(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match &self.kind {
            SpaceKind::Euclidean => (0..self.dimension).map(|_| rng.gen_range(-5.0..5.0)).collect(),
            SpaceKind::IntegerLattice => {
                (0..self.dimension).map(|_| rng.gen_range(-20_i64..=20) as f64).collect()
            }
            SpaceKind::Circle => {
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                vec![t.cos(), t.sin()]
            }
            SpaceKind::PoincareDisk => sample_disk(rng),
            SpaceKind::Polydisc { factors } => {
                (0..*factors).flat_map(|_| sample_disk(rng)).collect()
            }
            SpaceKind::HalfLine => vec![rng.gen_range(0.0..10.0)],
            SpaceKind::Product { factors } => {
                factors.iter().flat_map(|f| f.sample_coords(rng)).collect()
            }
        }
    }

    /// Seeded sampler restricted to the closed ball around `center`.
    /// Rejection-samples local perturbations of the center.
    pub fn sample_in_ball(
        &self,
        center: &Point,
        radius: f64,
        seed: u64,
        count: usize,
    ) -> Result<Vec<Point>> {
        self.check_owned(center)?;
        if radius <= 0.0 {
            return Err(Error::BadParameter("ball radius must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > count * 10_000 {
                return Err(Error::BudgetExceeded(format!(
                    "ball sampler stalled after {attempts} attempts"
                )));
            }
            let mut coords = center.coords.clone();
            // Perturbation scale shrinks on failure streaks so small balls fill up.
            let scale = radius * rng.gen_range(0.05..1.0);
            for c in coords.iter_mut() {
                *c += rng.gen_range(-scale..scale);
            }
            self.project_coords(&mut coords);
            if self.validate_coords(&coords).is_err() {
                continue;
            }
            if self.distance_coords(&coords, &center.coords) <= radius {
                out.push(Point { coords, tag: self.tag.clone() });
            }
        }
        Ok(out)
    }

    /// Snaps raw coordinates onto the space (used by local inverse searches).
    pub(crate) fn project_coords(&self, coords: &mut [f64]) {
        match &self.kind {
            SpaceKind::Euclidean => {}
            SpaceKind::IntegerLattice => {
                for c in coords.iter_mut() {
                    *c = c.round();
                }
            }
            SpaceKind::Circle => {
                let norm = (coords[0] * coords[0] + coords[1] * coords[1]).sqrt();
                if norm > 0.0 {
                    coords[0] /= norm;
                    coords[1] /= norm;
                } else {
                    coords[0] = 1.0;
                    coords[1] = 0.0;
                }
            }
            SpaceKind::PoincareDisk => clamp_disk_pair(&mut coords[0..2]),
            SpaceKind::Polydisc { factors } => {
                for j in 0..*factors {
                    clamp_disk_pair(&mut coords[2 * j..2 * j + 2]);
                }
            }
            SpaceKind::HalfLine => coords[0] = coords[0].max(0.0),
            SpaceKind::Product { factors } => {
                let mut offset = 0;
                for f in factors {
                    f.project_coords(&mut coords[offset..offset + f.dimension]);
                    offset += f.dimension;
                }
            }
        }
    }

    /// True iff some cover center is strictly within the cover radius of `p`.
    pub fn covered(&self, p: &Point, cover: &BallCover) -> Result<bool> {
        self.check_owned(p)?;
        for c in &cover.centers {
            self.check_owned(c)?;
            if self.distance_coords(&p.coords, &c.coords) < cover.radius {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Greedy first-fit epsilon net in input order: a point becomes a center
    /// unless it lies strictly within `eps` of an earlier center. The result
    /// covers the input and its centers are pairwise at distance >= eps.
    pub fn epsilon_net(&self, points: &[Point], eps: f64) -> Result<BallCover> {
        if points.is_empty() {
            return Err(Error::EmptyInput("epsilon_net needs at least one point".into()));
        }
        if eps <= 0.0 {
            return Err(Error::BadParameter("eps must be positive".into()));
        }
        let mut centers: Vec<Point> = Vec::new();
        for p in points {
            self.check_owned(p)?;
            let is_covered = centers
                .iter()
                .any(|c| self.distance_coords(&p.coords, &c.coords) < eps);
            if !is_covered {
                centers.push(p.clone());
            }
        }
        Ok(BallCover { centers, radius: eps })
    }

    /// Checks the metric axioms on a seeded sample of triples.
    pub fn audit_metric_axioms(&self, triples: usize, seed: u64) -> MetricAxiomReport {
        let pts = self.sample(seed, triples * 3);
        let mut report = MetricAxiomReport::default();
        for chunk in pts.chunks_exact(3) {
            let (a, b, c) = (&chunk[0], &chunk[1], &chunk[2]);
            let dab = self.distance_coords(&a.coords, &b.coords);
            let dba = self.distance_coords(&b.coords, &a.coords);
            let dac = self.distance_coords(&a.coords, &c.coords);
            let dbc = self.distance_coords(&b.coords, &c.coords);
            let daa = self.distance_coords(&a.coords, &a.coords);
            report.max_identity_defect = report.max_identity_defect.max(daa.abs());
            report.max_symmetry_defect = report.max_symmetry_defect.max((dab - dba).abs());
            report.max_triangle_defect = report.max_triangle_defect.max(dac - dab - dbc);
            if euclidean(&a.coords, &b.coords) > TOL_METRIC {
                report.min_separation = report.min_separation.min(dab);
            }
        }
        report
    }
}

/// Outcome of a metric-axiom audit.
#[derive(Clone, Debug)]
pub struct MetricAxiomReport {
    pub max_identity_defect: f64,
    pub max_symmetry_defect: f64,
    pub max_triangle_defect: f64,
    pub min_separation: f64,
}

impl Default for MetricAxiomReport {
    fn default() -> Self {
        MetricAxiomReport {
            max_identity_defect: 0.0,
            max_symmetry_defect: 0.0,
            max_triangle_defect: f64::NEG_INFINITY,
            min_separation: f64::INFINITY,
        }
    }
}

impl MetricAxiomReport {
    pub fn passed(&self) -> bool {
        self.max_identity_defect <= TOL_METRIC
            && self.max_symmetry_defect <= TOL_METRIC
            && self.max_triangle_defect <= TOL_METRIC
            && self.min_separation > 0.0
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn sample_disk(rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Euclidean-uniform on the disk of radius 0.95, keeping clear of the boundary.
    let r = 0.95 * rng.gen_range(0.0..1.0_f64).sqrt();
    let t = rng.gen_range(0.0..std::f64::consts::TAU);
    vec![r * t.cos(), r * t.sin()]
}

fn clamp_disk_pair(pair: &mut [f64]) {
    let norm2 = pair[0] * pair[0] + pair[1] * pair[1];
    if norm2 >= 1.0 {
        let scale = (1.0 - 1e-15) / norm2.sqrt();
        pair[0] *= scale;
        pair[1] *= scale;
    }
}

/// |(z - w) / (1 - conj(z) w)|, the Mobius-invariant ratio of the disk.
pub(crate) fn mobius_ratio(z: Complex64, w: Complex64) -> f64 {
    let num = z - w;
    let den = Complex64::new(1.0, 0.0) - z.conj() * w;
    if den.norm() == 0.0 {
        return 1.0;
    }
    (num / den).norm()
}

/// Hyperbolic distance on the open unit disk.
///
/// Saturates just below the ulp boundary so iterates that collapse onto the
/// rim under rounding still yield finite distances.
pub(crate) fn poincare_distance_coords(z: Complex64, w: Complex64) -> f64 {
    let t = mobius_ratio(z, w).min(1.0 - 1e-16);
    // atanh(t) written out: 0.5 * ln((1+t)/(1-t)).
    0.5 * ((1.0 + t) / (1.0 - t)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid(dim: usize) -> Space {
        make_space(&SpaceSpec::with_dim("euclidean", dim)).unwrap()
    }

    #[test]
    fn euclidean_pythagoras() {
        let s = euclid(2);
        let a = s.point(&[0.0, 0.0]).unwrap();
        let b = s.point(&[3.0, 4.0]).unwrap();
        assert_eq!(s.distance(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn lattice_absolute_difference() {
        let s = make_space(&SpaceSpec::with_dim("integer-lattice", 1)).unwrap();
        let a = s.point(&[0.0]).unwrap();
        let b = s.point(&[7.0]).unwrap();
        assert_eq!(s.distance(&a, &b).unwrap(), 7.0);
        assert!(s.point(&[0.5]).is_err());
    }

    #[test]
    fn poincare_disk_reference_value() {
        let s = make_space(&SpaceSpec::new("poincare-disk")).unwrap();
        let a = s.point(&[0.0, 0.0]).unwrap();
        let b = s.point(&[0.5, 0.0]).unwrap();
        let expected = 0.5 * 3.0_f64.ln();
        assert!((s.distance(&a, &b).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn unknown_space_and_bad_parameters() {
        assert!(matches!(
            make_space(&SpaceSpec::new("banach")).unwrap_err(),
            Error::UnknownSpace(_)
        ));
        assert!(matches!(
            make_space(&SpaceSpec::with_dim("euclidean", 0)).unwrap_err(),
            Error::BadParameter(_)
        ));
        assert!(matches!(
            make_space(&SpaceSpec::new("euclidean")).unwrap_err(),
            Error::BadParameter(_)
        ));
    }

    #[test]
    fn covered_matches_strict_ball_membership() {
        let s = euclid(1);
        let center = s.point(&[0.0]).unwrap();
        let cover = BallCover { centers: vec![center.clone()], radius: 0.5 };
        let inside = s.point(&[0.4]).unwrap();
        let outside = s.point(&[0.6]).unwrap();
        assert!(s.covered(&inside, &cover).unwrap());
        assert!(!s.covered(&outside, &cover).unwrap());
        assert!(s.covered(&center, &cover).unwrap());
    }

    #[test]
    fn covered_rejects_foreign_points() {
        let s1 = euclid(1);
        let s2 = make_space(&SpaceSpec::new("half-line")).unwrap();
        let cover = BallCover { centers: vec![s1.point(&[0.0]).unwrap()], radius: 1.0 };
        let p = s2.point(&[0.5]).unwrap();
        assert!(matches!(s1.covered(&p, &cover), Err(Error::SpaceMismatch { .. })));
    }

    #[test]
    fn epsilon_net_greedy_examples() {
        let s = euclid(1);
        let near: Vec<Point> =
            [0.0, 0.1, 0.2].iter().map(|&x| s.point(&[x]).unwrap()).collect();
        let net = s.epsilon_net(&near, 0.5).unwrap();
        assert_eq!(net.centers.len(), 1);
        assert_eq!(net.centers[0].coords(), &[0.0]);

        let spread: Vec<Point> =
            [0.0, 1.0, 2.0].iter().map(|&x| s.point(&[x]).unwrap()).collect();
        let net = s.epsilon_net(&spread, 0.5).unwrap();
        assert_eq!(net.centers.len(), 3);

        assert!(matches!(s.epsilon_net(&[], 0.5), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn products_use_the_max_metric() {
        let spec = SpaceSpec {
            name: "product".into(),
            dim: None,
            params: Some(serde_json::json!({
                "factors": [
                    {"name": "circle"},
                    {"name": "euclidean", "dim": 1},
                ]
            })),
        };
        let s = make_space(&spec).unwrap();
        assert_eq!(s.dimension(), 3);
        let a = s.point(&[1.0, 0.0, 0.0]).unwrap();
        let b = s.point(&[1.0, 0.0, 2.5]).unwrap();
        assert_eq!(s.distance(&a, &b).unwrap(), 2.5);
    }

    #[test]
    fn catalog_metric_axioms_hold_on_samples() {
        for spec in [
            SpaceSpec::with_dim("euclidean", 2),
            SpaceSpec::with_dim("integer-lattice", 2),
            SpaceSpec::new("circle"),
            SpaceSpec::new("poincare-disk"),
            SpaceSpec::with_dim("polydisc", 2),
            SpaceSpec::new("half-line"),
        ] {
            let s = make_space(&spec).unwrap();
            let report = s.audit_metric_axioms(1000, 7);
            assert!(report.passed(), "{}: {:?}", s.name(), report);
        }
    }
}
