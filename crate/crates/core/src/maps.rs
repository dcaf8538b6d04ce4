//! Catalog of nonexpansive self-maps, iteration, and empirical audits.
//!
//! Every constructed map passes a seeded nonexpansiveness audit before it is
//! handed out; the downstream orbit theory assumes the defining inequality
//! d(f(x), f(y)) <= d(x, y) and a silently expanding map would poison it.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{Point, Space, SpaceKind, TOL_METRIC};

/// Tolerance for inverse searches; looser than `TOL_METRIC` because it
/// compounds a derivative-free root find.
pub const TOL_SOLVE: f64 = 1e-7;

/// Pair count for the construction-time nonexpansiveness audit.
const CONSTRUCTION_AUDIT_PAIRS: usize = 256;
const CONSTRUCTION_AUDIT_SEED: u64 = 0xC0FFEE;

/// JSON description of a catalog map. Part of the CLI contract.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

impl MapSpec {
    pub fn new(name: &str, params: serde_json::Value) -> Self {
        MapSpec { name: name.to_string(), params: Some(params) }
    }
}

/// Evaluable rule of a self-map, dispatched per catalog entry.
#[derive(Clone, Debug)]
pub enum MapRule {
    Identity,
    Scale { c: f64 },
    Translation { v: Vec<f64> },
    Rotation { cos_t: f64, sin_t: f64 },
    MobiusElliptic { a: Complex64, phase: Complex64 },
    MobiusHyperbolic { a: f64 },
    MobiusParabolic { t: f64 },
    Blaschke { phase: Complex64, zeros: Vec<Complex64> },
    Product { factors: Vec<(MapRule, usize)> },
    /// second after first.
    Composite(Box<(MapRule, MapRule)>),
}

impl MapRule {
    fn apply(&self, coords: &[f64], out: &mut Vec<f64>) {
        out.clear();
        match self {
            MapRule::Identity => out.extend_from_slice(coords),
            MapRule::Scale { c } => out.extend(coords.iter().map(|x| c * x)),
            MapRule::Translation { v } => {
                out.extend(coords.iter().zip(v).map(|(x, dv)| x + dv))
            }
            MapRule::Rotation { cos_t, sin_t } => {
                let (x, y) = (coords[0], coords[1]);
                out.push(x * cos_t - y * sin_t);
                out.push(x * sin_t + y * cos_t);
            }
            MapRule::MobiusElliptic { a, phase } => {
                let z = Complex64::new(coords[0], coords[1]);
                let w = mobius_from(*a, *phase * mobius_to(*a, z));
                push_disk(out, w);
            }
            MapRule::MobiusHyperbolic { a } => {
                let z = Complex64::new(coords[0], coords[1]);
                let a = Complex64::new(*a, 0.0);
                let w = (z + a) / (Complex64::new(1.0, 0.0) + a * z);
                push_disk(out, w);
            }
            MapRule::MobiusParabolic { t } => {
                let z = Complex64::new(coords[0], coords[1]);
                // Conjugate of the half-plane translation w -> w + t by the
                // Cayley transform; fixes the boundary point 1.
                let i = Complex64::new(0.0, 1.0);
                let upper = i * (Complex64::new(1.0, 0.0) + z) / (Complex64::new(1.0, 0.0) - z);
                let shifted = upper + Complex64::new(*t, 0.0);
                let w = (shifted - i) / (shifted + i);
                push_disk(out, w);
            }
            MapRule::Blaschke { phase, zeros } => {
                let z = Complex64::new(coords[0], coords[1]);
                let mut w = *phase;
                for zero in zeros {
                    w *= mobius_to(*zero, z);
                }
                push_disk(out, w);
            }
            MapRule::Product { factors } => {
                let mut offset = 0;
                let mut buf = Vec::new();
                for (rule, dim) in factors {
                    rule.apply(&coords[offset..offset + dim], &mut buf);
                    out.extend_from_slice(&buf);
                    offset += dim;
                }
            }
            MapRule::Composite(pair) => {
                let mut mid = Vec::with_capacity(coords.len());
                pair.0.apply(coords, &mut mid);
                pair.1.apply(&mid, out);
            }
        }
    }
}

/// phi_a(z) = (z - a) / (1 - conj(a) z), the automorphism sending a to 0.
fn mobius_to(a: Complex64, z: Complex64) -> Complex64 {
    (z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

/// Inverse of `mobius_to`: sends 0 back to a.
fn mobius_from(a: Complex64, z: Complex64) -> Complex64 {
    (z + a) / (Complex64::new(1.0, 0.0) + a.conj() * z)
}

fn push_disk(out: &mut Vec<f64>, w: Complex64) {
    // Rounding can push an iterate onto the rim; nudge it back inside.
    let n2 = w.norm_sqr();
    if n2 >= 1.0 {
        let s = (1.0 - 1e-15) / n2.sqrt();
        out.push(w.re * s);
        out.push(w.im * s);
    } else {
        out.push(w.re);
        out.push(w.im);
    }
}

/// A named nonexpansive self-map of a catalog space.
#[derive(Clone, Debug)]
pub struct DynamicMap {
    name: String,
    space: Arc<Space>,
    rule: MapRule,
    claims_isometry: bool,
    claims_surjective: bool,
}

impl DynamicMap {
    /// Wraps a rule without running the construction audit. Used by tests and
    /// by `make_map`, which audits before handing the map out.
    pub fn unaudited(
        name: impl Into<String>,
        space: Arc<Space>,
        rule: MapRule,
        claims_isometry: bool,
        claims_surjective: bool,
    ) -> DynamicMap {
        DynamicMap { name: name.into(), space, rule, claims_isometry, claims_surjective }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn claims_isometry(&self) -> bool {
        self.claims_isometry
    }

    pub fn claims_surjective(&self) -> bool {
        self.claims_surjective
    }

    /// Applies the rule once.
    pub fn apply(&self, p: &Point) -> Result<Point> {
        if p.tag() != self.space.tag() {
            return Err(Error::SpaceMismatch {
                left: self.space.tag().to_string(),
                right: p.tag().to_string(),
            });
        }
        let mut out = Vec::with_capacity(p.coords().len());
        self.rule.apply(p.coords(), &mut out);
        Ok(self.space.point_unchecked(out))
    }

    pub(crate) fn apply_coords(&self, coords: &[f64], out: &mut Vec<f64>) {
        self.rule.apply(coords, out);
    }

    /// Composition with another map over the same space (g after self).
    pub fn compose(&self, g: &DynamicMap) -> Result<DynamicMap> {
        if self.space.tag() != g.space.tag() {
            return Err(Error::SpaceMismatch {
                left: self.space.tag().to_string(),
                right: g.space.tag().to_string(),
            });
        }
        Ok(DynamicMap {
            name: format!("{} . {}", g.name, self.name),
            space: self.space.clone(),
            rule: MapRule::Composite(Box::new((self.rule.clone(), g.rule.clone()))),
            claims_isometry: self.claims_isometry && g.claims_isometry,
            claims_surjective: self.claims_surjective && g.claims_surjective,
        })
    }
}

/// Builds a catalog map over `space`, then audits nonexpansiveness on a fixed
/// 256-pair sample; failing the audit is a construction error.
pub fn make_map(spec: &MapSpec, space: &Arc<Space>) -> Result<DynamicMap> {
    let map = build_unaudited(spec, space)?;
    // Images of sampled points must satisfy the space's point invariants.
    for p in space.sample(CONSTRUCTION_AUDIT_SEED ^ 1, 64) {
        let q = map.apply(&p)?;
        space.validate_coords(q.coords()).map_err(|e| {
            Error::BadParameter(format!("map '{}' leaves its space: {e}", map.name))
        })?;
    }
    let report = audit_nonexpansive(&map, CONSTRUCTION_AUDIT_PAIRS, CONSTRUCTION_AUDIT_SEED);
    if !report.passed {
        return Err(Error::NotNonexpansive {
            map: map.name.clone(),
            defect: report.max_defect,
            pairs: CONSTRUCTION_AUDIT_PAIRS,
        });
    }
    Ok(map)
}

fn build_unaudited(spec: &MapSpec, space: &Arc<Space>) -> Result<DynamicMap> {
    let params = spec.params.clone().unwrap_or(serde_json::Value::Null);
    let incompatible = || Error::IncompatibleSpace {
        map: spec.name.clone(),
        space: space.name().to_string(),
    };
    match spec.name.as_str() {
        "identity" => Ok(DynamicMap::unaudited(
            "identity",
            space.clone(),
            MapRule::Identity,
            true,
            true,
        )),
        "scale" => {
            let c = param_f64(&params, "c")?;
            match space.kind() {
                SpaceKind::Euclidean => {}
                SpaceKind::HalfLine if c >= 0.0 => {}
                _ => return Err(incompatible()),
            }
            Ok(DynamicMap::unaudited(
                format!("scale({c})"),
                space.clone(),
                MapRule::Scale { c },
                c.abs() == 1.0,
                c != 0.0,
            ))
        }
        "translation" => {
            let v = param_vec(&params, "v")?;
            if v.len() != space.dimension() {
                return Err(Error::BadParameter(format!(
                    "translation vector has {} coordinates, space needs {}",
                    v.len(),
                    space.dimension()
                )));
            }
            let surjective = match space.kind() {
                SpaceKind::Euclidean => true,
                SpaceKind::IntegerLattice => {
                    if v.iter().any(|x| x.fract() != 0.0) {
                        return Err(Error::BadParameter(
                            "lattice translation must have integer coordinates".into(),
                        ));
                    }
                    true
                }
                SpaceKind::HalfLine => {
                    if v[0] < 0.0 {
                        return Err(incompatible());
                    }
                    v[0] == 0.0
                }
                _ => return Err(incompatible()),
            };
            Ok(DynamicMap::unaudited(
                format!("translation({v:?})"),
                space.clone(),
                MapRule::Translation { v },
                true,
                surjective,
            ))
        }
        "rotation" => {
            if !matches!(space.kind(), SpaceKind::Circle) {
                return Err(incompatible());
            }
            let theta = param_f64(&params, "theta")?;
            Ok(DynamicMap::unaudited(
                format!("rotation({theta})"),
                space.clone(),
                MapRule::Rotation { cos_t: theta.cos(), sin_t: theta.sin() },
                true,
                true,
            ))
        }
        "mobius-elliptic" => {
            if !matches!(space.kind(), SpaceKind::PoincareDisk) {
                return Err(incompatible());
            }
            let theta = param_f64(&params, "theta")?;
            let a = param_complex(&params, "a")?;
            require_in_disk(a)?;
            Ok(DynamicMap::unaudited(
                format!("mobius-elliptic(theta={theta}, a={a})"),
                space.clone(),
                MapRule::MobiusElliptic { a, phase: Complex64::from_polar(1.0, theta) },
                true,
                true,
            ))
        }
        "mobius-hyperbolic" => {
            if !matches!(space.kind(), SpaceKind::PoincareDisk) {
                return Err(incompatible());
            }
            let a = param_f64(&params, "a")?;
            if !(0.0..1.0).contains(&a) {
                return Err(Error::BadParameter("hyperbolic parameter needs 0 <= a < 1".into()));
            }
            Ok(DynamicMap::unaudited(
                format!("mobius-hyperbolic({a})"),
                space.clone(),
                MapRule::MobiusHyperbolic { a },
                true,
                true,
            ))
        }
        "mobius-parabolic" => {
            if !matches!(space.kind(), SpaceKind::PoincareDisk) {
                return Err(incompatible());
            }
            let t = param_f64(&params, "t")?;
            Ok(DynamicMap::unaudited(
                format!("mobius-parabolic({t})"),
                space.clone(),
                MapRule::MobiusParabolic { t },
                true,
                true,
            ))
        }
        "blaschke" => {
            if !matches!(space.kind(), SpaceKind::PoincareDisk) {
                return Err(incompatible());
            }
            let zeros = param_complex_list(&params, "zeros")?;
            for z in &zeros {
                require_in_disk(*z)?;
            }
            let theta = match params.get("theta") {
                Some(_) => param_f64(&params, "theta")?,
                None => 0.0,
            };
            let automorphism = zeros.len() <= 1;
            Ok(DynamicMap::unaudited(
                format!("blaschke({} zeros)", zeros.len()),
                space.clone(),
                MapRule::Blaschke { phase: Complex64::from_polar(1.0, theta), zeros },
                automorphism,
                automorphism,
            ))
        }
        "product" => {
            let factor_spaces: Vec<Arc<Space>> = match space.kind() {
                SpaceKind::Product { factors } => {
                    factors.iter().map(|f| Arc::new(f.clone())).collect()
                }
                SpaceKind::Polydisc { factors } => {
                    let disk = crate::metric::make_space(&crate::metric::SpaceSpec::new(
                        "poincare-disk",
                    ))?;
                    vec![Arc::new(disk); *factors]
                }
                _ => return Err(incompatible()),
            };
            let factor_specs: Vec<MapSpec> = serde_json::from_value(
                params
                    .get("factors")
                    .cloned()
                    .ok_or_else(|| Error::BadParameter("product map needs params.factors".into()))?,
            )
            .map_err(|e| Error::BadParameter(format!("invalid product factors: {e}")))?;
            if factor_specs.len() != factor_spaces.len() {
                return Err(Error::BadParameter(format!(
                    "product map has {} factors, space has {}",
                    factor_specs.len(),
                    factor_spaces.len()
                )));
            }
            let mut factors = Vec::with_capacity(factor_specs.len());
            let mut isometry = true;
            let mut surjective = true;
            for (fs, fspace) in factor_specs.iter().zip(&factor_spaces) {
                let fmap = build_unaudited(fs, fspace)?;
                isometry &= fmap.claims_isometry;
                surjective &= fmap.claims_surjective;
                factors.push((fmap.rule, fspace.dimension()));
            }
            Ok(DynamicMap::unaudited(
                "product".to_string(),
                space.clone(),
                MapRule::Product { factors },
                isometry,
                surjective,
            ))
        }
        other => Err(Error::UnknownMap(other.to_string())),
    }
}

fn require_in_disk(z: Complex64) -> Result<()> {
    if z.norm_sqr() >= 1.0 {
        return Err(Error::BadParameter(format!("parameter {z} must lie in the open disk")));
    }
    Ok(())
}

fn param_f64(params: &serde_json::Value, key: &str) -> Result<f64> {
    params
        .get(key)
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::BadParameter(format!("missing numeric parameter '{key}'")))
}

fn param_vec(params: &serde_json::Value, key: &str) -> Result<Vec<f64>> {
    let v = params
        .get(key)
        .ok_or_else(|| Error::BadParameter(format!("missing parameter '{key}'")))?;
    serde_json::from_value(v.clone())
        .map_err(|e| Error::BadParameter(format!("parameter '{key}': {e}")))
}

fn param_complex(params: &serde_json::Value, key: &str) -> Result<Complex64> {
    let pair = param_vec(params, key)?;
    if pair.len() != 2 {
        return Err(Error::BadParameter(format!("parameter '{key}' must be [re, im]")));
    }
    Ok(Complex64::new(pair[0], pair[1]))
}

fn param_complex_list(params: &serde_json::Value, key: &str) -> Result<Vec<Complex64>> {
    let v = params
        .get(key)
        .ok_or_else(|| Error::BadParameter(format!("missing parameter '{key}'")))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_value(v.clone())
        .map_err(|e| Error::BadParameter(format!("parameter '{key}': {e}")))?;
    Ok(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
}

/// Computes f^k(p) by repeated application; k = 0 returns p unchanged.
/// Iteration is deliberately sequential so that trajectories reproduce
/// bit-for-bit and the semigroup law holds as a computation path.
pub fn iterate(map: &DynamicMap, p: &Point, k: usize) -> Result<Point> {
    let mut current = p.clone();
    for _ in 0..k {
        current = map.apply(&current)?;
    }
    Ok(current)
}

/// Result of an empirical audit over sampled pairs or probes.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub passed: bool,
    pub max_defect: f64,
    pub witness: Option<(Point, Point)>,
    pub samples: usize,
}

/// Measures the worst expansion defect d(f a, f b) - d(a, b) on a seeded
/// sample of pairs. Passing means the defect stays within `TOL_METRIC`.
pub fn audit_nonexpansive(map: &DynamicMap, pairs: usize, seed: u64) -> AuditReport {
    let space = map.space();
    let pts = space.sample(seed, pairs * 2);
    let mut max_defect = f64::NEG_INFINITY;
    let mut witness = None;
    for chunk in pts.chunks_exact(2) {
        let (a, b) = (&chunk[0], &chunk[1]);
        let fa = map.apply(a).expect("sampled point belongs to the space");
        let fb = map.apply(b).expect("sampled point belongs to the space");
        let defect = space.distance(&fa, &fb).unwrap() - space.distance(a, b).unwrap();
        if defect > max_defect {
            max_defect = defect;
            witness = Some((a.clone(), b.clone()));
        }
    }
    AuditReport { passed: max_defect <= TOL_METRIC, max_defect, witness, samples: pairs }
}

/// For claimed surjective isometries, probes the inclusion
/// B(f(x0), r) subset f(B(x0, r)) by searching a preimage for each probe.
///
/// Probes are sampled in the ball around f(center); each one is inverted by a
/// derivative-free local search. Exhausting the search budget yields
/// `AuditInconclusive`, which is distinct from a failed audit.
pub fn audit_ball_surjectivity(
    map: &DynamicMap,
    center: &Point,
    radius: f64,
    probes: usize,
    seed: u64,
) -> Result<AuditReport> {
    if !(map.claims_isometry && map.claims_surjective) {
        return Err(Error::PreconditionUnmet(
            "ball-surjectivity audit needs a claimed surjective isometry".into(),
        ));
    }
    if let Some(r) = map.space().properness_radius() {
        if radius > r {
            return Err(Error::PreconditionUnmet(format!(
                "radius {radius} exceeds the properness radius {r}"
            )));
        }
    }
    let space = map.space().clone();
    let image_center = map.apply(center)?;
    let targets = space.sample_in_ball(&image_center, radius, seed, probes)?;
    let mut max_defect = 0.0_f64;
    let mut witness = None;
    for q in &targets {
        let p = local_invert(map, q, center, radius).ok_or_else(|| {
            Error::AuditInconclusive(format!(
                "no preimage found for a probe at distance {:.3e} from f(center)",
                space.distance(q, &image_center).unwrap()
            ))
        })?;
        let image_gap = space.distance(&map.apply(&p)?, q)?;
        let overshoot = (space.distance(&p, center)? - radius).max(0.0);
        let defect = image_gap.max(overshoot);
        if defect > max_defect {
            max_defect = defect;
            witness = Some((p.clone(), q.clone()));
        }
    }
    Ok(AuditReport {
        passed: max_defect <= TOL_SOLVE,
        max_defect,
        witness,
        samples: probes,
    })
}

/// Compass search for p with f(p) close to q, projected back onto the space
/// after every move. Starts from the probe itself, the ball center, and a
/// midpoint blend.
fn local_invert(map: &DynamicMap, q: &Point, center: &Point, radius: f64) -> Option<Point> {
    let space = map.space().clone();
    let dim = space.dimension();
    let mut starts: Vec<Vec<f64>> = vec![q.coords().to_vec(), center.coords().to_vec()];
    let blend: Vec<f64> = q
        .coords()
        .iter()
        .zip(center.coords())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    starts.push(blend);

    let objective = |coords: &[f64], buf: &mut Vec<f64>| -> f64 {
        map.apply_coords(coords, buf);
        space.distance_coords(buf, q.coords())
    };

    let mut buf = Vec::with_capacity(dim);
    for start in starts {
        let mut current = start;
        space.project_coords(&mut current);
        if space.validate_coords(&current).is_err() {
            continue;
        }
        let mut best = objective(&current, &mut buf);
        let mut step = radius.max(0.25);
        while step > TOL_SOLVE / 16.0 {
            let mut improved = false;
            for axis in 0..dim {
                for dir in [1.0, -1.0] {
                    let mut cand = current.clone();
                    cand[axis] += dir * step;
                    space.project_coords(&mut cand);
                    if space.validate_coords(&cand).is_err() {
                        continue;
                    }
                    let val = objective(&cand, &mut buf);
                    if val < best {
                        best = val;
                        current = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            if best <= TOL_SOLVE / 4.0 {
                break;
            }
        }
        if best <= TOL_SOLVE {
            let p = space.point_unchecked(current);
            if space.distance(&p, center).ok()? < radius + TOL_SOLVE {
                return Some(p);
            }
        }
    }
    None
}
