//! Run configurations parsed from JSON, with field-path error reporting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use norbit::maps::MapSpec;
use norbit::metric::SpaceSpec;

/// Tolerances shared by the analysis commands.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub eps: f64,
    pub eps_recur: f64,
    pub eps_retract: f64,
    pub eps_group: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps: 1e-3, eps_recur: 1e-3, eps_retract: 1e-3, eps_group: 5e-3 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Outputs {
    pub dir: Option<PathBuf>,
    pub formats: Vec<String>,
}

/// Config for the orbit-analysis and retraction commands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: SpaceSpec,
    pub map: MapSpec,
    #[serde(default)]
    pub starts: Vec<Vec<f64>>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_horizon() -> usize {
    norbit::orbit::defaults::HORIZON
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        let t = &self.tolerances;
        for (name, value) in [
            ("tolerances.eps", t.eps),
            ("tolerances.eps_recur", t.eps_recur),
            ("tolerances.eps_retract", t.eps_retract),
            ("tolerances.eps_group", t.eps_group),
        ] {
            if value <= 0.0 {
                return Err(format!("{name} must be positive, got {value}"));
            }
        }
        if self.horizon < 1 {
            return Err("horizon must be at least 1".into());
        }
        if self.starts.is_empty() {
            return Err("starts must be nonempty for orbit commands".into());
        }
        Ok(())
    }
}

/// Config for the covering-lemma command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalkaConfig {
    pub source: CalkaSource,
    pub rho: f64,
    #[serde(default = "default_min_ball_count")]
    pub min_ball_count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_min_ball_count() -> usize {
    50
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CalkaSource {
    Orbit {
        space: SpaceSpec,
        map: MapSpec,
        start: Vec<f64>,
        #[serde(default = "default_horizon")]
        horizon: usize,
    },
    Table {
        path: PathBuf,
    },
}

/// Config for the hyperbolic distance/bound command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KobayashiConfig {
    pub space: SpaceSpec,
    /// Pairs of points, each point a coordinate array.
    pub pairs: Vec<[Vec<f64>; 2]>,
    #[serde(default)]
    pub budget: BudgetSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSpec {
    pub max_links: usize,
    pub waypoints: usize,
    pub descent_iters: usize,
}

impl Default for BudgetSpec {
    fn default() -> Self {
        let d = norbit::kobayashi::ChainSearchBudget::default();
        BudgetSpec {
            max_links: d.max_links,
            waypoints: d.waypoints,
            descent_iters: d.descent_iters,
        }
    }
}

impl From<BudgetSpec> for norbit::kobayashi::ChainSearchBudget {
    fn from(b: BudgetSpec) -> Self {
        norbit::kobayashi::ChainSearchBudget {
            max_links: b.max_links,
            waypoints: b.waypoints,
            descent_iters: b.descent_iters,
        }
    }
}

/// Config for the finite-semigroup command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupConfig {
    /// CSV file holding the row-major composition table.
    pub table: PathBuf,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Reads and parses a JSON config, reporting the offending field path on
/// failure.
pub fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, Vec<u8>), String> {
    let bytes = fs::read(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut de = serde_json::Deserializer::from_slice(&bytes);
    let parsed: T = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| format!("config {}: field '{}': {}", path.display(), e.path(), e.inner()))?;
    Ok((parsed, bytes))
}
