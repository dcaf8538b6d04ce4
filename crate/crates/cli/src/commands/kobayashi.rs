//! The `kobayashi` subcommand: hyperbolic distances and chain-search upper
//! bounds for point pairs.

use norbit::kobayashi::{kobayashi_upper_bound, poincare_distance, DiskPoint};
use norbit::metric::{make_space, SpaceKind};

use crate::config::KobayashiConfig;
use crate::exit_code_for;
use crate::report::ReportWriter;

pub fn run(config: &KobayashiConfig, config_bytes: &[u8]) -> Result<(), (i32, String)> {
    let space = make_space(&config.space).map_err(|e| (1, e.to_string()))?;
    let mut rows = Vec::with_capacity(config.pairs.len());
    for (idx, [a, b]) in config.pairs.iter().enumerate() {
        let pa = space.point(a).map_err(|e| (1, format!("pairs[{idx}][0]: {e}")))?;
        let pb = space.point(b).map_err(|e| (1, format!("pairs[{idx}][1]: {e}")))?;
        let bound = kobayashi_upper_bound(&space, &pa, &pb, config.budget.into())
            .map_err(|e| (exit_code_for(&e), e.to_string()))?;
        let poincare = match space.kind() {
            SpaceKind::PoincareDisk => {
                let z = DiskPoint::new(a[0], a[1]).map_err(|e| (1, e.to_string()))?;
                let w = DiskPoint::new(b[0], b[1]).map_err(|e| (1, e.to_string()))?;
                Some(poincare_distance(z, w).map_err(|e| (exit_code_for(&e), e.to_string()))?)
            }
            _ => None,
        };
        rows.push(serde_json::json!({
            "a": a,
            "b": b,
            "upper_bound": bound,
            "poincare": poincare,
        }));
    }
    let writer = ReportWriter::new(
        config.outputs.dir.as_deref(),
        &config.outputs.formats,
        config_bytes,
    )
    .map_err(|m| (1, m))?;
    writer
        .write_json("kobayashi.json", serde_json::json!({ "pairs": rows }))
        .map_err(|m| (1, m))?;
    writer.write_meta("run_meta.json", 1).map_err(|m| (1, m))?;
    Ok(())
}
