//! The `semigroup` subcommand: reads a row-major composition table from CSV
//! and reports whether the semigroup is a group.

use std::fs;
use std::path::Path;

use norbit::limit_group::{semigroup_is_group, FiniteSemigroup};

use crate::config::SemigroupConfig;
use crate::exit_code_for;
use crate::report::ReportWriter;

pub fn run(config: &SemigroupConfig, config_bytes: &[u8]) -> Result<(), (i32, String)> {
    let table = parse_table(&config.table)?;
    let order = (table.len() as f64).sqrt() as usize;
    if order * order != table.len() {
        return Err((1, format!("table has {} entries, not a perfect square", table.len())));
    }
    let sg = FiniteSemigroup::new(order, table).map_err(|e| (1, e.to_string()))?;
    let is_group = semigroup_is_group(&sg).map_err(|e| (exit_code_for(&e), e.to_string()))?;
    let writer = ReportWriter::new(
        config.outputs.dir.as_deref(),
        &config.outputs.formats,
        config_bytes,
    )
    .map_err(|m| (1, m))?;
    writer
        .write_json(
            "semigroup.json",
            serde_json::json!({ "order": order, "is_group": is_group }),
        )
        .map_err(|m| (1, m))?;
    writer.write_meta("run_meta.json", 1).map_err(|m| (1, m))?;
    Ok(())
}

/// Row-major composition table: one CSV row per row of the table.
fn parse_table(path: &Path) -> Result<Vec<usize>, (i32, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| (1, format!("cannot read {}: {e}", path.display())))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        for cell in line.split(',') {
            let value: usize = cell
                .trim()
                .parse()
                .map_err(|e| (1, format!("line {}: '{cell}': {e}", lineno + 1)))?;
            entries.push(value);
        }
    }
    Ok(entries)
}
