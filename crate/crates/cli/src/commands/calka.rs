//! The `calka` subcommand: covering-lemma checks on an orbit-induced table
//! or a CSV distance table.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use norbit::calka::{check_hypothesis, find_covering_m, from_orbit, from_table, NatMetric};
use norbit::maps::make_map;
use norbit::metric::make_space;
use norbit::orbit::compute_orbit;

use crate::config::{CalkaConfig, CalkaSource};
use crate::exit_code_for;
use crate::report::ReportWriter;

pub fn run(config: &CalkaConfig, config_bytes: &[u8]) -> Result<(), (i32, String)> {
    if config.rho <= 0.0 {
        return Err((1, "rho must be positive".into()));
    }
    let nat_metric = build_metric(config)?;
    let (bound, ball0_count) = check_hypothesis(&nat_metric, config.rho, config.min_ball_count)
        .map_err(|e| (exit_code_for(&e), e.to_string()))?;

    let writer = ReportWriter::new(
        config.outputs.dir.as_deref(),
        &config.outputs.formats,
        config_bytes,
    )
    .map_err(|m| (1, m))?;

    match bound {
        None => {
            let body = serde_json::json!({
                "rho": config.rho,
                "ball0_count": ball0_count,
                "N": null,
                "M": null,
                "conclusion_verified_to": 0,
                "note": format!(
                    "ball around index 0 has {ball0_count} members, below the required {}",
                    config.min_ball_count
                ),
            });
            writer.write_json("calka.json", body).map_err(|m| (1, m))?;
            Err((3, "hypothesis not witnessed: the ball around 0 is too small".into()))
        }
        Some(n) => {
            let report = find_covering_m(&nat_metric, config.rho, n)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            let verified = report.conclusion_verified_to == nat_metric.horizon();
            writer.write_json("calka.json", &report).map_err(|m| (1, m))?;
            writer.write_meta("run_meta.json", 1).map_err(|m| (1, m))?;
            if verified {
                Ok(())
            } else {
                Err((3, "cover construction did not reach the horizon".into()))
            }
        }
    }
}

fn build_metric(config: &CalkaConfig) -> Result<NatMetric, (i32, String)> {
    match &config.source {
        CalkaSource::Orbit { space, map, start, horizon } => {
            let space = Arc::new(make_space(space).map_err(|e| (1, e.to_string()))?);
            let map = make_map(map, &space).map_err(|e| (1, e.to_string()))?;
            let start = space.point(start).map_err(|e| (1, e.to_string()))?;
            let orbit = compute_orbit(&map, &start, *horizon)
                .map_err(|e| (exit_code_for(&e), e.to_string()))?;
            from_orbit(&orbit).map_err(|e| (exit_code_for(&e), e.to_string()))
        }
        CalkaSource::Table { path } => {
            let triples = parse_table_csv(path).map_err(|m| (1, m))?;
            let horizon = triples.iter().map(|&(n, m, _)| n.max(m)).max().unwrap_or(0);
            from_table(horizon, &triples).map_err(|e| (exit_code_for(&e), e.to_string()))
        }
    }
}

/// Parses a triangular distance table: header "n,m,d", one entry per line.
fn parse_table_csv(path: &Path) -> Result<Vec<(usize, usize, f64)>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "n,m,d" => {}
        other => return Err(format!("expected header 'n,m,d', got {other:?}")),
    }
    let mut triples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            return Err(format!("line {}: expected 'n,m,d', got '{line}'", lineno + 2));
        }
        let n: usize =
            cells[0].trim().parse().map_err(|e| format!("line {}: n: {e}", lineno + 2))?;
        let m: usize =
            cells[1].trim().parse().map_err(|e| format!("line {}: m: {e}", lineno + 2))?;
        let d: f64 =
            cells[2].trim().parse().map_err(|e| format!("line {}: d: {e}", lineno + 2))?;
        triples.push((n, m, d));
    }
    Ok(triples)
}
