//! The `analyze` subcommand: orbit classification and recurrence detection
//! for every configured start, fanned out over a worker pool.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use norbit::maps::make_map;
use norbit::metric::make_space;
use norbit::orbit::{
    classify_orbit, compute_orbit, default_radii, detect_recurrence, OrbitVerdict,
    RecurrenceCertificate,
};
use norbit::Error;

use crate::config::RunConfig;
use crate::exit_code_for;
use crate::report::{csv_float, ReportWriter};

#[derive(Serialize)]
struct StartReport {
    start_index: usize,
    start: Vec<f64>,
    verdict: OrbitVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<RecurrenceCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_return_defect: Option<f64>,
}

pub fn run(config: &RunConfig, config_bytes: &[u8], jobs: usize) -> Result<(), (i32, String)> {
    config.validate().map_err(|m| (1, m))?;
    let space = Arc::new(make_space(&config.space).map_err(|e| (1, e.to_string()))?);
    let map = make_map(&config.map, &space).map_err(|e| (1, e.to_string()))?;
    let starts = config
        .starts
        .iter()
        .map(|coords| space.point(coords))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| (1, e.to_string()))?;
    let radii = config.radii.clone().unwrap_or_else(|| default_radii(space.kind()));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| (1, format!("worker pool: {e}")))?;
    let results: Vec<Result<StartReport, Error>> = pool.install(|| {
        starts
            .par_iter()
            .enumerate()
            .map(|(idx, start)| {
                let orbit = compute_orbit(&map, start, config.horizon)?;
                let verdict = classify_orbit(&orbit, config.tolerances.eps, &radii)?;
                let (certificate, min_return_defect) =
                    match detect_recurrence(&orbit, config.tolerances.eps_recur) {
                        Ok(cert) => {
                            let min = cert.return_defects.iter().copied().fold(f64::INFINITY, f64::min);
                            (Some(cert), Some(min))
                        }
                        Err(Error::RecurrenceNotFound { min_defect }) => (None, Some(min_defect)),
                        Err(other) => return Err(other),
                    };
                Ok(StartReport {
                    start_index: idx,
                    start: start.coords().to_vec(),
                    verdict,
                    certificate,
                    min_return_defect,
                })
            })
            .collect()
    });

    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(report) => reports.push(report),
            Err(e) => return Err((exit_code_for(&e), e.to_string())),
        }
    }

    let writer = ReportWriter::new(
        config.outputs.dir.as_deref(),
        &config.outputs.formats,
        config_bytes,
    )
    .map_err(|m| (1, m))?;
    for report in &reports {
        writer
            .write_json(&format!("start_{:03}.json", report.start_index), report)
            .map_err(|m| (1, m))?;
    }
    if writer.csv_enabled() {
        let mut csv =
            String::from("start_index,verdict,net_size,escape_radius,recurrent,min_return_defect\n");
        for report in &reports {
            let (net_size, escape_radius) = match &report.verdict {
                OrbitVerdict::RelativelyCompact { net_size, .. } => (net_size.to_string(), String::new()),
                OrbitVerdict::CompactlyDivergent { escapes } => (
                    String::new(),
                    escapes.last().map(|e| csv_float(e.radius)).unwrap_or_default(),
                ),
                OrbitVerdict::Inconclusive { .. } => (String::new(), String::new()),
            };
            let min_defect = report.min_return_defect.map(csv_float).unwrap_or_default();
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                report.start_index,
                report.verdict.kind_str(),
                net_size,
                escape_radius,
                report.certificate.is_some(),
                min_defect,
            ));
        }
        writer.write_csv("summary.csv", &csv).map_err(|m| (1, m))?;
    }
    writer.write_meta("run_meta.json", jobs).map_err(|m| (1, m))?;
    Ok(())
}
