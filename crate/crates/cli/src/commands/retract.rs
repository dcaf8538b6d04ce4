//! The `retract` subcommand: retraction estimation plus the group-structure,
//! convergence-criterion, and accumulation audits, in one combined report.

use std::sync::Arc;

use serde::Serialize;

use norbit::limit_group::{
    accumulation_group_orbit_defect_with, audit_group_structure, anchor_fixing_defect,
    check_convergence_criterion, estimate_retraction, retraction_idempotence_defect,
    GroupAudit, RetractValue, RetractionEstimate, RetractionParams,
};
use norbit::maps::make_map;
use norbit::metric::make_space;

use crate::config::RunConfig;
use crate::exit_code_for;
use crate::report::ReportWriter;

#[derive(Serialize)]
struct AccumulationRow {
    start_index: usize,
    hausdorff_defect: f64,
    passed: bool,
}

#[derive(Serialize)]
struct RetractReport<'a> {
    estimate: &'a RetractionEstimate,
    idempotence_defect: f64,
    anchor_fixing_defect: f64,
    group_audit: GroupAuditSummary,
    criterion_agreement: bool,
    accumulation: Vec<AccumulationRow>,
}

/// The audit without the full point tables, which belong in traces rather
/// than summaries.
#[derive(Serialize)]
struct GroupAuditSummary {
    net_size: usize,
    net_exponents: Vec<usize>,
    composition_closure_defect: f64,
    identity_defect: f64,
    inverse_defect: f64,
    generator_defect: f64,
    isometry_defect: f64,
}

impl From<&GroupAudit> for GroupAuditSummary {
    fn from(audit: &GroupAudit) -> Self {
        GroupAuditSummary {
            net_size: audit.element_net.len(),
            net_exponents: audit.element_net.iter().map(|s| s.exponent).collect(),
            composition_closure_defect: audit.composition_closure_defect,
            identity_defect: audit.identity_defect,
            inverse_defect: audit.inverse_defect,
            generator_defect: audit.generator_defect,
            isometry_defect: audit.isometry_defect,
        }
    }
}

pub fn run(config: &RunConfig, config_bytes: &[u8]) -> Result<(), (i32, String)> {
    config.validate().map_err(|m| (1, m))?;
    let space = Arc::new(make_space(&config.space).map_err(|e| (1, e.to_string()))?);
    let map = make_map(&config.map, &space).map_err(|e| (1, e.to_string()))?;
    let starts = config
        .starts
        .iter()
        .map(|coords| space.point(coords))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| (1, e.to_string()))?;

    let params = RetractionParams {
        horizon: config.horizon,
        eps_recur: config.tolerances.eps_recur,
        eps_retract: config.tolerances.eps_retract,
    };
    let fail = |e: norbit::Error| (exit_code_for(&e), e.to_string());
    let est = estimate_retraction(&map, &starts, params).map_err(fail)?;
    let idempotence = retraction_idempotence_defect(&map, &est).map_err(fail)?;
    let anchor_fixing = anchor_fixing_defect(&map, &est).map_err(fail)?;
    let group_audit = audit_group_structure(&map, &est, config.tolerances.eps_group).map_err(fail)?;
    let agreement =
        check_convergence_criterion(&map, &est, config.horizon, config.tolerances.eps)
            .map_err(fail)?;

    // Accumulation-vs-group-orbit for each non-divergent start, sharing one
    // net at the accumulation eps.
    let eps = config.tolerances.eps;
    let accum_audit = audit_group_structure(&map, &est, eps).map_err(fail)?;
    let mut accumulation = Vec::new();
    for (idx, (start, value)) in starts.iter().zip(&est.values).enumerate() {
        if matches!(value, RetractValue::Divergent) {
            continue;
        }
        let defect = accumulation_group_orbit_defect_with(&map, &est, start, eps, &accum_audit)
            .map_err(fail)?;
        accumulation.push(AccumulationRow {
            start_index: idx,
            hausdorff_defect: defect,
            passed: defect <= 3.0 * eps,
        });
    }

    let report = RetractReport {
        estimate: &est,
        idempotence_defect: idempotence,
        anchor_fixing_defect: anchor_fixing,
        group_audit: GroupAuditSummary::from(&group_audit),
        criterion_agreement: agreement,
        accumulation,
    };
    let writer = ReportWriter::new(
        config.outputs.dir.as_deref(),
        &config.outputs.formats,
        config_bytes,
    )
    .map_err(|m| (1, m))?;
    writer.write_json("retract.json", &report).map_err(|m| (1, m))?;
    writer.write_meta("run_meta.json", 1).map_err(|m| (1, m))?;
    Ok(())
}
