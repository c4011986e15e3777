//! Experiment report emission and loading.
//!
//! JSON is the full versioned schema; CSV carries one row per trial plus an
//! `#aggregate` trailer. Undefined ratios appear as `null` in JSON and `-`
//! in CSV. Wall times are redacted unless the configuration asked for them,
//! keeping default outputs byte-identical across runs.

use std::fmt::Write as _;

use thiserror::Error;

pub use crate::harness::ExperimentReport;
use crate::harness::REPORT_SCHEMA;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported report schema {got}, expected {expected}")]
    Schema { got: u32, expected: u32 },
    #[error("aggregate field {field} does not match the per-trial rows: stored {stored}, recomputed {recomputed}")]
    AggregateMismatch { field: &'static str, stored: f64, recomputed: f64 },
}

/// Strips wall times unless the configuration asked to emit them.
fn prepared(report: &ExperimentReport) -> ExperimentReport {
    let mut out = report.clone();
    if !out.config.emit_timing {
        for t in &mut out.trials {
            t.wall_ms = None;
        }
    }
    out
}

/// Serializes the report as pretty JSON with stable field order.
pub fn emit_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(&prepared(report)).expect("report serializes");
    s.push('\n');
    s
}

/// Parses a JSON report and re-checks the aggregates against the rows.
pub fn load_json(text: &str) -> Result<ExperimentReport, ReportError> {
    let report: ExperimentReport = serde_json::from_str(text)?;
    if report.schema != REPORT_SCHEMA {
        return Err(ReportError::Schema { got: report.schema, expected: REPORT_SCHEMA });
    }
    let recomputed = crate::harness::aggregate(&report.trials);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
    let checks: [(&'static str, f64, f64); 4] = [
        ("mean_r", report.aggregates.mean_r, recomputed.mean_r),
        ("var_r", report.aggregates.var_r, recomputed.var_r),
        ("mean_t", report.aggregates.mean_t, recomputed.mean_t),
        ("var_t", report.aggregates.var_t, recomputed.var_t),
    ];
    for (field, stored, re) in checks {
        if !close(stored, re) {
            return Err(ReportError::AggregateMismatch { field, stored, recomputed: re });
        }
    }
    Ok(report)
}

fn csv_opt(v: Option<f64>) -> String {
    match v {
        None => "-".to_string(),
        Some(x) => format!("{x}"),
    }
}

/// Serializes the report as CSV: comment header, one row per trial, and an
/// `#aggregate` trailer.
pub fn emit_csv(report: &ExperimentReport) -> String {
    let report = prepared(report);
    let mut out = String::new();
    let cfg = &report.config;
    let monitor = serde_json::to_value(cfg.monitor.monitor)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let _ = writeln!(out, "# resetmon report schema {}", report.schema);
    let _ = writeln!(
        out,
        "# model={} prop={} monitor={} trials={} seed={} max_steps={}",
        cfg.model, cfg.prop, monitor, cfg.trials, cfg.seed, cfg.max_steps
    );
    let _ = writeln!(
        out,
        "trial,resets,total_steps,steps_to_last_reset,steps_no_candidate,steps_candidate,samples,verdict,final_candidate_size,t_over_r,wall_ms"
    );
    for t in &report.trials {
        let no_cand: u64 = t.samples.iter().map(|s| s.no_candidate).sum();
        let cand: u64 = t.samples.iter().map(|s| s.candidate).sum();
        let verdict = match t.verdict {
            crate::harness::Verdict::AcceptedGood => "accepted_good",
            crate::harness::Verdict::Cutoff => "cutoff",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            t.trial,
            t.resets,
            t.total_steps,
            t.steps_to_last_reset,
            no_cand,
            cand,
            t.samples.len(),
            verdict,
            t.final_candidate_size,
            csv_opt(t.t_over_r),
            csv_opt(t.wall_ms),
        );
    }
    let a = &report.aggregates;
    let _ = writeln!(
        out,
        "#aggregate,trials={},accepted_good={},cutoff={},mean_r={},var_r={},mean_t={},var_t={},mean_t_over_r={},var_t_over_r={},degenerate={}",
        a.trials,
        a.accepted_good,
        a.cutoff,
        a.mean_r,
        a.var_r,
        a.mean_t,
        a.var_t,
        csv_opt(a.mean_t_over_r),
        csv_opt(a.var_t_over_r),
        a.degenerate
    );
    out
}
