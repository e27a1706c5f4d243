//! Report and residual-table serialization.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use gradcon_core::contraction::ConvergenceReport;

use crate::config::Config;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub subcommand: String,
    pub seed: u64,
    pub certified: bool,
    pub config: Config,
    /// Subcommand-specific numbers; every value comes from a library
    /// operation.
    pub results: Value,
}

/// One line of residuals.csv.
#[derive(Debug, Clone)]
pub struct ResidualRow {
    pub n: usize,
    pub index_id: String,
    pub residual: f64,
    /// Consecutive-residual ratio; absent on the first iteration.
    pub rate: Option<f64>,
}

/// Flattens an iteration report into CSV rows, optionally prefixing the
/// index labels (for multi-member runs).
pub fn rows_from_report(report: &ConvergenceReport, prefix: &str) -> Vec<ResidualRow> {
    let mut rows = Vec::new();
    for (step, row) in report.residuals.iter().enumerate() {
        for (j, &residual) in row.iter().enumerate() {
            let rate = if step == 0 {
                None
            } else {
                Some(report.rate_estimates[step - 1][j])
            };
            rows.push(ResidualRow {
                n: step + 1,
                index_id: format!("{prefix}{}", report.index_labels[j]),
                residual,
                rate,
            });
        }
    }
    rows
}

pub fn write_outputs(
    out_dir: &Path,
    report: &Report,
    rows: &[ResidualRow],
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;

    let json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Internal(format!("report serialization: {e}")))?;
    std::fs::write(out_dir.join("report.json"), json + "\n")
        .map_err(|e| CliError::Internal(format!("writing report.json: {e}")))?;

    let mut csv = Vec::new();
    writeln!(csv, "n,index_id,residual,rate").expect("in-memory write");
    for row in rows {
        let rate = row.rate.map(|r| format!("{r:e}")).unwrap_or_default();
        writeln!(csv, "{},{},{:e},{}", row.n, row.index_id, row.residual, rate)
            .expect("in-memory write");
    }
    std::fs::write(out_dir.join("residuals.csv"), csv)
        .map_err(|e| CliError::Internal(format!("writing residuals.csv: {e}")))?;
    Ok(())
}
