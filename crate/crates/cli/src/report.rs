use std::io::Write;
use std::path::Path;

use anyhow::Context;
use chrono::{SecondsFormat, Utc};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use nme_core::graded::SpaceConfig;
use nme_core::solver::CertificateTable;
use nme_core::variational::OrbitOptions;

use crate::config::{RunConfig, SCHEMA_VERSION};

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// SHA-256 of the effective config, serialized canonically.
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub started_at: String,
    pub finished_at: String,
}

/// One disclosed departure from the exact mathematics.
#[derive(Debug, Serialize)]
pub struct Deviation {
    pub name: &'static str,
    pub value: Value,
    pub note: &'static str,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub metadata: Metadata,
    pub config: RunConfig,
    pub deviations: Vec<Deviation>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub result: Value,
}

pub fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

pub fn config_hash(config: &RunConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Disclosures every report carries.
pub fn base_deviations(space: &SpaceConfig) -> Vec<Deviation> {
    let orbit = OrbitOptions::default();
    vec![
        Deviation {
            name: "truncation",
            value: json!({ "levels": space.levels, "coeffs": space.coeffs }),
            note: "finitely many seminorms and coefficients stand in for the full sequence space",
        },
        Deviation {
            name: "metric_tail_bound",
            value: json!(space.metric_tail_bound()),
            note: "levels beyond the truncation change the metric by at most 2^-N",
        },
        Deviation {
            name: "membership_slack",
            value: json!(space.membership_slack),
            note: "absolute float slack in box-membership comparisons",
        },
        Deviation {
            name: "net_radius_factor",
            value: json!(3.0),
            note: "epsilon-nets are certified at radius 3 eps",
        },
        Deviation {
            name: "case_a_threshold",
            value: json!(orbit.divergence_threshold),
            note: "infinite orbit length is witnessed by cumulative length reaching this threshold",
        },
        Deviation {
            name: "case_b2_window",
            value: json!({ "window": orbit.window, "tail_tolerance": orbit.tail_tolerance }),
            note: "convergence is declared when the last `window` steps sum below the tolerance",
        },
    ]
}

pub fn finish(
    command: &'static str,
    config: &RunConfig,
    seed: Option<u64>,
    started_at: String,
    deviations: Vec<Deviation>,
    failures: Vec<String>,
    result: Value,
) -> Report {
    Report {
        schema: SCHEMA_VERSION,
        metadata: Metadata {
            tool: "nme",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256: config_hash(config),
            seed,
            started_at,
            finished_at: now(),
        },
        config: config.clone(),
        deviations,
        pass: failures.is_empty(),
        failures,
        result,
    }
}

/// Writes the JSON report to `out`, or to stdout without a path.
pub fn write_report(report: &Report, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .with_context(|| format!("cannot write report {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
            Ok(())
        }
    }
}

/// Per-level table with columns `level, x_seminorm, bound, ratio, pass`.
pub fn write_table_csv(table: &CertificateTable, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot write table {}", path.display()))?;
    for row in &table.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
