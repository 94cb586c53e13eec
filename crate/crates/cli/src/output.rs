use hyperquant::{Check, CheckReport};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Rows for the CSV rendering of a report.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn checks(report: &CheckReport) -> Self {
        let mut t = Self::new(&["name", "relation", "lhs", "rhs", "slack", "tolerance", "passed"]);
        for c in &report.checks {
            t.push(vec![
                c.name.clone(),
                format!("{:?}", c.relation).to_lowercase(),
                num(c.lhs),
                num(c.rhs),
                num(c.slack),
                num(c.tolerance),
                c.passed.to_string(),
            ]);
        }
        t
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub config: Value,
    pub results: Value,
    pub checks: CheckReport,
    pub table: Table,
}

#[derive(Debug, Clone, Copy)]
pub struct Timing {
    pub generated_at: u64,
    pub runtime_ms: u64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    config: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u64>,
    passed: bool,
    first_failure: Option<&'a Check>,
    check_count: usize,
    min_slack: Option<f64>,
    results: &'a Value,
    checks: &'a [Check],
}

pub fn render(command: &str, outcome: &Outcome, format: Format, timing: Option<Timing>) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let envelope = Envelope {
                schema_version: SCHEMA_VERSION,
                command,
                config: &outcome.config,
                generated_at: timing.map(|t| t.generated_at),
                runtime_ms: timing.map(|t| t.runtime_ms),
                passed: outcome.checks.passed(),
                first_failure: outcome.checks.first_failure(),
                check_count: outcome.checks.len(),
                min_slack: outcome.checks.min_slack(),
                results: &outcome.results,
                checks: &outcome.checks.checks,
            };
            let mut out = serde_json::to_vec_pretty(&envelope)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut out = format!(
                "# hyperquant {command} schema_version={SCHEMA_VERSION} passed={}",
                outcome.checks.passed()
            );
            if let Some(t) = timing {
                out.push_str(&format!(" generated_at={} runtime_ms={}", t.generated_at, t.runtime_ms));
            }
            out.push('\n');
            let mut writer = csv::Writer::from_writer(out.into_bytes());
            writer.write_record(&outcome.table.headers)?;
            for row in &outcome.table.rows {
                writer.write_record(row)?;
            }
            writer.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Blocks as `0 1|2 3`.
pub fn blocks_text(blocks: &[Vec<u32>]) -> String {
    blocks
        .iter()
        .map(|b| b.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("|")
}
