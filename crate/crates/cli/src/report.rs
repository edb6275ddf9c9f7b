//! Report assembly and serialization.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::config::CampaignConfig;
use crate::record::{InstanceRecord, Status};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Jsonl,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "jsonl" => Ok(ReportFormat::Jsonl),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(CliError::Usage(format!("unknown report format '{s}' (json, jsonl, csv)"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub verified: u64,
    pub discrepancy: u64,
    pub undecided: u64,
    /// Wall time of the run that produced the report.
    pub wall_time_s: f64,
}

impl Summary {
    pub fn tally(records: &[InstanceRecord], wall_time_s: f64) -> Self {
        let count = |s| records.iter().filter(|r| r.status == s).count() as u64;
        Summary {
            verified: count(Status::Verified),
            discrepancy: count(Status::Discrepancy),
            undecided: count(Status::Undecided),
            wall_time_s,
        }
    }

    /// 0 clean, 1 discrepancy, 2 undecided remained.
    pub fn exit_code(&self) -> i32 {
        if self.discrepancy > 0 {
            1
        } else if self.undecided > 0 {
            2
        } else {
            0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config_echo: CampaignConfig,
    pub records: Vec<InstanceRecord>,
    pub summary: Summary,
}

impl Report {
    /// Sorts records by instance key and tallies them.
    pub fn new(config: CampaignConfig, mut records: Vec<InstanceRecord>, wall_time_s: f64) -> Self {
        records.sort_by_key(|r| r.key());
        let summary = Summary::tally(&records, wall_time_s);
        Report {
            schema_version: SCHEMA_VERSION,
            config_echo: config,
            records,
            summary,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Line<R> {
    schema_version: u32,
    #[serde(flatten)]
    record: R,
}

/// Flat CSV row; lists are `;`-separated, missing values empty.
#[derive(Serialize, Deserialize)]
struct CsvRow {
    schema_version: u32,
    m: u32,
    t: u32,
    k: u64,
    a: String,
    b: String,
    c_label: String,
    c: String,
    case: String,
    form: String,
    bound_route: String,
    m_initial: String,
    reduced_bound: String,
    m_bound: String,
    search_cap: String,
    rounds: u32,
    certificates_rechecked: bool,
    extensions: String,
    d_minus: String,
    d_plus: String,
    status: String,
    note: String,
    time_ms: u64,
}

fn opt_str<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

fn parse_opt<T: FromStr>(s: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e| CliError::Parse(format!("'{s}': {e}")))
}

fn parse_req<T: FromStr>(s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| CliError::Parse(format!("'{s}': {e}")))
}

impl From<&InstanceRecord> for CsvRow {
    fn from(r: &InstanceRecord) -> Self {
        CsvRow {
            schema_version: SCHEMA_VERSION,
            m: r.m,
            t: r.t,
            k: r.k,
            a: r.a.to_string(),
            b: r.b.to_string(),
            c_label: r.c_label.to_string(),
            c: r.c.to_string(),
            case: r.case.clone(),
            form: r.form.clone(),
            bound_route: opt_str(&r.bound_route),
            m_initial: opt_str(&r.m_initial),
            reduced_bound: opt_str(&r.reduced_bound),
            m_bound: opt_str(&r.m_bound),
            search_cap: opt_str(&r.search_cap),
            rounds: r.rounds,
            certificates_rechecked: r.certificates_rechecked,
            extensions: r.extensions.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
            d_minus: r.d_minus.to_string(),
            d_plus: r.d_plus.to_string(),
            status: r.status.to_string(),
            note: opt_str(&r.note),
            time_ms: r.time_ms,
        }
    }
}

impl TryFrom<CsvRow> for InstanceRecord {
    type Error = CliError;

    fn try_from(row: CsvRow) -> Result<Self, CliError> {
        let extensions = if row.extensions.is_empty() {
            Vec::new()
        } else {
            row.extensions.split(';').map(parse_req::<BigInt>).collect::<Result<_, _>>()?
        };
        Ok(InstanceRecord {
            m: row.m,
            t: row.t,
            k: row.k,
            a: parse_req(&row.a)?,
            b: parse_req(&row.b)?,
            c_label: parse_req(&row.c_label)?,
            c: parse_req(&row.c)?,
            case: row.case,
            form: row.form,
            bound_route: parse_opt(&row.bound_route)?,
            m_initial: parse_opt(&row.m_initial)?,
            reduced_bound: parse_opt(&row.reduced_bound)?,
            m_bound: parse_opt(&row.m_bound)?,
            search_cap: parse_opt(&row.search_cap)?,
            rounds: row.rounds,
            certificates_rechecked: row.certificates_rechecked,
            extensions,
            d_minus: parse_req(&row.d_minus)?,
            d_plus: parse_req(&row.d_plus)?,
            status: parse_req(&row.status)?,
            note: parse_opt(&row.note)?,
            time_ms: row.time_ms,
        })
    }
}

/// Serializes a report. `json` writes the whole report; `jsonl` and `csv`
/// write one record per line, each carrying the schema version.
pub fn emit_report(report: &Report, format: ReportFormat) -> Result<Vec<u8>, CliError> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| CliError::Parse(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Jsonl => emit_records(&report.records, format),
        ReportFormat::Csv => emit_records(&report.records, format),
    }
}

/// Serializes bare records as `jsonl` or `csv`.
pub fn emit_records(records: &[InstanceRecord], format: ReportFormat) -> Result<Vec<u8>, CliError> {
    match format {
        ReportFormat::Json => {
            serde_json::to_vec_pretty(records).map_err(|e| CliError::Parse(e.to_string()))
        }
        ReportFormat::Jsonl => {
            let mut out = Vec::new();
            for r in records {
                let line = Line {
                    schema_version: SCHEMA_VERSION,
                    record: r,
                };
                serde_json::to_writer(&mut out, &line).map_err(|e| CliError::Parse(e.to_string()))?;
                out.push(b'\n');
            }
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if records.is_empty() {
                w.write_record(csv_header()).map_err(|e| CliError::Parse(e.to_string()))?;
            }
            for r in records {
                w.serialize(CsvRow::from(r)).map_err(|e| CliError::Parse(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Parse(e.to_string()))
        }
    }
}

fn csv_header() -> Vec<&'static str> {
    vec![
        "schema_version", "m", "t", "k", "a", "b", "c_label", "c", "case", "form", "bound_route",
        "m_initial", "reduced_bound", "m_bound", "search_cap", "rounds", "certificates_rechecked",
        "extensions", "d_minus", "d_plus", "status", "note", "time_ms",
    ]
}

pub fn parse_report_json(bytes: &[u8]) -> Result<Report, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Parse(e.to_string()))
}

/// Parses `jsonl` or `csv` record output.
pub fn parse_records(bytes: &[u8], format: ReportFormat) -> Result<Vec<InstanceRecord>, CliError> {
    match format {
        ReportFormat::Json => parse_report_json(bytes).map(|r| r.records),
        ReportFormat::Jsonl => {
            let text = std::str::from_utf8(bytes).map_err(|e| CliError::Parse(e.to_string()))?;
            text.lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    let line: Line<InstanceRecord> =
                        serde_json::from_str(l).map_err(|e| CliError::Parse(e.to_string()))?;
                    Ok(line.record)
                })
                .collect()
        }
        ReportFormat::Csv => {
            let mut rd = csv::Reader::from_reader(bytes);
            rd.deserialize::<CsvRow>()
                .map(|row| InstanceRecord::try_from(row.map_err(|e| CliError::Parse(e.to_string()))?))
                .collect()
        }
    }
}
