//! Report envelopes and their JSON/CSV persistence.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::decimal::Decimal;
use crate::engine::{
    CmReport, ConvergenceRow, DerivativeLimits, GridSpec, InequalityReport, ScaledLimits, SearchResult,
};
use crate::error::{Error, Result};
use crate::functions::FunctionId;
use crate::precision::PrecisionConfig;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub precision: PrecisionConfig,
    pub grid: GridSpec,
    pub n_max: u32,
    pub output_path: PathBuf,
    pub format: Format,
}

pub const DEFAULT_N_MAX: u32 = 8;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            precision: PrecisionConfig::default(),
            grid: GridSpec::default(),
            n_max: DEFAULT_N_MAX,
            output_path: PathBuf::from("."),
            format: Format::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    pub fid: FunctionId,
    pub x: Decimal,
    pub value: Decimal,
    pub tail_bound: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergence {
    pub z: Decimal,
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub scaled: Vec<ScaledLimits>,
    pub derivatives: Vec<DerivativeLimits>,
}

/// A computed value against an independent reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub value: Decimal,
    pub reference: Decimal,
    pub relative_error: Decimal,
    pub tolerance: Decimal,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// Every check should pass.
    Pass,
    /// A sign violation should be found.
    Violation,
    /// Reported for information only.
    Documented,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub name: String,
    pub expectation: Expectation,
    pub outcome: Outcome,
    pub detail: String,
    /// Envelope file holding the full report, relative to the summary.
    pub file: String,
}

impl SummaryRow {
    /// Whether this row counts against the aggregate exit status.
    pub fn is_failure(&self) -> bool {
        self.expectation != Expectation::Documented && self.outcome != Outcome::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "kebab-case")]
pub enum Payload {
    Eval(EvalResult),
    Cm(CmReport),
    Inequality(InequalityReport),
    Convergence(Convergence),
    Search(SearchResult),
    Limits(Limits),
    Comparisons(Vec<Comparison>),
    /// Several reports produced by one suite row.
    Batch(Vec<Payload>),
    Summary(Vec<SummaryRow>),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Eval(_) => "eval",
            Payload::Cm(_) => "cm",
            Payload::Inequality(_) => "inequality",
            Payload::Convergence(_) => "convergence",
            Payload::Search(_) => "search",
            Payload::Limits(_) => "limits",
            Payload::Comparisons(_) => "comparisons",
            Payload::Batch(_) => "batch",
            Payload::Summary(_) => "summary",
        }
    }

    /// Canonical JSON of the payload alone, used for reproducibility checks.
    pub fn canonical_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Config(format!("serialising payload: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub tool_version: String,
    pub timestamp: DateTime<Utc>,
    pub config: RunConfig,
    pub payload: Payload,
}

impl ReportEnvelope {
    pub fn new(config: RunConfig, payload: Payload) -> Self {
        // whole microseconds keep the RFC 3339 text exactly reparseable
        let now = Utc::now();
        let timestamp = DateTime::parse_from_rfc3339(&now.to_rfc3339_opts(SecondsFormat::Micros, true))
            .map(|t| t.with_timezone(&Utc))
            .unwrap_or(now);
        Self {
            tool_version: TOOL_VERSION.to_string(),
            timestamp,
            config,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(format!("serialising report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("reading report: {e}")))
    }

    /// CSV rendering of the payload, with a header row.
    pub fn to_csv(&self) -> Result<String> {
        payload_csv(&self.payload)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    /// Writes the rendering to `path` through a temporary file in the same
    /// directory, so readers never observe a partial report.
    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        write_atomic(path, self.render(format)?.as_bytes())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("writing {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Config(format!("writing csv: {e}"))
}

fn payload_csv(payload: &Payload) -> Result<String> {
    if let Payload::Batch(parts) = payload {
        let sections: Vec<String> = parts.iter().map(payload_csv).collect::<Result<_>>()?;
        return Ok(sections.join("\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    match payload {
        Payload::Batch(_) => unreachable!("handled above"),
        Payload::Comparisons(rows) => {
            w.write_record(["name", "value", "reference", "relative_error", "tolerance", "pass"]).map_err(csv_err)?;
            for r in rows {
                w.write_record([
                    r.name.as_str(),
                    r.value.as_str(),
                    r.reference.as_str(),
                    r.relative_error.as_str(),
                    r.tolerance.as_str(),
                    if r.pass { "true" } else { "false" },
                ])
                .map_err(csv_err)?;
            }
        }
        Payload::Eval(e) => {
            w.write_record(["fid", "x", "value", "tail_bound"]).map_err(csv_err)?;
            w.write_record([&e.fid.label(), e.x.as_str(), e.value.as_str(), e.tail_bound.as_str()])
                .map_err(csv_err)?;
        }
        Payload::Cm(r) => {
            w.write_record(["status", "n", "x", "value", "margin"]).map_err(csv_err)?;
            cm_rows(&mut w, r, "")?;
            if let Some(c) = &r.cross_check {
                cm_rows(&mut w, &c.report, "cross-check-")?;
            }
        }
        Payload::Inequality(r) => {
            w.write_record(["part", "order", "x", "lhs", "rhs", "margin"]).map_err(csv_err)?;
            for p in &r.parts {
                w.write_record([&format!("part:{}", p.name), "", "", "", "", p.worst_margin.as_str()])
                    .map_err(csv_err)?;
            }
            for wi in &r.witnesses {
                let order = wi.order.map(|o| o.to_string()).unwrap_or_default();
                w.write_record(["witness", &order, wi.x.as_str(), wi.lhs.as_str(), wi.rhs.as_str(), wi.margin.as_str()])
                    .map_err(csv_err)?;
            }
        }
        Payload::Convergence(c) => {
            w.write_record(["m", "scaled", "error"]).map_err(csv_err)?;
            for r in &c.rows {
                w.write_record([&r.m.to_string(), r.scaled.as_str(), r.error.as_str()]).map_err(csv_err)?;
            }
        }
        Payload::Search(s) => {
            w.write_record(["t", "value", "tail_bound"]).map_err(csv_err)?;
            for r in &s.rows {
                w.write_record([r.t.as_str(), r.value.as_str(), r.tail_bound.as_str()]).map_err(csv_err)?;
            }
        }
        Payload::Limits(l) => {
            w.write_record(["m", "limit", "estimate", "err", "expected", "relative_error"]).map_err(csv_err)?;
            let mut row = |m: u32, name: &str, e: &crate::engine::LimitEstimate| {
                w.write_record([
                    &m.to_string(),
                    name,
                    e.estimate.as_str(),
                    e.err.as_str(),
                    e.expected.as_str(),
                    e.relative_error.as_str(),
                ])
                .map_err(csv_err)
            };
            for s in &l.scaled {
                row(s.m, "zero", &s.at_zero)?;
                row(s.m, "infinity", &s.at_infinity)?;
            }
            for d in &l.derivatives {
                row(d.m, "order-m1", &d.order_m1)?;
                row(d.m, "order-m2", &d.order_m2)?;
                row(d.m, "order-m2-taylor", &d.order_m2_taylor)?;
            }
        }
        Payload::Summary(rows) => {
            w.write_record(["name", "expectation", "outcome", "detail", "file"]).map_err(csv_err)?;
            for r in rows {
                w.write_record([&r.name, label(&r.expectation), label(&r.outcome), &r.detail, &r.file])
                    .map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("writing csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Config(format!("csv is not utf-8: {e}")))
}

fn cm_rows(w: &mut csv::Writer<Vec<u8>>, r: &CmReport, prefix: &str) -> Result<()> {
    for (status, list) in [("violation", &r.violations), ("inconclusive", &r.inconclusive)] {
        for e in list {
            w.write_record([&format!("{prefix}{status}"), &e.n.to_string(), e.x.as_str(), e.value.as_str(), e.margin.as_str()])
                .map_err(csv_err)?;
        }
    }
    w.write_record([
        &format!("{prefix}min-margin"),
        &r.min_margin_at.0.to_string(),
        r.min_margin_at.1.as_str(),
        "",
        r.min_margin.as_str(),
    ])
    .map_err(csv_err)
}

fn label<T: Serialize>(v: &T) -> &'static str {
    match serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).as_deref() {
        Some("pass") => "pass",
        Some("fail") => "fail",
        Some("inconclusive") => "inconclusive",
        Some("violation") => "violation",
        Some("documented") => "documented",
        _ => "",
    }
}

/// Description of every output format, printed by `--schema`.
pub const SCHEMA: &str = r#"JSON envelope
  {
    "tool_version": string,
    "timestamp": RFC 3339 UTC instant,
    "config": {"precision": {"digits", "series_tol", "max_terms"},
               "grid": {"x_min", "x_max", "count", "spacing"},
               "n_max", "output_path", "format"},
    "payload": {"kind": one of eval | cm | inequality | convergence | search | limits |
                        comparisons | batch | summary,
                "data": kind-specific object}
  }
  All real numbers are decimal strings carrying the working precision.

CSV (one header row, then data rows)
  eval         fid,x,value,tail_bound
  cm           status,n,x,value,margin
               status is violation | inconclusive | min-margin, prefixed with
               cross-check- for the sign check of f_alpha itself
  inequality   part,order,x,lhs,rhs,margin
               rows "part:<name>" carry the worst margin of each sub-inequality,
               rows "witness" the five smallest margins
  convergence  m,scaled,error
  search       t,value,tail_bound   (sign-certain samples, ascending by value)
  limits       m,limit,estimate,err,expected,relative_error
               limit is zero | infinity | order-m1 | order-m2 | order-m2-taylor
  comparisons  name,value,reference,relative_error,tolerance,pass
  batch        the sections of the contained payloads, separated by a blank line
  summary      name,expectation,outcome,detail,file
"#;
