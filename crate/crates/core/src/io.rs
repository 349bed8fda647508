//! Output file formats.
//!
//! Every CSV starts with `#`-prefixed header lines followed by a plain
//! RFC 4180 body:
//!
//! ```text
//! # format: newman-lab/1
//! # tool: newman-lab 0.1.0
//! # kind: sweep
//! # config: {            <- one line per line of the config file, verbatim
//! # config:   ...
//! # override: seed=7     <- only when a command-line flag replaced a config value
//! n,sup_error,rms_error,phase_kind,normalization,reversal,descriptor_id
//! 512,0.0016444067851769661,...
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so output is
//! byte-for-byte reproducible. JSON outputs carry the same tags as top-level
//! fields. Readers must refuse any `format` tag other than [`FORMAT_VERSION`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{CrestReport, L1Report};
use crate::metrics::{EnsembleLevel, ErrorRecord};
use crate::phase_opt::OptReport;
use crate::spectral::Spectrum;

/// Format tag written into, and required from, every artifact.
pub const FORMAT_VERSION: &str = "newman-lab/1";
pub const TOOL: &str = concat!("newman-lab ", env!("CARGO_PKG_VERSION"));

/// Column sets of each CSV kind.
pub mod columns {
    pub const RECONSTRUCT: [&str; 4] = ["index", "target", "recon", "abs_diff"];
    pub const SWEEP: [&str; 7] =
        ["n", "sup_error", "rms_error", "phase_kind", "normalization", "reversal", "descriptor_id"];
    pub const ENSEMBLE_RAW: [&str; 3] = ["n", "seed_index", "rms_error"];
    pub const ENSEMBLE_BOX: [&str; 7] = ["n", "min", "q1", "median", "q3", "max", "count"];
    pub const OPT_TRACE: [&str; 4] = ["iter", "objective", "grad_norm", "step_size"];
    pub const L1: [&str; 8] = [
        "degree_n",
        "oversample",
        "coefficient_phase",
        "l1_estimate",
        "ratio_to_sqrt_n",
        "upper_bound",
        "sqrt_n_gap",
        "quadrature_delta",
    ];
    pub const CREST: [&str; 6] = ["n_tones", "oversample", "phase", "crest_factor_db", "peak", "rms"];
}

/// Header metadata shared by all artifacts of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub kind: String,
    /// Raw text of the config that produced the artifact.
    pub config_text: String,
    /// `key=value` pairs that took precedence over the config text.
    pub overrides: Vec<String>,
}

impl Provenance {
    pub fn new(kind: impl Into<String>, config_text: impl Into<String>) -> Self {
        Self { kind: kind.into(), config_text: config_text.into(), overrides: Vec::new() }
    }

    pub fn with_override(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.overrides.push(format!("{key}={value}"));
        self
    }

    fn header(&self) -> String {
        let mut out = format!("# format: {FORMAT_VERSION}\n# tool: {TOOL}\n# kind: {}\n", self.kind);
        for line in self.config_text.lines() {
            out.push_str("# config: ");
            out.push_str(line);
            out.push('\n');
        }
        for o in &self.overrides {
            out.push_str("# override: ");
            out.push_str(o);
            out.push('\n');
        }
        out
    }
}

fn num(v: f64) -> String {
    format!("{v}")
}

fn write_csv<I>(prov: &Provenance, cols: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut body = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Format(e.to_string());
    body.write_record(cols).map_err(io_err)?;
    for row in rows {
        body.write_record(&row).map_err(io_err)?;
    }
    let bytes = body.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    let mut out = prov.header();
    out.push_str(std::str::from_utf8(&bytes).map_err(|e| Error::Format(e.to_string()))?);
    Ok(out)
}

/// `index,target,recon,abs_diff`.
pub fn reconstruct_csv(prov: &Provenance, target: &Spectrum, recon: &Spectrum) -> Result<String> {
    if target.len() != recon.len() {
        return Err(Error::LengthMismatch { expected: target.len(), found: recon.len() });
    }
    let rows = target
        .iter()
        .zip(recon.iter())
        .enumerate()
        .map(|(i, (t, r))| vec![i.to_string(), num(*t), num(*r), num((r - t).abs())]);
    write_csv(prov, &columns::RECONSTRUCT, rows)
}

/// One row per [`ErrorRecord`].
pub fn sweep_csv(prov: &Provenance, records: &[ErrorRecord]) -> Result<String> {
    let rows = records.iter().map(|r| {
        vec![
            r.n.to_string(),
            num(r.sup_error),
            num(r.rms_error),
            r.phase_kind.as_str().to_string(),
            r.normalization.as_str().to_string(),
            r.reversal.as_str().to_string(),
            r.descriptor_id.clone(),
        ]
    });
    write_csv(prov, &columns::SWEEP, rows)
}

/// Raw per-member rows, ordered by size then member index.
pub fn ensemble_raw_csv(prov: &Provenance, levels: &BTreeMap<usize, EnsembleLevel>) -> Result<String> {
    let rows = levels.iter().flat_map(|(n, level)| {
        level.records.iter().map(move |r| {
            vec![n.to_string(), r.member.map(|m| m.to_string()).unwrap_or_default(), num(r.rms_error)]
        })
    });
    write_csv(prov, &columns::ENSEMBLE_RAW, rows)
}

/// One box-statistics row per size.
pub fn ensemble_box_csv(prov: &Provenance, levels: &BTreeMap<usize, EnsembleLevel>) -> Result<String> {
    let rows = levels.iter().map(|(n, level)| {
        let s = level.rms_stats;
        vec![n.to_string(), num(s.min), num(s.q1), num(s.median), num(s.q3), num(s.max), s.count.to_string()]
    });
    write_csv(prov, &columns::ENSEMBLE_BOX, rows)
}

/// Per-iteration optimizer trace.
pub fn opt_trace_csv(prov: &Provenance, report: &OptReport) -> Result<String> {
    let rows = report.iterations.iter().map(|it| {
        vec![it.iter.to_string(), num(it.objective), num(it.gradient_norm), num(it.step_size)]
    });
    write_csv(prov, &columns::OPT_TRACE, rows)
}

pub fn l1_csv(prov: &Provenance, reports: &[L1Report]) -> Result<String> {
    let rows = reports.iter().map(|r| {
        vec![
            r.degree_n.to_string(),
            r.oversample.to_string(),
            match r.coefficient_phase {
                crate::extremal::PolynomialPhase::Original => "original".to_string(),
                crate::extremal::PolynomialPhase::Chirp => "chirp".to_string(),
            },
            num(r.l1_estimate),
            r.ratio_to_sqrt_n.map(num).unwrap_or_default(),
            num(r.upper_bound),
            num(r.sqrt_n_gap),
            num(r.quadrature_delta),
        ]
    });
    write_csv(prov, &columns::L1, rows)
}

/// Crest reports, each tagged with the name of the phase it was computed for.
pub fn crest_csv(prov: &Provenance, reports: &[(String, CrestReport)]) -> Result<String> {
    let rows = reports.iter().map(|(phase, r)| {
        vec![
            r.n_tones.to_string(),
            r.oversample.to_string(),
            phase.clone(),
            num(r.crest_factor_db),
            num(r.peak),
            num(r.rms),
        ]
    });
    write_csv(prov, &columns::CREST, rows)
}

#[derive(Serialize)]
struct JsonArtifact<'a, T: Serialize> {
    format: &'a str,
    tool: &'a str,
    kind: &'a str,
    config_text: &'a str,
    overrides: &'a [String],
    report: &'a T,
}

/// Pretty JSON wrapping `report` with the format tags and the config echo.
pub fn json_artifact<T: Serialize>(prov: &Provenance, report: &T) -> Result<String> {
    let wrapped = JsonArtifact {
        format: FORMAT_VERSION,
        tool: TOOL,
        kind: &prov.kind,
        config_text: &prov.config_text,
        overrides: &prov.overrides,
        report,
    };
    let mut s = serde_json::to_string_pretty(&wrapped).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parsed `#` header of a CSV artifact.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvHeader {
    pub format: String,
    pub tool: Option<String>,
    pub kind: Option<String>,
    pub config_text: String,
    pub overrides: Vec<String>,
    pub columns: Vec<String>,
}

/// Parses the header block and column line, refusing unknown format tags.
pub fn read_csv_header(text: &str) -> Result<CsvHeader> {
    let mut format = None;
    let mut tool = None;
    let mut kind = None;
    let mut config = Vec::new();
    let mut overrides = Vec::new();
    let mut column_line = None;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.strip_prefix(' ').unwrap_or(rest);
            if let Some(v) = rest.strip_prefix("format: ") {
                format = Some(v.to_string());
            } else if let Some(v) = rest.strip_prefix("tool: ") {
                tool = Some(v.to_string());
            } else if let Some(v) = rest.strip_prefix("kind: ") {
                kind = Some(v.to_string());
            } else if let Some(v) = rest.strip_prefix("config: ") {
                config.push(v);
            } else if let Some(v) = rest.strip_prefix("override: ") {
                overrides.push(v.to_string());
            }
        } else {
            column_line = Some(line);
            break;
        }
    }
    let format = format.ok_or_else(|| Error::Format("missing `# format:` header line".into()))?;
    if format != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format {format:?}, expected {FORMAT_VERSION:?}")));
    }
    let columns = column_line
        .ok_or_else(|| Error::Format("missing column line".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    Ok(CsvHeader { format, tool, kind, config_text: config.join("\n"), overrides, columns })
}
