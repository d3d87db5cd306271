//! On-disk record formats: a versioned JSON envelope for every record type
//! and gnuplot-ready CSV exports.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::dns::GrowthMeasurement;
use crate::error::{Error, Result};
use crate::hill::{PropositionReport, SpectrumSummary};
use crate::scanner::{HypothesisReport, InstabilitySpectrum, StabilityScan};
use crate::wave::{ProblemParams, WaveProfile};

pub const SCHEMA_VERSION: u32 = 1;

/// A serializable artifact with a stable type tag.
pub trait Record: Serialize + DeserializeOwned {
    const TYPE: &'static str;
}

macro_rules! record {
    ($($t:ty => $tag:literal),* $(,)?) => {
        $(impl Record for $t { const TYPE: &'static str = $tag; })*
    };
}

record! {
    WaveProfile => "wave_profile",
    SpectrumSummary => "spectrum_summary",
    PropositionReport => "proposition_report",
    HypothesisReport => "hypothesis_report",
    InstabilitySpectrum => "instability_spectrum",
    StabilityScan => "stability_scan",
    GrowthMeasurement => "growth_measurement",
    DnsSummary => "dns_summary",
    PipelineReport => "pipeline_report",
}

/// Short DNS result written next to the growth CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DnsSummary {
    pub kappa: f64,
    pub fitted_rate: f64,
    pub fit_residual: f64,
    pub scanner_lambda: f64,
    pub relative_gap: Option<f64>,
}

impl From<&GrowthMeasurement> for DnsSummary {
    fn from(m: &GrowthMeasurement) -> Self {
        DnsSummary {
            kappa: m.kappa,
            fitted_rate: m.fitted_rate,
            fit_residual: m.fit_residual,
            scanner_lambda: m.scanner_lambda,
            relative_gap: m.relative_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveSummary {
    pub id: String,
    pub params: ProblemParams,
    pub modes: usize,
    pub multiplier: f64,
    pub amplitude: f64,
    pub ode_residual_norm: f64,
    pub functional_value: f64,
    pub constant: bool,
}

impl From<&WaveProfile> for WaveSummary {
    fn from(w: &WaveProfile) -> Self {
        WaveSummary {
            id: w.id(),
            params: w.params,
            modes: w.modes(),
            multiplier: w.multiplier,
            amplitude: w.phi.max_abs(),
            ode_residual_norm: w.ode_residual_norm,
            functional_value: w.functional_value,
            constant: w.is_constant(),
        }
    }
}

/// Combined output of the full solve, spectrum, verify, scan, dns chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub wave: WaveSummary,
    pub spectra: Vec<SpectrumSummary>,
    pub propositions: PropositionReport,
    /// Changes of the lowest eigenvalues of 𝓛 under N → 2N.
    pub grid_doubling_deltas: Vec<f64>,
    pub hypotheses: HypothesisReport,
    pub scan_summary: ScanSummary,
    pub dns: Option<DnsSummary>,
    pub verdict: String,
    /// All scientific assertions held.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub steps: usize,
    pub band_edges: Vec<f64>,
    pub transversally_unstable: bool,
    pub max_growth_rate: f64,
    pub kappa_at_max_growth: f64,
}

impl From<&StabilityScan> for ScanSummary {
    fn from(s: &StabilityScan) -> Self {
        ScanSummary {
            kappa_min: s.kappa_values.first().copied().unwrap_or(0.0),
            kappa_max: s.kappa_values.last().copied().unwrap_or(0.0),
            steps: s.kappa_values.len(),
            band_edges: s.band_edges.clone(),
            transversally_unstable: s.transversally_unstable,
            max_growth_rate: s.max_growth_rate,
            kappa_at_max_growth: s.kappa_at_max_growth,
        }
    }
}

/// Writes every float with 17 significant digits so that reading it back
/// is exact.
struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", float(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn float(value: f64) -> String {
    format!("{value:.16e}")
}

#[derive(Serialize)]
struct EnvelopeOut<'a, T> {
    schema_version: u32,
    #[serde(rename = "type")]
    kind: &'a str,
    payload: &'a T,
}

#[derive(Deserialize)]
struct EnvelopeIn<'a> {
    schema_version: Option<u32>,
    #[serde(rename = "type")]
    kind: Option<String>,
    #[serde(borrow)]
    payload: Option<&'a RawValue>,
}

pub fn to_json<T: Record>(record: &T) -> Result<String> {
    let envelope = EnvelopeOut {
        schema_version: SCHEMA_VERSION,
        kind: T::TYPE,
        payload: record,
    };
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise);
    envelope.serialize(&mut ser).map_err(|e| Error::Parse {
        offset: 0,
        message: e.to_string(),
    })?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

pub fn from_json<T: Record>(text: &str) -> Result<T> {
    let envelope: EnvelopeIn = serde_json::from_str(text).map_err(|e| parse_error(text, 0, &e))?;
    let found = envelope.schema_version.ok_or_else(|| Error::Parse {
        offset: 0,
        message: "missing schema_version".into(),
    })?;
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    let kind = envelope.kind.unwrap_or_default();
    if kind != T::TYPE {
        return Err(Error::RecordType {
            expected: T::TYPE.into(),
            found: kind,
        });
    }
    let payload = envelope.payload.ok_or_else(|| Error::Parse {
        offset: text.len(),
        message: "missing payload".into(),
    })?;
    let raw = payload.get();
    // The raw payload borrows from `text`, so its position is the pointer gap.
    let base = raw.as_ptr() as usize - text.as_ptr() as usize;
    serde_json::from_str(raw).map_err(|e| parse_error(raw, base, &e))
}

fn parse_error(text: &str, base: usize, e: &serde_json::Error) -> Error {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(e.line().saturating_sub(1))
        .map(str::len)
        .sum();
    let offset = (line_start + e.column().saturating_sub(1)).min(text.len());
    Error::Parse {
        offset: base + offset,
        message: e.to_string(),
    }
}

pub fn write_record<T: Record>(path: &Path, record: &T) -> Result<()> {
    fs::write(path, to_json(record)?)?;
    Ok(())
}

pub fn read_record<T: Record>(path: &Path) -> Result<T> {
    from_json(&fs::read_to_string(path)?)
}

/// Reads the type tag without decoding the payload.
pub fn record_type(text: &str) -> Result<String> {
    let envelope: EnvelopeIn = serde_json::from_str(text).map_err(|e| parse_error(text, 0, &e))?;
    envelope.kind.ok_or_else(|| Error::Parse {
        offset: 0,
        message: "missing type".into(),
    })
}

fn csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `index,eigenvalue`, ascending.
pub fn spectrum_csv(summary: &SpectrumSummary) -> String {
    csv(
        &["index", "eigenvalue"],
        summary.eigenvalues.iter().enumerate().map(|(k, v)| vec![k.to_string(), float(*v)]),
    )
}

/// `kappa,max_real_part,num_unstable_modes,leading_lambda_re,leading_lambda_im`.
pub fn scan_csv(scan: &StabilityScan) -> String {
    csv(
        &["kappa", "max_real_part", "num_unstable_modes", "leading_lambda_re", "leading_lambda_im"],
        scan.records.iter().map(|r| {
            vec![
                float(r.kappa),
                float(r.max_real_part),
                r.num_unstable_modes.to_string(),
                float(r.leading_lambda.re),
                float(r.leading_lambda.im),
            ]
        }),
    )
}

/// `t,norm`.
pub fn growth_csv(m: &GrowthMeasurement) -> String {
    csv(
        &["t", "norm"],
        m.times.iter().zip(&m.norms).map(|(t, n)| vec![float(*t), float(*n)]),
    )
}

/// Parses a numeric CSV produced by the writers above.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.split_inclusive('\n');
    let header_line = lines.next().ok_or_else(|| Error::Parse {
        offset: 0,
        message: "empty CSV".into(),
    })?;
    let header: Vec<String> = header_line.trim_end_matches('\n').split(',').map(String::from).collect();
    let mut offset = header_line.len();
    let mut rows = Vec::new();
    for line in lines {
        let mut row = Vec::with_capacity(header.len());
        let mut col = offset;
        for cell in line.trim_end_matches('\n').split(',') {
            row.push(cell.parse::<f64>().map_err(|e| Error::Parse {
                offset: col,
                message: format!("{cell:?}: {e}"),
            })?);
            col += cell.len() + 1;
        }
        if row.len() != header.len() {
            return Err(Error::Parse {
                offset,
                message: format!("expected {} columns, found {}", header.len(), row.len()),
            });
        }
        rows.push(row);
        offset += line.len();
    }
    Ok((header, rows))
}

/// Human-readable one-line-per-check rendering of a proposition report.
pub fn describe_checks(report: &PropositionReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "{mark} {}: expected {}, observed {}", c.name, c.expected, c.observed);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_grid, Parity, RealField};

    fn constant_wave() -> WaveProfile {
        let two_pi = 2.0 * std::f64::consts::PI;
        let params = ProblemParams::new(2.0, 1.0, two_pi, two_pi, Parity::Even).unwrap();
        WaveProfile::from_field(params, RealField::constant(build_grid(two_pi, 16).unwrap(), 1.0), 1.0)
    }

    #[test]
    fn envelope_layout() {
        let json = to_json(&constant_wave()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["type"], "wave_profile");
        assert!(v["payload"].is_object());
        assert!(json.contains("1.0000000000000000e0"));
        assert!(json.ends_with('\n'));
    }

    #[test]
    fn wrong_version_and_type() {
        let json = to_json(&constant_wave()).unwrap();
        let bumped = json.replacen("\"schema_version\":1", "\"schema_version\":7", 1);
        assert!(matches!(
            from_json::<WaveProfile>(&bumped),
            Err(Error::SchemaVersion { found: 7, expected: 1 })
        ));
        assert!(matches!(from_json::<SpectrumSummary>(&json), Err(Error::RecordType { .. })));
        assert_eq!(record_type(&json).unwrap(), "wave_profile");
    }

    #[test]
    fn missing_version_is_rejected() {
        let text = r#"{"type":"dns_summary","payload":{}}"#;
        assert!(matches!(from_json::<DnsSummary>(text), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_offsets_point_at_the_damage() {
        let json = to_json(&constant_wave()).unwrap();
        let at = json.find("\"multiplier\"").unwrap();
        let mut broken = json.clone();
        broken.replace_range(at..at + 1, "#");
        match from_json::<WaveProfile>(&broken) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, at),
            other => panic!("{other:?}"),
        }
        // Damage inside the payload of an otherwise valid envelope.
        let at = json.find("\"multiplier\":").unwrap() + "\"multiplier\":".len();
        let mut broken = json.clone();
        broken.replace_range(at..at + 1, "\"");
        match from_json::<WaveProfile>(&broken) {
            Err(Error::Parse { offset, .. }) => assert!(offset >= at && offset < at + 30, "{offset} vs {at}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_shape() {
        let csv = csv(&["a", "b"], [vec!["1".into(), "2".into()]].into_iter());
        assert_eq!(csv, "a,b\n1,2\n");
        let (h, rows) = parse_csv(&csv).unwrap();
        assert_eq!(h, ["a", "b"]);
        assert_eq!(rows, vec![vec![1.0, 2.0]]);
        match parse_csv("a,b\n1,x\n") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
    }
}
