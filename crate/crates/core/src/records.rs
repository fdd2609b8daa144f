//! Record interchange: CSV and JSON-lines.
//!
//! One row per (drop, band). The CSV header is fixed:
//!
//! ```text
//! drop_id,band_ghz,state,d_m,pl_db,sf_db,ds_log10s,asa_log10deg,zsa_log10deg,bc90_hz
//! ```
//!
//! Floating-point fields carry 6 significant digits. Missing angular values
//! are empty fields in CSV and `null` in JSON-lines.

use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dispersion::{asa_from_taps, rms_delay_spread, zsa_from_taps};
use crate::error::{Error, Result};
use crate::estimator::{beams_to_tap_set, linear_to_db, threshold_pdp, BeamCapture, Pdp};
use crate::lsp::DropRecord;
use crate::params::{ChannelState, FrequencyBand};

pub const RECORD_HEADER: &str = "drop_id,band_ghz,state,d_m,pl_db,sf_db,ds_log10s,asa_log10deg,zsa_log10deg,bc90_hz";
const FIELDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(Error::Config(format!("unknown format {other:?} (expected csv or jsonl)"))),
        }
    }
}

/// Formats with 6 significant digits, plain notation for moderate
/// magnitudes and exponent notation otherwise. Trailing zeros are dropped.
pub fn fmt_sig6(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        trim_zeros(&s).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds to 6 significant digits through the textual form.
pub fn round_sig6(v: f64) -> f64 {
    fmt_sig6(v).parse().unwrap_or(v)
}

/// One (drop, band) row of the interchange format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub drop_id: u64,
    pub band_ghz: FrequencyBand,
    pub state: ChannelState,
    pub d_m: f64,
    pub pl_db: f64,
    pub sf_db: f64,
    pub ds_log10s: f64,
    pub asa_log10deg: Option<f64>,
    pub zsa_log10deg: Option<f64>,
    pub bc90_hz: f64,
}

impl RecordRow {
    /// Rows for every band of a drop.
    pub fn from_drop(drop: &DropRecord) -> Vec<RecordRow> {
        drop.bands
            .iter()
            .map(|o| RecordRow {
                drop_id: drop.drop_id,
                band_ghz: o.band,
                state: drop.state,
                d_m: drop.distance_m,
                pl_db: o.pl_db,
                sf_db: o.lsp.sf_db,
                ds_log10s: o.lsp.ds_log10s,
                asa_log10deg: o.lsp.asa_log10deg,
                zsa_log10deg: o.lsp.zsa_log10deg,
                bc90_hz: o.bc90_hz,
            })
            .collect()
    }

    /// Copy with every float rounded to 6 significant digits.
    pub fn rounded(&self) -> RecordRow {
        RecordRow {
            d_m: round_sig6(self.d_m),
            pl_db: round_sig6(self.pl_db),
            sf_db: round_sig6(self.sf_db),
            ds_log10s: round_sig6(self.ds_log10s),
            asa_log10deg: self.asa_log10deg.map(round_sig6),
            zsa_log10deg: self.zsa_log10deg.map(round_sig6),
            bc90_hz: round_sig6(self.bc90_hz),
            ..*self
        }
    }

    fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_sig6).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.drop_id,
            self.band_ghz.label(),
            self.state.label(),
            fmt_sig6(self.d_m),
            fmt_sig6(self.pl_db),
            fmt_sig6(self.sf_db),
            fmt_sig6(self.ds_log10s),
            opt(self.asa_log10deg),
            opt(self.zsa_log10deg),
            fmt_sig6(self.bc90_hz),
        )
    }

    fn from_csv_fields(fields: &csv::StringRecord, line: u64) -> Result<RecordRow> {
        let err = |message: String| Error::Schema { line, message };
        if fields.len() != FIELDS {
            return Err(err(format!("expected {FIELDS} fields, found {}", fields.len())));
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            fields[i]
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("field {name}: {:?} is not a finite number", &fields[i])))
        };
        let opt = |i: usize, name: &str| -> Result<Option<f64>> {
            if fields[i].trim().is_empty() {
                Ok(None)
            } else {
                num(i, name).map(Some)
            }
        };
        Ok(RecordRow {
            drop_id: fields[0]
                .trim()
                .parse()
                .map_err(|_| err(format!("field drop_id: {:?} is not an unsigned integer", &fields[0])))?,
            band_ghz: fields[1].parse().map_err(|e: Error| err(e.to_string()))?,
            state: fields[2].parse().map_err(|e: Error| err(e.to_string()))?,
            d_m: num(3, "d_m")?,
            pl_db: num(4, "pl_db")?,
            sf_db: num(5, "sf_db")?,
            ds_log10s: num(6, "ds_log10s")?,
            asa_log10deg: opt(7, "asa_log10deg")?,
            zsa_log10deg: opt(8, "zsa_log10deg")?,
            bc90_hz: num(9, "bc90_hz")?,
        })
    }
}

/// Streams rows in either format. CSV writes the header on creation.
pub struct RecordWriter<W: Write> {
    out: W,
    format: Format,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W, format: Format) -> Result<Self> {
        if format == Format::Csv {
            writeln!(out, "{RECORD_HEADER}")?;
        }
        Ok(RecordWriter { out, format })
    }

    pub fn write(&mut self, row: &RecordRow) -> Result<()> {
        match self.format {
            Format::Csv => writeln!(self.out, "{}", row.csv_line())?,
            Format::Jsonl => {
                let line = serde_json::to_string(&row.rounded()).map_err(|e| Error::Numeric(e.to_string()))?;
                writeln!(self.out, "{line}")?;
            }
        }
        Ok(())
    }

    pub fn into_inner(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn write_records<W: Write>(out: W, format: Format, rows: &[RecordRow]) -> Result<W> {
    let mut w = RecordWriter::new(out, format)?;
    for r in rows {
        w.write(r)?;
    }
    w.into_inner()
}

/// Reads CSV rows, checking the header byte for byte.
pub fn read_csv_records<R: BufRead>(input: R) -> Result<Vec<RecordRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut rows = Vec::new();
    let mut header_seen = false;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::Schema { line, message: e.to_string() }
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if !header_seen {
            let got = rec.iter().collect::<Vec<_>>().join(",");
            if got != RECORD_HEADER {
                return Err(Error::Schema { line, message: format!("header {got:?} does not match {RECORD_HEADER:?}") });
            }
            header_seen = true;
            continue;
        }
        rows.push(RecordRow::from_csv_fields(&rec, line)?);
    }
    if !header_seen {
        return Err(Error::Schema { line: 1, message: "missing header".into() });
    }
    Ok(rows)
}

/// Measurement-style record carrying raw PDP and/or per-beam payloads.
///
/// PDP powers are channel gains in dB, so path loss is the negated dB sum of
/// the thresholded profile. Angular spreads need `beams`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMeasurement {
    pub drop_id: u64,
    pub band_ghz: FrequencyBand,
    pub state: ChannelState,
    pub d_m: f64,
    #[serde(default)]
    pub pdp: Option<Pdp>,
    #[serde(default)]
    pub beams: Option<Vec<BeamCapture>>,
}

/// Per-location quantities the estimator consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub drop_id: u64,
    pub band: FrequencyBand,
    pub state: ChannelState,
    pub d_m: f64,
    pub pl_db: f64,
    pub ds_log10s: f64,
    pub asa_log10deg: Option<f64>,
    pub zsa_log10deg: Option<f64>,
}

impl From<&RecordRow> for Observation {
    fn from(r: &RecordRow) -> Self {
        Observation {
            drop_id: r.drop_id,
            band: r.band_ghz,
            state: r.state,
            d_m: r.d_m,
            pl_db: r.pl_db,
            ds_log10s: r.ds_log10s,
            asa_log10deg: r.asa_log10deg,
            zsa_log10deg: r.zsa_log10deg,
        }
    }
}

fn positive_log10(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v.log10())
    } else {
        Err(Error::domain(format!("{what} is zero after thresholding")))
    }
}

impl RawMeasurement {
    /// Thresholds the payloads and reduces them to path loss, delay spread
    /// and (with beams) angular spreads. Omni PDPs take precedence for path
    /// loss; beam data takes precedence for dispersion.
    pub fn observe(&self) -> Result<Observation> {
        let omni = self.pdp.as_ref().map(threshold_pdp);
        let beam_taps = self.beams.as_deref().map(beams_to_tap_set).transpose()?;
        let power = match (&omni, &beam_taps) {
            (Some(p), _) => p.total_power(),
            (None, Some(t)) => t.taps().iter().map(|t| t.power).sum(),
            (None, None) => return Err(Error::domain("measurement has neither pdp nor beams")),
        };
        if !(power > 0.0) {
            return Err(Error::domain("no taps above the noise threshold"));
        }
        let delay_taps = match (&beam_taps, &omni) {
            (Some(t), _) => t.clone(),
            (None, Some(p)) => p.to_tap_set()?,
            (None, None) => unreachable!(),
        };
        let ds = positive_log10(rms_delay_spread(&delay_taps)?, "delay spread")?;
        let (asa, zsa) = match &beam_taps {
            Some(t) => (
                Some(positive_log10(asa_from_taps(t)?, "azimuth spread")?),
                Some(positive_log10(zsa_from_taps(t)?, "zenith spread")?),
            ),
            None => (None, None),
        };
        Ok(Observation {
            drop_id: self.drop_id,
            band: self.band_ghz,
            state: self.state,
            d_m: self.d_m,
            pl_db: -linear_to_db(power),
            ds_log10s: ds,
            asa_log10deg: asa,
            zsa_log10deg: zsa,
        })
    }
}

/// Reads JSON-lines holding either plain rows or raw measurements (any
/// object with a `pdp` or `beams` key).
pub fn read_jsonl_observations<R: BufRead>(input: R) -> Result<Vec<Observation>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Schema { line: line_no, message };
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let raw = value.get("pdp").is_some() || value.get("beams").is_some();
        let obs = if raw {
            let m: RawMeasurement = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
            m.observe().map_err(|e| err(e.to_string()))?
        } else {
            let r: RecordRow = serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
            Observation::from(&r)
        };
        out.push(obs);
    }
    Ok(out)
}

/// Reads plain JSON-lines rows.
pub fn read_jsonl_records<R: BufRead>(input: R) -> Result<Vec<RecordRow>> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|e| Error::Schema { line: idx as u64 + 1, message: e.to_string() })?;
        out.push(row);
    }
    Ok(out)
}

pub fn read_observations<R: BufRead>(input: R, format: Format) -> Result<Vec<Observation>> {
    match format {
        Format::Csv => Ok(read_csv_records(input)?.iter().map(Observation::from).collect()),
        Format::Jsonl => read_jsonl_observations(input),
    }
}
