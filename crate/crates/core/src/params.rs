//! Measured model coefficients and correlation structures for the three
//! indoor-office bands.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dispersion::{coherence_bandwidth, CoherenceLevel};
use crate::error::{Error, Result};
use crate::propagation::fspl_db;

/// Relative tolerance for the coherence-bandwidth self-consistency audit.
pub const BC_REL_TOLERANCE: f64 = 0.10;
/// Maximum allowed gap between a LOS intercept and free-space loss at 1 m.
pub const FSPL_GAP_TOLERANCE_DB: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrequencyBand {
    #[serde(rename = "6.9")]
    B6_9,
    #[serde(rename = "8.3")]
    B8_3,
    #[serde(rename = "14.5")]
    B14_5,
}

impl FrequencyBand {
    pub const ALL: [FrequencyBand; 3] = [FrequencyBand::B6_9, FrequencyBand::B8_3, FrequencyBand::B14_5];

    pub fn center_frequency_hz(self) -> f64 {
        match self {
            FrequencyBand::B6_9 => 6.9e9,
            FrequencyBand::B8_3 => 8.3e9,
            FrequencyBand::B14_5 => 14.5e9,
        }
    }

    /// Wire label in GHz ("6.9", "8.3", "14.5").
    pub fn label(self) -> &'static str {
        match self {
            FrequencyBand::B6_9 => "6.9",
            FrequencyBand::B8_3 => "8.3",
            FrequencyBand::B14_5 => "14.5",
        }
    }

    /// Whether the band was measured with phased arrays, i.e. carries
    /// angular-spread statistics. 6.9 GHz was omni-only.
    pub fn has_arrays(self) -> bool {
        !matches!(self, FrequencyBand::B6_9)
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for FrequencyBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for FrequencyBand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "6.9" => Ok(FrequencyBand::B6_9),
            "8.3" => Ok(FrequencyBand::B8_3),
            "14.5" => Ok(FrequencyBand::B14_5),
            other => Err(Error::domain(format!("unknown band {other:?} (expected 6.9, 8.3 or 14.5)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelState {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

impl ChannelState {
    pub const ALL: [ChannelState; 2] = [ChannelState::Los, ChannelState::Nlos];

    pub fn label(self) -> &'static str {
        match self {
            ChannelState::Los => "LOS",
            ChannelState::Nlos => "NLOS",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ChannelState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ChannelState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "LOS" => Ok(ChannelState::Los),
            "NLOS" => Ok(ChannelState::Nlos),
            other => Err(Error::domain(format!("unknown state {other:?} (expected LOS or NLOS)"))),
        }
    }
}

/// Large-scale parameter axes, in the fixed order used by every matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lsp {
    Sf,
    Ds,
    Asa,
    Zsa,
}

impl Lsp {
    pub const ALL: [Lsp; 4] = [Lsp::Sf, Lsp::Ds, Lsp::Asa, Lsp::Zsa];

    pub fn label(self) -> &'static str {
        match self {
            Lsp::Sf => "SF",
            Lsp::Ds => "DS",
            Lsp::Asa => "ASA",
            Lsp::Zsa => "ZSA",
        }
    }

    /// Axes available for a band.
    pub fn axes_for(band: FrequencyBand) -> &'static [Lsp] {
        if band.has_arrays() {
            &Lsp::ALL
        } else {
            &Lsp::ALL[..2]
        }
    }
}

/// Parameters that have inter-frequency correlations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterFreqParam {
    Ds,
    Sf,
}

/// Mean and standard deviation of a log10-transformed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMoments {
    pub mu: f64,
    pub sigma: f64,
}

impl LogMoments {
    pub const fn new(mu: f64, sigma: f64) -> Self {
        LogMoments { mu, sigma }
    }
}

/// Model coefficients for one (band, state) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTable {
    /// Path loss intercept at 1 m, dB.
    pub pl0: f64,
    /// Path loss exponent.
    pub ple: f64,
    /// Shadow fading standard deviation, dB.
    pub sigma_s: f64,
    /// log10(delay spread / 1 s) mean.
    pub ds_mu: f64,
    pub ds_sigma: f64,
    /// Coherence bandwidth at 0.5 frequency correlation, Hz.
    pub bc50: f64,
    /// Coherence bandwidth at 0.9 frequency correlation, Hz.
    pub bc90: f64,
    /// log10(ASA / 1 deg) moments.
    pub asa: Option<LogMoments>,
    /// log10(ZSA / 1 deg) moments.
    pub zsa: Option<LogMoments>,
}

impl ParamTable {
    /// Checks the structural invariants of a table for `band`.
    pub fn check(&self, band: FrequencyBand) -> Result<()> {
        let finite = [self.pl0, self.ple, self.sigma_s, self.ds_mu, self.ds_sigma, self.bc50, self.bc90];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("table contains non-finite values"));
        }
        if self.sigma_s <= 0.0 {
            return Err(Error::domain("sigma_s must be > 0"));
        }
        if self.ds_sigma <= 0.0 {
            return Err(Error::domain("ds_sigma must be > 0"));
        }
        if self.ple <= 0.0 {
            return Err(Error::domain("ple must be > 0"));
        }
        if !(self.bc50 > self.bc90 && self.bc90 > 0.0) {
            return Err(Error::domain("coherence bandwidths must satisfy bc50 > bc90 > 0"));
        }
        if band.has_arrays() != (self.asa.is_some() && self.zsa.is_some()) {
            return Err(Error::domain(format!(
                "angular moments must be present exactly for array bands (band {band})"
            )));
        }
        if self.asa.is_some() != self.zsa.is_some() {
            return Err(Error::domain("ASA and ZSA moments must be given together"));
        }
        for m in self.asa.iter().chain(self.zsa.iter()) {
            if !(m.mu.is_finite() && m.sigma.is_finite() && m.sigma > 0.0) {
                return Err(Error::domain("angular sigma must be finite and > 0"));
            }
        }
        Ok(())
    }
}

const MHZ: f64 = 1e6;

/// Built-in coefficients. Delay-spread means carry two decimals.
pub fn builtin_table(band: FrequencyBand, state: ChannelState) -> ParamTable {
    use ChannelState::*;
    use FrequencyBand::*;
    let (pl0, ple, sigma_s, ds_mu, ds_sigma, bc50, bc90, ang) = match (band, state) {
        (B6_9, Los) => (48.3, 1.5, 2.9, -7.92, 0.34, 16.5, 1.7, None),
        (B6_9, Nlos) => (42.6, 3.2, 6.6, -7.60, 0.23, 8.0, 0.8, None),
        (B8_3, Los) => (51.1, 1.4, 2.6, -7.88, 0.34, 15.0, 1.5, Some(((1.71, 0.13), (1.24, 0.03)))),
        (B8_3, Nlos) => (45.0, 3.2, 6.6, -7.58, 0.21, 7.6, 0.7, Some(((1.84, 0.13), (1.22, 0.03)))),
        (B14_5, Los) => (56.6, 1.5, 2.3, -7.94, 0.34, 17.3, 1.7, Some(((1.55, 0.15), (1.04, 0.06)))),
        (B14_5, Nlos) => (51.4, 3.4, 7.3, -7.59, 0.22, 7.8, 0.7, Some(((1.77, 0.15), (1.03, 0.07)))),
    };
    ParamTable {
        pl0,
        ple,
        sigma_s,
        ds_mu,
        ds_sigma,
        bc50: bc50 * MHZ,
        bc90: bc90 * MHZ,
        asa: ang.map(|((m, s), _)| LogMoments::new(m, s)),
        zsa: ang.map(|(_, (m, s))| LogMoments::new(m, s)),
    }
}

/// Square, symmetric, unit-diagonal correlation matrix over named axes.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    values: DMatrix<f64>,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl CorrelationMatrix {
    pub fn new(labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::domain(format!(
                "matrix is {}x{} but {} labels were given",
                values.nrows(),
                values.ncols(),
                n
            )));
        }
        for i in 0..n {
            if (values[(i, i)] - 1.0).abs() > SYMMETRY_TOL {
                return Err(Error::domain(format!("diagonal entry {i} is {} (expected 1)", values[(i, i)])));
            }
            for j in 0..n {
                let v = values[(i, j)];
                if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                    return Err(Error::domain(format!("entry ({i},{j}) = {v} outside [-1, 1]")));
                }
                if (v - values[(j, i)]).abs() > SYMMETRY_TOL {
                    return Err(Error::domain(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(CorrelationMatrix { labels, values })
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let n = labels.len();
        CorrelationMatrix { labels, values: DMatrix::identity(n, n) }
    }

    /// Builds a matrix from its strict upper triangle, row by row.
    pub fn from_upper(labels: &[&str], upper: &[f64]) -> Result<Self> {
        let n = labels.len();
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::domain("upper-triangle length does not match label count"));
        }
        let mut m = DMatrix::identity(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = upper[k];
                m[(j, i)] = upper[k];
                k += 1;
            }
        }
        Self::new(labels.iter().map(|s| s.to_string()).collect(), m)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Entry by axis labels.
    pub fn get(&self, row: &str, col: &str) -> Option<f64> {
        Some(self.values[(self.index_of(row)?, self.index_of(col)?)])
    }
}

/// Per-band cross-correlation matrix over [SF, DS, ASA, ZSA] (or [SF, DS] at
/// 6.9 GHz).
pub fn cross_corr_matrix(band: FrequencyBand, state: ChannelState) -> CorrelationMatrix {
    use ChannelState::*;
    use FrequencyBand::*;
    // Upper triangle: SF-DS, SF-ASA, SF-ZSA, DS-ASA, DS-ZSA, ASA-ZSA
    let upper: &[f64] = match (band, state) {
        (B6_9, Los) => &[-0.72],
        (B6_9, Nlos) => &[-0.55],
        (B8_3, Los) => &[-0.54, -0.66, -0.27, 0.58, 0.11, 0.24],
        (B8_3, Nlos) => &[-0.51, -0.42, -0.38, 0.39, -0.05, 0.18],
        (B14_5, Los) => &[-0.39, -0.47, 0.05, 0.80, 0.09, 0.01],
        (B14_5, Nlos) => &[-0.30, -0.34, -0.32, 0.44, -0.06, 0.12],
    };
    let labels: Vec<&str> = Lsp::axes_for(band).iter().map(|l| l.label()).collect();
    CorrelationMatrix::from_upper(&labels, upper).expect("built-in correlation matrix is well formed")
}

/// Inter-frequency correlation over [6.9, 8.3, 14.5] GHz.
pub fn interfreq_corr_matrix(param: InterFreqParam, state: ChannelState) -> CorrelationMatrix {
    use ChannelState::*;
    use InterFreqParam::*;
    // Upper triangle: (6.9, 8.3), (6.9, 14.5), (8.3, 14.5)
    let upper: &[f64] = match (param, state) {
        (Ds, Los) => &[0.37, 0.41, 0.43],
        (Ds, Nlos) => &[0.70, 0.70, 0.71],
        (Sf, Los) => &[-0.08, 0.05, 0.00],
        (Sf, Nlos) => &[0.91, 0.86, 0.90],
    };
    let labels: Vec<&str> = FrequencyBand::ALL.iter().map(|b| b.label()).collect();
    CorrelationMatrix::from_upper(&labels, upper).expect("built-in correlation matrix is well formed")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// bc50 against 1/(5 * 10^ds_mu).
    Bc50,
    /// bc90 against 1/(50 * 10^ds_mu).
    Bc90,
    /// LOS intercept against free-space loss at 1 m.
    FsplIntercept,
}

impl CheckKind {
    pub fn label(self) -> &'static str {
        match self {
            CheckKind::Bc50 => "bc50",
            CheckKind::Bc90 => "bc90",
            CheckKind::FsplIntercept => "fspl",
        }
    }
}

/// One self-consistency check of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyCheck {
    pub kind: CheckKind,
    pub band: FrequencyBand,
    pub state: ChannelState,
    /// Value stored in the table.
    pub table_value: f64,
    /// Value implied by the model formula.
    pub derived_value: f64,
    /// Relative deviation for bandwidth checks, absolute dB for FSPL.
    pub deviation: f64,
    pub limit: f64,
}

impl ConsistencyCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.limit
    }
}

impl fmt::Display for ConsistencyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        match self.kind {
            CheckKind::FsplIntercept => write!(
                f,
                "{verdict} {} {} {}: pl0 {:.2} dB vs FSPL(1 m) {:.2} dB, gap {:.2} dB (limit {:.2})",
                self.kind.label(),
                self.band,
                self.state,
                self.table_value,
                self.derived_value,
                self.deviation,
                self.limit
            ),
            _ => write!(
                f,
                "{verdict} {} {} {}: table {:.3} MHz vs 1/(K tau) {:.3} MHz, rel dev {:.3} (limit {:.2})",
                self.kind.label(),
                self.band,
                self.state,
                self.table_value / MHZ,
                self.derived_value / MHZ,
                self.deviation,
                self.limit
            ),
        }
    }
}

/// Runs every self-consistency check that applies to a table.
pub fn audit_table(table: &ParamTable, band: FrequencyBand, state: ChannelState) -> Vec<ConsistencyCheck> {
    let mut checks = Vec::with_capacity(3);
    let tau = 10f64.powf(table.ds_mu);
    for (kind, level, stored) in [
        (CheckKind::Bc50, CoherenceLevel::R50, table.bc50),
        (CheckKind::Bc90, CoherenceLevel::R90, table.bc90),
    ] {
        // tau > 0 always holds for a finite ds_mu
        let derived = coherence_bandwidth(tau, level).unwrap_or(f64::NAN);
        let deviation = ((stored - derived) / stored).abs();
        checks.push(ConsistencyCheck {
            kind,
            band,
            state,
            table_value: stored,
            derived_value: derived,
            deviation: if deviation.is_nan() { f64::INFINITY } else { deviation },
            limit: BC_REL_TOLERANCE,
        });
    }
    if state == ChannelState::Los {
        let fspl = fspl_db(band.center_frequency_hz(), 1.0).expect("positive band frequency");
        checks.push(ConsistencyCheck {
            kind: CheckKind::FsplIntercept,
            band,
            state,
            table_value: table.pl0,
            derived_value: fspl,
            deviation: (table.pl0 - fspl).abs(),
            limit: FSPL_GAP_TOLERANCE_DB,
        });
    }
    checks
}

/// Returns only the failing checks; an empty list means the table is
/// consistent.
pub fn validate_table(table: &ParamTable, band: FrequencyBand, state: ChannelState) -> Vec<ConsistencyCheck> {
    audit_table(table, band, state).into_iter().filter(|c| !c.passed()).collect()
}

/// Tables and correlation structures for all bands and states.
#[derive(Debug, Clone)]
pub struct ModelRegistry {
    tables: [[ParamTable; 2]; 3],
    cross: [[CorrelationMatrix; 2]; 3],
    interfreq_ds: [CorrelationMatrix; 2],
    interfreq_sf: [CorrelationMatrix; 2],
}

impl ModelRegistry {
    pub fn builtin() -> Self {
        fn per<T>(f: impl Fn(FrequencyBand, ChannelState) -> T) -> [[T; 2]; 3] {
            FrequencyBand::ALL.map(|b| ChannelState::ALL.map(|s| f(b, s)))
        }
        ModelRegistry {
            tables: per(builtin_table),
            cross: per(cross_corr_matrix),
            interfreq_ds: ChannelState::ALL.map(|s| interfreq_corr_matrix(InterFreqParam::Ds, s)),
            interfreq_sf: ChannelState::ALL.map(|s| interfreq_corr_matrix(InterFreqParam::Sf, s)),
        }
    }

    pub fn table(&self, band: FrequencyBand, state: ChannelState) -> &ParamTable {
        &self.tables[band.index()][state.index()]
    }

    pub fn cross_corr(&self, band: FrequencyBand, state: ChannelState) -> &CorrelationMatrix {
        &self.cross[band.index()][state.index()]
    }

    pub fn interfreq(&self, param: InterFreqParam, state: ChannelState) -> &CorrelationMatrix {
        match param {
            InterFreqParam::Ds => &self.interfreq_ds[state.index()],
            InterFreqParam::Sf => &self.interfreq_sf[state.index()],
        }
    }

    /// Replaces one table after checking its invariants.
    pub fn set_table(&mut self, band: FrequencyBand, state: ChannelState, table: ParamTable) -> Result<()> {
        table.check(band)?;
        self.tables[band.index()][state.index()] = table;
        Ok(())
    }

    /// Every consistency check over all six tables.
    pub fn audit(&self) -> Vec<ConsistencyCheck> {
        FrequencyBand::ALL
            .iter()
            .flat_map(|&b| ChannelState::ALL.iter().flat_map(move |&s| audit_table(self.table(b, s), b, s)))
            .collect()
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
