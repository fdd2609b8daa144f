//! Model fitting from measurement-style data.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dispersion::{Tap, TapSet, MAX_EXCESS_DELAY_S};
use crate::error::{Error, Result};
use crate::params::{ChannelState, FrequencyBand};

/// PDP taps below `noise floor + THRESHOLD_ABOVE_NOISE_DB` are discarded.
pub const THRESHOLD_ABOVE_NOISE_DB: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdpTap {
    pub delay_s: f64,
    pub power_db: f64,
}

/// Power delay profile with its mean noise floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPdp")]
pub struct Pdp {
    taps: Vec<PdpTap>,
    noise_floor_mean_db: f64,
}

#[derive(Deserialize)]
struct RawPdp {
    taps: Vec<PdpTap>,
    noise_floor_mean_db: f64,
}

impl TryFrom<RawPdp> for Pdp {
    type Error = Error;

    fn try_from(raw: RawPdp) -> Result<Self> {
        Pdp::new(raw.taps, raw.noise_floor_mean_db)
    }
}

impl Pdp {
    pub fn new(taps: Vec<PdpTap>, noise_floor_mean_db: f64) -> Result<Self> {
        if !noise_floor_mean_db.is_finite() {
            return Err(Error::domain("noise floor must be finite"));
        }
        for w in taps.windows(2) {
            if !(w[1].delay_s > w[0].delay_s) {
                return Err(Error::domain("PDP delays must be strictly increasing"));
            }
        }
        for t in &taps {
            if !(t.delay_s >= 0.0 && t.delay_s <= MAX_EXCESS_DELAY_S) || !t.power_db.is_finite() {
                return Err(Error::domain(format!("PDP tap at {} s is out of range", t.delay_s)));
            }
        }
        Ok(Pdp { taps, noise_floor_mean_db })
    }

    pub fn taps(&self) -> &[PdpTap] {
        &self.taps
    }

    pub fn noise_floor_mean_db(&self) -> f64 {
        self.noise_floor_mean_db
    }

    /// Sum of tap powers in the linear domain.
    pub fn total_power(&self) -> f64 {
        self.taps.iter().map(|t| db_to_linear(t.power_db)).sum()
    }

    pub fn to_tap_set(&self) -> Result<TapSet> {
        TapSet::new(self.taps.iter().map(|t| Tap::new(t.delay_s, db_to_linear(t.power_db))).collect())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

/// Keeps taps at or above the noise floor plus 15 dB.
pub fn threshold_pdp(pdp: &Pdp) -> Pdp {
    let limit = pdp.noise_floor_mean_db + THRESHOLD_ABOVE_NOISE_DB;
    Pdp {
        taps: pdp.taps.iter().copied().filter(|t| t.power_db >= limit).collect(),
        noise_floor_mean_db: pdp.noise_floor_mean_db,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Beam {
    pub azimuth_deg: f64,
    pub zenith_deg: f64,
    /// Linear received power.
    pub power: f64,
}

/// Half-power-beamwidth separated, non-overlapping beams. Separation is the
/// caller's responsibility; only distinctness is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSet {
    beams: Vec<Beam>,
}

impl BeamSet {
    pub fn new(beams: Vec<Beam>) -> Result<Self> {
        if beams.is_empty() {
            return Err(Error::domain("beam set is empty"));
        }
        for (i, a) in beams.iter().enumerate() {
            if !(a.power >= 0.0 && a.power.is_finite()) {
                return Err(Error::domain(format!("beam {i}: power must be non-negative")));
            }
            for b in &beams[i + 1..] {
                if a.azimuth_deg == b.azimuth_deg && a.zenith_deg == b.zenith_deg {
                    return Err(Error::domain("beam boresights must be distinct"));
                }
            }
        }
        Ok(BeamSet { beams })
    }

    pub fn beams(&self) -> &[Beam] {
        &self.beams
    }
}

/// Omnidirectional power synthesized as the linear sum of beam powers.
pub fn synth_omni_power(beams: &BeamSet) -> f64 {
    beams.beams.iter().map(|b| b.power).sum()
}

/// Per-beam PDP captured at a boresight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamCapture {
    pub azimuth_deg: f64,
    pub zenith_deg: f64,
    pub pdp: Pdp,
}

/// Merges thresholded per-beam PDPs into one angular tap set: taps sharing
/// a delay are summed in linear power and take the boresight of the
/// strongest beam at that delay.
pub fn beams_to_tap_set(captures: &[BeamCapture]) -> Result<TapSet> {
    // (delay, total power, best beam power, azimuth, zenith)
    let mut bins: Vec<(f64, f64, f64, f64, f64)> = Vec::new();
    for c in captures {
        for t in threshold_pdp(&c.pdp).taps() {
            let p = db_to_linear(t.power_db);
            match bins.iter_mut().find(|b| b.0 == t.delay_s) {
                Some(bin) => {
                    bin.1 += p;
                    if p > bin.2 {
                        bin.2 = p;
                        bin.3 = c.azimuth_deg;
                        bin.4 = c.zenith_deg;
                    }
                }
                None => bins.push((t.delay_s, p, p, c.azimuth_deg, c.zenith_deg)),
            }
        }
    }
    bins.sort_by(|a, b| a.0.total_cmp(&b.0));
    TapSet::new(bins.into_iter().map(|(d, p, _, az, el)| Tap::with_angles(d, p, az, el)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossSample {
    pub distance_m: f64,
    pub path_loss_db: f64,
    pub state: ChannelState,
    pub band: FrequencyBand,
}

/// Least-squares fit of the log-distance model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub pl0: f64,
    pub ple: f64,
    /// Residual standard deviation, n - 2 denominator.
    pub sigma_s: f64,
    pub residuals: Vec<f64>,
    pub n: usize,
}

impl FitResult {
    pub fn predict(&self, distance_m: f64) -> f64 {
        self.pl0 + 10.0 * self.ple * distance_m.log10()
    }
}

/// Regresses path loss on `10 log10(d / 1 m)`.
pub fn fit_path_loss(samples: &[PathLossSample]) -> Result<FitResult> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::domain(format!("path loss fit needs at least 3 samples (got {n})")));
    }
    if samples.iter().any(|s| !(s.distance_m >= 1.0 && s.path_loss_db.is_finite())) {
        return Err(Error::domain("samples need distance >= 1 m and finite path loss"));
    }
    let x: Vec<f64> = samples.iter().map(|s| 10.0 * s.distance_m.log10()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.path_loss_db).collect();
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * nf {
        return Err(Error::domain("all distances identical: slope is not identifiable"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let ple = sxy / sxx;
    let pl0 = my - ple * mx;
    let residuals: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - (pl0 + ple * a)).collect();
    let sigma_s = (residuals.iter().map(|r| r * r).sum::<f64>() / (nf - 2.0)).sqrt();
    Ok(FitResult { pl0, ple, sigma_s, residuals, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    pub mu: f64,
    pub sigma: f64,
}

/// Mean and (n - 1) standard deviation of log10(values).
pub fn fit_lognormal(values: &[f64]) -> Result<LogNormalFit> {
    if values.len() < 2 {
        return Err(Error::domain("log-normal fit needs at least 2 values"));
    }
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::domain("log-normal fit needs positive values"));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.log10()).collect();
    let (mu, sigma) = mean_and_sd(&logs);
    Ok(LogNormalFit { mu, sigma })
}

/// Sample mean and (n - 1) standard deviation of values already on a log
/// scale.
pub fn fit_log_moments(logs: &[f64]) -> Result<LogNormalFit> {
    if logs.len() < 2 || logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("need at least 2 finite values"));
    }
    let (mu, sigma) = mean_and_sd(logs);
    Ok(LogNormalFit { mu, sigma })
}

fn mean_and_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mu = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (n - 1.0);
    (mu, var.sqrt())
}

/// Maximum-likelihood slope `a` of `S ~ N(0, a log10 d)`:
/// `a = sqrt(mean((s_i / log10 d_i)^2))`.
pub fn fit_distance_sigma(residuals_db: &[f64], distances_m: &[f64]) -> Result<f64> {
    if residuals_db.len() != distances_m.len() {
        return Err(Error::domain("residuals and distances differ in length"));
    }
    if residuals_db.is_empty() {
        return Err(Error::domain("no residuals"));
    }
    if distances_m.iter().any(|d| !(*d > 1.0)) {
        return Err(Error::domain("distance-scaled sigma needs every distance > 1 m"));
    }
    let mean_sq = residuals_db
        .iter()
        .zip(distances_m)
        .map(|(s, d)| (s / d.log10()).powi(2))
        .sum::<f64>()
        / residuals_db.len() as f64;
    Ok(mean_sq.sqrt())
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::domain("pearson needs two equal-length series of at least 3 values"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::domain("pearson undefined for a constant series"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical_quantile: f64,
    pub ordered_value: f64,
}

/// Normal probability plot: sorted values against `Phi^-1((i - 0.5) / n)`.
pub fn probability_plot_points(values: &[f64]) -> Result<Vec<QqPoint>> {
    if values.len() < 2 {
        return Err(Error::domain("probability plot needs at least 2 values"));
    }
    let std_normal = Normal::standard();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, v)| QqPoint {
            theoretical_quantile: std_normal.inverse_cdf((i as f64 + 0.5) / n),
            ordered_value: v,
        })
        .collect())
}

/// Least-squares slope of ordered value against theoretical quantile.
pub fn qq_slope(points: &[QqPoint]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.theoretical_quantile).sum::<f64>() / n;
    let my = points.iter().map(|p| p.ordered_value).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.theoretical_quantile - mx) * (p.ordered_value - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.theoretical_quantile - mx).powi(2)).sum();
    sxy / sxx
}
