//! Delay- and angle-domain dispersion statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest excess delay the sounder resolves, s.
pub const MAX_EXCESS_DELAY_S: f64 = 8e-6;
/// Sounder delay resolution, s.
pub const DELAY_RESOLUTION_S: f64 = 2.5e-9;
/// Resultant magnitude below which angular spread is undefined.
pub const MIN_RESULTANT: f64 = 1e-12;

/// One multipath component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub delay_s: f64,
    /// Linear power (unit-free).
    pub power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub azimuth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zenith_deg: Option<f64>,
}

impl Tap {
    pub fn new(delay_s: f64, power: f64) -> Self {
        Tap { delay_s, power, azimuth_deg: None, zenith_deg: None }
    }

    pub fn with_angles(delay_s: f64, power: f64, azimuth_deg: f64, zenith_deg: f64) -> Self {
        Tap { delay_s, power, azimuth_deg: Some(azimuth_deg), zenith_deg: Some(zenith_deg) }
    }
}

/// Validated list of taps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Tap>", into = "Vec<Tap>")]
pub struct TapSet {
    taps: Vec<Tap>,
}

impl TapSet {
    pub fn new(taps: Vec<Tap>) -> Result<Self> {
        for (i, t) in taps.iter().enumerate() {
            if !(t.power > 0.0 && t.power.is_finite()) {
                return Err(Error::domain(format!("tap {i}: power must be positive (got {})", t.power)));
            }
            if !(t.delay_s >= 0.0 && t.delay_s <= MAX_EXCESS_DELAY_S) {
                return Err(Error::domain(format!(
                    "tap {i}: delay {} s outside [0, {MAX_EXCESS_DELAY_S}] s",
                    t.delay_s
                )));
            }
            let angles_finite = t.azimuth_deg.is_none_or(f64::is_finite) && t.zenith_deg.is_none_or(f64::is_finite);
            if !angles_finite {
                return Err(Error::domain(format!("tap {i}: non-finite angle")));
            }
        }
        Ok(TapSet { taps })
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    fn non_empty(&self) -> Result<&[Tap]> {
        if self.taps.is_empty() {
            Err(Error::domain("tap set is empty"))
        } else {
            Ok(&self.taps)
        }
    }
}

impl TryFrom<Vec<Tap>> for TapSet {
    type Error = Error;

    fn try_from(taps: Vec<Tap>) -> Result<Self> {
        TapSet::new(taps)
    }
}

impl From<TapSet> for Vec<Tap> {
    fn from(set: TapSet) -> Self {
        set.taps
    }
}

/// Power-weighted mean delay, s.
pub fn mean_delay(taps: &TapSet) -> Result<f64> {
    let taps = taps.non_empty()?;
    let total: f64 = taps.iter().map(|t| t.power).sum();
    // offsets from the first delay keep a degenerate profile exactly at its delay
    let t0 = taps[0].delay_s;
    Ok(t0 + taps.iter().map(|t| (t.delay_s - t0) * t.power).sum::<f64>() / total)
}

/// Power-weighted second central moment of delay, square-rooted, s.
pub fn rms_delay_spread(taps: &TapSet) -> Result<f64> {
    let tau_m = mean_delay(taps)?;
    let taps = taps.taps();
    let total: f64 = taps.iter().map(|t| t.power).sum();
    let var = taps.iter().map(|t| (t.delay_s - tau_m).powi(2) * t.power).sum::<f64>() / total;
    Ok(var.sqrt())
}

/// Frequency-correlation level for the coherence bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoherenceLevel {
    /// Correlation above 0.5, K = 5.
    R50,
    /// Correlation above 0.9, K = 50.
    R90,
}

impl CoherenceLevel {
    pub fn k(self) -> f64 {
        match self {
            CoherenceLevel::R50 => 5.0,
            CoherenceLevel::R90 => 50.0,
        }
    }
}

/// `1 / (K tau_rms)`, Hz.
pub fn coherence_bandwidth(tau_rms_s: f64, level: CoherenceLevel) -> Result<f64> {
    if !(tau_rms_s > 0.0) {
        return Err(Error::domain(format!("delay spread must be > 0 (got {tau_rms_s} s)")));
    }
    let r90 = 1.0 / (CoherenceLevel::R90.k() * tau_rms_s);
    Ok(CoherenceLevel::R90.k() / level.k() * r90)
}

/// Circular angular spread, degrees:
/// `sqrt(-2 ln |sum P_i e^{j phi_i} / sum P_i|)`.
pub fn angular_spread(angles_deg: &[f64], powers: &[f64]) -> Result<f64> {
    if angles_deg.len() != powers.len() {
        return Err(Error::domain(format!(
            "{} angles but {} powers",
            angles_deg.len(),
            powers.len()
        )));
    }
    if angles_deg.is_empty() {
        return Err(Error::domain("angular spread of an empty set"));
    }
    if powers.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
        return Err(Error::domain("powers must be positive"));
    }
    let total: f64 = powers.iter().sum();
    let (re, im) = angles_deg.iter().zip(powers).fold((0.0, 0.0), |(re, im), (a, p)| {
        let (s, c) = a.to_radians().sin_cos();
        (re + p * c, im + p * s)
    });
    let r = re.hypot(im) / total;
    if r < MIN_RESULTANT {
        return Err(Error::UndefinedSpread(r));
    }
    // rounding leaves a fully coherent resultant a few ulps off 1
    if 1.0 - r < 1e-14 {
        return Ok(0.0);
    }
    let spread = (-2.0 * r.ln()).sqrt();
    Ok(spread.to_degrees())
}

#[derive(Clone, Copy)]
enum AngleAxis {
    Azimuth,
    Zenith,
}

fn spread_along(taps: &TapSet, axis: AngleAxis) -> Result<f64> {
    let taps = taps.non_empty()?;
    let angles = taps
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let a = match axis {
                AngleAxis::Azimuth => t.azimuth_deg,
                AngleAxis::Zenith => t.zenith_deg,
            };
            a.ok_or_else(|| Error::domain(format!("tap {i} has no angle for the requested axis")))
        })
        .collect::<Result<Vec<_>>>()?;
    let powers: Vec<f64> = taps.iter().map(|t| t.power).collect();
    angular_spread(&angles, &powers)
}

/// Azimuth spread of arrival, degrees.
pub fn asa_from_taps(taps: &TapSet) -> Result<f64> {
    spread_along(taps, AngleAxis::Azimuth)
}

/// Zenith spread of arrival, degrees.
pub fn zsa_from_taps(taps: &TapSet) -> Result<f64> {
    spread_along(taps, AngleAxis::Zenith)
}
