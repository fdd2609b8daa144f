//! Path loss and shadow-fading math.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ChannelState, ParamTable};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reference distance of the log-distance model, m.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;
/// Default floor for the distance-scaled shadow sigma, dB.
pub const DEFAULT_SIGMA_MIN_DB: f64 = 0.5;
/// Slope of the distance-dependent NLOS shadow sigma, dB per decade.
pub const NLOS_SIGMA_SLOPE_DB: f64 = 6.5;

/// Free-space path loss, 20 log10(4 pi d f / c).
pub fn fspl_db(frequency_hz: f64, distance_m: f64) -> Result<f64> {
    if !(frequency_hz > 0.0 && distance_m > 0.0) {
        return Err(Error::domain(format!(
            "FSPL needs positive frequency and distance (got {frequency_hz} Hz, {distance_m} m)"
        )));
    }
    Ok(20.0 * (4.0 * PI * distance_m * frequency_hz / SPEED_OF_LIGHT).log10())
}

/// Log-distance model anchored at 1 m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pl0: f64,
    ple: f64,
}

impl PathLossModel {
    pub fn new(pl0_db: f64, ple: f64) -> Result<Self> {
        if !(ple > 0.0 && ple.is_finite() && pl0_db.is_finite()) {
            return Err(Error::domain(format!("invalid path loss model (pl0 {pl0_db}, ple {ple})")));
        }
        Ok(PathLossModel { pl0: pl0_db, ple })
    }

    pub fn from_table(table: &ParamTable) -> Result<Self> {
        Self::new(table.pl0, table.ple)
    }

    pub fn pl0(&self) -> f64 {
        self.pl0
    }

    pub fn ple(&self) -> f64 {
        self.ple
    }

    pub fn d0(&self) -> f64 {
        REFERENCE_DISTANCE_M
    }

    /// `pl0 + 10 ple log10(d / d0) + shadow`.
    pub fn path_loss_db(&self, distance_m: f64, shadow_db: f64) -> Result<f64> {
        if !(distance_m >= REFERENCE_DISTANCE_M) {
            return Err(Error::domain(format!(
                "distance {distance_m} m is inside the 1 m reference distance"
            )));
        }
        Ok(self.pl0 + 10.0 * self.ple * (distance_m / REFERENCE_DISTANCE_M).log10() + shadow_db)
    }
}

pub fn path_loss_db(model: &PathLossModel, distance_m: f64, shadow_db: f64) -> Result<f64> {
    model.path_loss_db(distance_m, shadow_db)
}

/// Result of the two-slope NLOS rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePathLoss {
    pub db: f64,
    /// Which model supplied the value. Ties go to NLOS.
    pub branch: ChannelState,
}

/// `max(PL_LOS(d), PL_NLOS(d))` without shadowing; the caller adds shadow
/// fading afterwards.
pub fn effective_nlos(los: &PathLossModel, nlos: &PathLossModel, distance_m: f64) -> Result<EffectivePathLoss> {
    let l = los.path_loss_db(distance_m, 0.0)?;
    let n = nlos.path_loss_db(distance_m, 0.0)?;
    Ok(if l > n {
        EffectivePathLoss { db: l, branch: ChannelState::Los }
    } else {
        EffectivePathLoss { db: n, branch: ChannelState::Nlos }
    })
}

pub fn effective_nlos_pl_db(los: &PathLossModel, nlos: &PathLossModel, distance_m: f64) -> Result<f64> {
    effective_nlos(los, nlos, distance_m).map(|e| e.db)
}

/// Shadow fading standard deviation model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShadowModel {
    Constant { sigma_db: f64 },
    /// `coeff_db * log10(d)`, floored at `floor_db`.
    DistanceScaled { coeff_db: f64, floor_db: f64 },
}

impl ShadowModel {
    pub fn constant(sigma_db: f64) -> Result<Self> {
        if !(sigma_db > 0.0 && sigma_db.is_finite()) {
            return Err(Error::domain(format!("shadow sigma must be > 0 (got {sigma_db})")));
        }
        Ok(ShadowModel::Constant { sigma_db })
    }

    pub fn distance_scaled(coeff_db: f64) -> Result<Self> {
        Self::distance_scaled_with_floor(coeff_db, DEFAULT_SIGMA_MIN_DB)
    }

    pub fn distance_scaled_with_floor(coeff_db: f64, floor_db: f64) -> Result<Self> {
        if !(coeff_db > 0.0 && coeff_db.is_finite()) {
            return Err(Error::domain(format!("shadow coefficient must be > 0 (got {coeff_db})")));
        }
        if !(floor_db > 0.0 && floor_db.is_finite()) {
            return Err(Error::domain(format!("sigma floor must be > 0 (got {floor_db})")));
        }
        Ok(ShadowModel::DistanceScaled { coeff_db, floor_db })
    }

    pub fn sigma_db(&self, distance_m: f64) -> Result<f64> {
        shadow_sigma_db(self, distance_m)
    }
}

pub fn shadow_sigma_db(shadow: &ShadowModel, distance_m: f64) -> Result<f64> {
    if !(distance_m >= 1.0) {
        return Err(Error::domain(format!("shadow sigma undefined below 1 m (got {distance_m} m)")));
    }
    Ok(match *shadow {
        ShadowModel::Constant { sigma_db } => sigma_db,
        ShadowModel::DistanceScaled { coeff_db, floor_db } => (coeff_db * distance_m.log10()).max(floor_db),
    })
}
