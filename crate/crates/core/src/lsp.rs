//! Correlated large-scale parameter generation.
//!
//! Each drop draws a standard normal vector, correlates it through a
//! lower-triangular factor of the (band x LSP) correlation matrix and maps
//! every component onto its marginal:
//!
//! * SF in dB: `sigma(d) * z`
//! * log10 DS, log10 ASA, log10 ZSA: `mu + sigma * z`
//!
//! The joint matrix stacks the per-band matrices on the diagonal and places
//! the inter-frequency DS and SF correlations between bands. Cross-band
//! pairs of *different* parameters are unmeasured; they are filled in with
//! whatever values make the joint matrix positive semidefinite while every
//! measured entry stays exact.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{complete_correlation, is_psd, lower_factor, nearest_correlation, Repaired};
use crate::dispersion::{
    coherence_bandwidth, CoherenceLevel, Tap, TapSet, DELAY_RESOLUTION_S, MAX_EXCESS_DELAY_S,
};
use crate::error::{Error, Result};
use crate::params::{ChannelState, CorrelationMatrix, FrequencyBand, InterFreqParam, Lsp, ModelRegistry, ParamTable};
use crate::propagation::{
    effective_nlos, PathLossModel, ShadowModel, DEFAULT_SIGMA_MIN_DB, NLOS_SIGMA_SLOPE_DB,
};

/// One realization of the large-scale parameters at one location and band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LspVector {
    pub sf_db: f64,
    /// log10(DS / 1 s).
    pub ds_log10s: f64,
    /// log10(ASA / 1 deg).
    pub asa_log10deg: Option<f64>,
    /// log10(ZSA / 1 deg).
    pub zsa_log10deg: Option<f64>,
}

impl LspVector {
    pub fn delay_spread_s(&self) -> f64 {
        10f64.powf(self.ds_log10s)
    }
}

fn check_axes(table: &ParamTable, corr: &CorrelationMatrix) -> Result<usize> {
    let expected: &[Lsp] = if table.asa.is_some() { &Lsp::ALL } else { &Lsp::ALL[..2] };
    let ok = corr.dim() == expected.len() && corr.labels().iter().zip(expected).all(|(l, a)| l == a.label());
    if !ok {
        return Err(Error::domain(format!(
            "correlation axes {:?} do not match the table's parameters",
            corr.labels()
        )));
    }
    Ok(expected.len())
}

fn draw_normals<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// `L z` for lower-triangular `L`.
fn correlate(factor: &DMatrix<f64>, z: &[f64]) -> Vec<f64> {
    (0..z.len())
        .map(|i| (0..=i).fold(0.0, |acc, k| acc + factor[(i, k)] * z[k]))
        .collect()
}

fn map_marginals(table: &ParamTable, sf_sigma: f64, y: &[f64], zsa_override: Option<f64>) -> LspVector {
    LspVector {
        sf_db: sf_sigma * y[0],
        ds_log10s: table.ds_mu + table.ds_sigma * y[1],
        asa_log10deg: table.asa.map(|m| m.mu + m.sigma * y[2]),
        zsa_log10deg: zsa_override.or_else(|| table.zsa.map(|m| m.mu + m.sigma * y[3])),
    }
}

/// Single-band sampler with a precomputed factor.
#[derive(Debug, Clone)]
pub struct LspSampler {
    table: ParamTable,
    factor: DMatrix<f64>,
    shadow: ShadowModel,
}

impl LspSampler {
    /// `corr` must already be positive semidefinite.
    pub fn new(table: &ParamTable, corr: &CorrelationMatrix, shadow: ShadowModel) -> Result<Self> {
        check_axes(table, corr)?;
        if !is_psd(corr) {
            return Err(Error::domain("correlation matrix is not positive semidefinite"));
        }
        Ok(LspSampler { table: *table, factor: lower_factor(corr.values())?, shadow })
    }

    pub fn sample<R: Rng + ?Sized>(&self, distance_m: f64, rng: &mut R) -> Result<LspVector> {
        let sigma = self.shadow.sigma_db(distance_m)?;
        let z = draw_normals(self.factor.nrows(), rng);
        let y = correlate(&self.factor, &z);
        Ok(map_marginals(&self.table, sigma, &y, None))
    }
}

pub fn sample_lsp<R: Rng + ?Sized>(
    table: &ParamTable,
    corr: &CorrelationMatrix,
    shadow: &ShadowModel,
    distance_m: f64,
    rng: &mut R,
) -> Result<LspVector> {
    LspSampler::new(table, corr, *shadow)?.sample(distance_m, rng)
}

/// Two-component log-normal mixture for the zenith spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZsaMixture {
    pub weight1: f64,
    /// log10 mean of the first (narrow, ~10 deg) mode.
    pub mode1_mu: f64,
    /// log10 mean of the second (~13 deg) mode.
    pub mode2_mu: f64,
    pub component_sigma: f64,
}

/// Largest pooled-mean mismatch accepted by [`calibrate_zsa_mixture`].
pub const MIXTURE_MEAN_TOLERANCE: f64 = 0.02;

impl ZsaMixture {
    pub fn weight2(&self) -> f64 {
        1.0 - self.weight1
    }

    pub fn pooled_mean(&self) -> f64 {
        self.weight1 * self.mode1_mu + self.weight2() * self.mode2_mu
    }

    pub fn between_variance(&self) -> f64 {
        let m = self.pooled_mean();
        self.weight1 * (self.mode1_mu - m).powi(2) + self.weight2() * (self.mode2_mu - m).powi(2)
    }

    pub fn pooled_sigma(&self) -> f64 {
        (self.between_variance() + self.component_sigma.powi(2)).sqrt()
    }

    /// Maps a standard normal deviate and a uniform mode selector to a
    /// log10 ZSA value.
    pub fn value(&self, z: f64, u: f64) -> f64 {
        let mode = if u < self.weight1 { self.mode1_mu } else { self.mode2_mu };
        mode + self.component_sigma * z
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        let u: f64 = rng.random();
        self.value(z, u)
    }
}

/// Moment-matches the two-mode ZSA mixture to a table's ZSA moments.
pub fn calibrate_zsa_mixture(table: &ParamTable) -> Result<ZsaMixture> {
    let zsa = table.zsa.ok_or_else(|| Error::domain("table has no ZSA moments"))?;
    let mut mix = ZsaMixture {
        weight1: 2.0 / 3.0,
        mode1_mu: 10f64.log10(),
        mode2_mu: 13f64.log10(),
        component_sigma: 0.0,
    };
    let pooled = mix.pooled_mean();
    if (pooled - zsa.mu).abs() > MIXTURE_MEAN_TOLERANCE {
        return Err(Error::Calibration(format!(
            "mixture pooled mean {pooled:.4} differs from table mean {:.4} by more than {MIXTURE_MEAN_TOLERANCE}",
            zsa.mu
        )));
    }
    mix.component_sigma = (zsa.sigma.powi(2) - mix.between_variance()).max(0.0).sqrt();
    Ok(mix)
}

/// Where the NLOS shadow sigma comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum NlosShadow {
    /// The table's constant sigma_s.
    #[default]
    Table,
    /// `coeff_db * log10(d)`, floored at the configured minimum.
    DistanceScaled { coeff_db: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub bands: Vec<FrequencyBand>,
    pub state: ChannelState,
    pub n_drops: usize,
    pub d_min: f64,
    pub d_max: f64,
    pub seed: u64,
    pub zsa_mixture: bool,
    /// Floor for the distance-scaled shadow sigma, dB.
    pub sigma_min_db: f64,
    /// Cross-band correlation of ASA (and of ZSA); unmeasured.
    pub asa_zsa_interfreq_corr: f64,
    pub nlos_shadow: NlosShadow,
    /// Apply `max(PL_LOS, PL_NLOS)` to NLOS drops.
    pub two_slope: bool,
}

impl GeneratorConfig {
    pub fn new(bands: Vec<FrequencyBand>, state: ChannelState, n_drops: usize, seed: u64) -> Self {
        GeneratorConfig {
            bands,
            state,
            n_drops,
            d_min: 1.0,
            d_max: 50.0,
            seed,
            zsa_mixture: true,
            sigma_min_db: DEFAULT_SIGMA_MIN_DB,
            asa_zsa_interfreq_corr: 0.0,
            nlos_shadow: NlosShadow::Table,
            two_slope: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_drops == 0 {
            return Err(Error::Config("n_drops must be at least 1".into()));
        }
        if !(self.d_min >= 1.0 && self.d_min < self.d_max && self.d_max.is_finite()) {
            return Err(Error::Config(format!(
                "distance range must satisfy 1 <= d_min < d_max (got {} .. {})",
                self.d_min, self.d_max
            )));
        }
        if self.bands.is_empty() {
            return Err(Error::Config("at least one band is required".into()));
        }
        let mut seen = self.bands.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.bands.len() {
            return Err(Error::Config("bands must not repeat".into()));
        }
        if !(self.sigma_min_db > 0.0 && self.sigma_min_db.is_finite()) {
            return Err(Error::Config("sigma_min must be > 0".into()));
        }
        if !(-1.0..=1.0).contains(&self.asa_zsa_interfreq_corr) {
            return Err(Error::Config("ASA/ZSA inter-frequency correlation must lie in [-1, 1]".into()));
        }
        if let NlosShadow::DistanceScaled { coeff_db } = self.nlos_shadow {
            if !(coeff_db > 0.0 && coeff_db.is_finite()) {
                return Err(Error::Config("distance-scaled shadow coefficient must be > 0".into()));
            }
        }
        Ok(())
    }

    /// Bands in canonical (ascending frequency) order.
    pub fn sorted_bands(&self) -> Vec<FrequencyBand> {
        let mut b = self.bands.clone();
        b.sort();
        b
    }

    /// Shadow model for a band given the path-loss branch that is in effect.
    pub fn shadow_model(&self, registry: &ModelRegistry, band: FrequencyBand, branch: ChannelState) -> Result<ShadowModel> {
        match (branch, self.nlos_shadow) {
            (ChannelState::Nlos, NlosShadow::DistanceScaled { coeff_db }) => {
                ShadowModel::distance_scaled_with_floor(coeff_db, self.sigma_min_db)
            }
            _ => ShadowModel::constant(registry.table(band, branch).sigma_s),
        }
    }
}

/// Per-band inputs to [`MultibandSampler`].
#[derive(Debug, Clone)]
pub struct BandModel {
    pub band: FrequencyBand,
    pub table: ParamTable,
    pub corr: CorrelationMatrix,
}

#[derive(Debug, Clone)]
struct BandSlot {
    band: FrequencyBand,
    table: ParamTable,
    offset: usize,
    mixture: Option<ZsaMixture>,
}

/// Joint sampler over several bands.
#[derive(Debug, Clone)]
pub struct MultibandSampler {
    slots: Vec<BandSlot>,
    joint: CorrelationMatrix,
    repair: Option<Repaired>,
    factor: DMatrix<f64>,
}

fn axis_label(band: FrequencyBand, lsp: Lsp) -> String {
    format!("{}:{}", band.label(), lsp.label())
}

impl MultibandSampler {
    /// Builds the joint (band x LSP) correlation. `models` must be in
    /// ascending band order without repeats. When `mixture` is set, bands
    /// whose table calibrates the ZSA mixture sample ZSA from it.
    pub fn new(
        models: &[BandModel],
        interfreq_ds: &CorrelationMatrix,
        interfreq_sf: &CorrelationMatrix,
        asa_zsa_corr: f64,
        mixture: bool,
    ) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::domain("no bands requested"));
        }
        if models.windows(2).any(|w| w[0].band >= w[1].band) {
            return Err(Error::domain("bands must be given in ascending order without repeats"));
        }
        if !(-1.0..=1.0).contains(&asa_zsa_corr) {
            return Err(Error::domain("ASA/ZSA cross-band correlation outside [-1, 1]"));
        }

        let mut slots = Vec::with_capacity(models.len());
        let mut labels = Vec::new();
        for m in models {
            let n = check_axes(&m.table, &m.corr)?;
            let mixture = if mixture && m.table.zsa.is_some() { calibrate_zsa_mixture(&m.table).ok() } else { None };
            slots.push(BandSlot { band: m.band, table: m.table, offset: labels.len(), mixture });
            labels.extend(Lsp::axes_for(m.band).iter().take(n).map(|&l| axis_label(m.band, l)));
        }

        let n = labels.len();
        let mut values = DMatrix::<f64>::identity(n, n);
        let mut fixed = DMatrix::from_element(n, n, false);
        let mut set = |i: usize, j: usize, v: f64| {
            values[(i, j)] = v;
            values[(j, i)] = v;
            fixed[(i, j)] = true;
            fixed[(j, i)] = true;
        };
        for (slot, m) in slots.iter().zip(models) {
            let k = m.corr.dim();
            for i in 0..k {
                for j in 0..k {
                    set(slot.offset + i, slot.offset + j, m.corr.values()[(i, j)]);
                }
            }
        }
        for (a, sa) in slots.iter().enumerate() {
            for sb in &slots[a + 1..] {
                let lookup = |mat: &CorrelationMatrix| {
                    mat.get(sa.band.label(), sb.band.label())
                        .ok_or_else(|| Error::domain("inter-frequency matrix lacks a requested band"))
                };
                set(sa.offset, sb.offset, lookup(interfreq_sf)?);
                set(sa.offset + 1, sb.offset + 1, lookup(interfreq_ds)?);
                if sa.table.asa.is_some() && sb.table.asa.is_some() {
                    set(sa.offset + 2, sb.offset + 2, asa_zsa_corr);
                    set(sa.offset + 3, sb.offset + 3, asa_zsa_corr);
                }
            }
        }

        let target = CorrelationMatrix::new(labels, values)?;
        let (joint, repair) = if is_psd(&target) {
            (target, None)
        } else {
            let repaired = match complete_correlation(&target, &fixed) {
                Ok(r) => r,
                Err(_) => nearest_correlation(&target)?,
            };
            (repaired.matrix.clone(), Some(repaired))
        };
        let factor = lower_factor(joint.values())?;
        Ok(MultibandSampler { slots, joint, repair, factor })
    }

    pub fn from_registry(registry: &ModelRegistry, config: &GeneratorConfig) -> Result<Self> {
        let models: Vec<BandModel> = config
            .sorted_bands()
            .into_iter()
            .map(|band| BandModel {
                band,
                table: *registry.table(band, config.state),
                corr: registry.cross_corr(band, config.state).clone(),
            })
            .collect();
        Self::new(
            &models,
            registry.interfreq(InterFreqParam::Ds, config.state),
            registry.interfreq(InterFreqParam::Sf, config.state),
            config.asa_zsa_interfreq_corr,
            config.zsa_mixture,
        )
    }

    pub fn bands(&self) -> Vec<FrequencyBand> {
        self.slots.iter().map(|s| s.band).collect()
    }

    /// The joint matrix actually factored (after any repair).
    pub fn joint(&self) -> &CorrelationMatrix {
        &self.joint
    }

    /// Repair details when the assembled matrix was not PSD.
    pub fn repair(&self) -> Option<&Repaired> {
        self.repair.as_ref()
    }

    pub fn mixture(&self, band: FrequencyBand) -> Option<&ZsaMixture> {
        self.slots.iter().find(|s| s.band == band).and_then(|s| s.mixture.as_ref())
    }

    /// Draws one joint realization. `sf_sigmas_db[i]` is the shadow sigma
    /// for the i-th band in ascending order.
    pub fn sample<R: Rng + ?Sized>(&self, sf_sigmas_db: &[f64], rng: &mut R) -> Result<Vec<(FrequencyBand, LspVector)>> {
        if sf_sigmas_db.len() != self.slots.len() {
            return Err(Error::domain("one shadow sigma per band is required"));
        }
        let z = draw_normals(self.factor.nrows(), rng);
        let y = correlate(&self.factor, &z);
        Ok(self
            .slots
            .iter()
            .zip(sf_sigmas_db)
            .map(|(slot, &sigma)| {
                let ys = &y[slot.offset..];
                let zsa = slot.mixture.map(|mix| mix.value(ys[3], rng.random()));
                (slot.band, map_marginals(&slot.table, sigma, ys, zsa))
            })
            .collect())
    }
}

/// One-shot joint draw using the state's own shadow model for every band.
pub fn sample_multiband<R: Rng + ?Sized>(
    registry: &ModelRegistry,
    config: &GeneratorConfig,
    distance_m: f64,
    rng: &mut R,
) -> Result<Vec<(FrequencyBand, LspVector)>> {
    let sampler = MultibandSampler::from_registry(registry, config)?;
    let sigmas = config
        .sorted_bands()
        .into_iter()
        .map(|b| config.shadow_model(registry, b, config.state)?.sigma_db(distance_m))
        .collect::<Result<Vec<_>>>()?;
    sampler.sample(&sigmas, rng)
}

/// Per-band outcome of one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandOutcome {
    pub band: FrequencyBand,
    pub lsp: LspVector,
    /// Deterministic path loss (no shadowing), dB.
    pub model_pl_db: f64,
    /// Which path loss model supplied `model_pl_db`.
    pub branch: ChannelState,
    /// `model_pl_db + sf`, dB.
    pub pl_db: f64,
    pub bc50_hz: f64,
    pub bc90_hz: f64,
}

/// One simulated receiver location.
#[derive(Debug, Clone, PartialEq)]
pub struct DropRecord {
    pub drop_id: u64,
    pub distance_m: f64,
    pub state: ChannelState,
    pub bands: Vec<BandOutcome>,
}

/// Random stream for one drop: independent of every other drop and of
/// evaluation order.
pub fn drop_rng(seed: u64, drop_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(drop_id);
    rng
}

/// Generates drops for one configuration.
#[derive(Debug, Clone)]
pub struct DropGenerator<'a> {
    config: GeneratorConfig,
    registry: &'a ModelRegistry,
    sampler: MultibandSampler,
    bands: Vec<FrequencyBand>,
    los: Vec<PathLossModel>,
    nlos: Vec<PathLossModel>,
}

impl<'a> DropGenerator<'a> {
    pub fn new(config: GeneratorConfig, registry: &'a ModelRegistry) -> Result<Self> {
        config.validate()?;
        let sampler = MultibandSampler::from_registry(registry, &config)?;
        let bands = config.sorted_bands();
        let los = bands
            .iter()
            .map(|&b| PathLossModel::from_table(registry.table(b, ChannelState::Los)))
            .collect::<Result<_>>()?;
        let nlos = bands
            .iter()
            .map(|&b| PathLossModel::from_table(registry.table(b, ChannelState::Nlos)))
            .collect::<Result<_>>()?;
        Ok(DropGenerator { config, registry, sampler, bands, los, nlos })
    }

    pub fn config(&self) -> &GeneratorConfig {
        &self.config
    }

    pub fn sampler(&self) -> &MultibandSampler {
        &self.sampler
    }

    pub fn drop_at(&self, drop_id: u64) -> Result<DropRecord> {
        let cfg = &self.config;
        let mut rng = drop_rng(cfg.seed, drop_id);
        let u: f64 = rng.random();
        let distance_m = (cfg.d_min * (cfg.d_max / cfg.d_min).powf(u)).clamp(cfg.d_min, cfg.d_max);

        let mut models = Vec::with_capacity(self.bands.len());
        let mut sigmas = Vec::with_capacity(self.bands.len());
        for (i, &band) in self.bands.iter().enumerate() {
            let (db, branch) = match cfg.state {
                ChannelState::Los => (self.los[i].path_loss_db(distance_m, 0.0)?, ChannelState::Los),
                ChannelState::Nlos if cfg.two_slope => {
                    let e = effective_nlos(&self.los[i], &self.nlos[i], distance_m)?;
                    (e.db, e.branch)
                }
                ChannelState::Nlos => (self.nlos[i].path_loss_db(distance_m, 0.0)?, ChannelState::Nlos),
            };
            sigmas.push(cfg.shadow_model(self.registry, band, branch)?.sigma_db(distance_m)?);
            models.push((db, branch));
        }

        let lsps = self.sampler.sample(&sigmas, &mut rng)?;
        let bands = lsps
            .into_iter()
            .zip(models)
            .map(|((band, lsp), (model_pl_db, branch))| {
                let tau = lsp.delay_spread_s();
                Ok(BandOutcome {
                    band,
                    lsp,
                    model_pl_db,
                    branch,
                    pl_db: model_pl_db + lsp.sf_db,
                    bc50_hz: coherence_bandwidth(tau, CoherenceLevel::R50)?,
                    bc90_hz: coherence_bandwidth(tau, CoherenceLevel::R90)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DropRecord { drop_id, distance_m, state: cfg.state, bands })
    }

    /// All drops in `drop_id` order. Work is spread over the current rayon
    /// pool; the result does not depend on its size.
    pub fn generate(&self) -> Result<Vec<DropRecord>> {
        (0..self.config.n_drops as u64).into_par_iter().map(|id| self.drop_at(id)).collect()
    }
}

pub fn generate_drops(config: &GeneratorConfig, registry: &ModelRegistry) -> Result<Vec<DropRecord>> {
    DropGenerator::new(config.clone(), registry)?.generate()
}

/// Default coefficient for [`NlosShadow::DistanceScaled`].
pub fn default_distance_shadow() -> NlosShadow {
    NlosShadow::DistanceScaled { coeff_db: NLOS_SIGMA_SLOPE_DB }
}

fn snap(value: f64, grid: f64) -> f64 {
    (value / grid).round() * grid
}

fn two_tap_half_angle(target_deg: f64) -> Result<f64> {
    if !(0.0..90.0).contains(&target_deg) {
        return Err(Error::domain(format!(
            "two-tap target spread must lie in [0, 90) deg (got {target_deg})"
        )));
    }
    let r = (-0.5 * target_deg.to_radians().powi(2)).exp();
    Ok(r.acos().to_degrees())
}

fn wrap_deg(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

/// Synthetic tap sets with prescribed delay and angular spreads.
///
/// With two taps the construction is exact (up to delay-grid
/// quantization): equal powers at `tau_m +/- ds`, azimuths `+/- phi` with
/// `cos(phi) = exp(-asa^2 / 2)`, zeniths likewise. With more taps, delays are
/// exponential with mean `ds` and angles wrapped-normal with spread equal to
/// the target, so the measured spreads converge as `n_taps` grows.
pub fn synth_tap_set<R: Rng + ?Sized>(
    target_ds_s: f64,
    target_asa_deg: f64,
    target_zsa_deg: f64,
    n_taps: usize,
    grid_s: f64,
    rng: &mut R,
) -> Result<TapSet> {
    if !(target_ds_s > 0.0 && target_ds_s.is_finite()) {
        return Err(Error::domain("target delay spread must be > 0"));
    }
    if n_taps < 2 {
        return Err(Error::domain("at least two taps are required"));
    }
    if !(grid_s > 0.0) {
        return Err(Error::domain("delay grid must be > 0"));
    }
    if !(target_asa_deg >= 0.0 && target_zsa_deg >= 0.0) {
        return Err(Error::domain("target angular spreads must be >= 0"));
    }

    if n_taps == 2 {
        let phi = two_tap_half_angle(target_asa_deg)?;
        let theta = two_tap_half_angle(target_zsa_deg)?;
        let late = snap(2.0 * target_ds_s, grid_s);
        if late > MAX_EXCESS_DELAY_S {
            return Err(Error::domain("target delay spread exceeds the measurable excess delay"));
        }
        return TapSet::new(vec![Tap::with_angles(0.0, 1.0, phi, theta), Tap::with_angles(late, 1.0, -phi, -theta)]);
    }

    let delays = Exp::new(1.0 / target_ds_s).map_err(|e| Error::domain(e.to_string()))?;
    let az = Normal::new(0.0, target_asa_deg).map_err(|e| Error::domain(e.to_string()))?;
    let el = Normal::new(0.0, target_zsa_deg).map_err(|e| Error::domain(e.to_string()))?;
    let taps = (0..n_taps)
        .map(|_| {
            let delay = loop {
                let d = snap(delays.sample(rng), grid_s);
                if d <= MAX_EXCESS_DELAY_S {
                    break d;
                }
            };
            Tap::with_angles(delay, 1.0, wrap_deg(az.sample(rng)), wrap_deg(el.sample(rng)))
        })
        .collect();
    TapSet::new(taps)
}

/// Two-tap fixture on the sounder's delay grid.
pub fn synth_tap_set_on_sounder_grid<R: Rng + ?Sized>(
    target_ds_s: f64,
    target_asa_deg: f64,
    target_zsa_deg: f64,
    n_taps: usize,
    rng: &mut R,
) -> Result<TapSet> {
    synth_tap_set(target_ds_s, target_asa_deg, target_zsa_deg, n_taps, DELAY_RESOLUTION_S, rng)
}
