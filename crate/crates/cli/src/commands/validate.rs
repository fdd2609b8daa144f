use std::fmt;

use inh_fr3::estimator::pearson;
use inh_fr3::lsp::{generate_drops, GeneratorConfig};
use inh_fr3::params::{InterFreqParam, Lsp};
use inh_fr3::records::{Observation, RecordRow};
use inh_fr3::{ChannelState, FrequencyBand, ModelRegistry};

use super::Output;
use crate::analysis::{fit_group, GroupFit};
use crate::cli::ValidateArgs;
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};

pub const DEFAULT_DROPS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const PL0_TOL_DB: f64 = 1.0;
pub const PLE_TOL: f64 = 0.10;
pub const SIGMA_TOL_DB: f64 = 0.5;
pub const LOG_MOMENT_TOL: f64 = 0.02;
pub const CORR_TOL: f64 = 0.05;

/// One round-trip comparison.
#[derive(Debug, Clone)]
pub struct RoundTripCheck {
    pub name: String,
    pub estimate: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl RoundTripCheck {
    fn new(name: String, estimate: f64, expected: f64, tolerance: f64) -> Self {
        RoundTripCheck { name, estimate, expected, tolerance }
    }

    pub fn passed(&self) -> bool {
        (self.estimate - self.expected).abs() <= self.tolerance
    }
}

impl fmt::Display for RoundTripCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} round-trip {}: estimate {:.4} vs table {:.4} (tolerance {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.estimate,
            self.expected,
            self.tolerance
        )
    }
}

fn observations(cfg: &GeneratorConfig, registry: &ModelRegistry) -> CliResult<Vec<Observation>> {
    let drops = generate_drops(cfg, registry)?;
    Ok(drops.iter().flat_map(RecordRow::from_drop).map(|r| Observation::from(&r)).collect())
}

fn round_trip_config(bands: Vec<FrequencyBand>, state: ChannelState, n: usize, seed: u64) -> GeneratorConfig {
    let mut cfg = GeneratorConfig::new(bands, state, n, seed);
    // the fits assume one slope and one log-normal per quantity
    cfg.zsa_mixture = false;
    cfg.two_slope = false;
    cfg
}

fn compare_group(fit: &GroupFit, registry: &ModelRegistry) -> Vec<RoundTripCheck> {
    let (band, state) = (fit.band, fit.state);
    let t = registry.table(band, state);
    let tag = |q: &str| format!("{band} {state} {q}");
    let mut checks = vec![
        RoundTripCheck::new(tag("pl0"), fit.path_loss.pl0, t.pl0, PL0_TOL_DB),
        RoundTripCheck::new(tag("ple"), fit.path_loss.ple, t.ple, PLE_TOL),
        RoundTripCheck::new(tag("sigma_s"), fit.path_loss.sigma_s, t.sigma_s, SIGMA_TOL_DB),
        RoundTripCheck::new(tag("ds_mu"), fit.ds.mu, t.ds_mu, LOG_MOMENT_TOL),
        RoundTripCheck::new(tag("ds_sigma"), fit.ds.sigma, t.ds_sigma, LOG_MOMENT_TOL),
    ];
    for (name, est, table) in [("asa", fit.asa, t.asa), ("zsa", fit.zsa, t.zsa)] {
        if let (Some(e), Some(m)) = (est, table) {
            checks.push(RoundTripCheck::new(tag(&format!("{name}_mu")), e.mu, m.mu, LOG_MOMENT_TOL));
            checks.push(RoundTripCheck::new(tag(&format!("{name}_sigma")), e.sigma, m.sigma, LOG_MOMENT_TOL));
        }
    }
    let corr = registry.cross_corr(band, state);
    let axes = Lsp::axes_for(band);
    for (i, a) in axes.iter().enumerate() {
        for b in &axes[i + 1..] {
            let expected = corr.get(a.label(), b.label()).expect("axis present");
            let estimate = fit.correlation(a.label(), b.label()).unwrap_or(f64::NAN);
            checks.push(RoundTripCheck::new(tag(&format!("corr {}-{}", a.label(), b.label())), estimate, expected, CORR_TOL));
        }
    }
    checks
}

/// Generates `n` drops per (band, state) and compares the fitted
/// coefficients with the registry, plus inter-frequency SF and DS
/// correlations from joint three-band runs.
pub fn round_trip(registry: &ModelRegistry, n: usize, seed: u64) -> CliResult<Vec<RoundTripCheck>> {
    let mut checks = Vec::new();
    for band in FrequencyBand::ALL {
        for state in ChannelState::ALL {
            let obs = observations(&round_trip_config(vec![band], state, n, seed), registry)?;
            checks.extend(compare_group(&fit_group(band, state, &obs)?, registry));
        }
    }
    for state in ChannelState::ALL {
        let obs = observations(&round_trip_config(FrequencyBand::ALL.to_vec(), state, n, seed), registry)?;
        let mut sf = Vec::new();
        let mut ds = Vec::new();
        for band in FrequencyBand::ALL {
            let rows: Vec<Observation> = obs.iter().filter(|o| o.band == band).copied().collect();
            let fit = fit_group(band, state, &rows)?;
            sf.push(fit.path_loss.residuals.clone());
            ds.push(rows.iter().map(|o| o.ds_log10s).collect::<Vec<f64>>());
        }
        for (param, name, series) in [(InterFreqParam::Sf, "SF", &sf), (InterFreqParam::Ds, "DS", &ds)] {
            let m = registry.interfreq(param, state);
            for i in 0..3 {
                for j in i + 1..3 {
                    let (a, b) = (FrequencyBand::ALL[i], FrequencyBand::ALL[j]);
                    let expected = m.get(a.label(), b.label()).expect("band present");
                    checks.push(RoundTripCheck::new(
                        format!("{state} {name} {a}-{b}"),
                        pearson(&series[i], &series[j])?,
                        expected,
                        CORR_TOL,
                    ));
                }
            }
        }
    }
    Ok(checks)
}

pub fn run(args: &ValidateArgs, file: &FileConfig, registry: &ModelRegistry) -> CliResult<()> {
    let n = args.drops.or(file.drops).unwrap_or(DEFAULT_DROPS);
    let seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);
    if n < 3 {
        return Err(CliError::Usage("--drops must be at least 3 for the round trip".into()));
    }
    let audit = registry.audit();
    let trips = round_trip(registry, n, seed)?;
    let mut out = Output::open(args.output.as_deref().or(file.output.as_deref()))?;
    let mut failed = 0;
    for c in &audit {
        failed += usize::from(!c.passed());
        out.line(&c.to_string())?;
    }
    for c in &trips {
        failed += usize::from(!c.passed());
        out.line(&c.to_string())?;
    }
    out.line(&format!("{} checks, {} failed", audit.len() + trips.len(), failed))?;
    out.finish()?;
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}
