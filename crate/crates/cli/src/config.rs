//! `--config` and `--table-override` files.

use std::fs;
use std::path::{Path, PathBuf};

use inh_fr3::params::LogMoments;
use inh_fr3::{ChannelState, FrequencyBand, ModelRegistry};
use serde::Deserialize;

use crate::cli::{FormatArg, PlotKind, ShadowArg, TableKind};
use crate::error::{CliError, CliResult};

/// Flat mirror of every flag. Keys use the flag names with `_` for `-`;
/// each subcommand reads the keys it understands.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub table_override: Option<PathBuf>,
    pub workers: Option<usize>,
    pub band: Option<FrequencyBand>,
    pub bands: Option<Vec<FrequencyBand>>,
    pub state: Option<ChannelState>,
    pub kind: Option<String>,
    pub drops: Option<usize>,
    pub seed: Option<u64>,
    pub dmin: Option<f64>,
    pub dmax: Option<f64>,
    pub format: Option<FormatArg>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub zsa_mixture: Option<bool>,
    pub two_slope: Option<bool>,
    pub nlos_shadow: Option<ShadowArg>,
    pub sigma_min: Option<f64>,
    pub asa_zsa_corr: Option<f64>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        toml::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn table_kind(&self) -> CliResult<Option<TableKind>> {
        self.kind.as_deref().map(|k| parse_kind(k, "table kind")).transpose()
    }

    pub fn plot_kind(&self) -> CliResult<Option<PlotKind>> {
        self.kind.as_deref().map(|k| parse_kind(k, "plot kind")).transpose()
    }
}

fn parse_kind<T: clap::ValueEnum>(s: &str, what: &str) -> CliResult<T> {
    T::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown {what} {s:?}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideFile {
    #[serde(default)]
    table: Vec<TableOverride>,
}

/// Replacement coefficients for one (band, state). Omitted fields keep
/// their built-in values. Coherence bandwidths are in MHz.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableOverride {
    band: FrequencyBand,
    state: ChannelState,
    pl0: Option<f64>,
    ple: Option<f64>,
    sigma_s: Option<f64>,
    ds_mu: Option<f64>,
    ds_sigma: Option<f64>,
    bc50_mhz: Option<f64>,
    bc90_mhz: Option<f64>,
    asa_mu: Option<f64>,
    asa_sigma: Option<f64>,
    zsa_mu: Option<f64>,
    zsa_sigma: Option<f64>,
}

fn merge_moments(base: Option<LogMoments>, mu: Option<f64>, sigma: Option<f64>) -> CliResult<Option<LogMoments>> {
    match (base, mu, sigma) {
        (_, None, None) => Ok(base),
        (Some(b), mu, sigma) => Ok(Some(LogMoments::new(mu.unwrap_or(b.mu), sigma.unwrap_or(b.sigma)))),
        (None, Some(mu), Some(sigma)) => Ok(Some(LogMoments::new(mu, sigma))),
        (None, _, _) => Err(CliError::Usage("angular override needs both mu and sigma".into())),
    }
}

/// Built-in registry with the override file, if any, applied on top.
pub fn load_registry(path: Option<&Path>) -> CliResult<ModelRegistry> {
    let mut registry = ModelRegistry::builtin();
    let Some(path) = path else {
        return Ok(registry);
    };
    let file: OverrideFile =
        toml::from_str(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    for o in file.table {
        let mut t = *registry.table(o.band, o.state);
        t.pl0 = o.pl0.unwrap_or(t.pl0);
        t.ple = o.ple.unwrap_or(t.ple);
        t.sigma_s = o.sigma_s.unwrap_or(t.sigma_s);
        t.ds_mu = o.ds_mu.unwrap_or(t.ds_mu);
        t.ds_sigma = o.ds_sigma.unwrap_or(t.ds_sigma);
        t.bc50 = o.bc50_mhz.map_or(t.bc50, |v| v * 1e6);
        t.bc90 = o.bc90_mhz.map_or(t.bc90, |v| v * 1e6);
        t.asa = merge_moments(t.asa, o.asa_mu, o.asa_sigma)?;
        t.zsa = merge_moments(t.zsa, o.zsa_mu, o.zsa_sigma)?;
        registry
            .set_table(o.band, o.state, t)
            .map_err(|e| CliError::Usage(format!("{}: {} {}: {e}", path.display(), o.band, o.state)))?;
    }
    Ok(registry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn override_replaces_only_given_fields() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "[[table]]\nband = \"14.5\"\nstate = \"NLOS\"\npl0 = 56.4\nbc90_mhz = 0.78").unwrap();
        let reg = load_registry(Some(f.path())).unwrap();
        let t = reg.table(FrequencyBand::B14_5, ChannelState::Nlos);
        assert_eq!(t.pl0, 56.4);
        assert_eq!(t.ple, 3.4);
        assert!((t.bc90 - 0.78e6).abs() < 1e-6);
    }

    #[test]
    fn override_rejects_bad_values() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "[[table]]\nband = \"6.9\"\nstate = \"LOS\"\nsigma_s = -1.0").unwrap();
        assert!(matches!(load_registry(Some(f.path())), Err(CliError::Usage(_))));
        let mut g = tempfile::NamedTempFile::new().unwrap();
        writeln!(g, "[[table]]\nband = \"6.9\"\nstate = \"LOS\"\nasa_mu = 1.5").unwrap();
        assert!(load_registry(Some(g.path())).is_err());
    }

    #[test]
    fn config_keys_parse() {
        let c: FileConfig = toml::from_str("bands = [\"6.9\", \"14.5\"]\nstate = \"NLOS\"\nseed = 7\nformat = \"jsonl\"\ntwo_slope = false\nkind = \"pl_vs_d\"").unwrap();
        assert_eq!(c.bands.clone().unwrap(), vec![FrequencyBand::B6_9, FrequencyBand::B14_5]);
        assert_eq!(c.plot_kind().unwrap(), Some(PlotKind::PlVsD));
        assert!(toml::from_str::<FileConfig>("unknown = 1").is_err());
    }
}
