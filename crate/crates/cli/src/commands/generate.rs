use inh_fr3::lsp::{default_distance_shadow, DropGenerator, GeneratorConfig, NlosShadow};
use inh_fr3::records::{RecordRow, RecordWriter};
use inh_fr3::{FrequencyBand, ModelRegistry};

use super::{resolve_format, Output};
use crate::cli::{GenerateArgs, ShadowArg};
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};

/// Merges flags over the config file. Seed, state and drop count have no
/// defaults.
pub fn resolve(args: &GenerateArgs, file: &FileConfig) -> CliResult<GeneratorConfig> {
    let missing = |flag: &str| CliError::Usage(format!("--{flag} is required"));
    let bands = args.bands.clone().or_else(|| file.bands.clone()).unwrap_or_else(|| FrequencyBand::ALL.to_vec());
    let state = args.state.or(file.state).ok_or_else(|| missing("state"))?;
    let drops = args.drops.or(file.drops).ok_or_else(|| missing("drops"))?;
    let seed = args.seed.or(file.seed).ok_or_else(|| missing("seed"))?;
    let mut cfg = GeneratorConfig::new(bands, state, drops, seed);
    cfg.d_min = args.dmin.or(file.dmin).unwrap_or(cfg.d_min);
    cfg.d_max = args.dmax.or(file.dmax).unwrap_or(cfg.d_max);
    cfg.zsa_mixture = !args.no_zsa_mixture && file.zsa_mixture.unwrap_or(true);
    cfg.two_slope = !args.no_two_slope && file.two_slope.unwrap_or(true);
    cfg.nlos_shadow = match args.nlos_shadow.or(file.nlos_shadow).unwrap_or(ShadowArg::Table) {
        ShadowArg::Table => NlosShadow::Table,
        ShadowArg::Distance => default_distance_shadow(),
    };
    cfg.sigma_min_db = args.sigma_min.or(file.sigma_min).unwrap_or(cfg.sigma_min_db);
    cfg.asa_zsa_interfreq_corr = args.asa_zsa_corr.or(file.asa_zsa_corr).unwrap_or(cfg.asa_zsa_interfreq_corr);
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &GenerateArgs, file: &FileConfig, registry: &ModelRegistry) -> CliResult<()> {
    let cfg = resolve(args, file)?;
    let generator = DropGenerator::new(cfg, registry)?;
    let drops = generator.generate()?;

    let path = args.output.as_deref().or(file.output.as_deref());
    let format = resolve_format(args.format.or(file.format), path);
    let mut out = Output::open(path)?;
    let name = out.name().to_path_buf();
    let io_err = |e: inh_fr3::Error| match e {
        inh_fr3::Error::Io(io) => CliError::io(&name, io),
        other => other.into(),
    };
    let mut writer = RecordWriter::new(out.writer(), format).map_err(io_err)?;
    for d in &drops {
        for row in RecordRow::from_drop(d) {
            writer.write(&row).map_err(io_err)?;
        }
    }
    writer.into_inner().map_err(io_err)?;
    out.finish()
}
