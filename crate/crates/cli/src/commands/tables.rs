use inh_fr3::params::{InterFreqParam, Lsp};
use inh_fr3::records::fmt_sig6;
use inh_fr3::{ChannelState, FrequencyBand, ModelRegistry};

use super::Output;
use crate::cli::{TableKind, TablesArgs};
use crate::config::FileConfig;
use crate::error::CliResult;

pub const PARAMS_HEADER: &str = "band_ghz,state,pl0_db,ple,sigma_s_db,ds_mu_log10s,ds_sigma_log10s,bc50_hz,bc90_hz,asa_mu_log10deg,asa_sigma_log10deg,zsa_mu_log10deg,zsa_sigma_log10deg";

fn opt(v: Option<f64>) -> String {
    v.map(fmt_sig6).unwrap_or_default()
}

pub fn render(registry: &ModelRegistry, kind: TableKind, band: Option<FrequencyBand>, state: Option<ChannelState>) -> Vec<String> {
    let bands: Vec<FrequencyBand> = FrequencyBand::ALL.into_iter().filter(|b| band.is_none_or(|x| x == *b)).collect();
    let states: Vec<ChannelState> = ChannelState::ALL.into_iter().filter(|s| state.is_none_or(|x| x == *s)).collect();
    let mut lines = Vec::new();
    match kind {
        TableKind::Params => {
            lines.push(PARAMS_HEADER.to_string());
            for &b in &bands {
                for &s in &states {
                    let t = registry.table(b, s);
                    lines.push(format!(
                        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        b.label(),
                        s.label(),
                        fmt_sig6(t.pl0),
                        fmt_sig6(t.ple),
                        fmt_sig6(t.sigma_s),
                        fmt_sig6(t.ds_mu),
                        fmt_sig6(t.ds_sigma),
                        fmt_sig6(t.bc50),
                        fmt_sig6(t.bc90),
                        opt(t.asa.map(|m| m.mu)),
                        opt(t.asa.map(|m| m.sigma)),
                        opt(t.zsa.map(|m| m.mu)),
                        opt(t.zsa.map(|m| m.sigma)),
                    ));
                }
            }
        }
        TableKind::Corr => {
            lines.push("band_ghz,state,lsp,SF,DS,ASA,ZSA".to_string());
            for &b in &bands {
                for &s in &states {
                    let m = registry.cross_corr(b, s);
                    for row in Lsp::axes_for(b) {
                        let cells: Vec<String> = Lsp::ALL.iter().map(|col| opt(m.get(row.label(), col.label()))).collect();
                        lines.push(format!("{},{},{},{}", b.label(), s.label(), row.label(), cells.join(",")));
                    }
                }
            }
        }
        TableKind::Interfreq => {
            let cols: Vec<&str> = FrequencyBand::ALL.iter().map(|b| b.label()).collect();
            lines.push(format!("param,state,band_ghz,{}", cols.join(",")));
            for (param, name) in [(InterFreqParam::Ds, "DS"), (InterFreqParam::Sf, "SF")] {
                for &s in &states {
                    let m = registry.interfreq(param, s);
                    for &b in &bands {
                        let cells: Vec<String> = cols.iter().map(|c| opt(m.get(b.label(), c))).collect();
                        lines.push(format!("{name},{},{},{}", s.label(), b.label(), cells.join(",")));
                    }
                }
            }
        }
    }
    lines
}

pub fn run(args: &TablesArgs, file: &FileConfig, registry: &ModelRegistry) -> CliResult<()> {
    let kind = match args.kind {
        Some(k) => k,
        None => file.table_kind()?.unwrap_or(TableKind::Params),
    };
    let lines = render(registry, kind, args.band.or(file.band), args.state.or(file.state));
    let mut out = Output::open(args.output.as_deref().or(file.output.as_deref()))?;
    for l in &lines {
        out.line(l)?;
    }
    out.finish()
}
