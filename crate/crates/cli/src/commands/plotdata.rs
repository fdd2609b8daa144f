use inh_fr3::estimator::probability_plot_points;
use inh_fr3::records::{fmt_sig6, Observation};

use super::{read_input, Output};
use crate::analysis::{fit_group, group, MIN_GROUP_SIZE};
use crate::cli::{PlotKind, PlotdataArgs};
use crate::config::FileConfig;
use crate::error::{CliError, CliResult};

pub const MODEL_LINE_POINTS: usize = 50;

/// `n` log-spaced distances from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
}

/// `(series, x, y)` rows for one plot kind.
pub fn series(observations: &[Observation], kind: PlotKind) -> CliResult<Vec<(String, f64, f64)>> {
    let mut rows = Vec::new();
    for ((band, state), obs) in group(observations) {
        let tag = |s: &str| format!("{band}/{state}/{s}");
        let qq = |rows: &mut Vec<(String, f64, f64)>, name: &str, values: &[f64]| -> CliResult<()> {
            for p in probability_plot_points(values)? {
                rows.push((tag(name), p.theoretical_quantile, p.ordered_value));
            }
            Ok(())
        };
        match kind {
            PlotKind::PlVsD | PlotKind::SfQq => {
                if kind == PlotKind::PlVsD {
                    rows.extend(obs.iter().map(|o| (tag("data"), o.d_m, o.pl_db)));
                }
                if obs.len() < MIN_GROUP_SIZE {
                    eprintln!("warning: {band} GHz {state}: fewer than {MIN_GROUP_SIZE} samples, no fit");
                    continue;
                }
                let fit = match fit_group(band, state, &obs) {
                    Ok(f) => f,
                    Err(e) => {
                        eprintln!("warning: {band} GHz {state}: {e}");
                        continue;
                    }
                };
                if kind == PlotKind::PlVsD {
                    let lo = obs.iter().map(|o| o.d_m).fold(f64::INFINITY, f64::min);
                    let hi = obs.iter().map(|o| o.d_m).fold(f64::NEG_INFINITY, f64::max);
                    for d in log_space(lo, hi, MODEL_LINE_POINTS) {
                        rows.push((tag("fit"), d, fit.path_loss.predict(d)));
                    }
                } else {
                    qq(&mut rows, "sf", &fit.path_loss.residuals)?;
                }
            }
            PlotKind::DsQq => {
                let v: Vec<f64> = obs.iter().map(|o| o.ds_log10s).collect();
                qq(&mut rows, "ds", &v)?;
            }
            PlotKind::AsaQq | PlotKind::ZsaQq => {
                let (name, v): (&str, Vec<f64>) = if kind == PlotKind::AsaQq {
                    ("asa", obs.iter().filter_map(|o| o.asa_log10deg).collect())
                } else {
                    ("zsa", obs.iter().filter_map(|o| o.zsa_log10deg).collect())
                };
                if !v.is_empty() {
                    qq(&mut rows, name, &v)?;
                }
            }
            PlotKind::SpreadVsD => {
                rows.extend(obs.iter().map(|o| (tag("ds"), o.d_m, o.ds_log10s)));
                rows.extend(obs.iter().filter_map(|o| o.asa_log10deg.map(|v| (tag("asa"), o.d_m, v))));
                rows.extend(obs.iter().filter_map(|o| o.zsa_log10deg.map(|v| (tag("zsa"), o.d_m, v))));
            }
        }
    }
    Ok(rows)
}

pub fn run(args: &PlotdataArgs, file: &FileConfig) -> CliResult<()> {
    let kind = match args.kind {
        Some(k) => k,
        None => file.plot_kind()?.ok_or_else(|| CliError::Usage("--kind is required".into()))?,
    };
    let band = args.band.or(file.band);
    let state = args.state.or(file.state);
    let input = args.input.as_deref().or(file.input.as_deref());
    let observations: Vec<Observation> = read_input(input, args.format.or(file.format))?
        .into_iter()
        .filter(|o| band.is_none_or(|b| b == o.band) && state.is_none_or(|s| s == o.state))
        .collect();
    let rows = series(&observations, kind)?;
    let mut out = Output::open(args.output.as_deref().or(file.output.as_deref()))?;
    out.line("series,x,y")?;
    for (s, x, y) in rows {
        out.line(&format!("{s},{},{}", fmt_sig6(x), fmt_sig6(y)))?;
    }
    out.finish()
}
