use inh_fr3::records::fmt_sig6;

use super::{read_input, Output};
use crate::analysis::{fit_all, quantities, GroupOutcome};
use crate::cli::FitArgs;
use crate::config::FileConfig;
use crate::error::CliResult;

pub const FIT_HEADER: &str = "band_ghz,state,n,quantity,value";

pub fn run(args: &FitArgs, file: &FileConfig) -> CliResult<()> {
    let input = args.input.as_deref().or(file.input.as_deref());
    let observations = read_input(input, args.format.or(file.format))?;
    let mut out = Output::open(args.output.as_deref().or(file.output.as_deref()))?;
    out.line(FIT_HEADER)?;
    for outcome in fit_all(&observations) {
        match outcome {
            GroupOutcome::Fitted(fit) => {
                for (q, v) in quantities(&fit) {
                    out.line(&format!("{},{},{},{q},{}", fit.band.label(), fit.state.label(), fit.n, fmt_sig6(v)))?;
                }
            }
            GroupOutcome::Skipped { key: (band, state), n, reason } => {
                eprintln!("warning: skipping {band} GHz {state} ({n} samples): {reason}");
            }
        }
    }
    out.finish()
}
