//! Per-(band, state) estimation over observation sets.

use std::collections::BTreeMap;

use inh_fr3::estimator::{fit_distance_sigma, fit_log_moments, fit_path_loss, pearson, FitResult, LogNormalFit, PathLossSample};
use inh_fr3::records::Observation;
use inh_fr3::{ChannelState, FrequencyBand};

pub const MIN_GROUP_SIZE: usize = 3;

pub type GroupKey = (FrequencyBand, ChannelState);

/// Groups observations by (band, state), keeping input order inside each.
pub fn group(observations: &[Observation]) -> BTreeMap<GroupKey, Vec<Observation>> {
    let mut out: BTreeMap<GroupKey, Vec<Observation>> = BTreeMap::new();
    for o in observations {
        out.entry((o.band, o.state)).or_default().push(*o);
    }
    out
}

#[derive(Debug, Clone)]
pub struct GroupFit {
    pub band: FrequencyBand,
    pub state: ChannelState,
    pub n: usize,
    pub path_loss: FitResult,
    /// Coefficient of the `a log10(d)` shadow model; `None` without d > 1 m.
    pub sigma_coeff: Option<f64>,
    pub ds: LogNormalFit,
    pub asa: Option<LogNormalFit>,
    pub zsa: Option<LogNormalFit>,
    /// Pairwise correlations over SF (fit residuals), DS and, when every
    /// row has them, ASA and ZSA.
    pub correlations: Vec<(&'static str, &'static str, f64)>,
    pub distances: Vec<f64>,
}

impl GroupFit {
    pub fn correlation(&self, a: &str, b: &str) -> Option<f64> {
        self.correlations
            .iter()
            .find(|(x, y, _)| (*x == a && *y == b) || (*x == b && *y == a))
            .map(|c| c.2)
    }
}

fn all_some(values: impl Iterator<Item = Option<f64>>) -> Option<Vec<f64>> {
    values.collect()
}

pub fn fit_group(band: FrequencyBand, state: ChannelState, obs: &[Observation]) -> inh_fr3::Result<GroupFit> {
    let samples: Vec<PathLossSample> = obs
        .iter()
        .map(|o| PathLossSample { distance_m: o.d_m, path_loss_db: o.pl_db, state, band })
        .collect();
    let path_loss = fit_path_loss(&samples)?;
    let distances: Vec<f64> = obs.iter().map(|o| o.d_m).collect();

    let (far_res, far_d): (Vec<f64>, Vec<f64>) = path_loss
        .residuals
        .iter()
        .zip(&distances)
        .filter(|(_, d)| **d > 1.0)
        .map(|(r, d)| (*r, *d))
        .unzip();
    let sigma_coeff = if far_d.is_empty() { None } else { Some(fit_distance_sigma(&far_res, &far_d)?) };

    let ds_vals: Vec<f64> = obs.iter().map(|o| o.ds_log10s).collect();
    let ds = fit_log_moments(&ds_vals)?;
    let asa_vals = all_some(obs.iter().map(|o| o.asa_log10deg));
    let zsa_vals = all_some(obs.iter().map(|o| o.zsa_log10deg));
    let asa = asa_vals.as_deref().map(fit_log_moments).transpose()?;
    let zsa = zsa_vals.as_deref().map(fit_log_moments).transpose()?;

    let mut axes: Vec<(&'static str, &[f64])> = vec![("SF", &path_loss.residuals), ("DS", &ds_vals)];
    if let (Some(a), Some(z)) = (asa_vals.as_deref(), zsa_vals.as_deref()) {
        axes.push(("ASA", a));
        axes.push(("ZSA", z));
    }
    let mut correlations = Vec::new();
    for i in 0..axes.len() {
        for j in i + 1..axes.len() {
            // a constant column has no defined correlation; leave it out
            if let Ok(r) = pearson(axes[i].1, axes[j].1) {
                correlations.push((axes[i].0, axes[j].0, r));
            }
        }
    }

    Ok(GroupFit {
        band,
        state,
        n: obs.len(),
        path_loss,
        sigma_coeff,
        ds,
        asa,
        zsa,
        correlations,
        distances,
    })
}

pub enum GroupOutcome {
    Fitted(GroupFit),
    Skipped { key: GroupKey, n: usize, reason: String },
}

/// Fits every group with at least three samples.
pub fn fit_all(observations: &[Observation]) -> Vec<GroupOutcome> {
    group(observations)
        .into_iter()
        .map(|((band, state), obs)| {
            if obs.len() < MIN_GROUP_SIZE {
                return GroupOutcome::Skipped {
                    key: (band, state),
                    n: obs.len(),
                    reason: format!("fewer than {MIN_GROUP_SIZE} samples"),
                };
            }
            match fit_group(band, state, &obs) {
                Ok(f) => GroupOutcome::Fitted(f),
                Err(e) => GroupOutcome::Skipped { key: (band, state), n: obs.len(), reason: e.to_string() },
            }
        })
        .collect()
}

/// Long-format rows `(quantity, value)` for one fitted group.
pub fn quantities(fit: &GroupFit) -> Vec<(String, f64)> {
    let mut q = vec![
        ("pl0_db".to_string(), fit.path_loss.pl0),
        ("ple".to_string(), fit.path_loss.ple),
        ("sigma_s_db".to_string(), fit.path_loss.sigma_s),
    ];
    if let Some(a) = fit.sigma_coeff {
        q.push(("sigma_coeff_db".into(), a));
    }
    q.push(("ds_mu".into(), fit.ds.mu));
    q.push(("ds_sigma".into(), fit.ds.sigma));
    for (name, m) in [("asa", fit.asa), ("zsa", fit.zsa)] {
        if let Some(m) = m {
            q.push((format!("{name}_mu"), m.mu));
            q.push((format!("{name}_sigma"), m.sigma));
        }
    }
    for (a, b, r) in &fit.correlations {
        q.push((format!("corr_{a}_{b}"), *r));
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(band: FrequencyBand, d: f64, pl: f64, ds: f64, ang: Option<(f64, f64)>) -> Observation {
        Observation {
            drop_id: 0,
            band,
            state: ChannelState::Los,
            d_m: d,
            pl_db: pl,
            ds_log10s: ds,
            asa_log10deg: ang.map(|a| a.0),
            zsa_log10deg: ang.map(|a| a.1),
        }
    }

    #[test]
    fn small_groups_are_skipped() {
        let o = vec![obs(FrequencyBand::B6_9, 2.0, 50.0, -7.9, None), obs(FrequencyBand::B8_3, 2.0, 50.0, -7.9, None)];
        let out = fit_all(&o);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|g| matches!(g, GroupOutcome::Skipped { n: 1, .. })));
    }

    #[test]
    fn exact_line_is_recovered() {
        let o: Vec<Observation> = [1.0, 2.0, 5.0, 10.0, 20.0]
            .iter()
            .enumerate()
            .map(|(i, &d)| obs(FrequencyBand::B8_3, d, 51.1 + 14.0 * d.log10(), -7.9 + 0.01 * i as f64, Some((1.7 - 0.01 * i as f64, 1.2))))
            .collect();
        let GroupOutcome::Fitted(f) = fit_all(&o).remove(0) else { panic!("group skipped") };
        assert!((f.path_loss.pl0 - 51.1).abs() < 1e-9);
        assert!((f.path_loss.ple - 1.4).abs() < 1e-9);
        assert!(f.asa.is_some());
        assert!((f.correlation("ASA", "DS").unwrap() + 1.0).abs() < 1e-9);
        // ZSA is constant, so its correlations are omitted
        assert!(f.correlation("DS", "ZSA").is_none());
        let names: Vec<String> = quantities(&f).into_iter().map(|q| q.0).collect();
        assert!(names.contains(&"corr_DS_ASA".to_string()));
    }
}
