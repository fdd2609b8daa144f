//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;

use inh_fr3::dispersion::{angular_spread, mean_delay, rms_delay_spread, Tap, TapSet, MAX_EXCESS_DELAY_S};
use inh_fr3::estimator::{fit_distance_sigma, fit_path_loss, pearson, PathLossSample};
use inh_fr3::lsp::{calibrate_zsa_mixture, generate_drops, DropGenerator, GeneratorConfig, LspSampler, MultibandSampler};
use inh_fr3::params::{validate_table, CheckKind, InterFreqParam, Lsp, BC_REL_TOLERANCE};
use inh_fr3::propagation::{fspl_db, PathLossModel, ShadowModel};
use inh_fr3::{ChannelState, FrequencyBand, ModelRegistry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

type Outcome = (bool, String);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fspl_consistency(reg: &ModelRegistry) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut gaps = Vec::new();
    for b in FrequencyBand::ALL {
        let gap = (reg.table(b, ChannelState::Los).pl0 - fspl_db(b.center_frequency_hz(), 1.0).unwrap()).abs();
        worst = worst.max(gap);
        gaps.push(format!("{b}: {gap:.2} dB"));
    }
    (worst <= 1.0, format!("LOS intercept vs FSPL(1 m) gaps {}", gaps.join(", ")))
}

fn coherence_consistency(reg: &ModelRegistry) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for b in FrequencyBand::ALL {
        for s in ChannelState::ALL {
            let all = reg.audit().into_iter().filter(|c| c.band == b && c.state == s && c.kind != CheckKind::FsplIntercept).count();
            checked += all;
            for c in validate_table(reg.table(b, s), b, s) {
                if c.kind != CheckKind::FsplIntercept {
                    failures.push(format!("{} {b} {s} dev {:.3}", c.kind.label(), c.deviation));
                }
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{checked} coherence-bandwidth entries within {BC_REL_TOLERANCE} of 1/(K tau)")
    } else {
        format!("{} of {checked} entries beyond {BC_REL_TOLERANCE}: {}", failures.len(), failures.join("; "))
    };
    (checked == 12 && failures.is_empty(), detail)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn dispersion_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=50);
        let taps: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| {
                (
                    rng.random_range(0.0..MAX_EXCESS_DELAY_S),
                    rng.random_range(1e-3..1.0),
                    rng.random_range(-180.0..180.0),
                )
            })
            .collect();
        let set = TapSet::new(taps.iter().map(|&(d, p, a)| Tap::with_angles(d, p, a, 0.0)).collect()).unwrap();

        // brute force: pairwise forms, no first-moment subtraction
        let total: f64 = taps.iter().map(|t| t.1).sum();
        let mut mean = 0.0;
        let mut acc_w = 0.0;
        for &(d, p, _) in &taps {
            acc_w += p;
            mean += (d - mean) * p / acc_w;
        }
        let mut var = 0.0;
        let mut r2 = 0.0;
        for &(di, pi, ai) in &taps {
            for &(dj, pj, aj) in &taps {
                var += pi * pj * (di - dj).powi(2);
                r2 += pi * pj * (ai - aj).to_radians().cos();
            }
        }
        let rms = (var / (2.0 * total * total)).sqrt();
        let spread = (-(r2 / (total * total)).ln()).sqrt().to_degrees();

        let angles: Vec<f64> = taps.iter().map(|t| t.2).collect();
        let powers: Vec<f64> = taps.iter().map(|t| t.1).collect();
        worst = worst
            .max(rel_err(mean_delay(&set).unwrap(), mean))
            .max(rel_err(rms_delay_spread(&set).unwrap(), rms))
            .max(rel_err(angular_spread(&angles, &powers).unwrap(), spread));
    }
    (worst <= 1e-10, format!("1000 random tap sets, worst relative error {worst:.2e} (limit 1e-10)"))
}

fn regression_round_trip(reg: &ModelRegistry) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for b in FrequencyBand::ALL {
        for s in ChannelState::ALL {
            let t = reg.table(b, s);
            let mut passes = 0;
            for seed in 0..100 {
                let mut cfg = GeneratorConfig::new(vec![b], s, 650, seed);
                cfg.two_slope = false;
                cfg.zsa_mixture = false;
                let samples: Vec<PathLossSample> = generate_drops(&cfg, reg)
                    .unwrap()
                    .iter()
                    .map(|d| PathLossSample { distance_m: d.distance_m, path_loss_db: d.bands[0].pl_db, state: s, band: b })
                    .collect();
                let f = fit_path_loss(&samples).unwrap();
                if (f.pl0 - t.pl0).abs() <= 1.0 && (f.ple - t.ple).abs() <= 0.10 && (f.sigma_s - t.sigma_s).abs() <= 0.5 {
                    passes += 1;
                }
            }
            ok &= passes >= 95;
            parts.push(format!("{b} {s} {passes}/100"));
        }
    }
    (ok, format!("seeds with PL0, PLE and sigma all in tolerance (need 95): {}", parts.join(", ")))
}

fn columns(samples: &[[f64; 4]], k: usize) -> Vec<f64> {
    samples.iter().map(|s| s[k]).collect()
}

fn correlation_reproduction(reg: &ModelRegistry) -> Outcome {
    const N: usize = 100_000;
    let mut worst: f64 = 0.0;
    let mut worst_at = String::new();
    let mut note = |err: f64, what: String| {
        if err > worst {
            worst = err;
            worst_at = what;
        }
    };
    for b in FrequencyBand::ALL {
        for s in ChannelState::ALL {
            let t = reg.table(b, s);
            let corr = reg.cross_corr(b, s);
            let sampler = LspSampler::new(t, corr, ShadowModel::constant(t.sigma_s).unwrap()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let samples: Vec<[f64; 4]> = (0..N)
                .map(|_| {
                    let v = sampler.sample(10.0, &mut rng).unwrap();
                    [v.sf_db, v.ds_log10s, v.asa_log10deg.unwrap_or(0.0), v.zsa_log10deg.unwrap_or(0.0)]
                })
                .collect();
            let axes = Lsp::axes_for(b);
            for i in 0..axes.len() {
                for j in i + 1..axes.len() {
                    let r = pearson(&columns(&samples, i), &columns(&samples, j)).unwrap();
                    let expected = corr.get(axes[i].label(), axes[j].label()).unwrap();
                    note((r - expected).abs(), format!("{b} {s} {}-{}", axes[i].label(), axes[j].label()));
                }
            }
        }
    }
    for s in ChannelState::ALL {
        let mut cfg = GeneratorConfig::new(FrequencyBand::ALL.to_vec(), s, 1, 0);
        cfg.zsa_mixture = false;
        let sampler = MultibandSampler::from_registry(reg, &cfg).unwrap();
        let sigmas: Vec<f64> = FrequencyBand::ALL.iter().map(|&b| reg.table(b, s).sigma_s).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut sf: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(N)).collect();
        let mut ds: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(N)).collect();
        for _ in 0..N {
            for (k, (_, v)) in sampler.sample(&sigmas, &mut rng).unwrap().into_iter().enumerate() {
                sf[k].push(v.sf_db);
                ds[k].push(v.ds_log10s);
            }
        }
        for (param, name, series) in [(InterFreqParam::Sf, "SF", &sf), (InterFreqParam::Ds, "DS", &ds)] {
            let m = reg.interfreq(param, s);
            for i in 0..3 {
                for j in i + 1..3 {
                    let (a, b) = (FrequencyBand::ALL[i], FrequencyBand::ALL[j]);
                    let r = pearson(&series[i], &series[j]).unwrap();
                    note((r - m.get(a.label(), b.label()).unwrap()).abs(), format!("{s} {name} {a}-{b}"));
                }
            }
        }
    }
    (worst <= 0.02, format!("1e5 samples per case, worst deviation {worst:.4} at {worst_at} (limit 0.02)"))
}

fn zsa_mixture(reg: &ModelRegistry) -> Outcome {
    let t = reg.table(FrequencyBand::B14_5, ChannelState::Los);
    let mix = calibrate_zsa_mixture(t).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v: Vec<f64> = (0..100_000).map(|_| mix.sample(&mut rng)).collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let ok = (mean - 1.04).abs() <= 0.005 && (sd - 0.06).abs() <= 0.005 && (mix.component_sigma - 0.0267).abs() < 5e-5;
    (
        ok,
        format!("14.5 LOS pooled mean {mean:.4} (1.04), pooled sigma {sd:.4} (0.06), component sigma {:.5} (0.0267)", mix.component_sigma),
    )
}

fn two_slope_floor(reg: &ModelRegistry) -> Outcome {
    let mut violations = 0;
    let mut total = 0;
    for b in FrequencyBand::ALL {
        let los = PathLossModel::from_table(reg.table(b, ChannelState::Los)).unwrap();
        let cfg = GeneratorConfig::new(vec![b], ChannelState::Nlos, 10_000, 17);
        for d in DropGenerator::new(cfg, reg).unwrap().generate().unwrap() {
            total += 1;
            if d.bands[0].model_pl_db < los.path_loss_db(d.distance_m, 0.0).unwrap() {
                violations += 1;
            }
        }
    }
    (violations == 0, format!("{violations} of {total} NLOS drops below the LOS curve"))
}

fn sha256(path: &Path) -> String {
    Sha256::digest(fs::read(path).unwrap()).iter().map(|b| format!("{b:02x}")).collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut hashes = Vec::new();
    for (i, (workers, format)) in [("1", "csv"), ("4", "csv"), ("4", "csv"), ("1", "jsonl"), ("3", "jsonl")].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.{format}"));
        let status = Command::new(env!("CARGO_BIN_EXE_inh-fr3"))
            .args(["--workers", workers, "generate", "--state", "NLOS", "--drops", "3000", "--seed", "99", "--format", format, "-o"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        hashes.push((format.to_string(), sha256(&out)));
    }
    let same = |f: &str| {
        let h: Vec<&String> = hashes.iter().filter(|x| x.0 == f).map(|x| &x.1).collect();
        h.windows(2).all(|w| w[0] == w[1])
    };
    let ok = same("csv") && same("jsonl");
    (ok, format!("csv sha256 {} x3, jsonl sha256 {} x2 across 1/3/4 workers", &hashes[0].1[..16], &hashes[3].1[..16]))
}

fn distance_shadowing() -> Outcome {
    const N: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d: Vec<f64> = (1..=N).map(|i| 50f64.powf(i as f64 / N as f64)).collect();
    let s: Vec<f64> = d
        .iter()
        .map(|d| {
            let z: f64 = StandardNormal.sample(&mut rng);
            6.5 * d.log10() * z
        })
        .collect();
    let a = fit_distance_sigma(&s, &d).unwrap();
    ((a - 6.5).abs() <= 0.15, format!("recovered a = {a:.4} (6.5 +/- 0.15)"))
}

fn main() {
    let reg = ModelRegistry::builtin();
    let criteria: Vec<Criterion> = vec![
        ("FSPL consistency", Box::new(|| fspl_consistency(&reg))),
        ("coherence-bandwidth self-consistency", Box::new(|| coherence_consistency(&reg))),
        ("dispersion oracles", Box::new(dispersion_oracles)),
        ("regression round trip", Box::new(|| regression_round_trip(&reg))),
        ("correlation reproduction", Box::new(|| correlation_reproduction(&reg))),
        ("ZSA mixture calibration", Box::new(|| zsa_mixture(&reg))),
        ("two-slope floor", Box::new(|| two_slope_floor(&reg))),
        ("determinism", Box::new(determinism)),
        ("distance-dependent shadowing", Box::new(distance_shadowing)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (ok, detail) = check();
        failed += usize::from(!ok);
        println!("{} criterion {} ({name}): {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
