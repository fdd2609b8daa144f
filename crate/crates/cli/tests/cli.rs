use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use inh_fr3::records::RECORD_HEADER;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_inh-fr3"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn tables_filters() {
    let o = run(&["tables", "--band", "14.5", "--state", "NLOS"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("14.5,NLOS,51.4,3.4,"), "{row}");

    let all = stdout(&run(&["tables"]));
    assert_eq!(all.lines().count(), 1 + 6);

    let low = stdout(&run(&["tables", "--band", "6.9"]));
    for line in low.lines().skip(1) {
        assert!(line.ends_with(",,,,"), "{line}");
    }
}

#[test]
fn tables_unwritable_output_is_io_error() {
    let o = run(&["tables", "-o", "/nonexistent-dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn generate_row_count_and_repeatability() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&["generate", "--bands", "6.9,8.3", "--state", "NLOS", "--drops", "100", "--seed", "42", "--dmin", "1", "--dmax", "50", "-o", p(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next().unwrap(), RECORD_HEADER);
    assert_eq!(text.lines().count(), 201);
    assert_eq!(text, fs::read_to_string(&b).unwrap());
}

#[test]
fn generate_rejects_zero_drops_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = run(&["generate", "--state", "LOS", "--drops", "0", "--seed", "1", "-o", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn generate_requires_seed() {
    let o = run(&["generate", "--state", "LOS", "--drops", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["tables", "--band", "28"]).status.code(), Some(1));
}

fn fit_rows(text: &str) -> Vec<(String, String, String, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].to_string(), f[3].to_string(), f[4].parse().unwrap())
        })
        .collect()
}

fn quantity(rows: &[(String, String, String, f64)], band: &str, state: &str, q: &str) -> f64 {
    rows.iter().find(|r| r.0 == band && r.1 == state && r.2 == q).unwrap_or_else(|| panic!("{band} {state} {q} missing")).3
}

#[test]
fn fit_recovers_generated_slope() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("nlos.csv");
    let o = run(&["generate", "--bands", "6.9", "--state", "NLOS", "--drops", "10000", "--seed", "7", "--no-two-slope", "-o", p(&data)]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["fit", p(&data)]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "band_ghz,state,n,quantity,value");
    let rows = fit_rows(&text);
    let ple = quantity(&rows, "6.9", "NLOS", "ple");
    assert!((ple - 3.2).abs() <= 0.05, "ple {ple}");
    let ds_sigma = quantity(&rows, "6.9", "NLOS", "ds_sigma");
    assert!((ds_sigma - 0.23).abs() <= 0.02);
    assert!((quantity(&rows, "6.9", "NLOS", "corr_SF_DS") + 0.55).abs() <= 0.05);
    assert!(quantity(&rows, "6.9", "NLOS", "sigma_coeff_db") > 0.0);
}

#[test]
fn fit_skips_small_groups() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tiny.csv");
    fs::write(&data, format!("{RECORD_HEADER}\n0,6.9,LOS,2,50,0,-7.9,,,1e6\n0,8.3,LOS,2,52,0,-7.9,1.7,1.2,1e6\n")).unwrap();
    let o = run(&["fit", p(&data)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn fit_rejects_malformed_header() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    fs::write(&data, "drop,band\n0,6.9\n").unwrap();
    let o = run(&["fit", p(&data)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(run(&["fit", "/nonexistent/file.csv"]).status.code(), Some(2));
}

#[test]
fn fit_reads_jsonl_and_raw_measurements() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("gen.jsonl");
    let o = run(&["generate", "--bands", "8.3", "--state", "LOS", "--drops", "200", "--seed", "3", "-o", p(&data)]);
    assert_eq!(o.status.code(), Some(0));
    let rows = fit_rows(&stdout(&run(&["fit", p(&data)])));
    assert!(rows.iter().any(|r| r.2 == "corr_ASA_ZSA"));

    let raw = dir.path().join("raw.jsonl");
    let mut lines = Vec::new();
    for (i, d) in [1.5f64, 3.0, 6.0, 12.0].iter().enumerate() {
        let gain = -(51.1 + 14.0 * d.log10());
        lines.push(format!(
            r#"{{"drop_id":{i},"band_ghz":"8.3","state":"LOS","d_m":{d},"pdp":{{"noise_floor_mean_db":-150,"taps":[{{"delay_s":0.0,"power_db":{gain}}},{{"delay_s":2e-8,"power_db":-160}}]}},"beams":[{{"azimuth_deg":20,"zenith_deg":0,"pdp":{{"noise_floor_mean_db":-150,"taps":[{{"delay_s":0.0,"power_db":-80}}]}}}},{{"azimuth_deg":-20,"zenith_deg":10,"pdp":{{"noise_floor_mean_db":-150,"taps":[{{"delay_s":{},"power_db":-82}}]}}}}]}}"#,
            10e-9 * (i + 1) as f64
        ));
    }
    fs::write(&raw, lines.join("\n")).unwrap();
    let o = run(&["fit", p(&raw)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = fit_rows(&stdout(&o));
    assert!((quantity(&rows, "8.3", "LOS", "pl0_db") - 51.1).abs() < 1e-3);
    assert!((quantity(&rows, "8.3", "LOS", "ple") - 1.4).abs() < 1e-4);
    assert!(rows.iter().any(|r| r.2 == "asa_mu"));
}

#[test]
fn validate_reports_every_check() {
    let o = run(&["validate", "--drops", "2000"]);
    let text = stdout(&o);
    let fspl: Vec<&str> = text.lines().filter(|l| l.contains(" fspl ")).collect();
    assert_eq!(fspl.len(), 3);
    assert!(fspl.iter().all(|l| l.starts_with("PASS")));
    let bc: Vec<&str> = text.lines().filter(|l| l.contains(" bc50 ") || l.contains(" bc90 ")).collect();
    assert_eq!(bc.len(), 12);
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    // the built-in 14.5 GHz NLOS 0.9-correlation bandwidth sits 11% from 1/(50 tau)
    assert_eq!(failed, ["FAIL bc90 14.5 NLOS: table 0.700 MHz vs 1/(K tau) 0.778 MHz, rel dev 0.112 (limit 0.10)"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn validate_flags_corrupted_override() {
    let dir = tempfile::tempdir().unwrap();
    let ov = dir.path().join("override.toml");
    fs::write(&ov, "[[table]]\nband = \"8.3\"\nstate = \"LOS\"\npl0 = 56.1\n").unwrap();
    let o = run(&["validate", "--drops", "2000", "--table-override", p(&ov)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL fspl 8.3 LOS")));
}

#[test]
fn plotdata_model_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("los.csv");
    let mut text = format!("{RECORD_HEADER}\n");
    for (i, d) in [1.0f64, 2.0, 5.0, 10.0, 20.0, 50.0].iter().enumerate() {
        text.push_str(&format!("{i},6.9,LOS,{d},{},0,-7.9,,,1e6\n", 48.3 + 15.0 * d.log10()));
    }
    fs::write(&data, text).unwrap();
    let o = run(&["plotdata", p(&data), "--kind", "pl_vs_d"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "series,x,y");
    let fit: Vec<(f64, f64)> = out
        .lines()
        .filter(|l| l.starts_with("6.9/LOS/fit,"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(fit.len(), 50);
    for (d, pl) in &fit {
        assert!((pl - (48.3 + 15.0 * d.log10())).abs() < 1e-3);
    }
    assert_eq!(out.lines().filter(|l| l.starts_with("6.9/LOS/data,")).count(), 6);
    let (a, b) = fit.windows(2).map(|w| (w[0], w[1])).find(|(a, b)| a.0 <= 10.0 && b.0 >= 10.0).unwrap();
    let at10 = a.1 + (b.1 - a.1) * (1.0 - a.0.log10()) / (b.0.log10() - a.0.log10());
    assert!((at10 - 63.3).abs() < 1e-3);
}

#[test]
fn plotdata_sf_qq_is_antisymmetric() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sym.csv");
    let mut text = format!("{RECORD_HEADER}\n");
    for (i, d) in [2.0f64, 4.0, 8.0].iter().enumerate() {
        for e in [-1.5, 1.5] {
            text.push_str(&format!("{i},6.9,LOS,{d},{},0,-7.9,,,1e6\n", 48.3 + 15.0 * d.log10() + e));
        }
    }
    fs::write(&data, text).unwrap();
    let out = stdout(&run(&["plotdata", p(&data), "--kind", "sf_qq"]));
    let pts: Vec<(f64, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(pts.len(), 6);
    for i in 0..3 {
        assert!((pts[i].0 + pts[5 - i].0).abs() < 1e-5);
        assert!((pts[i].1 + pts[5 - i].1).abs() < 1e-5);
    }
}

#[test]
fn plotdata_ds_qq_slope_tracks_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("nlos.csv");
    run(&["generate", "--bands", "14.5", "--state", "NLOS", "--drops", "10000", "--seed", "11", "-o", p(&data)]);
    let out = stdout(&run(&["plotdata", p(&data), "--kind", "ds_qq"]));
    let pts: Vec<(f64, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    assert!((sxy / sxx - 0.22).abs() < 0.01, "slope {}", sxy / sxx);
}

#[test]
fn plotdata_unknown_kind_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.csv");
    fs::write(&data, format!("{RECORD_HEADER}\n")).unwrap();
    assert_eq!(run(&["plotdata", p(&data), "--kind", "heatmap"]).status.code(), Some(1));
}

#[test]
fn config_file_fills_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "bands = [\"14.5\"]\nstate = \"LOS\"\ndrops = 4\nseed = 9\n").unwrap();
    let o = run(&["generate", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
    let o = run(&["generate", "--config", p(&cfg), "--drops", "2", "--state", "NLOS"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.starts_with(|c: char| c.is_ascii_digit()) && l.contains(",14.5,NLOS,")));
    fs::write(&cfg, "drops = \"many\"\n").unwrap();
    assert_eq!(run(&["generate", "--config", p(&cfg)]).status.code(), Some(1));
}
