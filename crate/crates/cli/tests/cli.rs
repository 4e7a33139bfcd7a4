use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cvleak_cli::config::Config;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cvleak"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv_text: &str, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column present");
    r.records().map(|row| row.unwrap()[idx].parse().unwrap()).collect()
}

#[test]
fn baseline_coherent_rate_is_one_bit() {
    let o = run(&["rate", "--config", example("baseline.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["rate"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["i_ab"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["secure"], true);
    for key in [
        "direction", "attack", "beta", "v_s", "v_m", "i_ab", "eve_information", "chi", "rate", "secure", "v_b",
        "v_b_cond_a", "v_b_cond_e", "v_a_cond_e",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn coherent_premod_rate_ignores_eta_e() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<serde_json::Value> = ["0.5", "1.0"]
        .iter()
        .map(|eta_e| {
            let cfg = format!(
                "[scenario]\nkind = \"premod\"\nv_s = 1.0\nv_m = 5.0\neta_e = {eta_e}\n\n[channel]\neta = 0.4\nepsilon = 0.02\n"
            );
            let p = write(dir.path(), &format!("p{eta_e}.toml"), &cfg);
            let o = run(&["rate", "--config", p.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
            serde_json::from_slice(&o.stdout).unwrap()
        })
        .collect();
    for key in ["rate", "i_ab", "eve_information", "chi", "secure"] {
        assert_eq!(outputs[0][key].to_string(), outputs[1][key].to_string(), "{key}");
    }
}

#[test]
fn negative_epsilon_exits_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "bad.toml",
        "[scenario]\nkind = \"multimode\"\nv_s = 1.0\nv_m = 3.0\nk = 0.0\n\n[channel]\neta = 0.5\nepsilon = -0.01\n",
    );
    let o = run(&["rate", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("channel.epsilon"));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[scenario]\nkind = \"multimode\"\nv_s = 1.0\nv_m = 3.0\n\n[channel]\neta = 0.5\n", "scenario.k"),
        ("[scenario]\nkind = \"multimode\"\nv_s = 1.0\nv_m = 3.0\nk = 0.0\nbogus = 1\n", "scenario"),
        ("[scenario]\nkind = \"multimode\"\nv_s = 1.0\nv_m = 3.0\nk = 0.0\n\n[protocol]\nbeta = 1.5\n", "protocol.beta"),
        ("[scenario]\nkind = \"premod\"\nv_s = 1.0\nv_m = 3.0\n\n[channel]\neta = 0.5\n", "scenario.eta_e"),
        (
            "[scenario]\nkind = \"multimode\"\nv_s = 0.5\nv_m = 3.0\nk = 0.0\n\n[channel]\neta = 0.5\n\n[sweep]\nparameter = \"eta_e\"\nstart = 0.1\nstop = 0.9\nsteps = 3\n",
            "sweep.parameter",
        ),
        (
            "[scenario]\nkind = \"multimode\"\nv_s = 0.5\nv_m = 3.0\nk = 0.0\n\n[channel]\neta = 0.5\n\n[sweep]\nparameter = \"k\"\nstart = 0.1\nstop = 0.9\nsteps = 1\n",
            "sweep.steps",
        ),
    ];
    for (i, (text, key)) in cases.iter().enumerate() {
        let p = write(dir.path(), &format!("c{i}.toml"), text);
        let o = run(&["rate", "--config", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(&format!("`{key}")), "case {i}: {err}");
    }
}

#[test]
fn k_sweep_rate_decreases_and_crosses_zero() {
    let o = run(&["sweep", "--config", example("fig3_k_sweep.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k_ratio,rate_bits_per_use,i_ab_bits_per_use,eve_information_bits_per_use,secure,v_m_opt_snu\n"));
    let rate = column(&text, "rate_bits_per_use");
    assert_eq!(rate.len(), 25);
    assert!(rate.windows(2).all(|w| w[1] < w[0]));
    assert!(rate[0] > 0.0 && *rate.last().unwrap() < 0.0);
}

#[test]
fn distance_sweeps_keep_leakage_ordering() {
    let rates: Vec<Vec<f64>> = ["0", "1", "1.5"]
        .iter()
        .map(|k| {
            let o = run(&["sweep", "--config", example(&format!("fig2_distance_k{k}.toml")).to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0));
            column(&stdout(&o), "rate_bits_per_use")
        })
        .collect();
    for i in 0..rates[0].len() {
        assert!(rates[0][i] > rates[1][i] && rates[1][i] > rates[2][i], "row {i}");
    }
}

#[test]
fn two_step_sweep_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "s.toml",
        "[scenario]\nkind = \"multimode\"\nv_s = 0.5\nv_m = 10.0\nk = 0.0\n\n[channel]\neta = 0.5\n\n[sweep]\nparameter = \"k\"\nstart = 0.0\nstop = 1.0\nsteps = 2\n",
    );
    let o = run(&["sweep", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert_eq!(column(&text, "k_ratio"), vec![0.0, 1.0]);
}

#[test]
fn csv_is_identical_across_worker_counts() {
    let cfg = example("fig4_premod_distance.toml");
    let outs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|w| {
            let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--workers", w]);
            assert_eq!(o.status.code(), Some(0));
            o.stdout
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert!(text.starts_with("v_s_snu,distance_km,capped,insecure_at_contact,secure\n"));
    let d = column(&text, "distance_km");
    assert!(d.windows(2).all(|w| w[1] < w[0]), "squeezing should extend the distance: {d:?}");
}

#[test]
fn sweep_writes_output_file_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let cfg = example("fig3_k_sweep.toml");
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 26);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 25);
    assert!(v[0]["report"]["rate"].as_f64().unwrap() > 0.0);
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("rows.csv");
    let o = run(&[
        "sweep",
        "--config",
        example("fig3_k_sweep.toml").to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_config_file_exits_3() {
    let o = run(&["rate", "--config", "/nonexistent/cvleak.toml"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_round_trips_through_toml_and_json() {
    for name in ["fig3_k_sweep.toml", "fig4_premod_distance.toml", "kmax.json", "baseline.toml"] {
        let cfg = Config::load(&example(name)).unwrap();
        let via_toml = Config::parse_toml(&cfg.to_toml()).unwrap();
        let via_json = Config::parse_json(&cfg.to_json()).unwrap();
        assert_eq!(via_toml, cfg, "{name}");
        assert_eq!(via_json, cfg, "{name}");
        assert_eq!(via_toml.scenario().unwrap(), cfg.scenario().unwrap());
    }
}

#[test]
fn optimize_k_matches_sweep_crossing() {
    let o = run(&["optimize", "--config", example("kmax.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let k = v["k_max"].as_f64().unwrap();
    assert!((0.5..=1.0).contains(&k), "{k}");
    assert_eq!(v["unbounded"], false);
}

#[test]
fn optimize_distance_and_vm_targets() {
    let dir = tempfile::tempdir().unwrap();
    let base = "[scenario]\nkind = \"multimode\"\nv_s = 0.5\nv_m = 10.0\nk = 0.0\n\n[channel]\neta = 0.2\nepsilon = 0.01\n\n[protocol]\nbeta = 0.97\n";
    let p = write(dir.path(), "d.toml", &format!("{base}\n[optimize]\ntarget = \"distance\"\n"));
    let v: serde_json::Value = serde_json::from_slice(&run(&["optimize", "--config", p.to_str().unwrap()]).stdout).unwrap();
    assert!(v["distance_km"].as_f64().unwrap() > 0.0);
    assert_eq!(v["capped"], false);

    let p = write(dir.path(), "m.toml", &format!("{base}\n[optimize]\ntarget = \"v_m\"\n"));
    let v: serde_json::Value = serde_json::from_slice(&run(&["optimize", "--config", p.to_str().unwrap()]).stdout).unwrap();
    let vm = v["argument"].as_f64().unwrap();
    assert_eq!(v["report"]["v_m"].as_f64().unwrap(), vm);
    assert!(v["value"].as_f64().unwrap() >= v["report"]["rate"].as_f64().unwrap() - 1e-12);

    let p = write(
        dir.path(),
        "bad.toml",
        "[scenario]\nkind = \"premod\"\nv_s = 0.5\nv_m = 10.0\neta_e = 0.5\n\n[channel]\neta = 0.2\n\n[optimize]\ntarget = \"k\"\n",
    );
    let o = run(&["optimize", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("optimize.target"));
}

#[test]
fn validate_passes_with_at_least_twelve_checks() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bm.csv");
    let o = run(&["validate", "--output", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    let checks: Vec<&str> = text.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).collect();
    assert!(checks.len() >= 12);
    assert!(checks.iter().all(|l| l.starts_with("PASS")));
    for name in ["golden_multimode_pm", "golden_premod_pm", "golden_premod_eb_pre_channel"] {
        assert!(text.contains(name));
    }
    let residual = column(&std::fs::read_to_string(&table).unwrap(), "residual_snu");
    assert_eq!(residual.len(), 40);
    assert!(residual.iter().all(|r| *r <= 1e-8));

    let o = run(&["validate", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|c| c["passed"] == true));
}
