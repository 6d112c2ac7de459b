use std::fs;
use std::process::Command;

use noon_cli::{presets, run_scenario, to_csv, write_outputs, CliError, SweepConfig};

fn config_err(json: &str) -> (String, String) {
    let err = SweepConfig::from_json(json)
        .and_then(|c| c.validate().map(|()| c))
        .expect_err("config should be rejected");
    assert_eq!(err.exit_code(), 2);
    match err {
        CliError::Config { field, message } => (field, message),
        other => panic!("expected a config error, got {other}"),
    }
}

#[test]
fn validation_names_the_offending_field() {
    let (field, _) = config_err(r#"{"scenario":"dephasing_min_error","sweep":{"name":"delta","start":0,"stop":0.5,"count":11}}"#);
    assert_eq!(field, "m");
    let (field, _) = config_err(r#"{"scenario":"fig3","m":3,"sweep":{"name":"delta","start":0,"stop":0.5,"count":1}}"#);
    assert_eq!(field, "sweep.count");
    let (field, _) = config_err(r#"{"scenario":"fig2","kappa":1.5,"theta":0.9,"sweep":{"name":"m","start":1,"stop":10,"count":10}}"#);
    assert_eq!(field, "kappa");
    let (field, _) = config_err(
        r#"{"scenario":"custom","m":2,"state":{"type":"pure_noon","n":2},
            "channels":[{"type":"loss","kappa":0.9,"theta":1.5}],
            "sweep":{"name":"phi","start":0.1,"stop":1,"count":5}}"#,
    );
    assert_eq!(field, "channels[0]");
    let (field, message) = config_err(r#"{"scenario":"fig1","m":2,"colour":"red","sweep":{"name":"phi","start":0,"stop":1,"count":5}}"#);
    assert_eq!(field, "config");
    assert!(message.contains("colour"), "{message}");
}

#[test]
fn presets_validate() {
    for name in presets::PRESET_NAMES {
        presets::preset(name).unwrap().validate().unwrap();
    }
    assert!(presets::preset("fig6").is_none());
}

#[test]
fn config_round_trips_through_json() {
    for name in presets::PRESET_NAMES {
        let cfg = presets::preset(name).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(SweepConfig::from_json(&text).unwrap(), cfg);
    }
}

#[test]
fn custom_without_channels_gives_pure_state_baseline() {
    let cfg = SweepConfig::from_json(
        r#"{"scenario":"custom","m":3,"state":{"type":"pure_noon","n":3},
            "sweep":{"name":"phi","start":0.1,"stop":3.0,"count":30}}"#,
    )
    .unwrap();
    let r = run_scenario(&cfg, 2).unwrap();
    assert_eq!(r.rows.len(), 30);
    assert!(r.singular.is_empty());
    for d in r.column("dphi").unwrap() {
        assert!((d - 1.0 / 3.0).abs() < 1e-12, "{d}");
    }
}

#[test]
fn singular_points_are_logged_and_skipped() {
    let cfg = SweepConfig::from_json(
        r#"{"scenario":"custom","m":2,"state":{"type":"pure_noon","n":2},
            "sweep":{"name":"phi","start":0,"stop":3.141592653589793,"count":5}}"#,
    )
    .unwrap();
    let r = run_scenario(&cfg, 1).unwrap();
    // φ = 0, π/2, π are turning points of cos 2φ
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.singular.len(), 3);
    let dir = tempfile::tempdir().unwrap();
    let paths = write_outputs(&r, dir.path()).unwrap();
    let log = fs::read_to_string(paths.singular_log.unwrap()).unwrap();
    assert_eq!(log.lines().count(), 3);
}

#[test]
fn csv_is_independent_of_thread_count() {
    let mut fig5 = presets::fig5();
    fig5.mc_samples = Some(2000);
    fig5.seed = 7;
    for cfg in [presets::fig1(), presets::fig3(), presets::fig4(), fig5] {
        let one = to_csv(&run_scenario(&cfg, 1).unwrap());
        let four = to_csv(&run_scenario(&cfg, 4).unwrap());
        assert_eq!(one, four, "{:?}", cfg.scenario);
        assert_eq!(one, to_csv(&run_scenario(&cfg, 4).unwrap()));
    }
}

#[test]
fn seed_changes_only_monte_carlo_columns() {
    let mut cfg = presets::fig5();
    cfg.mc_samples = Some(500);
    cfg.seed = 1;
    let a = run_scenario(&cfg, 2).unwrap();
    cfg.seed = 2;
    let b = run_scenario(&cfg, 2).unwrap();
    assert_eq!(a.column("tau_co"), b.column("tau_co"));
    assert_ne!(a.column("mc_coherence_scale_co"), b.column("mc_coherence_scale_co"));
}

#[test]
fn outputs_land_in_a_created_directory() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("a/b/c");
    let r = run_scenario(&presets::fig2(), 2).unwrap();
    let paths = write_outputs(&r, &nested).unwrap();
    for p in [&paths.csv, &paths.metadata, &paths.plot] {
        assert!(p.starts_with(&nested) && p.exists(), "{}", p.display());
    }
    assert!(paths.singular_log.is_none());
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(&paths.metadata).unwrap()).unwrap();
    assert_eq!(meta["summary"]["first_m_above_sql"], 88);
    assert_eq!(meta["summary"]["optimal"]["m"], 39);
}

#[test]
fn plot_scripts_reference_relative_csv_and_reference_lines() {
    let dir = tempfile::tempdir().unwrap();
    let expectations: [(SweepConfig, &[&str]); 5] = [
        (presets::fig1(), &["'fig1.csv'", "1/sqrt(2)", "1.0/2", "set output 'fig1.png'"]),
        (presets::fig2(), &["'fig2.csv'", "1/sqrt(x)", "1/x", "logscale y"]),
        (presets::fig3(), &["'fig3.csv'", "1/sqrt(3)", "set arrow"]),
        (presets::fig4(), &["'fig4.csv'", "y2tics", "axes x1y2", "1/sqrt(4)"]),
        (presets::fig5(), &["'fig5.csv'", "0 with lines", "co-propagation", "counter-propagation"]),
    ];
    for (cfg, needles) in expectations {
        let r = run_scenario(&cfg, 2).unwrap();
        let paths = write_outputs(&r, dir.path()).unwrap();
        let script = fs::read_to_string(&paths.plot).unwrap();
        for needle in needles {
            assert!(script.contains(needle), "{needle} missing from {}", paths.plot.display());
        }
        assert!(!script.contains(dir.path().to_str().unwrap()));
        let again = write_outputs(&run_scenario(&cfg, 3).unwrap(), dir.path()).unwrap();
        assert_eq!(script, fs::read_to_string(again.plot).unwrap());
    }
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_noon-sim"));
    cmd.env_remove("NOON_SIM_JOBS");
    cmd
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["--out"]).arg(dir.path()).arg("fig2").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("fig2.csv").exists());

    let out = bin().args(["run", "--scenario", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"scenario":"fig3","sweep":{"name":"delta","start":0,"stop":1,"count":3}}"#).unwrap();
    let out = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m:"));
}

#[test]
fn binary_runs_config_files_and_honours_env_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("custom.json");
    fs::write(
        &cfg,
        r#"{"scenario":"custom","name":"lossy_noon","m":2,
            "state":{"type":"pure_noon","n":2},
            "channels":[{"type":"loss","kappa":0.9,"theta":0.8},{"type":"dephase","delta":0.1}],
            "sweep":{"name":"phi","start":0.1,"stop":1.4,"count":14}}"#,
    )
    .unwrap();
    let run = |jobs: &str, sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = bin()
            .env("NOON_SIM_JOBS", jobs)
            .arg("--out")
            .arg(&out_dir)
            .args(["run", "--config"])
            .arg(&cfg)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(out_dir.join("lossy_noon.csv")).unwrap()
    };
    assert_eq!(run("1", "one"), run("3", "three"));
}

#[test]
fn atmosphere_info_prints_parameters_and_moments() {
    let out = bin().args(["atmosphere-info", "--max-moment", "4"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["moments"].as_array().unwrap().len(), 5);
    assert_eq!(v["moments"][0]["value"], 1.0);
    let t0 = v["weibull"]["t0"].as_f64().unwrap();
    let mean = v["mean_amplitude_transmission"].as_f64().unwrap();
    assert!(mean < t0 && mean > 0.9 * t0);

    let out = bin().args(["atmosphere-info", "--aperture", "wide"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
