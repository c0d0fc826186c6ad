use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eitsqz"));
    cmd.env_remove("SQZ_THREADS");
    cmd
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("eitsqz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn eitsqz");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn fails_naming(args: &[&str], key: &str) {
    let out = bin().args(args).output().unwrap();
    assert!(!out.status.success(), "{args:?} should fail");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(key), "{args:?}: `{err}` does not name `{key}`");
}

#[test]
fn optimize_reports_the_known_optimum() {
    let path = scratch("opt.json");
    run(bin().args(["optimize", "--c", "100", "--rho", "0.0005", "-o"]).arg(&path));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let res = &v["meta"]["results"];
    assert!((res["gamma_p_star"].as_f64().unwrap() - 5.5).abs() < 0.5);
    assert!((res["gamma_p_prime_star"].as_f64().unwrap() - 25.0).abs() < 3.0);
    assert!((res["squeezing_db"].as_f64().unwrap() - 4.3).abs() < 0.15);
    assert_eq!(v["meta"]["command"], "optimize");
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn scan_gamma_csv_has_header_and_columns() {
    let out = run(bin().args(["scan-gamma", "--gamma-p-prime", "0.1:100:log200"]));
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header.contains(&"# command = scan-gamma"));
    assert!(header.contains(&"# gamma_p = 2"));
    let body: Vec<&str> = text.lines().skip(header.len()).collect();
    assert_eq!(body[0], "gamma_p,gamma_p_prime,ds_min,var_sy_norm,spin_half_norm");
    assert_eq!(body.len(), 201);
    // Squeezing appears somewhere along the sweep.
    let best = body[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(best < 1.0);
}

#[test]
fn outputs_round_trip_through_their_headers() {
    for (first, second, args) in [
        ("a.csv", "b.csv", vec!["field-scan", "--amplitude", "0:4:lin9", "--gamma-p", "1.5"]),
        ("a.json", "b.json", vec!["spectrum", "--omega-bar", "0.01,1,100", "--n", "2e5"]),
        ("c.csv", "d.csv", vec!["variance", "--delta-tilde", "-0.2", "--gamma0-hz", "40"]),
    ] {
        let a = scratch(first);
        let b = scratch(second);
        run(bin().args(&args).arg("-o").arg(&a));
        run(bin().arg("run").arg("--config").arg(&a).arg("-o").arg(&b));
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn flags_override_config_file() {
    let cfg = scratch("override.cfg");
    std::fs::write(&cfg, "command = variance\nc = 50\ngamma-p = 3\n").unwrap();
    let out = run(bin().args(["run", "--gamma-p", "4", "--config"]).arg(&cfg));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# c = 50\n"));
    assert!(text.contains("# gamma_p = 4\n"));
}

#[test]
fn invalid_input_names_the_key() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "command = variance\nbogus_key = 1\n").unwrap();
    fails_naming(&["run", "--config", cfg.to_str().unwrap()], "bogus_key");
    fails_naming(&["optimize", "--amplitude", "2"], "amplitude");
    fails_naming(&["variance", "--gamma-p", "-1"], "gamma_p");
    fails_naming(&["scan-gamma", "--gamma-p-prime", "1:0:log3"], "gamma_p_prime");
    fails_naming(&["variance", "--rho", "abc"], "rho");
    fails_naming(&["field-scan", "--amplitude", "-1,2"], "amplitude");
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["scan-gamma", "--gamma-p", "1,5", "--gamma-p-prime", "0.5:50:log40"];
    let one = run(bin().args(args).args(["--threads", "1"])).stdout;
    let four = run(bin().args(args).args(["--threads", "4"])).stdout;
    let env = run(bin().args(args).env("SQZ_THREADS", "3")).stdout;
    assert_eq!(one, four);
    assert_eq!(one, env);
}

#[test]
fn optimize_sweeps_cooperativity_deterministically() {
    let args = ["optimize", "--c", "100,1000", "--format", "json"];
    let a = run(bin().args(args).args(["--threads", "1"])).stdout;
    let b = run(bin().args(args).args(["--threads", "2"])).stdout;
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1]["ds_min_star"].as_f64().unwrap() < rows[0]["ds_min_star"].as_f64().unwrap());
}

#[test]
fn scaling_records_fit() {
    let out = run(bin().args(["scaling", "--c-values", "100:10000:log3"]));
    let text = String::from_utf8(out.stdout).unwrap();
    let slope: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# result.slope = "))
        .expect("slope in header")
        .parse()
        .unwrap();
    assert!(slope < -0.25 && slope > -0.4, "{slope}");
}

#[test]
fn validate_passes() {
    let out = run(bin().args(["validate", "--points", "20"]));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# result.all_passed = true"));
    assert_eq!(text.lines().filter(|l| l.contains(",true,")).count(), 8);
}

#[test]
fn run_without_command_is_rejected() {
    fails_naming(&["run"], "command");
}
