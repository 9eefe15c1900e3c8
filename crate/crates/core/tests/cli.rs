use std::process::{Command, Output};

use nk6::cli::{RunReport, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

fn nk6(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nk6"))
        .args(args)
        .env_remove("NK6_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> RunReport {
    serde_json::from_slice(&o.stdout).expect("valid JSON report")
}

#[test]
fn sphere_passes_with_exit_zero() {
    let o = nk6(&["--backend", "s6", "--points", "6", "--seed", "3"]);
    assert_eq!(code(&o), EXIT_PASS, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert!(r.pass);
    assert_eq!(r.schema, "nk6/1");
    // 32 identities, two structure-equation rows and the Einstein row
    assert_eq!(r.identities.len(), 35);
    assert!(r.identities.iter().all(|i| i.pass && i.n == 6));
}

#[test]
fn perturbed_failure_exits_one() {
    let o = nk6(&["--backend", "perturbed", "--delta", "0.1", "--points", "4", "--identities", "I3"]);
    assert_eq!(code(&o), EXIT_FAIL);
    let r = report(&o);
    assert!(!r.pass);
    assert_eq!(r.identities.len(), 1);
    assert!(!r.identities[0].pass);
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["--backend", "torus"][..],
        &["--identities", "I99"],
        &["--backend", "perturbed", "--delta", "0.9"],
        &["--points", "0"],
        &["--fd-step", "-1"],
        &["--radius", "0"],
        &["--config", "/nonexistent/nk6.toml"],
    ] {
        let o = nk6(args);
        assert_eq!(code(&o), EXIT_CONFIG, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["--points", "5", "--seed", "11", "--identities", "I5,I16,I26,pde,classify"];
    let a = nk6(&args);
    let b = nk6(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = nk6(&["--points", "5", "--seed", "12", "--identities", "I5,I16,I26,pde,classify"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn seed_is_read_from_the_environment() {
    let base = ["--points", "4", "--identities", "I7"];
    let from_flag = nk6(&[&base[..], &["--seed", "99"]].concat());
    let from_env = Command::new(env!("CARGO_BIN_EXE_nk6"))
        .args(base)
        .env("NK6_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(from_flag.stdout, from_env.stdout);
    assert_eq!(report(&from_env).config.seed, 99);
    let overridden = Command::new(env!("CARGO_BIN_EXE_nk6"))
        .args([&base[..], &["--seed", "5"]].concat())
        .env("NK6_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(report(&overridden).config.seed, 5);
}

#[test]
fn json_round_trips() {
    let o = nk6(&["--points", "4", "--seed", "1"]);
    let r = report(&o);
    let again = nk6::cli::emit(&r, nk6::cli::Format::Json).unwrap();
    assert_eq!(again, o.stdout);
}

#[test]
fn csv_has_one_row_per_report() {
    let o = nk6(&["--points", "3", "--format", "csv", "--identities", "I1,I2,pde,einstein"]);
    assert_eq!(code(&o), EXIT_PASS);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "id,n,max_residual,mean_residual,tol,pass");
    let ids: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["I1", "I2", "pde.dsigma", "pde.dpsi_minus", "einstein"]);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 6 && l.ends_with(",true")));
}

#[test]
fn human_format_reports_mu() {
    let o = nk6(&["--points", "3", "--format", "human", "--identities", "I15"]);
    assert_eq!(code(&o), EXIT_PASS);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("mu = 1.000000 ±")), "{text}");
    assert!(text.lines().any(|l| l == "overall: PASS"), "{text}");
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = nk6(&["--points", "3", "--identities", "I1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), EXIT_PASS);
    assert!(o.stdout.is_empty());
    let r: RunReport = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(r.identities[0].id, "I1");
}

#[test]
fn config_file_is_merged_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "backend = \"s6\"\nradius = 2.0\npoints = 3\nseed = 8\nidentities = \"I15,I32\"\nformat = \"json\"\n",
    )
    .unwrap();
    let o = nk6(&["--config", path.to_str().unwrap(), "--points", "5"]);
    assert_eq!(code(&o), EXIT_PASS, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r.config.points, 5);
    assert_eq!(r.config.seed, 8);
    assert_eq!(r.config.radius, 2.0);
    assert!((r.mu.unwrap().value - 0.5).abs() < 1e-9);
    assert_eq!(r.identities.len(), 2);

    std::fs::write(&path, "pionts = 3\n").unwrap();
    assert_eq!(code(&nk6(&["--config", path.to_str().unwrap()])), EXIT_CONFIG);
}

#[test]
fn wall_clock_is_opt_in() {
    let plain = nk6(&["--points", "2", "--identities", "I1"]);
    assert!(!String::from_utf8_lossy(&plain.stdout).contains("wall_clock_ms"));
    let timed = nk6(&["--points", "2", "--identities", "I1", "--wall-clock"]);
    assert!(report(&timed).wall_clock_ms.is_some());
}

#[test]
fn flat_space_has_zero_mu() {
    let o = nk6(&["--backend", "c3", "--points", "4", "--identities", "I5,I28,classify"]);
    assert_eq!(code(&o), EXIT_PASS);
    let r = report(&o);
    assert_eq!(r.mu.unwrap().value, 0.0);
    assert_eq!(r.classification.unwrap().label.to_string(), "Kähler");
}
