use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_efa-relay"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn verify_passes_with_fixed_seed() {
    let out = run(&["verify", "--seed", "42", "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("name,instances,worst_relative_gap,tolerance,passed\n"));
    assert!(stdout.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn missing_subcommand_is_usage_error() {
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(run(&["verify", "--bogus"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep-rho"));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[scenario]\nratio_dr = 1.5\n").unwrap();
    let out = run(&["sweep-rho", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ratio_dr"));

    fs::write(&bad, "[scenario]\nunknown_key = 1\n").unwrap();
    assert_eq!(
        run(&["optimize", "--config", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("missing.toml");
    assert_eq!(
        run(&["optimize", "--config", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );

    assert_eq!(run(&["sweep-antennas", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no/such/dir/out.csv");
    let out = run(&["sweep-rho", "--quiet", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_rho_writes_full_grid_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.csv");
    let out = run(&["sweep-rho", "--seed", "7", "--quiet", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    assert!(out.stderr.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("sweep_value,variant,mean_rate_bits,std_error,n_trials")
    );
    let rows = csv_rows(&text);
    let variants: std::collections::BTreeSet<_> = rows.iter().map(|r| r[1].clone()).collect();
    assert!(variants.len() >= 4);
    for v in &variants {
        assert_eq!(rows.iter().filter(|r| &r[1] == v).count(), 99, "variant {v}");
    }
}

#[test]
fn sweeps_are_reproducible_and_quiet_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["sweep-distance-mimo", "--seed", "11", "--trials", "6"];
    let loud = bin()
        .args(common)
        .args(["--out", a.to_str().unwrap()])
        .output()
        .unwrap();
    let quiet = bin()
        .args(common)
        .args(["--quiet", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(loud.status.success() && quiet.status.success());
    assert!(!loud.stderr.is_empty());
    assert!(quiet.stderr.is_empty());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let stdout = run(&["sweep-distance-mimo", "--seed", "11", "--trials", "6", "--quiet"]);
    assert_eq!(stdout.stdout, fs::read(&a).unwrap());
    let other = run(&["sweep-distance-mimo", "--seed", "12", "--trials", "6", "--quiet"]);
    assert_ne!(other.stdout, stdout.stdout);
}

#[test]
fn config_output_path_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let from_cfg = dir.path().join("from_cfg.csv");
    let from_flag = dir.path().join("from_flag.csv");
    fs::write(
        &cfg,
        format!(
            "[scenario]\nr = 1\nsweep_values = [0.2, 0.8]\n\n[monte_carlo]\nn_trials = 20\nseed = 5\n\n[output]\npath = {:?}\n",
            from_cfg.to_str().unwrap()
        ),
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    assert!(run(&["sweep-distance-siso", "--config", c, "--quiet"]).status.success());
    let rows = csv_rows(&fs::read_to_string(&from_cfg).unwrap());
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[4] == "20"));

    let out = run(&[
        "sweep-distance-siso",
        "--config",
        c,
        "--quiet",
        "--trials",
        "3",
        "--out",
        from_flag.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(csv_rows(&fs::read_to_string(&from_flag).unwrap())
        .iter()
        .all(|r| r[4] == "3"));
}

#[test]
fn optimize_reports_every_variant() {
    let out = run(&["optimize", "--seed", "3", "--quiet"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for v in ["EFA", "NoEF", "GenieEFA", "MrcMrtEFA", "MrcMrtNoEF"] {
        assert!(text.contains(&format!("[{v}]")), "{v} missing from\n{text}");
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("siso.toml");
    fs::write(&cfg, "[scenario]\nr = 1\n").unwrap();
    let out = run(&["optimize", "--config", cfg.to_str().unwrap(), "--quiet"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[EFA]") && text.contains("[NoEF]") && text.contains("rho_star"));
}

#[test]
fn shipped_configs_parse() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = run(&["show-config", "--config", path.to_str().unwrap(), "--quiet"]);
            assert!(
                out.status.success(),
                "{}: {}",
                path.display(),
                String::from_utf8_lossy(&out.stderr)
            );
            seen += 1;
        }
    }
    assert_eq!(seen, 6);
}
