use std::process::Command;

fn savanna(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_savanna"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exit_codes_from_the_binary() {
    assert_eq!(
        savanna(&["presets", "--region", "3"]).status.code(),
        Some(0)
    );
    assert_eq!(
        savanna(&["simulate", "--region", "2", "--horizon", "-1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        savanna(&["classify", "--region", "1", "--set", "K_T=0"])
            .status
            .code(),
        Some(2)
    );
    // grassland orbit does not exist: every cell of rho_g0 is defined, G_int is not
    let out = savanna(&[
        "sweep",
        "--region",
        "1",
        "--set",
        "mu_G=1.0",
        "--axes",
        "tau:5:10:3,eta_G:0.1:0.9:3",
        "--quantity",
        "g_int",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("error:")).count(), 1);
}

#[test]
fn params_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("r2.cfg");
    let out = savanna(&[
        "presets",
        "--region",
        "2",
        "--output",
        cfg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let from_file = savanna(&[
        "classify",
        "--params",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    let from_region = savanna(&["classify", "--region", "2", "--format", "csv"]);
    assert!(from_file.status.success());
    let body = |o: &std::process::Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with("# source"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(body(&from_file), body(&from_region));
}

#[test]
fn floquet_reports_stable_savanna() {
    let out = savanna(&[
        "floquet",
        "--region",
        "2",
        "--set",
        "gamma_S=1",
        "--set",
        "gamma_NS=2.5",
        "--set",
        "tau=5",
        "--set",
        "sigma_G=0.247",
        "--set",
        "sigma_NS=0.0123",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# orbit: savanna"));
    let row = text.lines().last().unwrap();
    assert!(row.ends_with(",stable"));
    let rho: f64 = row.split(',').nth(15).unwrap().parse().unwrap();
    assert!((rho - 0.658263).abs() < 1e-5);
}

#[test]
fn simulate_writes_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = savanna(&[
        "simulate",
        "--region",
        "3",
        "--horizon",
        "3",
        "--h",
        "0.1",
        "--scheme",
        "reference",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("# scheme: reference"));
    assert_eq!(text.matches(",pre_fire").count(), 3);
}
