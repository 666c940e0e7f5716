//! End-to-end checks of the command-line interface: exit codes, artifact
//! shapes, config/flag precedence, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmc-lab"))
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

/// Pull the number following `"key":` out of a hand-rolled JSON artifact.
fn json_number(text: &str, key: &str) -> f64 {
    let pat = format!("\"{key}\":");
    let line = text
        .lines()
        .find(|l| l.contains(&pat))
        .unwrap_or_else(|| panic!("no key {key} in {text}"));
    line.split(':')
        .nth(1)
        .unwrap()
        .trim()
        .trim_end_matches(',')
        .parse()
        .unwrap_or_else(|e| panic!("parsing {key} from {line}: {e}"))
}

#[test]
fn foliation_certificate_reports_c1() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "foliation-certificate",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let cert = read(dir.path(), "foliation_certificate.json");
    let c1 = json_number(&cert, "c1");
    assert!((c1 - (-0.152)).abs() < 5e-4, "c1 = {c1}");
    let max_value = json_number(&cert, "max_value");
    assert!(max_value < -0.15);
    // The manifest carries the derived constants.
    let manifest = read(dir.path(), "manifest.json");
    for key in ["z1", "c", "c1", "s1"] {
        assert!(
            manifest.contains(&format!("\"{key}\":")),
            "manifest lacks {key}"
        );
    }
}

#[test]
fn nullity_total_is_two() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "nullity",
            "--surface",
            "critical-catenoid",
            "--nmax",
            "5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report = read(dir.path(), "nullity.json");
    assert!(report.contains("\"total\": 2"), "{report}");
    assert!(report.contains("\"surface\": \"critical-catenoid\""));
}

#[test]
fn invalid_eccentricity_exits_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"command": "delaunay-sweep", "parameters": {"emin": -0.5, "emax": 1.1, "n": 3}}"#,
    )
    .unwrap();
    let output = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("emin"), "stderr: {stderr}");
}

#[test]
fn unknown_parameter_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"command": "catenoid", "parameters": {"samples": 101, "wavelength": 3}}"#,
    )
    .unwrap();
    let output = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("wavelength"), "stderr: {stderr}");
}

#[test]
fn sweep_is_byte_deterministic() {
    let run = |dir: &Path| {
        let status = bin()
            .args([
                "--out-dir",
                dir.to_str().unwrap(),
                "delaunay-sweep",
                "--emin",
                "0.95",
                "--emax",
                "1.05",
                "--n",
                "5",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(a.path());
    run(b.path());
    for name in ["delaunay_sweep.csv", "manifest.json"] {
        assert_eq!(
            read(a.path(), name),
            read(b.path(), name),
            "{name} differs between runs"
        );
    }
    // The catenoid row has h = 0 up to roundoff.
    let csv = read(a.path(), "delaunay_sweep.csv");
    assert!(csv.starts_with("e,h,rho,s_star\n"));
    let mid = csv.lines().nth(3).unwrap();
    let h: f64 = mid.split(',').nth(1).unwrap().parse().unwrap();
    assert!(h.abs() < 1e-12, "h(1) = {h}");
}

#[test]
fn env_var_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .env("CMC_LAB_OUT", dir.path())
        .args(["catenoid", "--samples", "101"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("catenoid_profile.csv").exists());
    let constants = read(dir.path(), "catenoid.json");
    let c = json_number(&constants, "c");
    assert!((c - 0.4604851).abs() < 1e-6, "c = {c}");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        format!(
            r#"{{"command": "delaunay-sweep", "parameters": {{"emin": 0.95, "emax": 1.05, "n": 3}}, "output_dir": {:?}}}"#,
            dir.path().to_str().unwrap()
        ),
    )
    .unwrap();
    let status = bin()
        .args([
            "--config",
            config.to_str().unwrap(),
            "delaunay-sweep",
            "--n",
            "5",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(dir.path(), "delaunay_sweep.csv");
    assert_eq!(
        csv.lines().count(),
        6,
        "flag --n 5 should win over config n = 3"
    );
    let manifest = read(dir.path(), "manifest.json");
    assert!(manifest.contains("\"n\": 5"));
}

#[test]
fn mesh_export_has_expected_counts() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "mesh",
            "--surface",
            "critical-catenoid",
            "--ns",
            "41",
            "--ntheta",
            "16",
            "--out",
            "catenoid.obj",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let obj = read(dir.path(), "catenoid.obj");
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 41 * 16);
    assert_eq!(
        obj.lines().filter(|l| l.starts_with("vn ")).count(),
        41 * 16
    );
    assert_eq!(
        obj.lines().filter(|l| l.starts_with("f ")).count(),
        2 * 40 * 16
    );
}

#[test]
fn extend_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // Input: h(x) = x on [0, 1].
    let input = dir.path().join("h.csv");
    let mut body = String::from("x,value\n");
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        body.push_str(&format!("{:.16e},{:.16e}\n", x, x));
    }
    fs::write(&input, body).unwrap();
    let status = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "extend",
            "--dim",
            "1",
            "--input",
            input.to_str().unwrap(),
            "--zmax",
            "0.2",
            "--nz",
            "6",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let out = read(dir.path(), "extend.csv");
    assert!(out.starts_with("x,z,value\n"));
    // 21 x-nodes times 6 z-levels.
    assert_eq!(out.lines().count(), 1 + 21 * 6);
    // Interior check: F(0.5, z) = 0.5 z for the linear input.
    let mut found = false;
    for line in out.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        if (cols[0] - 0.5).abs() < 1e-12 && cols[1] > 0.0 {
            assert!((cols[2] - 0.5 * cols[1]).abs() < 1e-12, "{line}");
            found = true;
        }
    }
    assert!(found);
}

#[test]
fn flux_csv_for_annulus() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "flux",
            "--surface",
            "annulus:0.9",
            "--axis",
            "x",
            "--ns",
            "401",
            "--ntheta",
            "64",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(dir.path(), "flux.csv");
    assert!(csv.starts_with("surface,axis,flux_H,flux_n\n"));
    let row = csv.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[0], "annulus-e-0.9");
    assert_eq!(cols[1], "x");
    let flux_h: f64 = cols[2].parse().unwrap();
    let flux_n: f64 = cols[3].parse().unwrap();
    assert!(flux_h.abs() < 1e-5 && flux_n.abs() < 1e-5);
}

#[test]
fn disk_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "disk",
            "--n",
            "2",
            "--resolution",
            "32",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let summary = read(dir.path(), "disk.json");
    assert!((json_number(&summary, "min_psi") - 0.25).abs() < 1e-14);
    assert!(json_number(&summary, "boundary_robin_defect") < 1e-12);
    assert!(json_number(&summary, "fd_solution_deviation") < 1e-9);
    assert!(dir.path().join("disk_kernel_x1.csv").exists());
    assert!(dir.path().join("disk_kernel_x2.csv").exists());
}
