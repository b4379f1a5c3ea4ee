//! End-to-end tests of the binary: exit codes, output files, and
//! determinism across thread counts.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helmcloak"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_tiny_config(dir: &Path) -> String {
    let path = dir.join("tiny.toml");
    std::fs::write(
        &path,
        "[discretization]\nn_a = 32\nn_arc1 = 16\nn_R = 16\n",
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_writes_solution_phi_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = dir.path().join("run");
    let result = run(&["solve", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");

    let solution: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("solution.json")).unwrap())
            .unwrap();
    assert!(solution["solution"]["alpha"].as_f64().unwrap() > 0.0);
    assert!(solution["lemma"]["applicable"].as_bool().unwrap());
    assert_eq!(solution["seed"].as_u64().unwrap(), 7);

    let phi = std::fs::read_to_string(out.join("phi.csv")).unwrap();
    assert!(phi.starts_with("# schema: phi v1\n"));
    assert!(phi.contains("tau,re_phi,im_phi"));
    // Header comments plus one row per antenna sample.
    assert_eq!(phi.lines().filter(|l| !l.starts_with('#')).count(), 1 + 32);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["config"]["discretization"]["n_a"], 32);
}

#[test]
fn unknown_config_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[geometry]\nradius = 1.0\n").unwrap();
    let result = run(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("radius"), "{stderr}");
}

#[test]
fn unknown_noise_model_exits_2_with_accepted_tokens() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.toml");
    std::fs::write(&path, "[noise]\nmodel = \"lemma34\"\n").unwrap();
    let result = run(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("noise.model"), "{stderr}");
    assert!(stderr.contains("\"standard\"") && stderr.contains("\"scaled\""), "{stderr}");
}

#[test]
fn missing_config_file_exits_2() {
    let result = run(&["solve", "--config", "/definitely/not/here.toml"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        "[discretization]\nn_a = 32\nn_arc1 = 16\nn_R = 16\n\
         [sweep]\nrow_axis = \"wavenumber\"\ncol_axis = \"noise\"\n\
         row_grid = { values = [5.0, 10.0] }\ncol_grid = { values = [0.004, 0.008] }\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    let mut captures = Vec::new();
    for threads in ["1", "4"] {
        let result = run(&[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(result.status.success(), "{result:?}");
        captures.push(std::fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(captures[0], captures[1], "sweep.csv differs across thread counts");
    let text = String::from_utf8(captures.pop().unwrap()).unwrap();
    assert!(text.contains(",ok,"));
    assert!(!text.contains(",failed,"));
}

#[test]
fn sweep_with_no_roots_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("hopeless.toml");
    // The discrepancy has no root inside a window this far right.
    std::fs::write(
        &config,
        "[discretization]\nn_a = 32\nn_arc1 = 16\nn_R = 16\n\
         [regularization]\nalpha_min = 0.9\nalpha_max = 1.0\n\
         [sweep]\nrow_grid = { values = [10.0] }\ncol_grid = { values = [0.002] }\n",
    )
    .unwrap();
    let out = dir.path().join("run");
    let result = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(3), "{result:?}");
    let text = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert!(text.contains(",failed,"), "{text}");
}

#[test]
fn pkscan_writes_the_threshold_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = dir.path().join("run");
    let result = run(&[
        "pkscan",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--wavenumbers",
        "10",
        "--window-lo",
        "1e-6",
    ]);
    assert!(result.status.success(), "{result:?}");
    let text = std::fs::read_to_string(out.join("pk_table.csv")).unwrap();
    assert!(text.contains("wavenumber,exponent,alpha,monotone_throughout"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn svd_writes_spectra_and_surface() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = dir.path().join("run");
    let result = run(&[
        "svd",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--standoffs",
        "0.001,0.01",
    ]);
    assert!(result.status.success(), "{result:?}");
    assert!(out.join("spectrum_d0.001.csv").exists());
    assert!(out.join("spectrum_d0.01.csv").exists());
    let surface = std::fs::read_to_string(out.join("sigma_surface.csv")).unwrap();
    assert_eq!(surface.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn fieldmap_omits_the_exclusion_band_and_draws_svg() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_tiny_config(dir.path());
    let out = dir.path().join("run");
    let result = run(&[
        "fieldmap",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--extent",
        "0.02",
        "--resolution",
        "15",
        "--format",
        "csv",
        "--format",
        "svg",
    ]);
    assert!(result.status.success(), "{result:?}");
    let text = std::fs::read_to_string(out.join("field.csv")).unwrap();
    let mut rows = 0;
    for line in text.lines().skip_while(|l| l.starts_with('#')).skip(1) {
        let cells: Vec<f64> = line
            .split(',')
            .take(2)
            .map(|c| c.parse().unwrap())
            .collect();
        let radius = cells[0].hypot(cells[1]);
        assert!(
            (radius - 0.01).abs() >= 1e-3,
            "point ({}, {}) inside the exclusion band",
            cells[0],
            cells[1]
        );
        rows += 1;
    }
    assert!(rows > 0 && rows < 15 * 15, "band must remove some points");
    let svg = std::fs::read_to_string(out.join("field.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<rect"));
}
