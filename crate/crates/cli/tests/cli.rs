//! End-to-end tests of the command-line surface: flags, exit codes, CSV
//! shape, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lanheat"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Pull `value` out of a long-format sweep CSV row set.
fn sweep_values(csv: &str, metric: &str) -> Vec<f64> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && l.contains(&format!(",{metric},")))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn absorbance_reproduces_reported_copper_and_silicon_values() {
    let out = run(&["absorbance", "--substrate", "Copper"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for (wl, expected) in [(193, 0.7142), (248, 0.7309), (308, 0.7313)] {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{wl},")))
            .unwrap_or_else(|| panic!("no row for {wl} nm in {text}"));
        let a_s: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(
            (a_s - expected).abs() < 0.01,
            "{wl} nm: A_s = {a_s}, expected ≈ {expected}"
        );
    }

    let out = run(&["absorbance", "--substrate", "Si"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for (wl, expected) in [(193, 0.395), (248, 0.421), (308, 0.533)] {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{wl},")))
            .unwrap();
        let a_s: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((a_s - expected).abs() < 0.01);
    }
}

#[test]
fn absorbance_warns_on_transparent_substrate() {
    let out = run(&["absorbance", "--substrate", "FusedSilica"]);
    assert!(out.status.success());
    assert!(
        stderr(&out).contains("transparent"),
        "expected a transparency warning, got: {}",
        stderr(&out)
    );
    for line in stdout(&out).lines().skip(1) {
        let a_s: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(a_s, 0.0);
    }
}

#[test]
fn simulate_both_solvers_agree_and_write_probe_csvs() {
    let dir = tmp_dir("simulate_both");
    let out = run(&[
        "simulate",
        "--substrate",
        "Copper",
        "--wavelength-nm",
        "308",
        "--fluence-j-cm2",
        "0.6",
        "--fwhm-ns",
        "20",
        "--solver",
        "both",
        "--out",
        dir.to_str().unwrap(),
        "--svg",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);

    let peak = |label: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(label))
            .unwrap_or_else(|| panic!("no summary for {label} in {text}"))
            .split("peak_C = ")
            .nth(1)
            .unwrap()
            .split(',')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    let ana = peak("analytical_surface");
    let fdm = peak("fdm_surface");
    let rise = (ana - 25.0).max(fdm - 25.0);
    assert!(
        (ana - fdm).abs() / rise < 0.05,
        "surface peaks differ: analytical {ana}, fdm {fdm}"
    );

    for file in [
        "analytical_surface.csv",
        "fdm_surface.csv",
        "fdm_depth_5um.csv",
        "fdm_polymer-center.csv",
        "plot.svg",
    ] {
        assert!(dir.join(file).exists(), "missing {file}");
    }

    // CSV shape: # comments, then a units header, LF endings
    let csv = std::fs::read(dir.join("analytical_surface.csv")).unwrap();
    assert!(!csv.contains(&b'\r'));
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("# lanheat simulate\n"));
    assert!(csv.contains("# substrate = Copper\n"));
    assert!(csv.contains("\nt_ns,T_C\n"));
    let first_data = csv.lines().find(|l| !l.starts_with('#') && l.contains('.')).unwrap();
    assert!(first_data.split(',').count() == 2);
}

#[test]
fn simulate_silicon_reference_point() {
    let out = run(&[
        "simulate",
        "--substrate",
        "Si",
        "--wavelength-nm",
        "308",
        "--fluence-j-cm2",
        "0.35",
        "--fwhm-ns",
        "20",
        "--solver",
        "analytical",
        "--probe",
        "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let peak: f64 = text
        .lines()
        .find(|l| l.starts_with("analytical_surface"))
        .unwrap()
        .split("peak_C = ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(
        (peak - 700.0).abs() / 700.0 < 0.10,
        "silicon peak {peak} °C outside 700 ± 10%"
    );
}

#[test]
fn simulate_rejects_polymer_probe_for_analytical_solver() {
    let out = run(&[
        "simulate",
        "--solver",
        "analytical",
        "--probe",
        "polymer-center",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("polymer-center"));
}

#[test]
fn unknown_material_is_a_validation_error() {
    let out = run(&["simulate", "--substrate", "Gold"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Gold"));
}

#[test]
fn sweep_fluence_axis_is_monotone_and_deterministic() {
    let dir_a = tmp_dir("sweep_a");
    let dir_b = tmp_dir("sweep_b");
    let args = |dir: &Path| {
        vec![
            "sweep".to_string(),
            "--fluences-j-cm2".into(),
            "0.2,0.4,0.6,0.8,1.0".into(),
            "--fwhms-ns".into(),
            "20,30".into(),
            "--solver".into(),
            "analytical".into(),
            "--out".into(),
            dir.to_str().unwrap().to_string(),
        ]
    };
    let out_a = bin().args(args(&dir_a)).output().unwrap();
    assert!(out_a.status.success(), "{}", stderr(&out_a));
    let out_b = bin().args(args(&dir_b)).output().unwrap();
    assert!(out_b.status.success());

    let csv_a = std::fs::read(dir_a.join("sweep.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.join("sweep.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "sweep output is not deterministic");

    let csv = String::from_utf8(csv_a).unwrap();
    // rows are lexicographic over the axes: 20 ns before 30 ns inside each
    // fluence, fluences ascending
    let peaks_20ns: Vec<f64> = csv
        .lines()
        .filter(|l| l.contains(",20,analytical,surface,peak_C,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(peaks_20ns.len(), 5);
    for pair in peaks_20ns.windows(2) {
        assert!(pair[1] > pair[0], "peaks not increasing: {peaks_20ns:?}");
    }
    // duration axis: 30 ns peak below the 20 ns peak at equal fluence
    let all_peaks = sweep_values(&csv, "peak_C");
    assert_eq!(all_peaks.len(), 10);
    for pair in all_peaks.chunks(2) {
        assert!(pair[1] < pair[0], "30 ns peak should undercut 20 ns");
    }
}

#[test]
fn sweep_cap_is_enforced() {
    let out = run(&[
        "sweep",
        "--fluences-j-cm2",
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0",
        "--fwhms-ns",
        "10,20,30,40,50",
        "--cap",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cap"));
}

#[test]
fn compare_passes_default_threshold_and_fails_tight_one() {
    let dir = tmp_dir("compare");
    let out = run(&["compare", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("peak difference"));
    assert!(dir.join("compare.csv").exists());

    // a vanishing threshold must fail with exit 3 but still write the report
    let dir2 = tmp_dir("compare_tight");
    let out = run(&[
        "compare",
        "--threshold-pct",
        "0.0001",
        "--out",
        dir2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(dir2.join("compare.csv").exists(), "report must still be written");
}

#[test]
fn compare_null_case_is_exact() {
    let out = run(&["compare", "--fluence-j-cm2", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("peak difference: 0.0000%"),
        "null case should have zero difference: {text}"
    );
}

#[test]
fn materials_file_extends_the_database() {
    let dir = tmp_dir("materials");
    let file = dir.join("extra.toml");
    std::fs::write(
        &file,
        r#"
[Nickel]
density = 8908.0
heat_capacity = 444.0
thermal_conductivity = 90.9
refractive_index.308 = [1.72, 2.1]
"#,
    )
    .unwrap();
    let out = run(&[
        "materials",
        "list",
        "--materials-file",
        file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("Nickel"));

    // and it is usable as a substrate
    let out = run(&[
        "simulate",
        "--substrate",
        "Nickel",
        "--solver",
        "analytical",
        "--probe",
        "0",
        "--materials-file",
        file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp_dir("config");
    let file = dir.join("run.toml");
    std::fs::write(
        &file,
        r#"
substrate = "Si"
fluence_j_cm2 = 0.35
fwhm_ns = 20.0
solver = "analytical"
probes = ["0"]
"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let base = stdout(&out);
    assert!(base.contains("analytical_surface"));
    let base_peak: f64 = base
        .lines()
        .find(|l| l.starts_with("analytical_surface"))
        .unwrap()
        .split("peak_C = ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();

    // the flag wins over the file: doubling fluence doubles the rise
    let out = run(&[
        "simulate",
        "--config",
        file.to_str().unwrap(),
        "--fluence-j-cm2",
        "0.7",
    ]);
    assert!(out.status.success());
    let peak: f64 = stdout(&out)
        .lines()
        .find(|l| l.starts_with("analytical_surface"))
        .unwrap()
        .split("peak_C = ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let expected = 25.0 + 2.0 * (base_peak - 25.0);
    assert!(
        (peak - expected).abs() < 1.0,
        "flag did not override config: {peak} vs expected {expected}"
    );
}

#[test]
fn byte_identical_simulate_reruns() {
    let dir_a = tmp_dir("repro_a");
    let dir_b = tmp_dir("repro_b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "simulate",
            "--solver",
            "analytical",
            "--probe",
            "0",
            "--probe",
            "2",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for file in ["analytical_surface.csv", "analytical_depth_2um.csv"] {
        let a = std::fs::read(dir_a.join(file)).unwrap();
        let b = std::fs::read(dir_b.join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}
