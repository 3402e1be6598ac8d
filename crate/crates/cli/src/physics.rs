//! Configuration resolution and solver orchestration for the subcommands.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Deserialize;

use lanheat::analytical::{AnalyticalConfig, AnalyticalError, TemperatureSeries};
use lanheat::fdm::{FdmConfig, FdmError, TemperatureField};
use lanheat::materials::{MaterialDb, MaterialError};
use lanheat::optics::{layer_absorbances, solve_stack, AbsorbanceReport, LayerStack, OpticsError};
use lanheat::source::{LaserPulse, SourceError, VolumetricSource};

use crate::output::{self, csv_escape_comment, format_ns, format_temp};
use crate::svg;
use crate::{AbsorbanceArgs, CommonPhysics, CompareArgs, SimulateArgs, SweepArgs};

const J_PER_CM2: f64 = 1e4;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Solver(String),
    ThresholdExceeded { diff_pct: f64, threshold_pct: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Solver(_) => 2,
            CliError::ThresholdExceeded { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::Solver(msg) => write!(f, "solver failure: {msg}"),
            CliError::ThresholdExceeded {
                diff_pct,
                threshold_pct,
            } => write!(
                f,
                "peak difference {diff_pct:.4}% exceeds the {threshold_pct}% threshold"
            ),
        }
    }
}

impl From<MaterialError> for CliError {
    fn from(e: MaterialError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<OpticsError> for CliError {
    fn from(e: OpticsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SourceError> for CliError {
    fn from(e: SourceError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AnalyticalError> for CliError {
    fn from(e: AnalyticalError) -> Self {
        match e {
            AnalyticalError::InvalidInput(_) => CliError::Validation(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<FdmError> for CliError {
    fn from(e: FdmError) -> Self {
        match e {
            FdmError::SingularSystem(_) => CliError::Solver(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Analytical,
    Fdm,
    Both,
}

impl Solver {
    fn runs_analytical(self) -> bool {
        matches!(self, Solver::Analytical | Solver::Both)
    }

    fn runs_fdm(self) -> bool {
        matches!(self, Solver::Fdm | Solver::Both)
    }

    fn label(self) -> &'static str {
        match self {
            Solver::Analytical => "analytical",
            Solver::Fdm => "fdm",
            Solver::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    /// Depth into the substrate, meters.
    Depth(f64),
    PolymerCenter,
}

impl FromStr for Probe {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "polymer-center" {
            return Ok(Probe::PolymerCenter);
        }
        let depth_um: f64 = s
            .parse()
            .map_err(|_| format!("probe must be a depth in μm or `polymer-center`, got `{s}`"))?;
        if depth_um < 0.0 {
            return Err(format!("probe depth must be non-negative, got {depth_um}"));
        }
        Ok(Probe::Depth(depth_um * 1e-6))
    }
}

impl Probe {
    fn label(&self) -> String {
        match self {
            Probe::PolymerCenter => "polymer-center".to_string(),
            Probe::Depth(x) if *x == 0.0 => "surface".to_string(),
            Probe::Depth(x) => format!("depth_{}um", trim_float(x * 1e6)),
        }
    }
}

fn trim_float(v: f64) -> String {
    let s = format!("{v}");
    s.replace('.', "p")
}

/// File-loadable defaults; every key can be overridden on the command
/// line.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    substrate: Option<String>,
    wavelength_nm: Option<u32>,
    fluence_j_cm2: Option<f64>,
    fwhm_ns: Option<f64>,
    ti_c: Option<f64>,
    polymer_thickness_nm: Option<f64>,
    solver: Option<String>,
    probes: Option<Vec<String>>,
    dt_ns: Option<f64>,
    min_cell_nm: Option<f64>,
    quad_order: Option<usize>,
    materials_file: Option<PathBuf>,
}

/// Fully resolved operating point.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub substrate: String,
    pub wavelength_nm: u32,
    pub fluence_j_cm2: f64,
    pub fwhm_ns: f64,
    pub ti_c: f64,
    pub polymer_thickness: f64,
    pub solver: Solver,
    pub probes: Vec<Probe>,
    pub dt: f64,
    pub min_cell: f64,
    pub quad_order: usize,
}

impl RunConfig {
    fn audit_lines(&self) -> Vec<(String, String)> {
        // audit values are rounded to 6 decimals so unit conversions do
        // not leak float noise into the header
        let trim = |v: f64| format!("{}", (v * 1e6).round() / 1e6);
        vec![
            ("substrate".into(), self.substrate.clone()),
            ("wavelength_nm".into(), self.wavelength_nm.to_string()),
            ("fluence_j_cm2".into(), trim(self.fluence_j_cm2)),
            ("fwhm_ns".into(), trim(self.fwhm_ns)),
            ("ti_c".into(), trim(self.ti_c)),
            (
                "polymer_thickness_nm".into(),
                trim(self.polymer_thickness * 1e9),
            ),
            ("solver".into(), self.solver.label().to_string()),
            (
                "probes".into(),
                self.probes
                    .iter()
                    .map(|p| p.label())
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            ("dt_ns".into(), trim(self.dt * 1e9)),
            ("min_cell_nm".into(), trim(self.min_cell * 1e9)),
            ("quad_order".into(), self.quad_order.to_string()),
        ]
    }
}

fn load_config_file(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            toml::from_str(&text)
                .map_err(|e| CliError::Validation(format!("config file {}: {e}", p.display())))
        }
    }
}

fn load_db(common: &CommonPhysics, file_cfg: &ConfigFile) -> Result<MaterialDb, CliError> {
    let mut db = MaterialDb::builtin();
    let path = common
        .materials_file
        .as_ref()
        .or(file_cfg.materials_file.as_ref());
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)?;
        db.extend_from_str(&text)?;
    }
    Ok(db)
}

fn parse_probes(tokens: &[String]) -> Result<Vec<Probe>, CliError> {
    tokens
        .iter()
        .map(|t| t.parse::<Probe>().map_err(CliError::Validation))
        .collect()
}

/// Merge command line > config file > defaults into one operating point.
fn resolve(
    common: &CommonPhysics,
    solver_flag: Option<Solver>,
    probe_flag: Option<&Vec<String>>,
    file_cfg: &ConfigFile,
) -> Result<RunConfig, CliError> {
    let solver = match solver_flag {
        Some(s) => s,
        None => match file_cfg.solver.as_deref() {
            Some(s) => Solver::from_str(s, true).map_err(|_| {
                CliError::Validation(format!(
                    "config file solver `{s}` is not one of analytical, fdm, both"
                ))
            })?,
            None => Solver::Both,
        },
    };

    // Figure-style default probe set: surface, 1/2/5 μm, resist center.
    let (probes, probes_explicit) = match probe_flag {
        Some(tokens) => (parse_probes(tokens)?, true),
        None => match &file_cfg.probes {
            Some(tokens) => (parse_probes(tokens)?, true),
            None => (
                vec![
                    Probe::Depth(0.0),
                    Probe::Depth(1e-6),
                    Probe::Depth(2e-6),
                    Probe::Depth(5e-6),
                    Probe::PolymerCenter,
                ],
                false,
            ),
        },
    };
    let probes = validate_probes(probes, probes_explicit, solver)?;

    let fluence_j_cm2 = common
        .fluence_j_cm2
        .or(file_cfg.fluence_j_cm2)
        .unwrap_or(0.6);
    if fluence_j_cm2 < 0.0 {
        return Err(CliError::Validation(format!(
            "fluence must be non-negative, got {fluence_j_cm2} J/cm²"
        )));
    }
    let fwhm_ns = common.fwhm_ns.or(file_cfg.fwhm_ns).unwrap_or(20.0);
    if fwhm_ns <= 0.0 {
        return Err(CliError::Validation(format!(
            "pulse FWHM must be positive, got {fwhm_ns} ns"
        )));
    }

    Ok(RunConfig {
        substrate: common
            .substrate
            .clone()
            .or_else(|| file_cfg.substrate.clone())
            .unwrap_or_else(|| "Copper".to_string()),
        wavelength_nm: common
            .wavelength_nm
            .or(file_cfg.wavelength_nm)
            .unwrap_or(308),
        fluence_j_cm2,
        fwhm_ns,
        ti_c: common.ti_c.or(file_cfg.ti_c).unwrap_or(25.0),
        polymer_thickness: common
            .polymer_thickness_nm
            .or(file_cfg.polymer_thickness_nm)
            .unwrap_or(200.0)
            * 1e-9,
        solver,
        probes,
        dt: common.dt_ns.or(file_cfg.dt_ns).unwrap_or(0.1) * 1e-9,
        min_cell: common.min_cell_nm.or(file_cfg.min_cell_nm).unwrap_or(5.0) * 1e-9,
        quad_order: common.quad_order.or(file_cfg.quad_order).unwrap_or(104),
    })
}

/// The analytical model covers the substrate half-space only; a resist
/// probe under `--solver analytical` is a usage error when asked for
/// explicitly, and silently dropped from the default set.
fn validate_probes(
    probes: Vec<Probe>,
    explicit: bool,
    solver: Solver,
) -> Result<Vec<Probe>, CliError> {
    if solver == Solver::Analytical {
        if explicit && probes.contains(&Probe::PolymerCenter) {
            return Err(CliError::Validation(
                "probe `polymer-center` requires the fdm solver; the analytical model \
                 covers only the substrate"
                    .to_string(),
            ));
        }
        if !explicit {
            return Ok(probes
                .into_iter()
                .filter(|p| *p != Probe::PolymerCenter)
                .collect());
        }
    }
    if probes.is_empty() {
        return Err(CliError::Validation("no probes requested".to_string()));
    }
    Ok(probes)
}

/// Absorbance report for the resolved stack.
fn stack_report(db: &MaterialDb, cfg: &RunConfig) -> Result<AbsorbanceReport, CliError> {
    let stack = LayerStack::imprint(
        db.get("FusedSilica")?,
        db.get("PMMA")?,
        cfg.polymer_thickness,
        db.get(&cfg.substrate)?,
    )?;
    Ok(layer_absorbances(
        &solve_stack(&stack, cfg.wavelength_nm)?,
        &stack,
    ))
}

fn analytical_config(
    db: &MaterialDb,
    cfg: &RunConfig,
    report: &AbsorbanceReport,
) -> Result<AnalyticalConfig, CliError> {
    let substrate = db.get(&cfg.substrate)?.clone();
    let beta = substrate.absorption_coefficient(cfg.wavelength_nm)?;
    if beta <= 0.0 {
        return Err(CliError::Validation(format!(
            "substrate `{}` is transparent at {} nm; the analytical model needs an absorbing \
             substrate",
            cfg.substrate, cfg.wavelength_nm
        )));
    }
    let pulse = LaserPulse::new(
        cfg.wavelength_nm,
        cfg.fluence_j_cm2 * J_PER_CM2,
        cfg.fwhm_ns * 1e-9,
    )?;
    let source = VolumetricSource::new(report.deposited_substrate_fraction(), beta, pulse)?;
    Ok(AnalyticalConfig::new(substrate, source, cfg.ti_c)?.with_order(cfg.quad_order))
}

fn fdm_config(
    db: &MaterialDb,
    cfg: &RunConfig,
    report: &AbsorbanceReport,
) -> Result<FdmConfig, CliError> {
    let pulse = LaserPulse::new(
        cfg.wavelength_nm,
        cfg.fluence_j_cm2 * J_PER_CM2,
        cfg.fwhm_ns * 1e-9,
    )?;
    let mut fdm = FdmConfig::imprint_defaults(
        db.get("FusedSilica")?.clone(),
        db.get("PMMA")?.clone(),
        db.get(&cfg.substrate)?.clone(),
        pulse,
        report.deposited_layer_fractions()[0],
        report.deposited_substrate_fraction(),
        cfg.ti_c,
    );
    fdm.polymer_thickness = cfg.polymer_thickness;
    fdm.dt = cfg.dt;
    fdm.min_cell = cfg.min_cell;
    Ok(fdm)
}

/// Analytical probe history over the standard window (four pulse
/// durations, 512 samples).
fn run_analytical_probe(
    ana: &AnalyticalConfig,
    probe: &Probe,
) -> Result<TemperatureSeries, CliError> {
    let x = match probe {
        Probe::Depth(x) => *x,
        Probe::PolymerCenter => {
            return Err(CliError::Validation(
                "probe `polymer-center` requires the fdm solver".to_string(),
            ))
        }
    };
    let t_p = ana.source.pulse().duration();
    let times: Vec<f64> = (1..=512).map(|k| 4.0 * t_p * k as f64 / 512.0).collect();
    let mut series = ana.history_at(x, &times)?;
    series.samples.insert(0, (0.0, ana.initial_temperature));
    Ok(series)
}

fn fdm_probe_series(
    field: &TemperatureField,
    probe: &Probe,
) -> Result<TemperatureSeries, CliError> {
    match probe {
        Probe::Depth(x) => Ok(field.probe(*x)?),
        Probe::PolymerCenter => Ok(field.polymer_center_series()?),
    }
}

// ---- subcommands ------------------------------------------------------

pub fn cmd_absorbance(args: AbsorbanceArgs) -> Result<(), CliError> {
    let file_cfg = load_config_file(args.physics.config.as_deref())?;
    let db = load_db(&args.physics, &file_cfg)?;
    let cfg = resolve(&args.physics, Some(Solver::Analytical), None, &file_cfg)?;

    let substrate = db.get(&cfg.substrate)?;
    let wavelengths = match args.wavelengths_nm {
        Some(w) if !w.is_empty() => w,
        _ => substrate.wavelengths().collect(),
    };

    // keep “zero up to rounding” from printing as -0.000000
    let clean = |v: f64| if v.abs() < 5e-13 { 0.0 } else { v };
    let mut rows = Vec::new();
    println!("wavelength_nm,reflectance,polymer_absorbance,substrate_absorbance,air_interface_transmissivity,deposited_substrate_fraction");
    for &wl in &wavelengths {
        let mut point = cfg.clone();
        point.wavelength_nm = wl;
        let report = stack_report(&db, &point)?;
        if report.substrate_absorption == 0.0 {
            eprintln!(
                "warning: substrate `{}` is transparent at {wl} nm; no energy reaches it",
                cfg.substrate
            );
        }
        let row = (
            wl,
            clean(report.reflectance),
            clean(report.layer_absorbance[0]),
            clean(report.substrate_absorption),
            report.air_interface_transmissivity,
            clean(report.deposited_substrate_fraction()),
        );
        println!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            row.0, row.1, row.2, row.3, row.4, row.5
        );
        rows.push(row);
    }

    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        let mut text = String::new();
        text.push_str("# lanheat absorbance\n");
        for (k, v) in cfg.audit_lines() {
            text.push_str(&format!("# {k} = {}\n", csv_escape_comment(&v)));
        }
        text.push_str("wavelength_nm,reflectance,polymer_absorbance,substrate_absorbance,air_interface_transmissivity,deposited_substrate_fraction\n");
        for row in &rows {
            text.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                row.0, row.1, row.2, row.3, row.4, row.5
            ));
        }
        let path = out.join("absorbance.csv");
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file_cfg = load_config_file(args.physics.config.as_deref())?;
    let db = load_db(&args.physics, &file_cfg)?;
    let cfg = resolve(&args.physics, args.solver, args.probe.as_ref(), &file_cfg)?;
    let report = stack_report(&db, &cfg)?;

    let mut all_series: Vec<(String, TemperatureSeries)> = Vec::new();

    if cfg.solver.runs_analytical() {
        let ana = analytical_config(&db, &cfg, &report)?;
        for probe in &cfg.probes {
            if *probe == Probe::PolymerCenter {
                continue; // default probe set under --solver both
            }
            let series = run_analytical_probe(&ana, probe)?;
            all_series.push((format!("analytical_{}", probe.label()), series));
        }
    }
    if cfg.solver.runs_fdm() {
        let field = fdm_config(&db, &cfg, &report)?.run()?;
        for probe in &cfg.probes {
            let series = fdm_probe_series(&field, probe)?;
            all_series.push((format!("fdm_{}", probe.label()), series));
        }
    }

    println!(
        "# absorbance: R = {:.4}, A_polymer = {:.4}, A_substrate = {:.4}, T_air = {:.4}",
        report.reflectance,
        report.layer_absorbance[0],
        report.substrate_absorption,
        report.air_interface_transmissivity
    );
    for (label, series) in &all_series {
        let (t_peak, peak) = series.peak().unwrap_or((0.0, cfg.ti_c));
        println!(
            "{label}: peak_C = {}, t_peak_ns = {}",
            format_temp(peak),
            format_ns(t_peak * 1e9)
        );
    }

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        let audit = cfg.audit_lines();
        for (label, series) in &all_series {
            let path = out.join(format!("{label}.csv"));
            output::write_series_csv(&path, "lanheat simulate", &audit, series)?;
            println!("wrote {}", path.display());
        }
        if args.svg {
            let plot_series: Vec<(String, Vec<(f64, f64)>)> = all_series
                .iter()
                .map(|(label, s)| {
                    (
                        label.clone(),
                        s.samples.iter().map(|&(t, v)| (t * 1e9, v)).collect(),
                    )
                })
                .collect();
            let svg_text = svg::line_plot(
                &format!(
                    "{} {} nm {} J/cm² {} ns",
                    cfg.substrate, cfg.wavelength_nm, cfg.fluence_j_cm2, cfg.fwhm_ns
                ),
                "t (ns)",
                "T (°C)",
                &plot_series,
            );
            let path = out.join("plot.svg");
            std::fs::write(&path, svg_text)?;
            println!("wrote {}", path.display());
        }
    } else if args.svg {
        return Err(CliError::Validation(
            "--svg needs --out to know where to write the plot".to_string(),
        ));
    }
    Ok(())
}

pub fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let file_cfg = load_config_file(args.physics.config.as_deref())?;
    let db = load_db(&args.physics, &file_cfg)?;
    let base = resolve(
        &args.physics,
        args.solver.or(Some(Solver::Analytical)),
        args.probe.as_ref(),
        &file_cfg,
    )?;

    let substrates = args
        .substrates
        .unwrap_or_else(|| vec![base.substrate.clone()]);
    let wavelengths = args
        .wavelengths_nm
        .unwrap_or_else(|| vec![base.wavelength_nm]);
    let fluences = args
        .fluences_j_cm2
        .unwrap_or_else(|| vec![base.fluence_j_cm2]);
    let fwhms = args.fwhms_ns.unwrap_or_else(|| vec![base.fwhm_ns]);
    for axis_empty in [
        substrates.is_empty(),
        wavelengths.is_empty(),
        fluences.is_empty(),
        fwhms.is_empty(),
    ] {
        if axis_empty {
            return Err(CliError::Validation("sweep axes must be non-empty".into()));
        }
    }

    let probes = if args.probe.is_none() && file_cfg.probes.is_none() {
        vec![Probe::Depth(0.0)]
    } else {
        base.probes.clone()
    };

    let total = substrates.len() * wavelengths.len() * fluences.len() * fwhms.len();
    if total > args.cap {
        return Err(CliError::Validation(format!(
            "sweep would evaluate {total} points, above the cap of {} (raise --cap if intended)",
            args.cap
        )));
    }

    // Lexicographic point order over (substrate, wavelength, fluence, fwhm).
    let mut points = Vec::with_capacity(total);
    for s in &substrates {
        for &w in &wavelengths {
            for &f in &fluences {
                for &d in &fwhms {
                    let mut cfg = base.clone();
                    cfg.substrate = s.clone();
                    cfg.wavelength_nm = w;
                    cfg.fluence_j_cm2 = f;
                    cfg.fwhm_ns = d;
                    cfg.probes = probes.clone();
                    points.push(cfg);
                }
            }
        }
    }

    // Points run in parallel; rows are gathered back in point order so the
    // output is independent of scheduling.
    let results: Vec<Result<Vec<String>, CliError>> = points
        .par_iter()
        .map(|cfg| sweep_point_rows(&db, cfg))
        .collect();

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }

    let header =
        "substrate,wavelength_nm,fluence_j_cm2,fwhm_ns,solver,probe,metric,value";
    println!("{header}");
    for row in &rows {
        println!("{row}");
    }

    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        let mut text = String::from("# lanheat sweep\n");
        for (k, v) in base.audit_lines() {
            if k == "probes" {
                let labels: Vec<String> = probes.iter().map(|p| p.label()).collect();
                text.push_str(&format!("# probes = {}\n", labels.join(" ")));
            } else {
                text.push_str(&format!("# {k} = {}\n", csv_escape_comment(&v)));
            }
        }
        text.push_str(header);
        text.push('\n');
        for row in &rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = out.join("sweep.csv");
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn sweep_point_rows(db: &MaterialDb, cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let report = stack_report(db, cfg)?;
    let mut rows = Vec::new();
    let mut push = |solver: &str, probe: &Probe, series: &TemperatureSeries| {
        let (t_peak, peak) = series.peak().unwrap_or((0.0, cfg.ti_c));
        let prefix = format!(
            "{},{},{},{},{solver},{}",
            cfg.substrate,
            cfg.wavelength_nm,
            cfg.fluence_j_cm2,
            cfg.fwhm_ns,
            probe.label()
        );
        rows.push(format!("{prefix},peak_C,{}", format_temp(peak)));
        rows.push(format!("{prefix},t_peak_ns,{}", format_ns(t_peak * 1e9)));
    };

    if cfg.solver.runs_analytical() {
        let ana = analytical_config(db, cfg, &report)?;
        for probe in &cfg.probes {
            if *probe == Probe::PolymerCenter && cfg.solver == Solver::Both {
                continue;
            }
            let series = run_analytical_probe(&ana, probe)?;
            push("analytical", probe, &series);
        }
    }
    if cfg.solver.runs_fdm() {
        let field = fdm_config(db, cfg, &report)?.run()?;
        for probe in &cfg.probes {
            let series = fdm_probe_series(&field, probe)?;
            push("fdm", probe, &series);
        }
    }
    Ok(rows)
}

pub fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let file_cfg = load_config_file(args.physics.config.as_deref())?;
    let db = load_db(&args.physics, &file_cfg)?;
    let mut cfg = resolve(&args.physics, Some(Solver::Both), None, &file_cfg)?;
    cfg.probes = vec![Probe::Depth(0.0)];
    if args.threshold_pct <= 0.0 {
        return Err(CliError::Validation(format!(
            "threshold must be positive, got {}%",
            args.threshold_pct
        )));
    }
    let report = stack_report(&db, &cfg)?;

    let field = fdm_config(&db, &cfg, &report)?.run()?;
    let fdm_series = field.surface_series()?;

    let ana = analytical_config(&db, &cfg, &report)?;
    let times: Vec<f64> = fdm_series
        .samples
        .iter()
        .map(|s| s.0)
        .filter(|&t| t > 0.0)
        .collect();
    let mut ana_series = ana.surface_history(&times)?;
    ana_series.samples.insert(0, (0.0, cfg.ti_c));

    let (fdm_t_peak, fdm_peak) = fdm_series.peak().unwrap();
    let (ana_t_peak, ana_peak) = ana_series.peak().unwrap();
    let rise = (fdm_peak - cfg.ti_c).max(ana_peak - cfg.ti_c);
    let (peak_diff_pct, rms) = if rise > 0.0 {
        let peak_diff_pct = (fdm_peak - ana_peak).abs() / rise * 100.0;
        let mut sum_sq = 0.0;
        for (f, a) in fdm_series.samples.iter().zip(&ana_series.samples) {
            sum_sq += (f.1 - a.1) * (f.1 - a.1);
        }
        (
            peak_diff_pct,
            (sum_sq / fdm_series.samples.len() as f64).sqrt(),
        )
    } else {
        (0.0, 0.0)
    };
    let t_peak_diff_ns = (fdm_t_peak - ana_t_peak).abs() * 1e9;

    println!(
        "analytical peak: {} °C at {} ns",
        format_temp(ana_peak),
        format_ns(ana_t_peak * 1e9)
    );
    println!(
        "fdm peak:        {} °C at {} ns",
        format_temp(fdm_peak),
        format_ns(fdm_t_peak * 1e9)
    );
    println!("peak difference: {peak_diff_pct:.4}% of rise (threshold {}%)", args.threshold_pct);
    println!("rms difference:  {rms:.4} °C over the window");
    println!("time-of-peak difference: {t_peak_diff_ns:.4} ns");

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        let mut text = String::from("# lanheat compare\n");
        for (k, v) in cfg.audit_lines() {
            text.push_str(&format!("# {k} = {}\n", csv_escape_comment(&v)));
        }
        text.push_str(&format!("# peak_diff_pct = {peak_diff_pct:.6}\n"));
        text.push_str(&format!("# rms_diff_C = {rms:.6}\n"));
        text.push_str(&format!("# t_peak_diff_ns = {t_peak_diff_ns:.6}\n"));
        text.push_str("t_ns,T_analytical_C,T_fdm_C\n");
        for (f, a) in fdm_series.samples.iter().zip(&ana_series.samples) {
            text.push_str(&format!(
                "{},{},{}\n",
                format_ns(f.0 * 1e9),
                format_temp(a.1),
                format_temp(f.1)
            ));
        }
        let path = out.join("compare.csv");
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
    }

    if peak_diff_pct >= args.threshold_pct {
        return Err(CliError::ThresholdExceeded {
            diff_pct: peak_diff_pct,
            threshold_pct: args.threshold_pct,
        });
    }
    Ok(())
}

pub fn cmd_materials_list(materials_file: Option<PathBuf>) -> Result<(), CliError> {
    let mut db = MaterialDb::builtin();
    if let Some(p) = materials_file {
        let text = std::fs::read_to_string(&p)?;
        db.extend_from_str(&text)?;
    }
    for m in db.iter() {
        println!(
            "{}: density = {} kg/m³, heat_capacity = {} J/(kg·K), thermal_conductivity = {} W/(m·K), α = {:.4e} m²/s",
            m.name,
            m.density,
            m.heat_capacity,
            m.thermal_conductivity,
            m.thermal_diffusivity()
        );
        let wavelengths: Vec<u32> = m.wavelengths().collect();
        for wl in wavelengths {
            let idx = m.refractive_index(wl).expect("listed wavelength");
            println!(
                "  {wl} nm: n = {}, kappa = {}, beta = {:.4e} 1/m",
                idx.n,
                idx.kappa,
                idx.absorption_coefficient(wl)
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_parsing() {
        assert_eq!("polymer-center".parse::<Probe>(), Ok(Probe::PolymerCenter));
        assert_eq!("0".parse::<Probe>(), Ok(Probe::Depth(0.0)));
        match "5".parse::<Probe>() {
            Ok(Probe::Depth(x)) => assert!((x - 5e-6).abs() < 1e-18),
            other => panic!("expected 5 μm depth, got {other:?}"),
        }
        assert!("-1".parse::<Probe>().is_err());
        assert!("mid".parse::<Probe>().is_err());
    }

    #[test]
    fn probe_labels() {
        assert_eq!(Probe::Depth(0.0).label(), "surface");
        assert_eq!(Probe::Depth(5e-6).label(), "depth_5um");
        assert_eq!(Probe::Depth(2.5e-6).label(), "depth_2p5um");
        assert_eq!(Probe::PolymerCenter.label(), "polymer-center");
    }

    #[test]
    fn analytical_rejects_explicit_polymer_probe() {
        let err = validate_probes(
            vec![Probe::PolymerCenter],
            true,
            Solver::Analytical,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        // but the default set silently drops it
        let kept = validate_probes(
            vec![Probe::Depth(0.0), Probe::PolymerCenter],
            false,
            Solver::Analytical,
        )
        .unwrap();
        assert_eq!(kept, vec![Probe::Depth(0.0)]);
    }
}
