//! Fully implicit control-volume conduction over the mold / resist /
//! substrate stack.
//!
//! One backward-Euler step balances, per cell,
//!   ρCΔx (Tⁿ⁺¹ − Tⁿ)/Δt = flux divergence(Tⁿ⁺¹) + S Δx,
//! with harmonic-mean face conductances (the correct series resistance
//! across material interfaces) and the far ends of mold and substrate held
//! at the initial temperature. The update is solved in increment form, so
//! a source-free uniform state reproduces itself exactly, and the
//! tridiagonal system goes to the Thomas algorithm.
//!
//! Coordinates: x = 0 at the polymer/substrate interface, positive into
//! the substrate; mold and polymer occupy x < 0.

use thiserror::Error;

use crate::analytical::TemperatureSeries;
use crate::materials::{Material, MaterialError};
use crate::source::LaserPulse;

#[derive(Debug, Error)]
pub enum FdmError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("probe at x = {x:e} m lies outside the domain [{min:e}, {max:e}] m")]
    ProbeOutOfDomain { x: f64, min: f64, max: f64 },
    #[error("tridiagonal solve hit a non-finite pivot at row {0}")]
    SingularSystem(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Mold,
    Polymer,
    Substrate,
}

/// Simulation setup. All lengths in meters, times in seconds,
/// temperatures in °C.
#[derive(Debug, Clone)]
pub struct FdmConfig {
    pub mold: Material,
    pub polymer: Material,
    pub substrate: Material,
    pub mold_thickness: f64,
    pub polymer_thickness: f64,
    pub substrate_thickness: f64,
    pub pulse: LaserPulse,
    /// Beam fraction deposited uniformly over the polymer (entry
    /// transmissivity already applied). Zero for a transparent resist.
    pub polymer_absorbed_fraction: f64,
    /// Beam fraction deposited Beer–Lambert style in the substrate.
    pub substrate_absorbed_fraction: f64,
    pub initial_temperature: f64,
    pub dt: f64,
    pub end_time: f64,
    pub output_interval: f64,
    /// Uniform cell size in the polymer and in the fine bands flanking it.
    pub min_cell: f64,
    /// Extent of the uniformly fine region on each side of the polymer.
    pub fine_band: f64,
    /// Geometric growth factor toward the outer boundaries.
    pub stretch_ratio: f64,
}

impl FdmConfig {
    /// The standard imprint geometry: 200 μm mold and substrate around a
    /// 200 nm resist, 5 nm cells through the resist and the first 2 μm of
    /// its neighbors, 0.1 ns steps, snapshots every 0.5 ns, run to 4
    /// pulse windows.
    pub fn imprint_defaults(
        mold: Material,
        polymer: Material,
        substrate: Material,
        pulse: LaserPulse,
        polymer_absorbed_fraction: f64,
        substrate_absorbed_fraction: f64,
        initial_temperature: f64,
    ) -> Self {
        let end_time = 4.0 * pulse.duration();
        Self {
            mold,
            polymer,
            substrate,
            mold_thickness: 200e-6,
            polymer_thickness: 200e-9,
            substrate_thickness: 200e-6,
            pulse,
            polymer_absorbed_fraction,
            substrate_absorbed_fraction,
            initial_temperature,
            dt: 0.1e-9,
            end_time,
            output_interval: 0.5e-9,
            min_cell: 5e-9,
            fine_band: 2e-6,
            stretch_ratio: 1.2,
        }
    }

    fn validate(&self) -> Result<(), FdmError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(FdmError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("mold_thickness", self.mold_thickness)?;
        positive("polymer_thickness", self.polymer_thickness)?;
        positive("substrate_thickness", self.substrate_thickness)?;
        positive("dt", self.dt)?;
        positive("output_interval", self.output_interval)?;
        positive("min_cell", self.min_cell)?;
        positive("fine_band", self.fine_band)?;
        if !(self.stretch_ratio > 1.0 && self.stretch_ratio <= 2.0) {
            return Err(FdmError::InvalidConfig(format!(
                "stretch_ratio must be in (1, 2], got {}",
                self.stretch_ratio
            )));
        }
        if self.end_time < self.pulse.duration() {
            return Err(FdmError::InvalidConfig(format!(
                "end_time {:e} must cover the pulse window {:e}",
                self.end_time,
                self.pulse.duration()
            )));
        }
        for (name, f) in [
            ("polymer_absorbed_fraction", self.polymer_absorbed_fraction),
            ("substrate_absorbed_fraction", self.substrate_absorbed_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return Err(FdmError::InvalidConfig(format!(
                    "{name} must be within [0, 1], got {f}"
                )));
            }
        }
        Ok(())
    }

    pub fn run(&self) -> Result<TemperatureField, FdmError> {
        self.validate()?;
        let grid = build_grid(self)?;
        let steps_per_output = (self.output_interval / self.dt).round().max(1.0) as usize;
        let total_steps = (self.end_time / self.dt).ceil() as usize;

        let mut state = FdmState {
            time: 0.0,
            temperatures: vec![self.initial_temperature; grid.cell_count()],
        };
        let mut times = vec![0.0];
        let mut snapshots = vec![state.temperatures.clone()];

        for n in 1..=total_steps {
            state = step(&state, self, &grid)?;
            if n % steps_per_output == 0 || n == total_steps {
                times.push(state.time);
                snapshots.push(state.temperatures.clone());
            }
        }

        Ok(TemperatureField {
            grid,
            times,
            snapshots,
            initial_temperature: self.initial_temperature,
        })
    }
}

/// Nonuniform cell layout with per-cell material properties resolved.
#[derive(Debug, Clone)]
pub struct Grid1D {
    centers: Vec<f64>,
    widths: Vec<f64>,
    edges: Vec<f64>,
    regions: Vec<Region>,
    volumetric_heat: Vec<f64>,
    conductivity: Vec<f64>,
    polymer_thickness: f64,
}

impl Grid1D {
    pub fn cell_count(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.edges[0], *self.edges.last().unwrap())
    }

    /// Midpoint of the resist layer, the standard probe for imprint
    /// feasibility.
    pub fn polymer_center(&self) -> f64 {
        -0.5 * self.polymer_thickness
    }

    pub fn cell_containing(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return None;
        }
        match self.edges.binary_search_by(|e| e.total_cmp(&x)) {
            Ok(i) => Some(i.min(self.cell_count() - 1)),
            Err(i) => Some(i - 1),
        }
    }

    pub fn enthalpy_rise(&self, temperatures: &[f64], reference: f64) -> f64 {
        temperatures
            .iter()
            .zip(&self.volumetric_heat)
            .zip(&self.widths)
            .map(|((&t, &rc), &w)| rc * w * (t - reference))
            .sum()
    }
}

/// Geometric widths from `start_width` growing by `ratio` until they cover
/// `length`, then scaled so they tile it exactly. Returned widths keep the
/// exact ratio internally and at most one ratio step at the junction.
fn stretched_widths(start_width: f64, ratio: f64, length: f64) -> Vec<f64> {
    if length <= 0.0 {
        return Vec::new();
    }
    let mut widths = Vec::new();
    let mut w = start_width * ratio;
    let mut sum = 0.0;
    while sum < length {
        widths.push(w);
        sum += w;
        w *= ratio;
    }
    let scale = length / sum;
    for w in &mut widths {
        *w *= scale;
    }
    widths
}

/// Uniform cells of at most `target` width tiling `length` exactly.
fn uniform_widths(target: f64, length: f64) -> Vec<f64> {
    let n = (length / target).round().max(1.0) as usize;
    vec![length / n as f64; n]
}

pub fn build_grid(cfg: &FdmConfig) -> Result<Grid1D, FdmError> {
    cfg.validate()?;

    // Mold: stretched cells toward the outer boundary, fine band against
    // the polymer.
    let mold_fine = cfg.fine_band.min(cfg.mold_thickness);
    let mut mold_widths = stretched_widths(
        cfg.min_cell,
        cfg.stretch_ratio,
        cfg.mold_thickness - mold_fine,
    );
    mold_widths.reverse();
    mold_widths.extend(uniform_widths(cfg.min_cell, mold_fine));

    let polymer_widths = uniform_widths(cfg.min_cell, cfg.polymer_thickness);

    let substrate_fine = cfg.fine_band.min(cfg.substrate_thickness);
    let mut substrate_widths = uniform_widths(cfg.min_cell, substrate_fine);
    substrate_widths.extend(stretched_widths(
        cfg.min_cell,
        cfg.stretch_ratio,
        cfg.substrate_thickness - substrate_fine,
    ));

    let n = mold_widths.len() + polymer_widths.len() + substrate_widths.len();
    let mut centers = Vec::with_capacity(n);
    let mut widths = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n + 1);
    let mut regions = Vec::with_capacity(n);
    let mut volumetric_heat = Vec::with_capacity(n);
    let mut conductivity = Vec::with_capacity(n);

    // Each layer restarts from its exact boundary so material changes land
    // precisely on layer interfaces.
    let layer_specs = [
        (
            Region::Mold,
            -(cfg.mold_thickness + cfg.polymer_thickness),
            &mold_widths,
            &cfg.mold,
        ),
        (
            Region::Polymer,
            -cfg.polymer_thickness,
            &polymer_widths,
            &cfg.polymer,
        ),
        (Region::Substrate, 0.0, &substrate_widths, &cfg.substrate),
    ];
    for (region, start, layer_widths, material) in layer_specs {
        let mut pos = start;
        for &w in layer_widths.iter() {
            edges.push(pos);
            centers.push(pos + 0.5 * w);
            widths.push(w);
            regions.push(region);
            volumetric_heat.push(material.volumetric_heat_capacity());
            conductivity.push(material.thermal_conductivity);
            pos += w;
        }
    }
    edges.push(cfg.substrate_thickness);

    Ok(Grid1D {
        centers,
        widths,
        edges,
        regions,
        volumetric_heat,
        conductivity,
        polymer_thickness: cfg.polymer_thickness,
    })
}

/// Temperatures at one instant.
#[derive(Debug, Clone)]
pub struct FdmState {
    pub time: f64,
    pub temperatures: Vec<f64>,
}

/// Integrated source power per unit area (W/m²) delivered to each cell at
/// time t. Substrate cells get the exact per-cell integral of βe^(−βx),
/// so the discrete deposition matches the beam energy to the time
/// quadrature alone.
fn cell_sources(cfg: &FdmConfig, grid: &Grid1D, beta: f64, t: f64) -> Vec<f64> {
    let intensity = cfg.pulse.intensity(t);
    let n = grid.cell_count();
    let mut q = vec![0.0; n];
    if intensity == 0.0 {
        return q;
    }
    for (i, (region, qi)) in grid.regions.iter().zip(&mut q).enumerate() {
        match region {
            Region::Mold => {}
            Region::Polymer => {
                *qi = cfg.polymer_absorbed_fraction
                    * intensity
                    * (grid.widths[i] / cfg.polymer_thickness);
            }
            Region::Substrate => {
                if cfg.substrate_absorbed_fraction > 0.0 {
                    let left = grid.edges[i];
                    let right = grid.edges[i + 1];
                    *qi = cfg.substrate_absorbed_fraction
                        * intensity
                        * ((-beta * left).exp() - (-beta * right).exp());
                }
            }
        }
    }
    q
}

/// One backward-Euler step. Pure: returns the advanced state.
pub fn step(state: &FdmState, cfg: &FdmConfig, grid: &Grid1D) -> Result<FdmState, FdmError> {
    let n = grid.cell_count();
    debug_assert_eq!(state.temperatures.len(), n);
    let t_next = state.time + cfg.dt;
    let beta = if cfg.substrate_absorbed_fraction > 0.0 {
        let b = cfg.substrate.absorption_coefficient(cfg.pulse.wavelength_nm())?;
        if b <= 0.0 {
            return Err(FdmError::InvalidConfig(format!(
                "substrate `{}` is transparent at {} nm but has a nonzero absorbed fraction",
                cfg.substrate.name,
                cfg.pulse.wavelength_nm()
            )));
        }
        b
    } else {
        0.0
    };
    let q = cell_sources(cfg, grid, beta, t_next);
    let temps = &state.temperatures;

    // Face conductances: interior harmonic means plus the two boundary
    // half-cells against the fixed far-field walls.
    let mut face = vec![0.0; n + 1];
    face[0] = 2.0 * grid.conductivity[0] / grid.widths[0];
    face[n] = 2.0 * grid.conductivity[n - 1] / grid.widths[n - 1];
    for i in 0..n - 1 {
        let ra = grid.widths[i] / (2.0 * grid.conductivity[i]);
        let rb = grid.widths[i + 1] / (2.0 * grid.conductivity[i + 1]);
        face[i + 1] = 1.0 / (ra + rb);
    }

    // Increment form: A·ΔT = explicit flux + source, so an equilibrium
    // state yields an exactly zero right-hand side.
    let wall = cfg.initial_temperature;
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let mass = grid.volumetric_heat[i] * grid.widths[i] / cfg.dt;
        let west = face[i];
        let east = face[i + 1];
        diag[i] = mass + west + east;
        let t_west = if i == 0 { wall } else { temps[i - 1] };
        let t_east = if i == n - 1 { wall } else { temps[i + 1] };
        rhs[i] = west * (t_west - temps[i]) + east * (t_east - temps[i]) + q[i];
        if i > 0 {
            sub[i] = -west;
        }
        if i < n - 1 {
            sup[i] = -east;
        }
    }

    let delta = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    let temperatures = temps
        .iter()
        .zip(&delta)
        .map(|(&t, &d)| t + d)
        .collect();
    Ok(FdmState {
        time: t_next,
        temperatures,
    })
}

/// Thomas algorithm for a tridiagonal system; `sub[0]` and `sup[n-1]` are
/// ignored.
fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>, FdmError> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if !pivot.is_finite() || pivot == 0.0 {
        return Err(FdmError::SingularSystem(0));
    }
    c[0] = sup[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * c[i - 1];
        if !pivot.is_finite() || pivot == 0.0 {
            return Err(FdmError::SingularSystem(i));
        }
        if i < n - 1 {
            c[i] = sup[i] / pivot;
        }
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Space-time temperature record of a run.
#[derive(Debug, Clone)]
pub struct TemperatureField {
    grid: Grid1D,
    times: Vec<f64>,
    snapshots: Vec<Vec<f64>>,
    initial_temperature: f64,
}

impl TemperatureField {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Vec<f64>] {
        &self.snapshots
    }

    pub fn initial_temperature(&self) -> f64 {
        self.initial_temperature
    }

    /// History of the cell containing `x` (nearest cell center, no
    /// interpolation).
    pub fn probe(&self, x: f64) -> Result<TemperatureSeries, FdmError> {
        let cell = self.grid.cell_containing(x).ok_or_else(|| {
            let (min, max) = self.grid.domain();
            FdmError::ProbeOutOfDomain { x, min, max }
        })?;
        let samples = self
            .times
            .iter()
            .zip(&self.snapshots)
            .map(|(&t, snap)| (t, snap[cell]))
            .collect();
        Ok(TemperatureSeries {
            position: self.grid.centers[cell],
            samples,
        })
    }

    /// Substrate-surface history.
    pub fn surface_series(&self) -> Result<TemperatureSeries, FdmError> {
        self.probe(0.0)
    }

    /// Resist mid-layer history.
    pub fn polymer_center_series(&self) -> Result<TemperatureSeries, FdmError> {
        self.probe(self.grid.polymer_center())
    }

    pub fn enthalpy_rise_at(&self, snapshot: usize) -> f64 {
        self.grid
            .enthalpy_rise(&self.snapshots[snapshot], self.initial_temperature)
    }
}
