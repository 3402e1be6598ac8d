//! Thermo-optical material properties.
//!
//! Each [`Material`] carries bulk thermal constants plus a complex
//! refractive index per laser wavelength. Wavelengths are keyed by integer
//! nanometer and lookups require an exact match: the excimer lines in use
//! are discrete (193, 248, 308 nm) and interpolating between them is not
//! meaningful. All values are SI.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("failed to parse material file: {0}")]
    Parse(String),
    #[error("material `{material}`: missing required field `{field}`")]
    MissingField { material: String, field: String },
    #[error("material `{material}`: invalid `{field}`: {reason}")]
    InvalidProperty {
        material: String,
        field: String,
        reason: String,
    },
    #[error("material `{0}` not found in database")]
    NotFound(String),
    #[error(
        "material `{material}` has no optical data at {wavelength_nm} nm (available: {available:?})"
    )]
    MissingWavelength {
        material: String,
        wavelength_nm: u32,
        available: Vec<u32>,
    },
    #[error("failed to read material file: {0}")]
    Io(#[from] std::io::Error),
}

/// Complex refractive index n + iκ at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexIndex {
    pub n: f64,
    pub kappa: f64,
}

impl ComplexIndex {
    pub fn new(n: f64, kappa: f64) -> Self {
        Self { n, kappa }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.n, self.kappa)
    }

    /// Beer–Lambert absorption coefficient 4πκ/λ in 1/m.
    pub fn absorption_coefficient(self, wavelength_nm: u32) -> f64 {
        4.0 * std::f64::consts::PI * self.kappa / (wavelength_nm as f64 * 1e-9)
    }
}

/// Bulk thermal constants and tabulated optical data for one material.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub heat_capacity: f64,
    /// W/(m·K)
    pub thermal_conductivity: f64,
    optical: BTreeMap<u32, ComplexIndex>,
    /// Data-sheet absorption coefficients in 1/nm, kept for cross-checking
    /// the tabulated κ values.
    reference_absorption: BTreeMap<u32, f64>,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        density: f64,
        heat_capacity: f64,
        thermal_conductivity: f64,
        optical: BTreeMap<u32, ComplexIndex>,
        reference_absorption: BTreeMap<u32, f64>,
    ) -> Result<Self, MaterialError> {
        let name = name.into();
        let positive = |field: &str, v: f64| -> Result<(), MaterialError> {
            if !v.is_finite() || v <= 0.0 {
                return Err(MaterialError::InvalidProperty {
                    material: name.clone(),
                    field: field.to_string(),
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
            Ok(())
        };
        positive("density", density)?;
        positive("heat_capacity", heat_capacity)?;
        if !thermal_conductivity.is_finite() || thermal_conductivity < 0.0 {
            return Err(MaterialError::InvalidProperty {
                material: name,
                field: "thermal_conductivity".to_string(),
                reason: format!("must be non-negative and finite, got {thermal_conductivity}"),
            });
        }
        for (&wl, idx) in &optical {
            if !idx.n.is_finite() || !idx.kappa.is_finite() || idx.kappa < 0.0 {
                return Err(MaterialError::InvalidProperty {
                    material: name,
                    field: format!("refractive_index.{wl}"),
                    reason: format!("κ must be non-negative, got [{}, {}]", idx.n, idx.kappa),
                });
            }
        }
        // A stored data-sheet β must agree with 4πκ/λ to 1% or the table
        // is internally inconsistent.
        for (&wl, &beta_per_nm) in &reference_absorption {
            let idx = optical.get(&wl).ok_or_else(|| MaterialError::InvalidProperty {
                material: name.clone(),
                field: format!("absorption_coefficient.{wl}"),
                reason: "no matching refractive_index entry".to_string(),
            })?;
            let derived = idx.absorption_coefficient(wl) * 1e-9; // back to 1/nm
            if beta_per_nm > 0.0 && ((derived - beta_per_nm) / beta_per_nm).abs() > 0.01 {
                return Err(MaterialError::InvalidProperty {
                    material: name.clone(),
                    field: format!("absorption_coefficient.{wl}"),
                    reason: format!(
                        "4πκ/λ = {derived:.5} 1/nm disagrees with stored {beta_per_nm:.5} 1/nm by more than 1%"
                    ),
                });
            }
        }
        Ok(Self {
            name,
            density,
            heat_capacity,
            thermal_conductivity,
            optical,
            reference_absorption,
        })
    }

    /// k/(ρC) in m²/s.
    pub fn thermal_diffusivity(&self) -> f64 {
        self.thermal_conductivity / (self.density * self.heat_capacity)
    }

    /// Volumetric heat capacity ρC in J/(m³·K).
    pub fn volumetric_heat_capacity(&self) -> f64 {
        self.density * self.heat_capacity
    }

    pub fn refractive_index(&self, wavelength_nm: u32) -> Result<ComplexIndex, MaterialError> {
        self.optical.get(&wavelength_nm).copied().ok_or_else(|| {
            MaterialError::MissingWavelength {
                material: self.name.clone(),
                wavelength_nm,
                available: self.optical.keys().copied().collect(),
            }
        })
    }

    /// 4πκ/λ in 1/m at an exact tabulated wavelength.
    pub fn absorption_coefficient(&self, wavelength_nm: u32) -> Result<f64, MaterialError> {
        Ok(self
            .refractive_index(wavelength_nm)?
            .absorption_coefficient(wavelength_nm))
    }

    pub fn wavelengths(&self) -> impl Iterator<Item = u32> + '_ {
        self.optical.keys().copied()
    }
}

/// Immutable collection of materials keyed by name.
///
/// Built once (built-ins plus optional user file) and shared read-only by
/// any number of concurrent solver runs.
#[derive(Debug, Clone)]
pub struct MaterialDb {
    materials: BTreeMap<String, Material>,
}

struct BuiltinSpec {
    name: &'static str,
    density: f64,
    heat_capacity: f64,
    thermal_conductivity: f64,
    // (wavelength nm, n, κ, data-sheet β in 1/nm if tabulated)
    optical: &'static [(u32, f64, f64, Option<f64>)],
}

const BUILTINS: &[BuiltinSpec] = &[
    BuiltinSpec {
        name: "Copper",
        density: 8940.0,
        heat_capacity: 384.9,
        thermal_conductivity: 352.0,
        optical: &[
            (193, 0.972, 1.403, Some(0.0914)),
            (248, 1.470, 1.780, Some(0.0902)),
            (308, 1.350, 1.710, Some(0.0698)),
        ],
    },
    BuiltinSpec {
        name: "FusedSilica",
        density: 2201.0,
        heat_capacity: 787.52,
        thermal_conductivity: 1.30,
        optical: &[
            (193, 1.560841, 0.0, Some(0.0)),
            (248, 1.508601, 0.0, Some(0.0)),
            (308, 1.485663, 0.0, Some(0.0)),
        ],
    },
    BuiltinSpec {
        name: "PMMA",
        density: 1170.0,
        heat_capacity: 1380.0,
        thermal_conductivity: 0.16,
        optical: &[
            (193, 1.492, 0.0, None),
            (248, 1.492, 0.0, None),
            (308, 1.492, 0.0, None),
        ],
    },
    BuiltinSpec {
        name: "Si",
        density: 2300.0,
        heat_capacity: 707.71,
        thermal_conductivity: 160.0,
        optical: &[
            (193, 0.872, 2.757, Some(0.1795)),
            (248, 1.570, 3.565, Some(0.1806)),
            (308, 5.013, 3.689, Some(0.1505)),
        ],
    },
];

#[derive(Deserialize)]
struct MaterialEntry {
    density: Option<f64>,
    heat_capacity: Option<f64>,
    thermal_conductivity: Option<f64>,
    refractive_index: Option<BTreeMap<String, [f64; 2]>>,
    absorption_coefficient: Option<BTreeMap<String, f64>>,
}

impl MaterialDb {
    /// Database containing only the built-in materials.
    pub fn builtin() -> Self {
        let mut materials = BTreeMap::new();
        for spec in BUILTINS {
            let optical = spec
                .optical
                .iter()
                .map(|&(wl, n, kappa, _)| (wl, ComplexIndex::new(n, kappa)))
                .collect();
            let reference = spec
                .optical
                .iter()
                .filter_map(|&(wl, _, _, beta)| beta.map(|b| (wl, b)))
                .collect();
            let material = Material::new(
                spec.name,
                spec.density,
                spec.heat_capacity,
                spec.thermal_conductivity,
                optical,
                reference,
            )
            .expect("built-in material table is valid");
            materials.insert(spec.name.to_string(), material);
        }
        Self { materials }
    }

    /// Built-ins plus entries parsed from `text`; user entries override
    /// built-ins of the same name.
    pub fn load_str(text: &str) -> Result<Self, MaterialError> {
        let mut db = Self::builtin();
        db.extend_from_str(text)?;
        Ok(db)
    }

    pub fn load_file(path: impl AsRef<Path>) -> Result<Self, MaterialError> {
        let text = std::fs::read_to_string(path)?;
        Self::load_str(&text)
    }

    pub fn extend_from_str(&mut self, text: &str) -> Result<(), MaterialError> {
        let parsed: BTreeMap<String, MaterialEntry> =
            toml::from_str(text).map_err(|e| MaterialError::Parse(e.to_string()))?;
        for (name, entry) in parsed {
            let material = material_from_entry(&name, entry)?;
            self.materials.insert(name, material);
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Material, MaterialError> {
        self.materials
            .get(name)
            .ok_or_else(|| MaterialError::NotFound(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.materials.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Material> {
        self.materials.values()
    }

    /// Canonical text form: materials sorted by name, fields in fixed
    /// order, wavelengths ascending. Parsing the output and re-serializing
    /// reproduces it byte for byte.
    pub fn canonical_string(&self) -> String {
        let mut out = String::new();
        for (i, (name, m)) in self.materials.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{name}]");
            let _ = writeln!(out, "density = {}", fmt_float(m.density));
            let _ = writeln!(out, "heat_capacity = {}", fmt_float(m.heat_capacity));
            let _ = writeln!(
                out,
                "thermal_conductivity = {}",
                fmt_float(m.thermal_conductivity)
            );
            for (wl, idx) in &m.optical {
                let _ = writeln!(
                    out,
                    "refractive_index.{wl} = [{}, {}]",
                    fmt_float(idx.n),
                    fmt_float(idx.kappa)
                );
            }
            for (wl, beta) in &m.reference_absorption {
                let _ = writeln!(out, "absorption_coefficient.{wl} = {}", fmt_float(*beta));
            }
        }
        out
    }
}

/// Float formatting that always produces TOML float syntax and parses back
/// to the identical f64.
fn fmt_float(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

fn material_from_entry(name: &str, entry: MaterialEntry) -> Result<Material, MaterialError> {
    let require = |field: &str, v: Option<f64>| {
        v.ok_or_else(|| MaterialError::MissingField {
            material: name.to_string(),
            field: field.to_string(),
        })
    };
    let density = require("density", entry.density)?;
    let heat_capacity = require("heat_capacity", entry.heat_capacity)?;
    let thermal_conductivity = require("thermal_conductivity", entry.thermal_conductivity)?;

    let raw_optical = entry
        .refractive_index
        .ok_or_else(|| MaterialError::MissingField {
            material: name.to_string(),
            field: "refractive_index".to_string(),
        })?;
    if raw_optical.is_empty() {
        return Err(MaterialError::MissingField {
            material: name.to_string(),
            field: "refractive_index.<wavelength_nm>".to_string(),
        });
    }

    let parse_wl = |key: &str, field: &str| -> Result<u32, MaterialError> {
        key.parse::<u32>().map_err(|_| MaterialError::InvalidProperty {
            material: name.to_string(),
            field: format!("{field}.{key}"),
            reason: "wavelength key must be an integer nanometer value".to_string(),
        })
    };

    let mut optical = BTreeMap::new();
    for (key, [n, kappa]) in raw_optical {
        optical.insert(parse_wl(&key, "refractive_index")?, ComplexIndex::new(n, kappa));
    }
    let mut reference = BTreeMap::new();
    for (key, beta) in entry.absorption_coefficient.unwrap_or_default() {
        reference.insert(parse_wl(&key, "absorption_coefficient")?, beta);
    }

    Material::new(
        name,
        density,
        heat_capacity,
        thermal_conductivity,
        optical,
        reference,
    )
}
