//! Field amplitudes and energy absorbances in a planar layer stack at
//! normal incidence.
//!
//! The stack is a sequence of layers bounded by two semi-infinite media.
//! Forward/backward complex amplitudes are propagated with the 2×2
//! characteristic-matrix recursion, seeded in the exit medium (unit
//! transmitted wave, no returning wave) and swept back to the incidence
//! medium — the numerically stable direction for absorbing layers — then
//! rescaled to unit incident amplitude.
//!
//! Sign convention: indices are n + iκ with κ ≥ 0 and the forward wave
//! carries exp(+iδ) across a layer, so |exp(iδ)| = exp(-Im δ) < 1 in an
//! absorber. Per-layer absorbances are net energy-flux differences across
//! each layer, which makes R + T + ΣA = 1 an identity rather than an
//! approximation.

use num_complex::Complex64;
use thiserror::Error;

use crate::materials::{ComplexIndex, Material, MaterialError};

#[derive(Debug, Error)]
pub enum OpticsError {
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("degenerate interface: refractive indices sum to zero")]
    DegenerateInterface,
    #[error("invalid stack: {0}")]
    BadStack(String),
}

/// One layer of a stack. `thickness` is in meters; `None` marks the
/// semi-infinite media at either end.
#[derive(Debug, Clone)]
pub struct OpticalLayer {
    pub material: Material,
    pub thickness: Option<f64>,
}

impl OpticalLayer {
    pub fn semi_infinite(material: &Material) -> Self {
        Self {
            material: material.clone(),
            thickness: None,
        }
    }

    pub fn film(material: &Material, thickness: f64) -> Self {
        Self {
            material: material.clone(),
            thickness: Some(thickness),
        }
    }
}

/// Ordered layers, first and last semi-infinite.
#[derive(Debug, Clone)]
pub struct LayerStack {
    layers: Vec<OpticalLayer>,
}

impl LayerStack {
    pub fn new(layers: Vec<OpticalLayer>) -> Result<Self, OpticsError> {
        if layers.len() < 2 {
            return Err(OpticsError::BadStack(
                "a stack needs at least incidence and exit media".to_string(),
            ));
        }
        if layers.first().unwrap().thickness.is_some()
            || layers.last().unwrap().thickness.is_some()
        {
            return Err(OpticsError::BadStack(
                "first and last layers must be semi-infinite".to_string(),
            ));
        }
        for (i, layer) in layers.iter().enumerate().skip(1).take(layers.len() - 2) {
            match layer.thickness {
                Some(d) if d > 0.0 && d.is_finite() => {}
                Some(d) => {
                    return Err(OpticsError::BadStack(format!(
                        "film layer {i} ({}) has non-positive thickness {d}",
                        layer.material.name
                    )))
                }
                None => {
                    return Err(OpticsError::BadStack(format!(
                        "interior layer {i} ({}) must have a thickness",
                        layer.material.name
                    )))
                }
            }
        }
        Ok(Self { layers })
    }

    /// The mold-side imprint geometry: semi-infinite mold | polymer film |
    /// semi-infinite substrate.
    pub fn imprint(
        mold: &Material,
        polymer: &Material,
        polymer_thickness: f64,
        substrate: &Material,
    ) -> Result<Self, OpticsError> {
        Self::new(vec![
            OpticalLayer::semi_infinite(mold),
            OpticalLayer::film(polymer, polymer_thickness),
            OpticalLayer::semi_infinite(substrate),
        ])
    }

    pub fn layers(&self) -> &[OpticalLayer] {
        &self.layers
    }

    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self { layers }
    }
}

/// Interface transmission/reflection amplitude coefficients for light
/// arriving from medium `a` onto medium `b`:
/// t = 2nₐ/(nₐ+n_b), r = (nₐ−n_b)/(nₐ+n_b).
pub fn fresnel_interface(
    a: ComplexIndex,
    b: ComplexIndex,
) -> Result<(Complex64, Complex64), OpticsError> {
    let na = a.to_complex();
    let nb = b.to_complex();
    let denom = na + nb;
    if denom.norm() == 0.0 {
        return Err(OpticsError::DegenerateInterface);
    }
    Ok((2.0 * na / denom, (na - nb) / denom))
}

/// Complex one-pass phase δ = 2πnd/λ of a layer (all lengths in meters).
///
/// Im δ is capped at 60: a film attenuating by e⁻⁶⁰ is opaque to every
/// digit we report, and the cap keeps the backward recursion inside f64
/// range even when several such films are stacked.
pub fn layer_phase(index: ComplexIndex, thickness: f64, wavelength: f64) -> Complex64 {
    let delta = 2.0 * std::f64::consts::PI * index.to_complex() * thickness / wavelength;
    const MAX_ATTENUATION: f64 = 60.0;
    if delta.im > MAX_ATTENUATION {
        Complex64::new(delta.re, MAX_ATTENUATION)
    } else {
        delta
    }
}

/// Forward/backward amplitudes per layer, taken at each layer's entry
/// (incidence-side) interface and normalized to unit incident amplitude.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    pub wavelength_nm: u32,
    indices: Vec<ComplexIndex>,
    phases: Vec<Complex64>,
    amplitudes: Vec<(Complex64, Complex64)>,
}

impl FieldSolution {
    /// (E⁺, E⁻) in layer `m` at its entry interface; for the incidence
    /// medium this is the first interface, with E⁺ = 1.
    pub fn amplitudes(&self, m: usize) -> (Complex64, Complex64) {
        self.amplitudes[m]
    }

    pub fn layer_count(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitude reflection coefficient E₀⁻/E₀⁺ of the whole stack.
    pub fn reflection_coefficient(&self) -> Complex64 {
        self.amplitudes[0].1
    }

    /// Net energy flux at a point with amplitudes (p, q) in a medium of
    /// index `n`, in units of the incident flux density. The κ·Im(p·q̄)
    /// cross term is what keeps the bookkeeping exact inside absorbers.
    fn flux(index: ComplexIndex, p: Complex64, q: Complex64) -> f64 {
        index.n * (p.norm_sqr() - q.norm_sqr()) - 2.0 * index.kappa * (p * q.conj()).im
    }

    fn flux_at_entry(&self, m: usize) -> f64 {
        let (p, q) = self.amplitudes[m];
        Self::flux(self.indices[m], p, q)
    }

    fn flux_at_exit(&self, m: usize) -> f64 {
        let (p, q) = self.amplitudes[m];
        let ph = self.phases[m];
        let fwd = (Complex64::i() * ph).exp();
        let bwd = (-Complex64::i() * ph).exp();
        Self::flux(self.indices[m], p * fwd, q * bwd)
    }
}

/// Solve the stack at one wavelength: backward recursion from a unit
/// transmitted wave, then rescale so the incidence-medium forward
/// amplitude is 1.
pub fn solve_stack(stack: &LayerStack, wavelength_nm: u32) -> Result<FieldSolution, OpticsError> {
    let layers = stack.layers();
    let n_layers = layers.len();
    let wavelength = wavelength_nm as f64 * 1e-9;

    let indices: Vec<ComplexIndex> = layers
        .iter()
        .map(|l| l.material.refractive_index(wavelength_nm))
        .collect::<Result<_, _>>()?;
    // Semi-infinite end media carry no propagation phase.
    let phases: Vec<Complex64> = layers
        .iter()
        .zip(&indices)
        .map(|(l, &idx)| match l.thickness {
            Some(d) => layer_phase(idx, d, wavelength),
            None => Complex64::new(0.0, 0.0),
        })
        .collect();

    let mut amplitudes = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); n_layers];
    amplitudes[n_layers - 1] = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    for m in (1..n_layers).rev() {
        let (t, r) = fresnel_interface(indices[m - 1], indices[m])?;
        let (ep, em) = amplitudes[m];
        let across = ((ep + r * em) / t, (r * ep + em) / t);
        // Strip the phase accumulated across layer m-1 to refer the
        // amplitudes back to its entry interface.
        let ph = phases[m - 1];
        let back = (-Complex64::i() * ph).exp();
        amplitudes[m - 1] = (across.0 * back, across.1 / back);
    }

    let incident = amplitudes[0].0;
    if incident.norm() == 0.0 || !incident.norm().is_finite() {
        return Err(OpticsError::BadStack(format!(
            "stack recursion produced non-normalizable incident amplitude {incident}"
        )));
    }
    for amp in &mut amplitudes {
        amp.0 /= incident;
        amp.1 /= incident;
    }

    Ok(FieldSolution {
        wavelength_nm,
        indices,
        phases,
        amplitudes,
    })
}

/// Which substrate-absorbance figure a consumer wants: the stack-internal
/// fraction, or that fraction scaled by the ambient-side entry
/// transmissivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbsorbanceAccounting {
    StackOnly,
    IncludeAirInterface,
}

/// Energy split of the incident beam: reflected, absorbed per film,
/// transmitted/absorbed in the exit medium.
#[derive(Debug, Clone)]
pub struct AbsorbanceReport {
    pub wavelength_nm: u32,
    /// Absorbed fraction per film layer, in stack order.
    pub layer_absorbance: Vec<f64>,
    pub reflectance: f64,
    /// Power leaving through a transparent exit medium; zero when the exit
    /// medium absorbs (that power shows up as `substrate_absorption`).
    pub transmittance: f64,
    /// Fraction absorbed by an opaque exit medium.
    pub substrate_absorption: f64,
    /// Normal-incidence transmissivity of the ambient→incidence-medium
    /// interface, 4n₀n₁/(n₀+n₁)².
    pub air_interface_transmissivity: f64,
}

impl AbsorbanceReport {
    pub fn substrate_absorbance(&self, accounting: AbsorbanceAccounting) -> f64 {
        match accounting {
            AbsorbanceAccounting::StackOnly => self.substrate_absorption,
            AbsorbanceAccounting::IncludeAirInterface => {
                self.air_interface_transmissivity * self.substrate_absorption
            }
        }
    }

    /// Fraction of the beam fluence deposited in the substrate, referred
    /// to the fluence arriving at the ambient-side surface.
    pub fn deposited_substrate_fraction(&self) -> f64 {
        self.air_interface_transmissivity * self.substrate_absorption
    }

    /// Same referencing for the film layers.
    pub fn deposited_layer_fractions(&self) -> Vec<f64> {
        self.layer_absorbance
            .iter()
            .map(|a| self.air_interface_transmissivity * a)
            .collect()
    }
}

/// Energy split from a field solution: flux differences across each film,
/// normalized by the incident flux.
pub fn layer_absorbances(sol: &FieldSolution, stack: &LayerStack) -> AbsorbanceReport {
    let n_layers = sol.layer_count();
    debug_assert_eq!(n_layers, stack.layers().len());

    let incident_flux = sol.indices[0].n; // Re(n₀)·|E₀⁺|², E₀⁺ = 1
    let reflectance = sol.amplitudes[0].1.norm_sqr();

    let mut layer_absorbance = Vec::with_capacity(n_layers.saturating_sub(2));
    for m in 1..n_layers - 1 {
        let absorbed = sol.flux_at_entry(m) - sol.flux_at_exit(m);
        layer_absorbance.push(absorbed / incident_flux);
    }

    let exit_flux = sol.flux_at_entry(n_layers - 1) / incident_flux;
    let exit_absorbs = sol.indices[n_layers - 1].kappa > 0.0;
    let (transmittance, substrate_absorption) =
        if exit_absorbs { (0.0, exit_flux) } else { (exit_flux, 0.0) };

    let air_interface_transmissivity =
        air_quartz_transmissivity(sol.indices[0], ComplexIndex::new(1.0, 0.0));

    AbsorbanceReport {
        wavelength_nm: sol.wavelength_nm,
        layer_absorbance,
        reflectance,
        transmittance,
        substrate_absorption,
        air_interface_transmissivity,
    }
}

/// Single-interface energy transmissivity 4n₀n_q/(n₀+n_q)² using the real
/// index parts; used for the ambient→mold entry face, which sits outside
/// the coherent stack.
pub fn air_quartz_transmissivity(n_quartz: ComplexIndex, n_ambient: ComplexIndex) -> f64 {
    let n0 = n_ambient.n;
    let nq = n_quartz.n;
    4.0 * n0 * nq / ((n0 + nq) * (n0 + nq))
}
