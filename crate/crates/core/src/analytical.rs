//! Semi-infinite substrate temperature by superposition of instantaneous
//! plane sources.
//!
//! The adiabatic surface turns the half-space problem into an infinite
//! medium with the source mirrored across x = 0. The temperature is the
//! space-time convolution of that mirrored source with the plane-source
//! response
//!
//! θ(x,t) = ∫₀^min(t,t_p) ∫ S(ξ,τ) / (2ρC√(πα(t−τ))) ·
//!          exp(−(x−ξ)²/(4α(t−τ))) dξ dτ.
//!
//! Two evaluation paths are provided. The production path collapses the
//! ξ-integral analytically (an exponential–Gaussian convolution, two
//! scaled-erfc terms) and integrates over time only. The fidelity path
//! evaluates the full double integral with tensor-product Gauss–Legendre
//! panels. Both substitute u = √(t−τ) in the time integral: the kernel's
//! square-root boundary layer at τ → t becomes analytic in u, so the
//! quadrature converges spectrally instead of stalling on the cusp.

use thiserror::Error;

use crate::materials::Material;
use crate::quad::{GaussLegendre, QuadError};
use crate::source::VolumetricSource;
use crate::special::erfcx;

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Error)]
pub enum AnalyticalError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("{0}")]
    InvalidInput(String),
    #[error(
        "quadrature produced a non-finite integrand at u = {node:e} s^1/2 (probe x = {x:e} m, t = {t:e} s)"
    )]
    NonFiniteIntegrand { node: f64, x: f64, t: f64 },
}

/// How the spatial (ξ) integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum XiIntegralMethod {
    /// Closed-form exponential–Gaussian convolution; exact and fast.
    #[default]
    ClosedForm,
    /// Gauss–Legendre panels over a truncated ξ range, split at the ξ = 0
    /// kink of the mirrored source.
    FullQuadrature,
}

/// Probe history at a fixed position.
#[derive(Debug, Clone)]
pub struct TemperatureSeries {
    /// m
    pub position: f64,
    /// (t in s, T in °C)
    pub samples: Vec<(f64, f64)>,
}

impl TemperatureSeries {
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.samples
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Everything needed to evaluate the analytical field.
#[derive(Debug, Clone)]
pub struct AnalyticalConfig {
    pub substrate: Material,
    pub source: VolumetricSource,
    /// °C
    pub initial_temperature: f64,
    pub quadrature_order: usize,
    pub xi_method: XiIntegralMethod,
}

impl AnalyticalConfig {
    pub fn new(
        substrate: Material,
        source: VolumetricSource,
        initial_temperature: f64,
    ) -> Result<Self, AnalyticalError> {
        if substrate.thermal_diffusivity() <= 0.0 {
            return Err(AnalyticalError::InvalidInput(format!(
                "substrate `{}` needs positive thermal diffusivity",
                substrate.name
            )));
        }
        Ok(Self {
            substrate,
            source,
            initial_temperature,
            quadrature_order: 104,
            xi_method: XiIntegralMethod::ClosedForm,
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.quadrature_order = order;
        self
    }

    pub fn with_method(mut self, method: XiIntegralMethod) -> Self {
        self.xi_method = method;
        self
    }

    /// Half-width of the truncated ξ domain for the quadrature path: far
    /// enough out that the source has decayed to e⁻¹⁰ and the kernel tail
    /// from the probe point is negligible.
    fn truncation_half_width(&self, x: f64, t: f64) -> f64 {
        let beta = self.source.absorption_coefficient();
        let alpha = self.substrate.thermal_diffusivity();
        (10.0 / beta).max(x.abs() + 6.0 * (4.0 * alpha * t).sqrt())
    }

    /// Temperature in °C at depth `x` (the field is even in x via the
    /// mirror construction) and time `t > 0`.
    pub fn temperature(&self, x: f64, t: f64) -> Result<f64, AnalyticalError> {
        if !t.is_finite() || t <= 0.0 {
            return Err(AnalyticalError::InvalidInput(format!(
                "time must be positive and finite, got {t}"
            )));
        }
        let rule = GaussLegendre::new(self.quadrature_order)?;
        let theta = match self.xi_method {
            XiIntegralMethod::ClosedForm => self.rise_closed_form(&rule, x, t),
            XiIntegralMethod::FullQuadrature => self.rise_full_quadrature(&rule, x, t),
        };
        if !theta.is_finite() {
            // locate the first bad node for the diagnostic
            let node = self.first_non_finite_node(&rule, x, t).unwrap_or(f64::NAN);
            return Err(AnalyticalError::NonFiniteIntegrand { node, x, t });
        }
        Ok(self.initial_temperature + theta)
    }

    /// Series of `temperature(x, t)` at the given times (ascending, > 0).
    pub fn history_at(&self, x: f64, times: &[f64]) -> Result<TemperatureSeries, AnalyticalError> {
        if times.windows(2).any(|w| w[0] > w[1]) {
            return Err(AnalyticalError::InvalidInput(
                "probe times must be sorted ascending".to_string(),
            ));
        }
        let samples = times
            .iter()
            .map(|&t| self.temperature(x, t).map(|temp| (t, temp)))
            .collect::<Result<_, _>>()?;
        Ok(TemperatureSeries {
            position: x,
            samples,
        })
    }

    /// Surface (x = 0) history.
    pub fn surface_history(&self, times: &[f64]) -> Result<TemperatureSeries, AnalyticalError> {
        self.history_at(0.0, times)
    }

    fn time_window(&self, t: f64) -> (f64, f64) {
        let tau_lim = t.min(self.source.pulse().duration());
        ((t - tau_lim).sqrt(), t.sqrt())
    }

    fn rise_closed_form(&self, rule: &GaussLegendre, x: f64, t: f64) -> f64 {
        let alpha = self.substrate.thermal_diffusivity();
        let beta = self.source.absorption_coefficient();
        let rho_c = self.substrate.volumetric_heat_capacity();
        let fraction = self.source.absorbed_fraction();
        let pulse = self.source.pulse();
        let (u_lo, u_hi) = self.time_window(t);
        let integral = rule.integrate(u_lo, u_hi, |u| {
            pulse.intensity(t - u * u) * mirrored_kernel(x, beta, alpha * u * u) * u
        });
        fraction * beta / rho_c * integral
    }

    fn rise_full_quadrature(&self, rule: &GaussLegendre, x: f64, t: f64) -> f64 {
        let alpha = self.substrate.thermal_diffusivity();
        let beta = self.source.absorption_coefficient();
        let rho_c = self.substrate.volumetric_heat_capacity();
        let fraction = self.source.absorbed_fraction();
        let pulse = self.source.pulse();
        let (u_lo, u_hi) = self.time_window(t);

        let half_width = self.truncation_half_width(x, t);
        // Panel boundaries: split at the |ξ| kink, and again at the radius
        // beyond which the source itself is dead (e⁻³⁰), so the clustered
        // panel-edge nodes resolve the narrow kernel at small t − τ.
        let source_radius = (30.0 / beta).min(half_width);
        let mut bounds = vec![-half_width, -source_radius, 0.0, source_radius, half_width];
        bounds.dedup_by(|a, b| a == b);

        let integral = rule.integrate(u_lo, u_hi, |u| {
            let spread = alpha * u * u; // α(t−τ)
            let inner: f64 = bounds
                .windows(2)
                .map(|w| {
                    rule.integrate(w[0], w[1], |xi| {
                        let d = x - xi;
                        (-beta * xi.abs()).exp() * (-d * d / (4.0 * spread)).exp()
                    })
                })
                .sum();
            pulse.intensity(t - u * u) * inner
        });
        fraction * beta / (rho_c * SQRT_PI * alpha.sqrt()) * integral
    }

    fn first_non_finite_node(&self, rule: &GaussLegendre, x: f64, t: f64) -> Option<f64> {
        let alpha = self.substrate.thermal_diffusivity();
        let beta = self.source.absorption_coefficient();
        let pulse = self.source.pulse();
        let (u_lo, u_hi) = self.time_window(t);
        let mut bad = None;
        rule.integrate(u_lo, u_hi, |u| {
            let v = pulse.intensity(t - u * u) * mirrored_kernel(x, beta, alpha * u * u) * u;
            if !v.is_finite() && bad.is_none() {
                bad = Some(u);
            }
            0.0
        });
        bad
    }
}

/// Response at (x, t) to an instantaneous plane release of `areal_energy`
/// J/m² at x = 0, t = 0 in an infinite medium:
/// θ = q″ / (2ρC√(παt)) · exp(−x²/(4αt)).
pub fn plane_source_response(
    x: f64,
    t: f64,
    areal_energy: f64,
    material: &Material,
) -> Result<f64, AnalyticalError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(AnalyticalError::InvalidInput(format!(
            "plane source response needs t > 0, got {t}"
        )));
    }
    let alpha = material.thermal_diffusivity();
    if alpha <= 0.0 {
        return Err(AnalyticalError::InvalidInput(format!(
            "material `{}` needs positive thermal diffusivity",
            material.name
        )));
    }
    let rho_c = material.volumetric_heat_capacity();
    let spread = alpha * t;
    Ok(areal_energy / (2.0 * rho_c * SQRT_PI * spread.sqrt()) * (-x * x / (4.0 * spread)).exp())
}

/// ∫ exp(−β|ξ|)·exp(−(x−ξ)²/(4a)) dξ over the whole line, in closed form.
///
/// Completing the square on each half-line gives two scaled-erfc terms:
///   √(πa) e^(−x²/4a) [erfcx(β√a − x/2√a) + erfcx(β√a + x/2√a)]
/// For arguments where erfcx would need its overflowing reflection, the
/// reflected exponential is folded with the Gaussian prefactor (their
/// combination, exp(aβ² − β|x|), is bounded there).
pub fn exp_gaussian_convolution(x: f64, beta: f64, a: f64) -> f64 {
    SQRT_PI * a.sqrt() * mirrored_kernel(x, beta, a)
}

/// The convolution above without its √(πa) prefactor — the form in which
/// it enters the time integrand, where the prefactor cancels against the
/// plane-source normalization.
fn mirrored_kernel(x: f64, beta: f64, a: f64) -> f64 {
    let half_spread = a.sqrt(); // √a
    let xq = x.abs() / (2.0 * half_spread);
    let zb = beta * half_spread;
    let gauss = (-xq * xq).exp();
    let term = |z: f64| -> f64 {
        if z >= 0.0 {
            gauss * erfcx(z)
        } else {
            // erfcx(z) = 2e^(z²) − erfcx(−z); z² − xq² = aβ² − β|x| ≤ 0 here
            2.0 * (z * z - xq * xq).exp() - gauss * erfcx(-z)
        }
    };
    term(zb - xq) + term(zb + xq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialDb;
    use crate::source::LaserPulse;
    use proptest::prelude::*;

    fn copper_config(fluence_j_m2: f64, fwhm: f64) -> AnalyticalConfig {
        let db = MaterialDb::builtin();
        let cu = db.get("Copper").unwrap().clone();
        let beta = cu.absorption_coefficient(308).unwrap();
        let pulse = LaserPulse::new(308, fluence_j_m2, fwhm).unwrap();
        // deposited fraction: stack absorbance 0.7313 behind a 0.9618
        // entry transmissivity
        let source = VolumetricSource::new(0.9618 * 0.7313, beta, pulse).unwrap();
        AnalyticalConfig::new(cu, source, 25.0).unwrap()
    }

    #[test]
    fn plane_source_peak_and_symmetry() {
        let db = MaterialDb::builtin();
        let cu = db.get("Copper").unwrap();
        let q = 1000.0;
        let t = 1e-8;
        let peak = plane_source_response(0.0, t, q, cu).unwrap();
        let alpha = cu.thermal_diffusivity();
        let expected =
            q / (2.0 * cu.volumetric_heat_capacity() * (std::f64::consts::PI * alpha * t).sqrt());
        assert!((peak - expected).abs() / expected < 1e-14);
        let x = 2e-6;
        assert_eq!(
            plane_source_response(x, t, q, cu).unwrap(),
            plane_source_response(-x, t, q, cu).unwrap()
        );
        assert!(plane_source_response(0.0, 0.0, q, cu).is_err());
    }

    #[test]
    fn plane_source_conserves_energy() {
        let db = MaterialDb::builtin();
        let cu = db.get("Copper").unwrap();
        let q = 1234.0;
        let t = 2e-8;
        let alpha = cu.thermal_diffusivity();
        let window = 12.0 * (4.0 * alpha * t).sqrt();
        let n = 100_000;
        let h = 2.0 * window / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let x = -window + i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * plane_source_response(x, t, q, cu).unwrap();
        }
        let energy = sum * h * cu.volumetric_heat_capacity();
        assert!(
            ((energy - q) / q).abs() < 1e-6,
            "recovered {energy} of {q} J/m²"
        );
    }

    #[test]
    fn convolution_recovers_gaussian_mass_as_absorption_vanishes() {
        let a = 3e-13;
        let x = 2e-7;
        let value = exp_gaussian_convolution(x, 1e-3, a);
        let mass = 2.0 * (std::f64::consts::PI * a).sqrt();
        assert!((value - mass).abs() / mass < 1e-6, "{value} vs {mass}");
    }

    #[test]
    fn convolution_is_even_in_x() {
        let (beta, a) = (6.98e7, 1e-13);
        for &x in &[0.0, 1e-8, 3e-7, 2e-6] {
            assert_eq!(
                exp_gaussian_convolution(x, beta, a),
                exp_gaussian_convolution(-x, beta, a)
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        /// Closed form against a brute-force trapezoid rule (10⁶ intervals
        /// per half-line, split at the |ξ| kink).
        #[test]
        fn convolution_matches_brute_force_trapezoid(
            beta in 1e6f64..3e6,
            a in 1e-13f64..4e-13,
            x in 0.0f64..6e-7,
        ) {
            let closed = exp_gaussian_convolution(x, beta, a);
            let window = 30.0 / beta + x + 12.0 * (2.0 * a).sqrt();
            let n = 2_000_000usize;
            let f = |xi: f64| (-beta * xi.abs()).exp() * (-(x - xi) * (x - xi) / (4.0 * a)).exp();
            let mut total = 0.0;
            for (lo, hi) in [(-window, 0.0), (0.0, window)] {
                let h = (hi - lo) / n as f64;
                let mut sum = 0.5 * (f(lo) + f(hi));
                for i in 1..n {
                    sum += f(lo + i as f64 * h);
                }
                total += sum * h;
            }
            prop_assert!(
                ((closed - total) / total).abs() < 1e-9,
                "closed {closed:e} vs trapezoid {total:e}"
            );
        }
    }

    #[test]
    fn early_time_temperature_is_initial() {
        let cfg = copper_config(6000.0, 20e-9);
        let t = cfg.temperature(0.0, 1e-15).unwrap();
        assert!((t - 25.0).abs() < 0.01, "T(0, 0⁺) = {t}");
    }

    #[test]
    fn copper_surface_peak_matches_reported_value() {
        // XeCl, 0.6 J/cm², 20 ns FWHM: reported peak ≈ 760 °C.
        let cfg = copper_config(6000.0, 20e-9);
        let t_p = cfg.source.pulse().duration();
        let times: Vec<f64> = (1..=512).map(|k| 4.0 * t_p * k as f64 / 512.0).collect();
        let series = cfg.surface_history(&times).unwrap();
        // heating-only problem: never below the initial temperature
        for &(_, temp) in &series.samples {
            assert!(temp >= 25.0 - 1e-9);
        }
        let (t_peak, peak) = series.peak().unwrap();
        assert!(
            (peak - 760.0).abs() / 760.0 < 0.10,
            "surface peak {peak} °C at {t_peak} s"
        );
        // peak shortly after τ_max
        assert!(t_peak > cfg.source.pulse().peak_time());
        assert!(t_peak < 2.0 * cfg.source.pulse().duration());
    }

    #[test]
    fn five_micron_probe_stays_cool() {
        let cfg = copper_config(6000.0, 20e-9);
        let t_p = cfg.source.pulse().duration();
        let times: Vec<f64> = (1..=256).map(|k| 4.0 * t_p * k as f64 / 256.0).collect();
        let series = cfg.history_at(5e-6, &times).unwrap();
        let (_, peak) = series.peak().unwrap();
        assert!(peak < 150.0, "5 μm peak {peak} °C");
    }

    #[test]
    fn longer_pulse_lowers_the_peak() {
        let peaks: Vec<f64> = [20e-9, 40e-9]
            .iter()
            .map(|&fwhm| {
                let cfg = copper_config(6000.0, fwhm);
                let t_p = cfg.source.pulse().duration();
                let times: Vec<f64> =
                    (1..=256).map(|k| 4.0 * t_p * k as f64 / 256.0).collect();
                cfg.surface_history(&times).unwrap().peak().unwrap().1
            })
            .collect();
        assert!(
            peaks[1] < peaks[0],
            "40 ns peak {} should undercut 20 ns peak {}",
            peaks[1],
            peaks[0]
        );
    }

    #[test]
    fn zero_fluence_returns_initial_exactly() {
        let cfg = copper_config(0.0, 20e-9);
        for &t in &[1e-9, 2e-8, 1e-7] {
            assert_eq!(cfg.temperature(0.0, t).unwrap(), 25.0);
        }
    }

    #[test]
    fn rise_is_linear_in_fluence() {
        let base = copper_config(3000.0, 20e-9);
        let double = copper_config(6000.0, 20e-9);
        for &(x, t) in &[(0.0, 3e-8), (1e-6, 5e-8), (2e-6, 1.2e-7)] {
            let r1 = base.temperature(x, t).unwrap() - 25.0;
            let r2 = double.temperature(x, t).unwrap() - 25.0;
            assert!(
                (r2 - 2.0 * r1).abs() <= 1e-12 * r2.abs(),
                "rise {r1} vs {r2} at ({x}, {t})"
            );
        }
    }

    #[test]
    fn surface_gradient_vanishes() {
        // The mirror construction enforces ∂T/∂x = 0 at the surface; a
        // ±1 nm central difference should be zero relative to the interior
        // gradient scale.
        let cfg = copper_config(6000.0, 20e-9);
        let t = 3e-8;
        let h = 1e-9;
        let surface_grad =
            (cfg.temperature(h, t).unwrap() - cfg.temperature(-h, t).unwrap()) / (2.0 * h);
        // steepest gradient over the heated depth
        let mut max_grad: f64 = 0.0;
        let probe = (4.0 * cfg.substrate.thermal_diffusivity() * t).sqrt();
        let mut prev = cfg.temperature(0.0, t).unwrap();
        let n = 50;
        for i in 1..=n {
            let x = probe * 3.0 * i as f64 / n as f64;
            let cur = cfg.temperature(x, t).unwrap();
            max_grad = max_grad.max(((cur - prev) / (probe * 3.0 / n as f64)).abs());
            prev = cur;
        }
        assert!(
            surface_grad.abs() <= 1e-3 * max_grad,
            "surface gradient {surface_grad} vs interior max {max_grad}"
        );
    }

    #[test]
    fn temperature_decreases_with_depth_at_peak_time() {
        let cfg = copper_config(6000.0, 20e-9);
        let t_p = cfg.source.pulse().duration();
        let times: Vec<f64> = (1..=128).map(|k| 2.0 * t_p * k as f64 / 128.0).collect();
        let (t_peak, _) = cfg.surface_history(&times).unwrap().peak().unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=40 {
            let x = 8e-6 * i as f64 / 40.0;
            let temp = cfg.temperature(x, t_peak).unwrap();
            assert!(temp <= prev + 1e-9, "T not monotone at x = {x}");
            prev = temp;
        }
    }

    #[test]
    fn late_time_enthalpy_matches_deposited_energy() {
        let cfg = copper_config(6000.0, 20e-9);
        let t = 10.0 * cfg.source.pulse().duration();
        let alpha = cfg.substrate.thermal_diffusivity();
        let beta = cfg.source.absorption_coefficient();
        let extent = (10.0 / beta).max(8.0 * (4.0 * alpha * t).sqrt());
        let n = 4000;
        let h = extent / n as f64;
        let mut sum = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            sum += w * (cfg.temperature(x, t).unwrap() - cfg.initial_temperature);
        }
        let enthalpy = sum * h * cfg.substrate.volumetric_heat_capacity();
        let deposited = cfg.source.absorbed_fraction() * cfg.source.pulse().fluence();
        assert!(
            ((enthalpy - deposited) / deposited).abs() < 0.005,
            "enthalpy {enthalpy}, deposited {deposited}"
        );
    }

    #[test]
    fn order_refinement_is_converged() {
        let cfg = copper_config(6000.0, 20e-9);
        let refined = cfg.clone().with_order(208);
        for &(x, t) in &[(0.0, 2.8e-8), (0.0, 5e-8), (5e-6, 5e-8), (1e-6, 1e-7)] {
            let a = cfg.temperature(x, t).unwrap() - 25.0;
            let b = refined.temperature(x, t).unwrap() - 25.0;
            assert!(
                ((a - b) / b.abs().max(1e-30)).abs() < 1e-4,
                "order 104 vs 208 at ({x}, {t}): {a} vs {b}"
            );
        }
    }

    #[test]
    fn quadrature_path_agrees_with_closed_form() {
        let cfg = copper_config(6000.0, 20e-9);
        let quad = cfg.clone().with_method(XiIntegralMethod::FullQuadrature);
        for &(x, t) in &[(0.0, 1.5e-8), (0.0, 3e-8), (0.0, 6e-8), (5e-6, 6e-8)] {
            let a = cfg.temperature(x, t).unwrap() - 25.0;
            let b = quad.temperature(x, t).unwrap() - 25.0;
            assert!(
                ((a - b) / a.abs().max(1e-30)).abs() < 1e-4,
                "closed {a} vs quadrature {b} at ({x}, {t})"
            );
        }
    }

    #[test]
    fn rejects_non_positive_time_and_unsorted_times() {
        let cfg = copper_config(6000.0, 20e-9);
        assert!(cfg.temperature(0.0, 0.0).is_err());
        assert!(cfg.temperature(0.0, -1e-9).is_err());
        assert!(cfg.history_at(0.0, &[2e-8, 1e-8]).is_err());
    }
}
