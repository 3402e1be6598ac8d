//! One-dimensional optical and thermal model of pulsed excimer-laser heating
//! in a mold / resist / substrate imprint stack.
//!
//! The crate is organized around the physical pipeline:
//!
//! * [`materials`] — thermo-optical property records and a small database
//!   with the built-in stack materials (Si, Copper, PMMA, FusedSilica).
//! * [`optics`] — characteristic-matrix field solution through the layer
//!   stack and per-layer energy absorbances at normal incidence.
//! * [`source`] — Gaussian laser pulse and the Beer–Lambert volumetric
//!   heat source it drives in the substrate.
//! * [`analytical`] — semi-infinite substrate temperature field built by
//!   superposing instantaneous plane sources over a mirrored source.
//! * [`fdm`] — fully implicit control-volume conduction solver over the
//!   full mold/resist/substrate domain.
//!
//! [`quad`] and [`special`] hold the supporting numerics (Gauss–Legendre
//! rules, scaled complementary error function).

pub mod analytical;
pub mod fdm;
pub mod materials;
pub mod optics;
pub mod quad;
pub mod source;
pub mod special;
