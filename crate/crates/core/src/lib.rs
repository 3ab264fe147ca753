//! Synthesis and analysis of Janus tensor-impedance holographic antennas.
//!
//! The crate turns a [`DesignSpec`] into a grid of 2×2 surface-reactance
//! tensors, predicts the radiated far field of that grid by aperture field
//! integration, and maps the synthesized impedances onto a slotted-patch
//! layout through a unit-cell `Z_eff-max(g)` curve.
//!
//! The pipeline, module by module:
//!
//! * [`unitcell`] – eigenmode phase sweeps to effective impedance, and the
//!   invertible reactance-versus-gap curve.
//! * [`hologram`] – holographic tensor synthesis (single CP, wideband and the
//!   dual-polarized Janus checkerboard), plus principal-direction extraction.
//! * [`aperture`] – aperture fields from the impedance boundary condition,
//!   spectral transform, far-field components, CP decomposition and metrics.
//! * [`layout`] – per-cell gap and slot angle, exported as JSON, CSV or SVG.
//! * [`cli`] – the batch front-end behind the `janus-holo` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aperture;
pub mod cli;
pub mod design;
mod error;
pub mod hologram;
pub mod layout;
pub mod svg;
pub mod unitcell;

pub use design::{DesignSpec, Handedness, ReactanceInputMode};
pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Free-space wave impedance in ohms.
pub const Z0: f64 = 376.730_313_668;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Free-space wavenumber (rad/m) at `freq_ghz`.
pub fn free_space_wavenumber(freq_ghz: f64) -> f64 {
    2.0 * std::f64::consts::PI * freq_ghz * 1e9 / SPEED_OF_LIGHT
}
