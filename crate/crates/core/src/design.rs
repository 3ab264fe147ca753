//! Antenna design recipe and its JSON form.
//!
//! ```json
//! {
//!   "name": "design-i",
//!   "f_lower_ghz": 11.5,
//!   "f_upper_ghz": 12.0,
//!   "x1": 0.64, "x2": 0.56,
//!   "m1": 171.0, "m2": 171.0,
//!   "reactance_input_mode": "normalized",
//!   "theta_cp_deg": 30.0,
//!   "theta_lp_deg": -30.0,
//!   "handedness": "lhcp",
//!   "lattice_p_mm": 3.0,
//!   "n_cells": 70
//! }
//! ```
//!
//! Beam angles are signed elevations on the φ = 0° cut: a negative angle
//! points into the φ = 180° half-plane. `x1`/`x2` are the average reactances
//! at the lower/upper band edge; in `normalized` mode they are multiples of
//! Z0, in `ohms` mode plain ohms. Modulation depths `m1`/`m2` are always in
//! ohms. `feed_exclusion_radius_mm` defaults to 1.5 lattice periods.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{free_space_wavenumber, Error, Result, Z0};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Lhcp,
    Rhcp,
}

impl Handedness {
    pub fn opposite(self) -> Self {
        match self {
            Handedness::Lhcp => Handedness::Rhcp,
            Handedness::Rhcp => Handedness::Lhcp,
        }
    }
}

impl std::fmt::Display for Handedness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Handedness::Lhcp => "lhcp",
            Handedness::Rhcp => "rhcp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReactanceInputMode {
    Ohms,
    #[default]
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub f_lower_ghz: f64,
    pub f_upper_ghz: f64,
    pub x1: f64,
    pub x2: f64,
    pub m1: f64,
    pub m2: f64,
    #[serde(default)]
    pub reactance_input_mode: ReactanceInputMode,
    pub theta_cp_deg: f64,
    pub theta_lp_deg: f64,
    #[serde(default = "default_handedness")]
    pub handedness: Handedness,
    pub lattice_p_mm: f64,
    pub n_cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed_exclusion_radius_mm: Option<f64>,
}

fn default_name() -> String {
    "design".into()
}

fn default_handedness() -> Handedness {
    Handedness::Lhcp
}

/// Parameters of one band edge after unit resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdge {
    pub freq_ghz: f64,
    pub x_ohm: f64,
    pub m_ohm: f64,
}

impl BandEdge {
    pub fn k0(&self) -> f64 {
        free_space_wavenumber(self.freq_ghz)
    }
}

/// Average-reactance model of the band, used to pick the guided wavenumber
/// of the reference wave at an arbitrary frequency. The reactance is linear
/// in frequency between (and beyond) the two band edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceBand {
    pub f_lower_ghz: f64,
    pub f_upper_ghz: f64,
    pub x_lower_ohm: f64,
    pub x_upper_ohm: f64,
}

impl SurfaceBand {
    pub fn reactance_at(&self, freq_ghz: f64) -> f64 {
        let t = (freq_ghz - self.f_lower_ghz) / (self.f_upper_ghz - self.f_lower_ghz);
        self.x_lower_ohm + t * (self.x_upper_ohm - self.x_lower_ohm)
    }

    pub fn contains(&self, freq_ghz: f64) -> bool {
        freq_ghz >= self.f_lower_ghz && freq_ghz <= self.f_upper_ghz
    }

    pub fn center_ghz(&self) -> f64 {
        0.5 * (self.f_lower_ghz + self.f_upper_ghz)
    }
}

impl DesignSpec {
    fn preset(name: &str, theta_cp_deg: f64, theta_lp_deg: f64) -> Self {
        Self {
            name: name.into(),
            f_lower_ghz: 11.5,
            f_upper_ghz: 12.0,
            x1: 0.64,
            x2: 0.56,
            m1: 171.0,
            m2: 171.0,
            reactance_input_mode: ReactanceInputMode::Normalized,
            theta_cp_deg,
            theta_lp_deg,
            handedness: Handedness::Lhcp,
            lattice_p_mm: 3.0,
            n_cells: 70,
            feed_exclusion_radius_mm: None,
        }
    }

    /// LHCP at +30°, linear at −30°.
    pub fn design_i() -> Self {
        Self::preset("design-i", 30.0, -30.0)
    }

    /// LHCP at +45°, linear at −45°.
    pub fn design_ii() -> Self {
        Self::preset("design-ii", 45.0, -45.0)
    }

    /// LHCP at +30°, linear at −45°.
    pub fn design_iii() -> Self {
        Self::preset("design-iii", 30.0, -45.0)
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Json {
            path: source.to_string(),
            source: e,
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let invalid =
            |field: &'static str, reason: String| Err(Error::InvalidSpec { field, reason });
        if !(self.f_lower_ghz > 0.0) || !self.f_lower_ghz.is_finite() {
            return invalid(
                "f_lower_ghz",
                format!("must be positive, got {}", self.f_lower_ghz),
            );
        }
        if !(self.f_upper_ghz > self.f_lower_ghz) || !self.f_upper_ghz.is_finite() {
            return invalid(
                "f_upper_ghz",
                format!(
                    "must exceed f_lower_ghz ({}), got {}",
                    self.f_lower_ghz, self.f_upper_ghz
                ),
            );
        }
        if self.n_cells == 0 {
            return invalid("n_cells", "must be positive".into());
        }
        if !(self.lattice_p_mm > 0.0) || !self.lattice_p_mm.is_finite() {
            return invalid(
                "lattice_p_mm",
                format!("must be positive, got {}", self.lattice_p_mm),
            );
        }
        for (field, v) in [
            ("theta_cp_deg", self.theta_cp_deg),
            ("theta_lp_deg", self.theta_lp_deg),
        ] {
            if !(v.abs() < 90.0) {
                return invalid(field, format!("|theta| must be below 90 deg, got {v}"));
            }
        }
        let (x1, x2) = (self.x1_ohm(), self.x2_ohm());
        for (field, v) in [("x1", x1), ("x2", x2), ("m1", self.m1), ("m2", self.m2)] {
            if !(v > 0.0) || !v.is_finite() {
                return invalid(field, format!("must be positive, got {v}"));
            }
        }
        if let Some(r) = self.feed_exclusion_radius_mm {
            if !(r >= 0.0) || !r.is_finite() {
                return invalid(
                    "feed_exclusion_radius_mm",
                    format!("must be non-negative, got {r}"),
                );
            }
        }
        Ok(())
    }

    fn resolve(&self, x: f64) -> f64 {
        match self.reactance_input_mode {
            ReactanceInputMode::Ohms => x,
            ReactanceInputMode::Normalized => x * Z0,
        }
    }

    pub fn x1_ohm(&self) -> f64 {
        self.resolve(self.x1)
    }

    pub fn x2_ohm(&self) -> f64 {
        self.resolve(self.x2)
    }

    /// Mean of the two band-edge average reactances.
    pub fn x_mean_ohm(&self) -> f64 {
        0.5 * (self.x1_ohm() + self.x2_ohm())
    }

    pub fn lower_edge(&self) -> BandEdge {
        BandEdge {
            freq_ghz: self.f_lower_ghz,
            x_ohm: self.x1_ohm(),
            m_ohm: self.m1,
        }
    }

    pub fn upper_edge(&self) -> BandEdge {
        BandEdge {
            freq_ghz: self.f_upper_ghz,
            x_ohm: self.x2_ohm(),
            m_ohm: self.m2,
        }
    }

    pub fn band(&self) -> SurfaceBand {
        SurfaceBand {
            f_lower_ghz: self.f_lower_ghz,
            f_upper_ghz: self.f_upper_ghz,
            x_lower_ohm: self.x1_ohm(),
            x_upper_ohm: self.x2_ohm(),
        }
    }

    pub fn center_freq_ghz(&self) -> f64 {
        0.5 * (self.f_lower_ghz + self.f_upper_ghz)
    }

    pub fn pitch_m(&self) -> f64 {
        self.lattice_p_mm * 1e-3
    }

    pub fn feed_exclusion_radius_m(&self) -> f64 {
        self.feed_exclusion_radius_mm
            .unwrap_or(1.5 * self.lattice_p_mm)
            * 1e-3
    }

    /// Centre coordinate (m) of cell index `i` along either axis. The grid is
    /// centred on the feed.
    pub fn cell_center_m(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.n_cells as f64 - 1.0)) * self.pitch_m()
    }
}
