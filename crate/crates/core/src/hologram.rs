//! Holographic tensor-impedance synthesis.
//!
//! The impedance of each cell records the interference between the guided
//! reference current launched by the central feed and the desired radiated
//! field:
//!
//! ```text
//! Z = X·I + (M/2)·Im(E_rad ⊗ J† − J ⊗ E_rad†)        (in-plane 2×2 block)
//! ```
//!
//! Expanding that product for a cylindrical reference current
//! `J = r̂·exp(−j k_sw r)` and a circularly polarized plane wave gives closed
//! forms in terms of the holographic phase
//!
//! ```text
//! γ = k0·x·sin θ_L − n_sw·k0·r
//! ```
//!
//! which are what [`tensor_cp`] evaluates; [`tensor_from_interference`] is the
//! direct outer-product route and the two agree to rounding. For handedness
//! sign `s = +1` (LHCP) or `s = −1` (RHCP):
//!
//! ```text
//! Zxx = X − M (x/r) cos γ
//! Zxy = −(M/2) [(y/r) cos γ + s (x/r) sin γ]
//! Zyy = X − s M (y/r) sin γ
//! ```
//!
//! Reactances are stored as plain ohms; the physical impedance is `j` times
//! the stored tensor.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use crate::design::{BandEdge, DesignSpec, Handedness, SurfaceBand};
use crate::{free_space_wavenumber, Error, Result, Z0};

pub type CVec2 = [Complex64; 2];
pub type CVec3 = [Complex64; 3];

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Header of the impedance field CSV.
pub const FIELD_HEADER: &str = "i,j,x_mm,y_mm,zxx_ohm,zxy_ohm,zyy_ohm,xeffmax_ohm,angle_deg,region";

/// Symmetric 2×2 surface reactance tensor (ohm). `z_yx` is `z_xy` by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactanceTensor {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl ReactanceTensor {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Self { xx, xy, yy }
    }

    pub fn isotropic(x: f64) -> Self {
        Self {
            xx: x,
            xy: 0.0,
            yy: x,
        }
    }

    pub fn yx(&self) -> f64 {
        self.xy
    }

    pub fn mean(a: &Self, b: &Self) -> Self {
        Self {
            xx: 0.5 * (a.xx + b.xx),
            xy: 0.5 * (a.xy + b.xy),
            yy: 0.5 * (a.yy + b.yy),
        }
    }

    /// `Z·v`.
    pub fn apply(&self, v: &CVec2) -> CVec2 {
        [
            v[0] * self.xx + v[1] * self.xy,
            v[0] * self.xy + v[1] * self.yy,
        ]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.xx - other.xx)
            .abs()
            .max((self.xy - other.xy).abs())
            .max((self.yy - other.yy).abs())
    }
}

/// Surface-wave index of a TM surface with average reactance `x_avg`.
pub fn surface_index(x_avg: f64) -> f64 {
    (1.0 + (x_avg / Z0).powi(2)).sqrt()
}

/// Reference surface current `r̂·exp(−j k_sw r)` of the central feed.
///
/// Points closer than `feed_radius` to the feed (or at the feed itself)
/// return [`Error::FeedRegion`]; the caller substitutes an unmodulated cell.
pub fn surface_current(x: f64, y: f64, k_sw: f64, feed_radius: f64) -> Result<CVec2> {
    let r = x.hypot(y);
    if r == 0.0 || r < feed_radius {
        return Err(Error::FeedRegion {
            x,
            y,
            radius: feed_radius,
        });
    }
    let phase = Complex64::from_polar(1.0, -k_sw * r);
    Ok([phase * (x / r), phase * (y / r)])
}

fn hand_sign(handedness: Handedness) -> f64 {
    match handedness {
        Handedness::Lhcp => 1.0,
        Handedness::Rhcp => -1.0,
    }
}

/// Desired radiated field `(−j, ±1, −j sin θ_L)·exp(−j k0 x sin θ_L)`; `+1`
/// for LHCP, `−1` for RHCP.
pub fn desired_erad(x: f64, handedness: Handedness, theta_l: f64, k0: f64) -> CVec3 {
    let s = theta_l.sin();
    let phase = Complex64::from_polar(1.0, -k0 * x * s);
    [-J * phase, phase * hand_sign(handedness), -J * s * phase]
}

/// Direct evaluation of the interference formula on the in-plane block.
/// Only the x/y components of `erad` take part.
pub fn tensor_from_interference(erad: &CVec3, j: &CVec2, x_avg: f64, m: f64) -> ReactanceTensor {
    // entry (a, b) of E ⊗ J† − J ⊗ E†
    let entry = |a: usize, b: usize| erad[a] * j[b].conj() - j[a] * erad[b].conj();
    let h = 0.5 * m;
    let xy = 0.5 * (entry(0, 1).im + entry(1, 0).im);
    ReactanceTensor {
        xx: x_avg + h * entry(0, 0).im,
        xy: h * xy,
        yy: x_avg + h * entry(1, 1).im,
    }
}

/// Holographic phase `γ = k0·x·sin θ_L − n_sw·k0·r` between the desired plane
/// wave and the guided reference wave.
pub fn holographic_phase(x: f64, y: f64, freq_ghz: f64, theta_l: f64, n_sw: f64) -> f64 {
    let k0 = free_space_wavenumber(freq_ghz);
    k0 * x * theta_l.sin() - n_sw * k0 * x.hypot(y)
}

fn edge_phase(x: f64, y: f64, edge: &BandEdge, theta_l: f64) -> f64 {
    holographic_phase(x, y, edge.freq_ghz, theta_l, surface_index(edge.x_ohm))
}

fn check_feed(x: f64, y: f64, feed_radius: f64) -> Result<f64> {
    let r = x.hypot(y);
    if r == 0.0 || r < feed_radius {
        return Err(Error::FeedRegion {
            x,
            y,
            radius: feed_radius,
        });
    }
    Ok(r)
}

/// Closed-form single-frequency CP tensor at `(x, y)`.
pub fn tensor_cp(
    x: f64,
    y: f64,
    edge: &BandEdge,
    theta_l: f64,
    handedness: Handedness,
    feed_radius: f64,
) -> Result<ReactanceTensor> {
    let r = check_feed(x, y, feed_radius)?;
    let (cx, cy) = (x / r, y / r);
    let (sin_g, cos_g) = edge_phase(x, y, edge, theta_l).sin_cos();
    let (xa, m) = (edge.x_ohm, edge.m_ohm);
    let s = hand_sign(handedness);
    Ok(ReactanceTensor {
        xx: xa - m * cx * cos_g,
        xy: -0.5 * m * (cy * cos_g + s * cx * sin_g),
        yy: xa - s * m * cy * sin_g,
    })
}

/// Same tensor as [`tensor_cp`], built through [`tensor_from_interference`].
pub fn tensor_cp_interference(
    x: f64,
    y: f64,
    edge: &BandEdge,
    theta_l: f64,
    handedness: Handedness,
    feed_radius: f64,
) -> Result<ReactanceTensor> {
    let k0 = edge.k0();
    let j = surface_current(x, y, surface_index(edge.x_ohm) * k0, feed_radius)?;
    let e = desired_erad(x, handedness, theta_l, k0);
    Ok(tensor_from_interference(&e, &j, edge.x_ohm, edge.m_ohm))
}

/// Wideband tensor: elementwise mean of the band-edge CP tensors.
pub fn tensor_wideband(
    x: f64,
    y: f64,
    spec: &DesignSpec,
    theta_l: f64,
    handedness: Handedness,
) -> Result<ReactanceTensor> {
    let rf = spec.feed_exclusion_radius_m();
    let lo = tensor_cp(x, y, &spec.lower_edge(), theta_l, handedness, rf)?;
    let hi = tensor_cp(x, y, &spec.upper_edge(), theta_l, handedness, rf)?;
    Ok(ReactanceTensor::mean(&lo, &hi))
}

/// Band-combined modulation coefficients `(D_c, D_s)`.
fn modulation_sums(x: f64, y: f64, spec: &DesignSpec, theta_l: f64) -> (f64, f64) {
    let (lo, hi) = (spec.lower_edge(), spec.upper_edge());
    let (s1, c1) = edge_phase(x, y, &lo, theta_l).sin_cos();
    let (s2, c2) = edge_phase(x, y, &hi, theta_l).sin_cos();
    (lo.m_ohm * c1 + hi.m_ohm * c2, lo.m_ohm * s1 + hi.m_ohm * s2)
}

/// Wideband tensor written directly in terms of `D_c = M1 cos γ1 + M2 cos γ2`
/// and `D_s = M1 sin γ1 + M2 sin γ2`.
pub fn wideband_closed_form(
    x: f64,
    y: f64,
    spec: &DesignSpec,
    theta_l: f64,
    handedness: Handedness,
) -> Result<ReactanceTensor> {
    let r = check_feed(x, y, spec.feed_exclusion_radius_m())?;
    let (dc, ds) = modulation_sums(x, y, spec, theta_l);
    let sum_x = spec.x1_ohm() + spec.x2_ohm();
    let s = hand_sign(handedness);
    Ok(ReactanceTensor {
        xx: 0.5 * (sum_x - x * dc / r),
        xy: -0.25 * (y * dc + s * x * ds) / r,
        yy: 0.5 * (sum_x - s * y * ds / r),
    })
}

/// Checkerboard partner of the LHCP wideband tensor on the linear half: the
/// hologram of `(+j, 1)` polarization, whose radiation adds to the LHCP
/// hologram's to leave only the y-polarized component.
pub fn checkerboard_partner(
    x: f64,
    y: f64,
    spec: &DesignSpec,
    theta_l: f64,
) -> Result<ReactanceTensor> {
    let r = check_feed(x, y, spec.feed_exclusion_radius_m())?;
    let (dc, ds) = modulation_sums(x, y, spec, theta_l);
    let sum_x = spec.x1_ohm() + spec.x2_ohm();
    Ok(ReactanceTensor {
        xx: 0.5 * (sum_x + x * dc / r),
        xy: 0.25 * (y * dc - x * ds) / r,
        yy: 0.5 * (sum_x - y * ds / r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    CpHalf,
    LpHalf,
    FeedExcluded,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::CpHalf => "cp_half",
            Region::LpHalf => "lp_half",
            Region::FeedExcluded => "feed_excluded",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "cp_half" => Some(Region::CpHalf),
            "lp_half" => Some(Region::LpHalf),
            "feed_excluded" => Some(Region::FeedExcluded),
            _ => None,
        }
    }
}

/// Janus tensor for cell `(i, j)` centred at `(x, y)`.
///
/// `y >= 0` carries the wideband CP hologram aimed at `theta_cp`. `y < 0`
/// interleaves, on a checkerboard of cell parities, the LHCP wideband
/// hologram (`i + j` even) and its [`checkerboard_partner`] (`i + j` odd),
/// both aimed at `theta_lp`.
pub fn tensor_janus(
    i: usize,
    j: usize,
    x: f64,
    y: f64,
    spec: &DesignSpec,
) -> Result<(ReactanceTensor, Region)> {
    if y >= 0.0 {
        let theta = spec.theta_cp_deg.to_radians();
        let z = tensor_wideband(x, y, spec, theta, spec.handedness)?;
        return Ok((z, Region::CpHalf));
    }
    let theta = spec.theta_lp_deg.to_radians();
    let z = if (i + j) % 2 == 1 {
        checkerboard_partner(x, y, spec, theta)?
    } else {
        tensor_wideband(x, y, spec, theta, Handedness::Lhcp)?
    };
    Ok((z, Region::LpHalf))
}

/// Both roots of the anisotropic dispersion relation for propagation angle
/// `theta_k`, evaluated with the stored (real) reactances as tensor entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRoots {
    pub roots: [Complex64; 2],
    /// Index of the bound-mode root, if any.
    pub physical: Option<usize>,
}

impl DispersionRoots {
    /// `Z0·Re(k_z/k)` of root `idx`.
    pub fn implied_reactance(&self, idx: usize) -> f64 {
        Z0 * self.roots[idx].re
    }

    /// Implied reactance of the physical root.
    pub fn effective_reactance(&self) -> Option<f64> {
        self.physical.map(|i| self.implied_reactance(i))
    }
}

pub fn dispersion_roots(z: &ReactanceTensor, theta_k: f64) -> Result<DispersionRoots> {
    let (s, c) = theta_k.sin_cos();
    let (c2, s2, sin2) = (c * c, s * s, (2.0 * theta_k).sin());
    let num = Z0 * Z0 - z.xy * z.xy + z.xx * z.yy;
    let across = z.yy * c2 - z.xy * sin2 + z.xx * s2;
    let along = z.xx * c2 + z.xy * sin2 + z.yy * s2;
    let denom = 2.0 * Z0 * across;
    let scale = z.xx.abs().max(z.yy.abs()).max(z.xy.abs()).max(1.0);
    if !(denom.abs() > 1e-12 * Z0 * scale) {
        return Err(Error::DegenerateDirection { theta_k });
    }
    let disc = Complex64::new(num * num - 4.0 * Z0 * Z0 * across * along, 0.0).sqrt();
    let lead = -J * num;
    let roots = [(lead + disc) / denom, (lead - disc) / denom];
    let implied = roots.map(|w| Z0 * w.re);
    let ok = implied.map(|x| x > 0.0 && x.is_finite());
    let physical = match ok {
        [true, false] => Some(0),
        [false, true] => Some(1),
        [true, true] => Some(if roots[0].norm() <= roots[1].norm() {
            0
        } else {
            1
        }),
        [false, false] => None,
    };
    Ok(DispersionRoots { roots, physical })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalDirection {
    /// Angle of the major eigenvector, folded to `[0, π)`.
    pub angle_rad: f64,
    /// Larger eigenvalue of the reactance tensor.
    pub x_eff_max: f64,
    /// Set for (numerically) isotropic tensors; the angle is then 0.
    pub degenerate: bool,
}

pub fn max_impedance_direction(z: &ReactanceTensor) -> PrincipalDirection {
    let mean = 0.5 * (z.xx + z.yy);
    let half_diff = 0.5 * (z.xx - z.yy);
    let rad = half_diff.hypot(z.xy);
    let x_eff_max = mean + rad;
    let scale = z.xx.abs().max(z.yy.abs()).max(1.0);
    if rad <= 1e-12 * scale {
        return PrincipalDirection {
            angle_rad: 0.0,
            x_eff_max,
            degenerate: true,
        };
    }
    let mut angle = 0.5 * (2.0 * z.xy).atan2(z.xx - z.yy);
    if angle < 0.0 {
        angle += PI;
    }
    if angle >= PI {
        angle -= PI;
    }
    PrincipalDirection {
        angle_rad: angle,
        x_eff_max,
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceCell {
    pub i: usize,
    pub j: usize,
    pub x_m: f64,
    pub y_m: f64,
    pub z: ReactanceTensor,
    pub x_eff_max: f64,
    pub direction_rad: f64,
    pub degenerate: bool,
    pub region: Region,
}

impl ImpedanceCell {
    fn new(i: usize, j: usize, x_m: f64, y_m: f64, z: ReactanceTensor, region: Region) -> Self {
        let dir = max_impedance_direction(&z);
        Self {
            i,
            j,
            x_m,
            y_m,
            z,
            x_eff_max: dir.x_eff_max,
            direction_rad: dir.angle_rad,
            degenerate: dir.degenerate,
            region,
        }
    }
}

/// Square grid of impedance cells, stored row by row (`j` outer, `i` inner).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorImpedanceField {
    pub name: String,
    n_cells: usize,
    pitch_m: f64,
    cells: Vec<ImpedanceCell>,
    band: Option<SurfaceBand>,
}

impl TensorImpedanceField {
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn pitch_m(&self) -> f64 {
        self.pitch_m
    }

    pub fn cells(&self) -> &[ImpedanceCell] {
        &self.cells
    }

    pub fn cell(&self, i: usize, j: usize) -> &ImpedanceCell {
        &self.cells[j * self.n_cells + i]
    }

    /// Band reactance model used to excite the surface; absent for fields
    /// loaded from CSV until [`Self::with_band`] is called.
    pub fn band(&self) -> Option<&SurfaceBand> {
        self.band.as_ref()
    }

    pub fn with_band(mut self, band: SurfaceBand) -> Self {
        self.band = Some(band);
        self
    }

    pub fn with_pitch(mut self, pitch_m: f64) -> Self {
        self.pitch_m = pitch_m;
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() * 120);
        out.push_str(FIELD_HEADER);
        out.push('\n');
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                c.i,
                c.j,
                c.x_m * 1e3,
                c.y_m * 1e3,
                c.z.xx,
                c.z.xy,
                c.z.yy,
                c.x_eff_max,
                c.direction_rad.to_degrees(),
                c.region.as_str()
            );
        }
        out
    }

    /// Parses a field CSV. The lattice pitch is inferred from the cell
    /// centres; the band model must be attached separately.
    pub fn from_csv_reader<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let perr = |line: u64, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let headers = rdr.headers().map_err(|e| perr(1, e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>().join(",") != FIELD_HEADER {
            return Err(perr(1, format!("expected header `{FIELD_HEADER}`")));
        }
        let mut cells = Vec::new();
        for record in rdr.records() {
            let record = record
                .map_err(|e| perr(e.position().map(|p| p.line()).unwrap_or(0), e.to_string()))?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 10 {
                return Err(perr(
                    line,
                    format!("expected 10 fields, found {}", record.len()),
                ));
            }
            let idx = |k: usize| {
                record[k].parse::<usize>().map_err(|_| {
                    perr(
                        line,
                        format!("field {} is not an index: `{}`", k + 1, &record[k]),
                    )
                })
            };
            let num = |k: usize| {
                record[k].parse::<f64>().map_err(|_| {
                    perr(
                        line,
                        format!("field {} is not a number: `{}`", k + 1, &record[k]),
                    )
                })
            };
            let region = Region::parse(&record[9])
                .ok_or_else(|| perr(line, format!("unknown region `{}`", &record[9])))?;
            let z = ReactanceTensor::new(num(4)?, num(5)?, num(6)?);
            cells.push(ImpedanceCell {
                i: idx(0)?,
                j: idx(1)?,
                x_m: num(2)? * 1e-3,
                y_m: num(3)? * 1e-3,
                z,
                x_eff_max: num(7)?,
                direction_rad: num(8)?.to_radians(),
                degenerate: max_impedance_direction(&z).degenerate,
                region,
            });
        }
        let n = (cells.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != cells.len() {
            return Err(Error::InvalidTable(format!(
                "{source}: {} cells do not form a square grid",
                cells.len()
            )));
        }
        cells.sort_by_key(|c| (c.j, c.i));
        for (k, c) in cells.iter().enumerate() {
            if c.i != k % n || c.j != k / n {
                return Err(Error::InvalidTable(format!(
                    "{source}: grid is incomplete or has duplicate cells near ({}, {})",
                    c.i, c.j
                )));
            }
        }
        let pitch_mm = if n > 1 {
            (cells[n - 1].x_m - cells[0].x_m) * 1e3 / (n - 1) as f64
        } else {
            2e3 * cells[0].x_m.abs().max(cells[0].y_m.abs())
        };
        // Snap to 1 pm so that a 3 mm lattice reads back as exactly 3 mm.
        let pitch_m = (pitch_mm * 1e9).round() / 1e12;
        if !(pitch_m > 0.0) {
            return Err(Error::InvalidTable(format!(
                "{source}: cannot infer a positive lattice pitch"
            )));
        }
        Ok(Self {
            name: source.to_string(),
            n_cells: n,
            pitch_m,
            cells,
            band: None,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, &path.display().to_string())
    }

    fn from_fn<F>(spec: &DesignSpec, f: F) -> Result<Self>
    where
        F: Fn(usize, usize, f64, f64) -> Result<(ReactanceTensor, Region)> + Sync,
    {
        spec.validate()?;
        let n = spec.n_cells;
        let x_bar = spec.x_mean_ohm();
        let cells = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k % n, k / n);
                let (x, y) = (spec.cell_center_m(i), spec.cell_center_m(j));
                match f(i, j, x, y) {
                    Ok((z, region)) => Ok(ImpedanceCell::new(i, j, x, y, z, region)),
                    Err(Error::FeedRegion { .. }) => Ok(ImpedanceCell::new(
                        i,
                        j,
                        x,
                        y,
                        ReactanceTensor::isotropic(x_bar),
                        Region::FeedExcluded,
                    )),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: spec.name.clone(),
            n_cells: n,
            pitch_m: spec.pitch_m(),
            cells,
            band: Some(spec.band()),
        })
    }
}

/// Janus impedance field of `spec`.
pub fn synthesize_field(spec: &DesignSpec) -> Result<TensorImpedanceField> {
    TensorImpedanceField::from_fn(spec, |i, j, x, y| tensor_janus(i, j, x, y, spec))
}

/// Desired radiated field used by single-beam synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiatedFieldModel {
    /// `(−j, ±1, −j sin θ_L)`, synthesized through the closed forms.
    Proposed,
    /// `(−j, ±1, 0)`, synthesized through the interference formula.
    Transverse,
    /// Arbitrary in-plane polarization `(e_x, e_y)`, interference formula.
    Custom { e_x: Complex64, e_y: Complex64 },
}

impl RadiatedFieldModel {
    pub const NAMES: &'static str = "proposed, transverse";

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "proposed" => Ok(Self::Proposed),
            "transverse" => Ok(Self::Transverse),
            other => Err(Error::Usage(format!(
                "unknown baseline `{other}`; choices: {}",
                Self::NAMES
            ))),
        }
    }

    pub fn erad(&self, x: f64, handedness: Handedness, theta_l: f64, k0: f64) -> CVec3 {
        let phase = Complex64::from_polar(1.0, -k0 * x * theta_l.sin());
        match *self {
            Self::Proposed => desired_erad(x, handedness, theta_l, k0),
            Self::Transverse => [
                -J * phase,
                phase * hand_sign(handedness),
                Complex64::new(0.0, 0.0),
            ],
            Self::Custom { e_x, e_y } => [e_x * phase, e_y * phase, Complex64::new(0.0, 0.0)],
        }
    }
}

/// Full-aperture, single-beam wideband hologram steered to `theta_l` on the
/// φ = 0° cut.
pub fn synthesize_single_beam(
    spec: &DesignSpec,
    theta_l: f64,
    handedness: Handedness,
    model: RadiatedFieldModel,
) -> Result<TensorImpedanceField> {
    let rf = spec.feed_exclusion_radius_m();
    TensorImpedanceField::from_fn(spec, |_, _, x, y| {
        let z = match model {
            RadiatedFieldModel::Proposed => tensor_wideband(x, y, spec, theta_l, handedness)?,
            _ => {
                let edge_tensor = |edge: BandEdge| -> Result<ReactanceTensor> {
                    let k0 = edge.k0();
                    let j = surface_current(x, y, surface_index(edge.x_ohm) * k0, rf)?;
                    let e = model.erad(x, handedness, theta_l, k0);
                    Ok(tensor_from_interference(&e, &j, edge.x_ohm, edge.m_ohm))
                };
                ReactanceTensor::mean(
                    &edge_tensor(spec.lower_edge())?,
                    &edge_tensor(spec.upper_edge())?,
                )
            }
        };
        Ok((z, Region::CpHalf))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn surface_index_reference_points() {
        assert_eq!(surface_index(0.0), 1.0);
        assert!(close(
            surface_index(376.730),
            std::f64::consts::SQRT_2,
            1e-5
        ));
        assert!(close(surface_index(226.04), 1.16619, 1e-5));
    }

    #[test]
    fn surface_current_phase_and_direction() {
        let r = 0.05;
        let jv = surface_current(r, 0.0, 2.0 * PI / r, 0.0).unwrap();
        assert!((jv[0] - c(1.0, 0.0)).norm() < 1e-12 && jv[1].norm() < 1e-12);
        let jv = surface_current(0.0, r, PI / r, 0.0).unwrap();
        assert!(jv[0].norm() < 1e-12 && (jv[1] - c(-1.0, 0.0)).norm() < 1e-12);
        let jv = surface_current(0.03, 0.03, 123.0, 0.0).unwrap();
        let mag = (jv[0].norm_sqr() + jv[1].norm_sqr()).sqrt();
        assert!(close(mag, 1.0, 1e-14));
        assert!(close(jv[0].norm(), jv[1].norm(), 1e-14));
        assert!(matches!(
            surface_current(0.0, 0.0, 1.0, 0.0),
            Err(Error::FeedRegion { .. })
        ));
        assert!(matches!(
            surface_current(0.001, 0.0, 1.0, 0.0045),
            Err(Error::FeedRegion { .. })
        ));
    }

    #[test]
    fn desired_field_examples() {
        let e = desired_erad(0.0, Handedness::Lhcp, 0.0, 100.0);
        assert_eq!(e, [c(0.0, -1.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e = desired_erad(0.0, Handedness::Rhcp, 0.0, 100.0);
        assert_eq!(e, [c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        // k0 x sin 30 = π
        let theta = 30f64.to_radians();
        let k0 = 200.0;
        let x = PI / (k0 * theta.sin());
        let e = desired_erad(x, Handedness::Lhcp, theta, k0);
        let want = [c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.5)];
        for (a, b) in e.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn interference_examples() {
        let jv = [c(0.6, 0.1), c(-0.3, 0.7)];
        let e = [jv[0], jv[1], c(0.0, 0.0)];
        let z = tensor_from_interference(&e, &jv, 250.0, 171.0);
        assert!(z.max_abs_diff(&ReactanceTensor::isotropic(250.0)) < 1e-12);

        let z =
            tensor_from_interference(&[c(0.3, 0.2), c(1.0, -2.0), c(5.0, 0.0)], &jv, 250.0, 0.0);
        assert_eq!(z, ReactanceTensor::isotropic(250.0));

        // E_t = (−j, 1) e^{−jφ_r}, J = (1, 0) e^{−jψ}: Zxx = X − M cos(ψ − φ_r).
        let (phi_r, psi) = (0.4, 1.9);
        let pr = Complex64::from_polar(1.0, -phi_r);
        let e = [c(0.0, -1.0) * pr, pr, c(0.0, 0.0)];
        let jv = [Complex64::from_polar(1.0, -psi), c(0.0, 0.0)];
        let z = tensor_from_interference(&e, &jv, 240.0, 171.0);
        assert!(close(z.xx, 240.0 - 171.0 * (psi - phi_r).cos(), 1e-10));
        assert!(close(z.yy, 240.0, 1e-12));
    }

    #[test]
    fn holographic_phase_examples() {
        let f = 11.75;
        let k0 = free_space_wavenumber(f);
        let n = 1.2;
        let r = 2.0 * PI / (n * k0);
        assert!(close(
            holographic_phase(0.0, r, f, 0.0, n),
            -2.0 * PI,
            1e-12
        ));
        assert!(close(
            holographic_phase(0.0, 0.07, f, 0.3, n),
            -n * k0 * 0.07,
            1e-12
        ));
        // sin θ_L = n_sw on the +x axis gives zero phase everywhere.
        let n_matched: f64 = 0.8;
        let theta = n_matched.asin();
        for x in [0.01, 0.05, 0.1] {
            assert!(holographic_phase(x, 0.0, f, theta, n_matched).abs() < 1e-12);
        }
    }

    fn edge() -> BandEdge {
        BandEdge {
            freq_ghz: 11.75,
            x_ohm: 226.0,
            m_ohm: 171.0,
        }
    }

    #[test]
    fn closed_form_plug_ins() {
        let e = edge();
        for hand in [Handedness::Lhcp, Handedness::Rhcp] {
            let z = tensor_cp(0.0, 0.04, &e, 0.5, hand, 0.0).unwrap();
            assert!(close(z.xx, e.x_ohm, 1e-12));
        }
        // y = 0, x = r with γ = 0: pick r with n k0 r = 2π and θ_L = 0.
        let n = surface_index(e.x_ohm);
        let r = 2.0 * PI / (n * e.k0());
        let z = tensor_cp(r, 0.0, &e, 0.0, Handedness::Rhcp, 0.0).unwrap();
        assert!(close(z.xx, e.x_ohm - e.m_ohm, 1e-9));
        assert!(z.xy.abs() < 1e-9);
        assert!(close(z.yy, e.x_ohm, 1e-12));
        assert!(matches!(
            tensor_cp(0.001, 0.0, &e, 0.0, Handedness::Lhcp, 0.0045),
            Err(Error::FeedRegion { .. })
        ));
    }

    #[test]
    fn closed_form_matches_interference_spot_checks() {
        let e = edge();
        for &(x, y) in &[(0.031, -0.017), (-0.08, 0.002), (0.1, 0.1), (-0.004, -0.09)] {
            for hand in [Handedness::Lhcp, Handedness::Rhcp] {
                for theta in [-0.7, 0.0, 0.52, 0.78] {
                    let a = tensor_cp(x, y, &e, theta, hand, 0.0).unwrap();
                    let b = tensor_cp_interference(x, y, &e, theta, hand, 0.0).unwrap();
                    assert!(a.max_abs_diff(&b) < 1e-9 * e.m_ohm, "{a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn wideband_examples() {
        let spec = DesignSpec::design_i();
        let mut flat = spec.clone();
        flat.x2 = flat.x1;
        flat.m2 = flat.m1;
        flat.f_upper_ghz = flat.f_lower_ghz + 1e-9;
        let theta = 0.5;
        let (x, y) = (0.04, 0.03);
        let wb = tensor_wideband(x, y, &flat, theta, Handedness::Lhcp).unwrap();
        let single = tensor_cp(x, y, &flat.lower_edge(), theta, Handedness::Lhcp, 0.0).unwrap();
        assert!(wb.max_abs_diff(&single) < 1e-6);

        let z = tensor_wideband(0.0, 0.05, &spec, theta, Handedness::Lhcp).unwrap();
        assert!(close(z.xx, 0.5 * (spec.x1_ohm() + spec.x2_ohm()), 1e-12));

        for hand in [Handedness::Lhcp, Handedness::Rhcp] {
            let a = tensor_wideband(x, y, &spec, theta, hand).unwrap();
            let b = wideband_closed_form(x, y, &spec, theta, hand).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12 * spec.m1);
        }
    }

    #[test]
    fn janus_branches() {
        let spec = DesignSpec::design_i();
        let (x, y) = (0.021, -0.033);
        let theta_lp = spec.theta_lp_deg.to_radians();
        let (z, region) = tensor_janus(2, 3, x, y, &spec).unwrap();
        assert_eq!(region, Region::LpHalf);
        assert_eq!(z, checkerboard_partner(x, y, &spec, theta_lp).unwrap());
        let (z, _) = tensor_janus(4, 6, x, y, &spec).unwrap();
        assert_eq!(
            z,
            tensor_wideband(x, y, &spec, theta_lp, Handedness::Lhcp).unwrap()
        );
        let theta_cp = spec.theta_cp_deg.to_radians();
        for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let (z, region) = tensor_janus(i, j, x, 0.033, &spec).unwrap();
            assert_eq!(region, Region::CpHalf);
            assert_eq!(
                z,
                tensor_wideband(x, 0.033, &spec, theta_cp, Handedness::Lhcp).unwrap()
            );
        }
        let (_, region) = tensor_janus(0, 0, 0.02, 0.0, &spec).unwrap();
        assert_eq!(region, Region::CpHalf);
    }

    #[test]
    fn checkerboard_partner_is_opposite_hologram() {
        // The partner equals the RHCP wideband hologram with negated
        // modulation, i.e. the hologram of (+j, 1) polarization.
        let spec = DesignSpec::design_i();
        let theta = -0.5;
        for &(x, y) in &[(0.02, -0.05), (-0.07, -0.01)] {
            let p = checkerboard_partner(x, y, &spec, theta).unwrap();
            let r = tensor_wideband(x, y, &spec, theta, Handedness::Rhcp).unwrap();
            let xb = spec.x_mean_ohm();
            assert!(close(p.xx - xb, -(r.xx - xb), 1e-9));
            assert!(close(p.xy, -r.xy, 1e-9));
            assert!(close(p.yy - xb, -(r.yy - xb), 1e-9));
        }
    }

    #[test]
    fn principal_direction_examples() {
        let d = max_impedance_direction(&ReactanceTensor::new(400.0, 0.0, 230.0));
        assert_eq!(d.angle_rad, 0.0);
        assert_eq!(d.x_eff_max, 400.0);
        assert!(!d.degenerate);
        let d = max_impedance_direction(&ReactanceTensor::new(230.0, 0.0, 400.0));
        assert!(close(d.angle_rad, PI / 2.0, 1e-15));
        let d = max_impedance_direction(&ReactanceTensor::new(230.0, 50.0, 230.0));
        assert!(close(d.angle_rad, PI / 4.0, 1e-15));
        assert!(close(d.x_eff_max, 280.0, 1e-12));
        let d = max_impedance_direction(&ReactanceTensor::isotropic(226.0));
        assert!(d.degenerate && d.angle_rad == 0.0);
    }

    fn residual(z: &ReactanceTensor, theta: f64, w: Complex64) -> f64 {
        // (2 Z0 A w + j C)^2 = C^2 − 4 Z0^2 A B
        let (s, c) = theta.sin_cos();
        let a = z.yy * c * c - z.xy * (2.0 * theta).sin() + z.xx * s * s;
        let b = z.xx * c * c + z.xy * (2.0 * theta).sin() + z.yy * s * s;
        let cc = Z0 * Z0 - z.xy * z.xy + z.xx * z.yy;
        let lhs = (w * (2.0 * Z0 * a) + J * cc).powi(2);
        let rhs = Complex64::new(cc * cc - 4.0 * Z0 * Z0 * a * b, 0.0);
        (lhs - rhs).norm() / (cc * cc)
    }

    #[test]
    fn dispersion_roots_examples() {
        let z = ReactanceTensor::new(310.0, -42.0, 190.0);
        for theta in [0.0, 0.3, 1.2, 2.5] {
            let d = dispersion_roots(&z, theta).unwrap();
            for w in d.roots {
                assert!(residual(&z, theta, w) < 1e-10);
            }
        }
        let z = ReactanceTensor::new(310.0, 0.0, 190.0);
        let swapped = ReactanceTensor::new(190.0, 0.0, 310.0);
        for theta in [0.1, 0.7, 1.3] {
            let a = dispersion_roots(&z, theta).unwrap();
            let b = dispersion_roots(&swapped, theta + PI / 2.0).unwrap();
            for k in 0..2 {
                assert!((a.roots[k] - b.roots[k]).norm() < 1e-10 * a.roots[k].norm());
            }
        }
        let iso = ReactanceTensor::isotropic(240.0);
        let reference = dispersion_roots(&iso, 0.0).unwrap();
        for theta in [0.2, 0.9, 2.0, 3.0] {
            let d = dispersion_roots(&iso, theta).unwrap();
            for k in 0..2 {
                assert!((d.roots[k] - reference.roots[k]).norm() < 1e-10);
            }
        }
        let singular = ReactanceTensor::new(0.0, 0.0, 0.0);
        assert!(matches!(
            dispersion_roots(&singular, 0.3),
            Err(Error::DegenerateDirection { .. })
        ));
    }

    #[test]
    fn field_with_zero_modulation_is_uniform() {
        let mut spec = DesignSpec::design_i();
        spec.n_cells = 12;
        spec.m1 = 1e-300;
        spec.m2 = 1e-300;
        let field = synthesize_field(&spec).unwrap();
        let xb = spec.x_mean_ohm();
        for c in field.cells() {
            assert!(c.z.max_abs_diff(&ReactanceTensor::isotropic(xb)) < 1e-9);
        }
    }

    #[test]
    fn field_csv_round_trip() {
        let mut spec = DesignSpec::design_i();
        spec.n_cells = 8;
        let field = synthesize_field(&spec).unwrap();
        let text = field.to_csv();
        let back = TensorImpedanceField::from_csv_reader(text.as_bytes(), "mem").unwrap();
        assert_eq!(back.n_cells(), 8);
        assert!((back.pitch_m() - 3e-3).abs() < 1e-12);
        for (a, b) in field.cells().iter().zip(back.cells()) {
            assert_eq!(a.z, b.z);
            assert_eq!(a.region, b.region);
            assert_eq!((a.i, a.j), (b.i, b.j));
            assert!((a.x_m - b.x_m).abs() < 1e-15 && (a.y_m - b.y_m).abs() < 1e-15);
            assert!((a.direction_rad - b.direction_rad).abs() < 1e-12);
        }
    }
}
