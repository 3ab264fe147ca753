//! Aperture field integration.
//!
//! The tangential aperture field follows from the impedance boundary
//! condition `E = Z·J` with the feed's reference current. Its spectrum
//!
//! ```text
//! F(u, v) = Σ E(x', y') · exp(+j k0 (x' u + y' v)) · dx' dy'
//! ```
//!
//! gives the far field through
//!
//! ```text
//! E_θ = F_x cos φ + F_y sin φ
//! E_φ = cos θ (−F_x sin φ + F_y cos φ)
//! ```
//!
//! Cells are ideal point samples: no element pattern, no coupling, no edge
//! diffraction. Circular components use `E_L = (E_θ − j E_φ)/√2` and
//! `E_R = (E_θ + j E_φ)/√2`, so `E_φ` leading `E_θ` by 90° is pure LHCP.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::Handedness;
use crate::hologram::{surface_current, surface_index, Region, TensorImpedanceField};
use crate::{free_space_wavenumber, Error, Result};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Axial ratio reported for (numerically) linear polarization.
pub const AR_CEILING_DB: f64 = 60.0;

/// Largest |u| or |v| accepted by the spectral transform.
pub const UV_LIMIT: f64 = 1.2;

/// Floor for dB values written to files.
const DB_FLOOR: f64 = -300.0;

/// Far-field CSV header.
pub const FARFIELD_HEADER: &str =
    "theta_deg,phi_deg,eth_re,eth_im,eph_re,eph_im,elhcp_db,erhcp_db,ar_db";

/// Tangential field and current samples on a rectangular grid. Sample `k`
/// sits at `(xs[k % nx], ys[k / nx])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApertureField {
    pub freq_ghz: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dx: f64,
    pub dy: f64,
    pub ex: Vec<Complex64>,
    pub ey: Vec<Complex64>,
    pub jx: Vec<Complex64>,
    pub jy: Vec<Complex64>,
    pub radiating: Vec<bool>,
}

impl ApertureField {
    /// Aperture built from raw field samples (currents set to zero).
    pub fn from_samples(
        freq_ghz: f64,
        xs: Vec<f64>,
        ys: Vec<f64>,
        dx: f64,
        dy: f64,
        ex: Vec<Complex64>,
        ey: Vec<Complex64>,
    ) -> Result<Self> {
        let n = xs.len() * ys.len();
        if ex.len() != n || ey.len() != n {
            return Err(Error::InvalidSample(format!(
                "expected {n} field samples, got {} / {}",
                ex.len(),
                ey.len()
            )));
        }
        Ok(Self {
            freq_ghz,
            xs,
            ys,
            dx,
            dy,
            ex,
            ey,
            jx: vec![ZERO; n],
            jy: vec![ZERO; n],
            radiating: vec![true; n],
        })
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn k0(&self) -> f64 {
        free_space_wavenumber(self.freq_ghz)
    }

    /// Copy of the aperture moved by `(shift_x, shift_y)` metres.
    pub fn translated(&self, shift_x: f64, shift_y: f64) -> Self {
        let mut out = self.clone();
        out.xs.iter_mut().for_each(|x| *x += shift_x);
        out.ys.iter_mut().for_each(|y| *y += shift_y);
        out
    }

    /// Sum of two apertures on the same grid.
    pub fn superpose(&self, other: &Self) -> Result<Self> {
        if self.xs != other.xs || self.ys != other.ys {
            return Err(Error::InvalidSample(
                "apertures are on different grids".into(),
            ));
        }
        let mut out = self.clone();
        for k in 0..out.ex.len() {
            out.ex[k] += other.ex[k];
            out.ey[k] += other.ey[k];
            out.jx[k] += other.jx[k];
            out.jy[k] += other.jy[k];
            out.radiating[k] |= other.radiating[k];
        }
        Ok(out)
    }
}

/// Aperture field of `field` excited at `freq_ghz`.
///
/// The reference wavenumber uses the band reactance interpolated (or
/// extrapolated) at `freq_ghz`. Feed-excluded cells do not radiate.
pub fn aperture_fields(field: &TensorImpedanceField, freq_ghz: f64) -> Result<ApertureField> {
    let band = field.band().ok_or_else(|| {
        Error::InsufficientData("impedance field has no band model; attach the design spec".into())
    })?;
    if !(freq_ghz > 0.0) || !freq_ghz.is_finite() {
        return Err(Error::InvalidSample(format!(
            "frequency must be positive, got {freq_ghz}"
        )));
    }
    if !band.contains(freq_ghz) {
        log::warn!(
            "{freq_ghz} GHz is outside the design band [{}, {}] GHz; extrapolating the surface reactance",
            band.f_lower_ghz,
            band.f_upper_ghz
        );
    }
    let n = field.n_cells();
    let k_sw = surface_index(band.reactance_at(freq_ghz)) * free_space_wavenumber(freq_ghz);
    let xs: Vec<f64> = (0..n).map(|i| field.cell(i, 0).x_m).collect();
    let ys: Vec<f64> = (0..n).map(|j| field.cell(0, j).y_m).collect();
    let mut ap = ApertureField {
        freq_ghz,
        xs,
        ys,
        dx: field.pitch_m(),
        dy: field.pitch_m(),
        ex: Vec::with_capacity(n * n),
        ey: Vec::with_capacity(n * n),
        jx: Vec::with_capacity(n * n),
        jy: Vec::with_capacity(n * n),
        radiating: Vec::with_capacity(n * n),
    };
    for c in field.cells() {
        let jv = surface_current(c.x_m, c.y_m, k_sw, 0.0).unwrap_or([ZERO, ZERO]);
        let radiating = c.region != Region::FeedExcluded;
        let e = if radiating {
            c.z.apply(&jv)
        } else {
            [ZERO, ZERO]
        };
        ap.ex.push(e[0]);
        ap.ey.push(e[1]);
        ap.jx.push(jv[0]);
        ap.jy.push(jv[1]);
        ap.radiating.push(radiating);
    }
    Ok(ap)
}

/// Spectral fields at one `(u, v)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub fx: Complex64,
    pub fy: Complex64,
}

fn check_uv(u: f64, v: f64) -> Result<()> {
    if !(u.abs() <= UV_LIMIT && v.abs() <= UV_LIMIT) {
        return Err(Error::InvalidSample(format!(
            "(u, v) = ({u}, {v}) is outside [-{UV_LIMIT}, {UV_LIMIT}]^2"
        )));
    }
    Ok(())
}

fn is_empty(ap: &ApertureField) -> bool {
    ap.ex.is_empty() || ap.ex.iter().chain(&ap.ey).all(|e| *e == ZERO)
}

fn phasors(coords: &[f64], k0: f64, s: f64) -> Vec<Complex64> {
    coords
        .iter()
        .map(|&c| Complex64::from_polar(1.0, k0 * c * s))
        .collect()
}

/// Spectral transform of the aperture at arbitrary `(u, v)` points.
///
/// The kernel factorizes as `exp(j k0 x u)·exp(j k0 y v)`, so each point
/// needs `nx + ny` complex exponentials instead of `nx·ny`.
pub fn spectral_fields(ap: &ApertureField, uv: &[(f64, f64)]) -> Result<Vec<Spectrum>> {
    for &(u, v) in uv {
        check_uv(u, v)?;
    }
    if is_empty(ap) {
        log::warn!("aperture is empty; spectral fields are zero");
        return Ok(vec![Spectrum { fx: ZERO, fy: ZERO }; uv.len()]);
    }
    let k0 = ap.k0();
    let nx = ap.nx();
    let area = ap.dx * ap.dy;
    Ok(uv
        .par_iter()
        .map(|&(u, v)| {
            let a = phasors(&ap.xs, k0, u);
            let b = phasors(&ap.ys, k0, v);
            let (mut fx, mut fy) = (ZERO, ZERO);
            for (j, bj) in b.iter().enumerate() {
                let row = j * nx;
                let (mut rx, mut ry) = (ZERO, ZERO);
                for (i, ai) in a.iter().enumerate() {
                    rx += ap.ex[row + i] * ai;
                    ry += ap.ey[row + i] * ai;
                }
                fx += rx * bj;
                fy += ry * bj;
            }
            Spectrum {
                fx: fx * area,
                fy: fy * area,
            }
        })
        .collect())
}

/// Spectral transform on the product grid `us × vs`; entry `[m][n]` is at
/// `(us[m], vs[n])`.
pub fn spectral_grid(ap: &ApertureField, us: &[f64], vs: &[f64]) -> Result<Vec<Vec<Spectrum>>> {
    for &u in us {
        check_uv(u, 0.0)?;
    }
    for &v in vs {
        check_uv(0.0, v)?;
    }
    if is_empty(ap) {
        log::warn!("aperture is empty; spectral fields are zero");
        return Ok(vec![
            vec![Spectrum { fx: ZERO, fy: ZERO }; vs.len()];
            us.len()
        ]);
    }
    let k0 = ap.k0();
    let (nx, ny) = (ap.nx(), ap.ny());
    let area = ap.dx * ap.dy;
    let b_cols: Vec<Vec<Complex64>> = vs.iter().map(|&v| phasors(&ap.ys, k0, v)).collect();
    Ok(us
        .par_iter()
        .map(|&u| {
            let a = phasors(&ap.xs, k0, u);
            // Partial sums over x for every row y_j.
            let mut gx = vec![ZERO; ny];
            let mut gy = vec![ZERO; ny];
            for j in 0..ny {
                let row = j * nx;
                for (i, ai) in a.iter().enumerate() {
                    gx[j] += ap.ex[row + i] * ai;
                    gy[j] += ap.ey[row + i] * ai;
                }
            }
            b_cols
                .iter()
                .map(|b| {
                    let (mut fx, mut fy) = (ZERO, ZERO);
                    for j in 0..ny {
                        fx += gx[j] * b[j];
                        fy += gy[j] * b[j];
                    }
                    Spectrum {
                        fx: fx * area,
                        fy: fy * area,
                    }
                })
                .collect()
        })
        .collect())
}

pub fn far_field_components(
    fx: Complex64,
    fy: Complex64,
    theta: f64,
    phi: f64,
) -> (Complex64, Complex64) {
    let (sp, cp) = phi.sin_cos();
    let e_theta = fx * cp + fy * sp;
    let e_phi = (-fx * sp + fy * cp) * theta.cos();
    (e_theta, e_phi)
}

/// Returns `(E_lhcp, E_rhcp)`.
pub fn cp_decompose(e_theta: Complex64, e_phi: Complex64) -> (Complex64, Complex64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ((e_theta - J * e_phi) * s, (e_theta + J * e_phi) * s)
}

/// Axial ratio in dB, capped at [`AR_CEILING_DB`].
pub fn axial_ratio(e_lhcp: Complex64, e_rhcp: Complex64) -> Result<f64> {
    let (l, r) = (e_lhcp.norm(), e_rhcp.norm());
    if l == 0.0 && r == 0.0 {
        return Err(Error::UndefinedPolarization);
    }
    let diff = (l - r).abs();
    if diff == 0.0 {
        return Ok(AR_CEILING_DB);
    }
    Ok((20.0 * ((l + r) / diff).log10()).min(AR_CEILING_DB))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldSample {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub u: f64,
    pub v: f64,
    pub e_theta: Complex64,
    pub e_phi: Complex64,
    pub e_lhcp: Complex64,
    pub e_rhcp: Complex64,
}

impl FarFieldSample {
    fn from_spectrum(theta_deg: f64, phi_deg: f64, s: &Spectrum) -> Self {
        let (th, ph) = (theta_deg.to_radians(), phi_deg.to_radians());
        let (e_theta, e_phi) = far_field_components(s.fx, s.fy, th, ph);
        let (e_lhcp, e_rhcp) = cp_decompose(e_theta, e_phi);
        Self {
            theta_deg,
            phi_deg,
            u: th.sin() * ph.cos(),
            v: th.sin() * ph.sin(),
            e_theta,
            e_phi,
            e_lhcp,
            e_rhcp,
        }
    }

    /// Largest of the four component magnitudes.
    pub fn peak_magnitude(&self) -> f64 {
        self.e_theta
            .norm()
            .max(self.e_phi.norm())
            .max(self.e_lhcp.norm())
            .max(self.e_rhcp.norm())
    }

    pub fn co_cross(&self, co: Handedness) -> (Complex64, Complex64) {
        match co {
            Handedness::Lhcp => (self.e_lhcp, self.e_rhcp),
            Handedness::Rhcp => (self.e_rhcp, self.e_lhcp),
        }
    }
}

/// Far-field samples over direction space (θ ≥ 0, φ in degrees).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    pub design: String,
    pub freq_ghz: f64,
    pub samples: Vec<FarFieldSample>,
}

fn wrap_phi(phi_deg: f64) -> f64 {
    let p = phi_deg.rem_euclid(360.0);
    if p >= 360.0 {
        0.0
    } else {
        p
    }
}

/// Directions covering the cuts `phi_cuts_deg` over θ ∈ [−90°, 90°]. Negative
/// θ is stored as `(|θ|, φ + 180°)`.
pub fn cut_directions(phi_cuts_deg: &[f64], step_deg: f64) -> Vec<(f64, f64)> {
    let n = (90.0 / step_deg).round() as usize;
    let mut out = Vec::with_capacity(phi_cuts_deg.len() * (2 * n + 1));
    for &phi in phi_cuts_deg {
        let front = wrap_phi(phi);
        let back = wrap_phi(phi + 180.0);
        for k in (1..=n).rev() {
            out.push((k as f64 * step_deg, back));
        }
        for k in 0..=n {
            out.push((k as f64 * step_deg, front));
        }
    }
    out
}

impl FarField {
    /// Far field in the directions `(theta_deg, phi_deg)` (θ ∈ [0°, 90°]).
    pub fn compute(ap: &ApertureField, design: &str, directions: &[(f64, f64)]) -> Result<Self> {
        for &(t, _) in directions {
            if !(0.0..=90.0).contains(&t) {
                return Err(Error::InvalidSample(format!(
                    "theta = {t} deg is outside [0, 90]"
                )));
            }
        }
        let uv: Vec<(f64, f64)> = directions
            .iter()
            .map(|&(t, p)| {
                let (t, p) = (t.to_radians(), p.to_radians());
                (t.sin() * p.cos(), t.sin() * p.sin())
            })
            .collect();
        let spectra = spectral_fields(ap, &uv)?;
        let samples = directions
            .iter()
            .zip(&spectra)
            .map(|(&(t, p), s)| FarFieldSample::from_spectrum(t, p, s))
            .collect();
        Ok(Self {
            design: design.to_string(),
            freq_ghz: ap.freq_ghz,
            samples,
        })
    }

    /// Far field on an `n × n` grid over `u, v ∈ [−1, 1]`, keeping only the
    /// visible samples `u² + v² ≤ 1`.
    pub fn compute_uv_grid(ap: &ApertureField, design: &str, n: usize) -> Result<Self> {
        let axis: Vec<f64> = if n < 2 {
            vec![0.0]
        } else {
            (0..n)
                .map(|k| -1.0 + 2.0 * k as f64 / (n - 1) as f64)
                .collect()
        };
        let grid = spectral_grid(ap, &axis, &axis)?;
        let mut samples = Vec::new();
        for (m, row) in grid.iter().enumerate() {
            for (k, s) in row.iter().enumerate() {
                let (u, v) = (axis[m], axis[k]);
                let rho2 = u * u + v * v;
                if rho2 > 1.0 {
                    continue;
                }
                let theta = rho2.sqrt().asin();
                let phi = if rho2 == 0.0 { 0.0 } else { v.atan2(u) };
                let mut sample =
                    FarFieldSample::from_spectrum(theta.to_degrees(), phi.to_degrees(), s);
                sample.u = u;
                sample.v = v;
                samples.push(sample);
            }
        }
        Ok(Self {
            design: design.to_string(),
            freq_ghz: ap.freq_ghz,
            samples,
        })
    }

    pub fn reference_magnitude(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.peak_magnitude())
            .fold(0.0, f64::max)
    }

    /// CSV in [`FARFIELD_HEADER`] layout; fields are normalized to the
    /// strongest component over all samples.
    pub fn to_csv(&self) -> String {
        let reference = self.reference_magnitude();
        let norm = if reference > 0.0 {
            1.0 / reference
        } else {
            1.0
        };
        let mut out = String::with_capacity(self.samples.len() * 160);
        out.push_str(FARFIELD_HEADER);
        out.push('\n');
        for s in &self.samples {
            let (et, ep) = (s.e_theta * norm, s.e_phi * norm);
            let ar = axial_ratio(s.e_lhcp, s.e_rhcp).unwrap_or(AR_CEILING_DB);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.theta_deg,
                s.phi_deg,
                et.re,
                et.im,
                ep.re,
                ep.im,
                to_db(s.e_lhcp.norm() * norm),
                to_db(s.e_rhcp.norm() * norm),
                ar
            );
        }
        out
    }

    /// Visible-space map CSV: `u,v,etheta_db,ephi_db,erhcp_db,elhcp_db`.
    pub fn to_uv_csv(&self) -> String {
        let reference = self.reference_magnitude();
        let norm = if reference > 0.0 {
            1.0 / reference
        } else {
            1.0
        };
        let mut out = String::from("u,v,etheta_db,ephi_db,erhcp_db,elhcp_db\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.u,
                s.v,
                to_db(s.e_theta.norm() * norm),
                to_db(s.e_phi.norm() * norm),
                to_db(s.e_rhcp.norm() * norm),
                to_db(s.e_lhcp.norm() * norm)
            );
        }
        out
    }
}

pub fn to_db(magnitude: f64) -> f64 {
    if magnitude > 0.0 {
        (20.0 * magnitude.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    ETheta,
    EPhi,
    Lhcp,
    Rhcp,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Lhcp,
        Component::Rhcp,
        Component::ETheta,
        Component::EPhi,
    ];

    pub fn co_pol(h: Handedness) -> Self {
        match h {
            Handedness::Lhcp => Component::Lhcp,
            Handedness::Rhcp => Component::Rhcp,
        }
    }

    fn of(&self, p: &CutPoint) -> Complex64 {
        match self {
            Component::ETheta => p.e_theta,
            Component::EPhi => p.e_phi,
            Component::Lhcp => p.e_lhcp,
            Component::Rhcp => p.e_rhcp,
        }
    }
}

/// Which half of a cut to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaSide {
    Positive,
    Negative,
    Both,
}

impl ThetaSide {
    pub fn of_angle(theta_deg: f64) -> Self {
        if theta_deg > 0.0 {
            ThetaSide::Positive
        } else if theta_deg < 0.0 {
            ThetaSide::Negative
        } else {
            ThetaSide::Both
        }
    }

    fn admits(&self, theta: f64) -> bool {
        match self {
            ThetaSide::Positive => theta > 0.0,
            ThetaSide::Negative => theta < 0.0,
            ThetaSide::Both => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPoint {
    /// Signed elevation along the cut.
    pub theta_deg: f64,
    pub e_theta: Complex64,
    pub e_phi: Complex64,
    pub e_lhcp: Complex64,
    pub e_rhcp: Complex64,
}

impl CutPoint {
    fn total(&self) -> f64 {
        (self.e_theta.norm_sqr() + self.e_phi.norm_sqr()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutPeak {
    pub theta_deg: f64,
    /// Level relative to the cut reference, dB.
    pub level_db: f64,
}

/// A 1-D pattern cut over signed θ ∈ [−90°, 90°].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCut {
    pub phi_cut_deg: f64,
    pub freq_ghz: f64,
    pub points: Vec<CutPoint>,
    /// Normalization: strongest component magnitude anywhere on the cut.
    pub reference: f64,
}

impl PatternCut {
    pub fn theta_deg(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.theta_deg).collect()
    }

    /// Normalized magnitude of `c` in dB, one value per point.
    pub fn db(&self, c: Component) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| to_db(c.of(p).norm() / self.reference))
            .collect()
    }

    pub fn peak(&self, c: Component, side: ThetaSide) -> Option<CutPeak> {
        self.points
            .iter()
            .filter(|p| side.admits(p.theta_deg))
            .max_by(|a, b| c.of(a).norm().total_cmp(&c.of(b).norm()))
            .map(|p| CutPeak {
                theta_deg: p.theta_deg,
                level_db: to_db(c.of(p).norm() / self.reference),
            })
    }

    pub fn point_at(&self, theta_deg: f64) -> Option<&CutPoint> {
        self.points.iter().min_by(|a, b| {
            (a.theta_deg - theta_deg)
                .abs()
                .total_cmp(&(b.theta_deg - theta_deg).abs())
        })
    }

    /// CSV with one row per θ: normalized dB of each component.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_deg,elhcp_db,erhcp_db,etheta_db,ephi_db,ar_db\n");
        for p in &self.points {
            let n = |c: Complex64| to_db(c.norm() / self.reference);
            let ar = axial_ratio(p.e_lhcp, p.e_rhcp).unwrap_or(AR_CEILING_DB);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.theta_deg,
                n(p.e_lhcp),
                n(p.e_rhcp),
                n(p.e_theta),
                n(p.e_phi),
                ar
            );
        }
        out
    }
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (wrap_phi(a) - wrap_phi(b)).abs();
    d < 1e-9 || (360.0 - d) < 1e-9
}

/// Extracts the cut at `phi_cut_deg`; samples at `φ + 180°` become negative θ.
pub fn pattern_cut(ff: &FarField, phi_cut_deg: f64) -> Result<PatternCut> {
    let mut points: Vec<CutPoint> = Vec::new();
    let mut has_front = false;
    for s in &ff.samples {
        let signed = if same_angle(s.phi_deg, phi_cut_deg) {
            has_front = true;
            s.theta_deg
        } else if same_angle(s.phi_deg, phi_cut_deg + 180.0) && s.theta_deg > 0.0 {
            -s.theta_deg
        } else {
            continue;
        };
        points.push(CutPoint {
            theta_deg: signed,
            e_theta: s.e_theta,
            e_phi: s.e_phi,
            e_lhcp: s.e_lhcp,
            e_rhcp: s.e_rhcp,
        });
    }
    if !has_front {
        let nearest = ff
            .samples
            .iter()
            .map(|s| s.phi_deg)
            .min_by(|a, b| {
                let da = (wrap_phi(*a - phi_cut_deg + 180.0) - 180.0).abs();
                let db = (wrap_phi(*b - phi_cut_deg + 180.0) - 180.0).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(f64::NAN);
        return Err(Error::MissingCut {
            requested: phi_cut_deg,
            nearest,
        });
    }
    points.sort_by(|a, b| a.theta_deg.total_cmp(&b.theta_deg));
    points.dedup_by(|a, b| a.theta_deg == b.theta_deg);
    let reference = points
        .iter()
        .map(|p| {
            p.e_theta
                .norm()
                .max(p.e_phi.norm())
                .max(p.e_lhcp.norm())
                .max(p.e_rhcp.norm())
        })
        .fold(0.0, f64::max);
    Ok(PatternCut {
        phi_cut_deg,
        freq_ghz: ff.freq_ghz,
        points,
        reference: if reference > 0.0 { reference } else { 1.0 },
    })
}

/// Statistics of `∠E_φ − ∠E_θ` inside a window of the cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRelation {
    pub center_deg: f64,
    pub half_width_deg: f64,
    /// Circular mean of the phase difference, degrees in (−180, 180].
    pub mean_deg: f64,
    /// Length of the mean resultant (1 = all samples agree).
    pub resultant: f64,
    /// Power ratio `Σ|E_φ|² / Σ|E_θ|²` over the window, dB.
    pub ephi_to_etheta_db: f64,
    pub samples: usize,
}

/// Phase relation in `center_deg ± half_width_deg`, using only samples within
/// 20 dB of the cut peak.
pub fn phase_relation(
    cut: &PatternCut,
    center_deg: f64,
    half_width_deg: f64,
) -> Result<PhaseRelation> {
    let threshold = cut.reference * 0.1;
    let mut acc = ZERO;
    let (mut p_theta, mut p_phi) = (0.0, 0.0);
    let mut n = 0usize;
    for p in &cut.points {
        if (p.theta_deg - center_deg).abs() > half_width_deg + 1e-9 || p.total() < threshold {
            continue;
        }
        let d = p.e_phi * p.e_theta.conj();
        let norm = d.norm();
        if norm > 0.0 {
            acc += d / norm;
        }
        p_theta += p.e_theta.norm_sqr();
        p_phi += p.e_phi.norm_sqr();
        n += 1;
    }
    if n == 0 {
        return Err(Error::LowSignal { center_deg });
    }
    let ratio = if p_theta > 0.0 {
        10.0 * (p_phi / p_theta).log10()
    } else {
        f64::INFINITY
    };
    Ok(PhaseRelation {
        center_deg,
        half_width_deg,
        mean_deg: acc.arg().to_degrees(),
        resultant: acc.norm() / n as f64,
        ephi_to_etheta_db: ratio,
        samples: n,
    })
}

/// Co-/cross-polar summary of one design on a cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossPolSummary {
    pub label: String,
    pub co_peak_deg: f64,
    /// Co-polar peak relative to the stronger of the two compared designs.
    pub co_peak_db: f64,
    /// Strongest cross-polar level within ±60°, same reference.
    pub max_cross_db: f64,
    pub max_cross_deg: f64,
    pub suppression_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossPolReport {
    pub phi_cut_deg: f64,
    pub co_pol: Handedness,
    pub window_deg: f64,
    pub proposed: CrossPolSummary,
    pub baseline: CrossPolSummary,
    /// `proposed.suppression − baseline.suppression`.
    pub suppression_delta_db: f64,
    /// `baseline.max_cross − proposed.max_cross`.
    pub cross_improvement_db: f64,
    /// `proposed.co_peak − baseline.co_peak`.
    pub co_peak_delta_db: f64,
}

/// Half-width of the cross-polar search window.
pub const CROSSPOL_WINDOW_DEG: f64 = 60.0;

/// Compares the co- and cross-polar patterns of two far fields on one cut.
pub fn crosspol_report(
    proposed: &FarField,
    baseline: &FarField,
    phi_cut_deg: f64,
    co_pol: Handedness,
) -> Result<CrossPolReport> {
    let a = pattern_cut(proposed, phi_cut_deg)?;
    let b = pattern_cut(baseline, phi_cut_deg)?;
    if a.theta_deg() != b.theta_deg() {
        return Err(Error::InvalidSample(
            "compared far fields use different theta sampling".into(),
        ));
    }
    let co = Component::co_pol(co_pol);
    let cross = Component::co_pol(co_pol.opposite());
    let co_max = |c: &PatternCut| c.points.iter().map(|p| co.of(p).norm()).fold(0.0, f64::max);
    let reference = co_max(&a).max(co_max(&b));
    let reference = if reference > 0.0 { reference } else { 1.0 };
    let summarize = |cut: &PatternCut, label: &str| {
        let co_pt = cut
            .points
            .iter()
            .max_by(|x, y| co.of(x).norm().total_cmp(&co.of(y).norm()))
            .expect("non-empty cut");
        let cross_pt = cut
            .points
            .iter()
            .filter(|p| p.theta_deg.abs() <= CROSSPOL_WINDOW_DEG)
            .max_by(|x, y| cross.of(x).norm().total_cmp(&cross.of(y).norm()))
            .expect("window is non-empty");
        let co_db = to_db(co.of(co_pt).norm() / reference);
        let cross_db = to_db(cross.of(cross_pt).norm() / reference);
        CrossPolSummary {
            label: label.to_string(),
            co_peak_deg: co_pt.theta_deg,
            co_peak_db: co_db,
            max_cross_db: cross_db,
            max_cross_deg: cross_pt.theta_deg,
            suppression_db: co_db - cross_db,
        }
    };
    let p = summarize(&a, &proposed.design);
    let q = summarize(&b, &baseline.design);
    Ok(CrossPolReport {
        phi_cut_deg,
        co_pol,
        window_deg: CROSSPOL_WINDOW_DEG,
        suppression_delta_db: p.suppression_db - q.suppression_db,
        cross_improvement_db: q.max_cross_db - p.max_cross_db,
        co_peak_delta_db: p.co_peak_db - q.co_peak_db,
        proposed: p,
        baseline: q,
    })
}

/// Beam metrics of a dual-polarized cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamMetrics {
    pub design: String,
    pub freq_ghz: f64,
    pub phi_cut_deg: f64,
    pub cp_handedness: Handedness,
    pub lhcp_peak_deg: f64,
    pub lhcp_peak_db: f64,
    pub rhcp_peak_deg: f64,
    pub rhcp_peak_db: f64,
    /// Co-polar CP peak on the CP side of the cut.
    pub cp_peak_deg: f64,
    /// `E_φ` peak on the linear side of the cut.
    pub lp_peak_deg: f64,
    pub lp_peak_db: f64,
    pub ar_cp_peak_db: f64,
    pub ar_lp_peak_db: f64,
    /// Co- to cross-polar CP ratio at the CP peak, dB.
    pub cp_suppression_db: f64,
    pub cp_window: Option<PhaseRelation>,
    pub lp_window: Option<PhaseRelation>,
}

/// Half-width of the phase-relation windows around each beam.
pub const PHASE_WINDOW_DEG: f64 = 5.0;

pub fn beam_metrics(
    cut: &PatternCut,
    design: &str,
    handedness: Handedness,
    theta_cp_deg: f64,
    theta_lp_deg: f64,
) -> Result<BeamMetrics> {
    let (cp_side, lp_side) = if theta_cp_deg.signum() != theta_lp_deg.signum() {
        (
            ThetaSide::of_angle(theta_cp_deg),
            ThetaSide::of_angle(theta_lp_deg),
        )
    } else {
        (ThetaSide::Both, ThetaSide::Both)
    };
    let missing = || Error::InvalidSample("cut has no samples on the requested side".into());
    let lhcp = cut.peak(Component::Lhcp, cp_side).ok_or_else(missing)?;
    let rhcp = cut.peak(Component::Rhcp, cp_side).ok_or_else(missing)?;
    let cp = match handedness {
        Handedness::Lhcp => lhcp,
        Handedness::Rhcp => rhcp,
    };
    let lp = cut.peak(Component::EPhi, lp_side).ok_or_else(missing)?;
    let cp_pt = cut.point_at(cp.theta_deg).ok_or_else(missing)?;
    let lp_pt = cut.point_at(lp.theta_deg).ok_or_else(missing)?;
    let (co, cross) = match handedness {
        Handedness::Lhcp => (cp_pt.e_lhcp, cp_pt.e_rhcp),
        Handedness::Rhcp => (cp_pt.e_rhcp, cp_pt.e_lhcp),
    };
    Ok(BeamMetrics {
        design: design.to_string(),
        freq_ghz: cut.freq_ghz,
        phi_cut_deg: cut.phi_cut_deg,
        cp_handedness: handedness,
        lhcp_peak_deg: lhcp.theta_deg,
        lhcp_peak_db: lhcp.level_db,
        rhcp_peak_deg: rhcp.theta_deg,
        rhcp_peak_db: rhcp.level_db,
        cp_peak_deg: cp.theta_deg,
        lp_peak_deg: lp.theta_deg,
        lp_peak_db: lp.level_db,
        ar_cp_peak_db: axial_ratio(cp_pt.e_lhcp, cp_pt.e_rhcp)?,
        ar_lp_peak_db: axial_ratio(lp_pt.e_lhcp, lp_pt.e_rhcp)?,
        cp_suppression_db: to_db(co.norm()) - to_db(cross.norm()),
        cp_window: phase_relation(cut, cp.theta_deg, PHASE_WINDOW_DEG).ok(),
        lp_window: phase_relation(cut, lp.theta_deg, PHASE_WINDOW_DEG).ok(),
    })
}
