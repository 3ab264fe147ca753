//! Unit-cell characterization: eigenmode phase sweeps to effective impedance.
//!
//! An external eigenmode solver reports, for each gap length `g` and
//! frequency, the unit-cell phase advance along x and y. This module turns
//! those phases into the in-plane surface wavenumber, then into the
//! maximum effective surface reactance, and keeps the resulting monotone
//! `x_eff(g)` relation as a [`ZgCurve`] that can be inverted during layout.
//!
//! Sign convention: a bound surface wave has `k_t > k_0` and decays away from
//! the surface with `k_z = -j sqrt(k_t^2 - k_0^2)`'s decaying branch. The
//! surface is inductive and the curve stores the positive reactance
//! magnitude `X = Z0 sqrt(k_t^2 - k_0^2) / k_0`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{free_space_wavenumber, Error, Result, Z0};

/// Header of the dispersion sweep CSV.
pub const DISPERSION_HEADER: [&str; 4] = ["g_mm", "freq_ghz", "phi_x_rad", "phi_y_rad"];

/// Header of the exported curve CSV.
pub const CURVE_HEADER: [&str; 2] = ["g_mm", "x_eff_ohm"];

/// Absolute tolerance used when selecting table rows by frequency.
const FREQ_MATCH_TOL_GHZ: f64 = 1e-6;

/// Converts unit-cell phase advances to in-plane wavevector components.
///
/// `p_m` is the lattice period in metres.
pub fn phases_to_wavevector(phi_x: f64, phi_y: f64, p_m: f64) -> Result<(f64, f64)> {
    if !(p_m > 0.0) || !p_m.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "periodicity must be positive, got {p_m} m"
        )));
    }
    Ok((phi_x / p_m, phi_y / p_m))
}

pub fn transverse_wavenumber(k_x: f64, k_y: f64) -> f64 {
    k_x.hypot(k_y)
}

/// Effective reactance magnitude (ohm) of a bound surface wave with
/// transverse wavenumber `k_t` at free-space wavenumber `k_0`.
pub fn effective_impedance(k_t: f64, k_0: f64) -> Result<f64> {
    if !(k_0 > 0.0) || !k_0.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "free-space wavenumber must be positive, got {k_0}"
        )));
    }
    if k_t < k_0 {
        return Err(Error::FastWave { k_t, k_0 });
    }
    // (k_t - k_0)(k_t + k_0) keeps the k_t = k_0 case exactly zero.
    let alpha = ((k_t - k_0) * (k_t + k_0)).sqrt();
    Ok(Z0 * alpha / k_0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub gap_mm: f64,
    pub freq_ghz: f64,
    pub phi_x_rad: f64,
    pub phi_y_rad: f64,
}

/// Raw eigenmode phase sweep for one unit-cell family.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionTable {
    period_mm: f64,
    rows: Vec<DispersionRow>,
}

#[derive(Debug, Deserialize)]
struct Sidecar {
    p_mm: f64,
}

impl DispersionTable {
    pub fn new(period_mm: f64, rows: Vec<DispersionRow>) -> Result<Self> {
        if !(period_mm > 0.0) || !period_mm.is_finite() {
            return Err(Error::InvalidTable(format!(
                "periodicity must be positive, got {period_mm} mm"
            )));
        }
        let mut seen = HashSet::new();
        for row in &rows {
            if !(row.gap_mm > 0.0 && row.gap_mm < period_mm) {
                return Err(Error::InvalidTable(format!(
                    "gap {} mm is outside (0, {period_mm}) mm",
                    row.gap_mm
                )));
            }
            if ![row.freq_ghz, row.phi_x_rad, row.phi_y_rad]
                .iter()
                .all(|v| v.is_finite())
            {
                return Err(Error::InvalidTable(format!(
                    "non-finite value in row for g = {} mm",
                    row.gap_mm
                )));
            }
            if !seen.insert((row.gap_mm.to_bits(), row.freq_ghz.to_bits())) {
                return Err(Error::InvalidTable(format!(
                    "duplicate row for g = {} mm at {} GHz",
                    row.gap_mm, row.freq_ghz
                )));
            }
        }
        Ok(Self { period_mm, rows })
    }

    pub fn period_mm(&self) -> f64 {
        self.period_mm
    }

    pub fn rows(&self) -> &[DispersionRow] {
        &self.rows
    }

    /// Parses the sweep CSV. `source` names the input in error messages.
    pub fn from_csv_reader<R: Read>(reader: R, source: &str, period_mm: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let parse_err = |line: u64, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let headers = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != DISPERSION_HEADER {
            return Err(parse_err(
                1,
                format!(
                    "expected header `{}`, found `{}`",
                    DISPERSION_HEADER.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                parse_err(line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let vals = parse_floats(&record, 4).map_err(|m| parse_err(line, m))?;
            rows.push(DispersionRow {
                gap_mm: vals[0],
                freq_ghz: vals[1],
                phi_x_rad: vals[2],
                phi_y_rad: vals[3],
            });
        }
        Self::new(period_mm, rows)
    }

    /// Reads a sweep file. Without an explicit periodicity the sidecar
    /// `<file>.json` (`{"p_mm": ...}`) next to the CSV is consulted.
    pub fn read(path: &Path, period_mm: Option<f64>) -> Result<Self> {
        let period_mm = match period_mm {
            Some(p) => p,
            None => {
                let sidecar = path.with_extension("json");
                let text = std::fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
                let s: Sidecar = serde_json::from_str(&text).map_err(|e| Error::Json {
                    path: sidecar.display().to_string(),
                    source: e,
                })?;
                s.p_mm
            }
        };
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, &path.display().to_string(), period_mm)
    }

    pub fn to_csv(&self) -> String {
        let mut out = DISPERSION_HEADER.join(",");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.gap_mm, r.freq_ghz, r.phi_x_rad, r.phi_y_rad
            );
        }
        out
    }
}

fn parse_floats(record: &csv::StringRecord, n: usize) -> std::result::Result<Vec<f64>, String> {
    if record.len() != n {
        return Err(format!("expected {n} fields, found {}", record.len()));
    }
    record
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<f64>()
                .map_err(|_| format!("field {} is not a number: `{s}`", i + 1))
        })
        .collect()
}

/// How `build_zg_curve` treats sweeps that are not strictly decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonotonePolicy {
    #[default]
    Reject,
    /// Pool adjacent violators into a decreasing fit; each pooled block
    /// becomes one knot at its mean gap.
    Isotonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZgKnot {
    pub gap_mm: f64,
    pub x_eff_ohm: f64,
}

/// Piecewise-linear `x_eff(g)` relation, strictly decreasing in `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZgCurve {
    knots: Vec<ZgKnot>,
}

impl ZgCurve {
    pub fn new(knots: Vec<ZgKnot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "a curve needs at least 2 knots, got {}",
                knots.len()
            )));
        }
        for k in &knots {
            if !k.gap_mm.is_finite() || !k.x_eff_ohm.is_finite() || k.x_eff_ohm < 0.0 {
                return Err(Error::InvalidTable(format!(
                    "invalid knot (g = {}, x_eff = {})",
                    k.gap_mm, k.x_eff_ohm
                )));
            }
        }
        if knots.windows(2).any(|w| w[1].gap_mm <= w[0].gap_mm) {
            return Err(Error::InvalidTable(
                "knots must be sorted by strictly increasing gap".into(),
            ));
        }
        let violations = monotone_violations(&knots);
        if !violations.is_empty() {
            return Err(Error::NonMonotone { violations });
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[ZgKnot] {
        &self.knots
    }

    /// Smallest and largest reactance on the curve.
    pub fn reactance_range(&self) -> (f64, f64) {
        (
            self.knots[self.knots.len() - 1].x_eff_ohm,
            self.knots[0].x_eff_ohm,
        )
    }

    pub fn gap_range(&self) -> (f64, f64) {
        (
            self.knots[0].gap_mm,
            self.knots[self.knots.len() - 1].gap_mm,
        )
    }

    /// Reactance at gap `g_mm`, linear between knots.
    pub fn reactance_at(&self, g_mm: f64) -> Result<f64> {
        let (lo, hi) = self.gap_range();
        if !(g_mm >= lo && g_mm <= hi) {
            return Err(Error::InvalidGeometry(format!(
                "gap {g_mm} mm outside curve range [{lo}, {hi}] mm"
            )));
        }
        let idx = self.knots.partition_point(|k| k.gap_mm <= g_mm);
        if idx == 0 {
            return Ok(self.knots[0].x_eff_ohm);
        }
        let a = self.knots[idx - 1];
        if a.gap_mm == g_mm || idx == self.knots.len() {
            return Ok(a.x_eff_ohm);
        }
        let b = self.knots[idx];
        let t = (g_mm - a.gap_mm) / (b.gap_mm - a.gap_mm);
        Ok(a.x_eff_ohm + t * (b.x_eff_ohm - a.x_eff_ohm))
    }

    /// Gap that realizes reactance `x_eff` (the inverse of [`Self::reactance_at`]).
    pub fn invert(&self, x_eff: f64) -> Result<f64> {
        let (x_min, x_max) = self.reactance_range();
        if x_eff.is_nan() || x_eff > x_max || x_eff < x_min {
            let nearest = if x_eff > x_max { x_max } else { x_min };
            return Err(Error::OutOfRange {
                requested: x_eff,
                nearest,
            });
        }
        // Reactance decreases along the knot list: first knot with x <= x_eff.
        let idx = self.knots.partition_point(|k| k.x_eff_ohm > x_eff);
        let b = self.knots[idx];
        if b.x_eff_ohm == x_eff {
            return Ok(b.gap_mm);
        }
        let a = self.knots[idx - 1];
        let t = (a.x_eff_ohm - x_eff) / (a.x_eff_ohm - b.x_eff_ohm);
        Ok(a.gap_mm + t * (b.gap_mm - a.gap_mm))
    }

    pub fn to_csv(&self) -> String {
        let mut out = CURVE_HEADER.join(",");
        out.push('\n');
        for k in &self.knots {
            let _ = writeln!(out, "{},{}", k.gap_mm, k.x_eff_ohm);
        }
        out
    }

    pub fn from_csv_reader<R: Read>(reader: R, source: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let parse_err = |line: u64, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let headers = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != CURVE_HEADER {
            return Err(parse_err(
                1,
                format!("expected header `{}`", CURVE_HEADER.join(",")),
            ));
        }
        let mut knots = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| {
                parse_err(e.position().map(|p| p.line()).unwrap_or(0), e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let v = parse_floats(&record, 2).map_err(|m| parse_err(line, m))?;
            knots.push(ZgKnot {
                gap_mm: v[0],
                x_eff_ohm: v[1],
            });
        }
        Self::new(knots)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file, &path.display().to_string())
    }
}

/// Free function form of [`ZgCurve::invert`].
pub fn invert_zg(curve: &ZgCurve, x_eff: f64) -> Result<f64> {
    curve.invert(x_eff)
}

fn monotone_violations(knots: &[ZgKnot]) -> Vec<(f64, f64)> {
    knots
        .windows(2)
        .filter(|w| w[1].x_eff_ohm >= w[0].x_eff_ohm)
        .map(|w| (w[1].gap_mm, w[1].x_eff_ohm))
        .collect()
}

/// Effective reactance of one sweep row.
pub fn row_reactance(row: &DispersionRow, period_mm: f64) -> Result<f64> {
    let (kx, ky) = phases_to_wavevector(row.phi_x_rad, row.phi_y_rad, period_mm * 1e-3)?;
    let k_t = transverse_wavenumber(kx, ky);
    effective_impedance(k_t, free_space_wavenumber(row.freq_ghz))
}

/// Builds the `x_eff(g)` curve from the sweep rows at `freq_ghz`.
pub fn build_zg_curve(
    table: &DispersionTable,
    freq_ghz: f64,
    policy: MonotonePolicy,
) -> Result<ZgCurve> {
    let mut knots = table
        .rows
        .iter()
        .filter(|r| (r.freq_ghz - freq_ghz).abs() <= FREQ_MATCH_TOL_GHZ)
        .map(|r| {
            Ok(ZgKnot {
                gap_mm: r.gap_mm,
                x_eff_ohm: row_reactance(r, table.period_mm)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if knots.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} row(s) at {freq_ghz} GHz, need at least 2",
            knots.len()
        )));
    }
    knots.sort_by(|a, b| a.gap_mm.total_cmp(&b.gap_mm));
    let violations = monotone_violations(&knots);
    if violations.is_empty() {
        return ZgCurve::new(knots);
    }
    match policy {
        MonotonePolicy::Reject => Err(Error::NonMonotone { violations }),
        MonotonePolicy::Isotonic => {
            let pooled = isotonic_decreasing(&knots);
            if pooled.len() < 2 {
                return Err(Error::InsufficientData(
                    "isotonic fit collapsed the sweep to a single knot".into(),
                ));
            }
            ZgCurve::new(pooled)
        }
    }
}

/// Pool-adjacent-violators fit of a strictly decreasing sequence.
fn isotonic_decreasing(knots: &[ZgKnot]) -> Vec<ZgKnot> {
    // (sum_g, sum_x, count)
    let mut blocks: Vec<(f64, f64, f64)> = Vec::with_capacity(knots.len());
    for k in knots {
        blocks.push((k.gap_mm, k.x_eff_ohm, 1.0));
        while blocks.len() >= 2 {
            let (g1, x1, n1) = blocks[blocks.len() - 1];
            let (g0, x0, n0) = blocks[blocks.len() - 2];
            if x0 / n0 > x1 / n1 {
                break;
            }
            blocks.truncate(blocks.len() - 2);
            blocks.push((g0 + g1, x0 + x1, n0 + n1));
        }
    }
    blocks
        .into_iter()
        .map(|(g, x, n)| ZgKnot {
            gap_mm: g / n,
            x_eff_ohm: x / n,
        })
        .collect()
}

/// Parameters of the bundled synthetic sweep generator.
///
/// The generator is a power law `x(g) = x_min_gap * (g / g_min)^(-b)` chosen
/// to pass through both end points, giving the decreasing, convex shape
/// typical of slotted-patch cells. It is synthetic test data, not a unit-cell
/// model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSweep {
    pub period_mm: f64,
    pub gap_min_mm: f64,
    pub gap_max_mm: f64,
    pub x_at_gap_min_ohm: f64,
    pub x_at_gap_max_ohm: f64,
    pub n_gaps: usize,
}

impl Default for SyntheticSweep {
    fn default() -> Self {
        Self {
            period_mm: 3.0,
            gap_min_mm: 0.1,
            gap_max_mm: 2.0,
            x_at_gap_min_ohm: 480.0,
            x_at_gap_max_ohm: 120.0,
            n_gaps: 20,
        }
    }
}

impl SyntheticSweep {
    pub fn reactance(&self, g_mm: f64) -> f64 {
        let b = (self.x_at_gap_min_ohm / self.x_at_gap_max_ohm).ln()
            / (self.gap_max_mm / self.gap_min_mm).ln();
        self.x_at_gap_min_ohm * (g_mm / self.gap_min_mm).powf(-b)
    }

    pub fn gaps(&self) -> Vec<f64> {
        let n = self.n_gaps.max(2);
        (0..n)
            .map(|i| {
                self.gap_min_mm + (self.gap_max_mm - self.gap_min_mm) * i as f64 / (n - 1) as f64
            })
            .collect()
    }

    /// Phase sweep at each of `freqs_ghz`, with the slot along x so that the
    /// whole phase advance appears in `phi_x`.
    pub fn table(&self, freqs_ghz: &[f64]) -> Result<DispersionTable> {
        let p_m = self.period_mm * 1e-3;
        let mut rows = Vec::new();
        for &f in freqs_ghz {
            let k0 = free_space_wavenumber(f);
            for g in self.gaps() {
                let n = (1.0 + (self.reactance(g) / Z0).powi(2)).sqrt();
                rows.push(DispersionRow {
                    gap_mm: g,
                    freq_ghz: f,
                    phi_x_rad: n * k0 * p_m,
                    phi_y_rad: 0.0,
                });
            }
        }
        DispersionTable::new(self.period_mm, rows)
    }
}
