//! Slotted-patch realization of an impedance field.
//!
//! Each cell becomes a square patch of width `w = p − g` with a rectangular
//! slot through its center. The gap comes from inverting the unit-cell
//! `x_eff(g)` curve at the cell's maximum effective reactance; the slot is
//! rotated to the direction of that maximum.

use std::fmt::{self, Write as _};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hologram::{ImpedanceCell, TensorImpedanceField};
use crate::unitcell::ZgCurve;
use crate::{Error, Result};

pub const LAYOUT_CSV_HEADER: [&str; 5] = ["i", "j", "g_mm", "w_mm", "slot_angle_deg"];

/// One CSV row: `(i, j, g_mm, w_mm, slot_angle_deg)`.
pub type LayoutRow = (usize, usize, f64, f64, f64);

/// Slot size as a fraction of the patch width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotTemplate {
    pub length_ratio: f64,
    pub width_ratio: f64,
}

impl Default for SlotTemplate {
    fn default() -> Self {
        Self {
            length_ratio: 0.75,
            width_ratio: 0.12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClampPolicy {
    /// Out-of-range reactances snap to the nearest curve end, with a warning.
    #[default]
    Clamp,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub i: usize,
    pub j: usize,
    pub x_mm: f64,
    pub y_mm: f64,
    pub pitch_mm: f64,
    pub gap_mm: f64,
    pub patch_width_mm: f64,
    /// Slot orientation in [0, 180).
    pub slot_angle_deg: f64,
    pub slot_length_mm: f64,
    pub slot_width_mm: f64,
    /// Isotropic cell: the slot angle carries no information.
    pub degenerate: bool,
    /// The gap was clamped to the end of the curve.
    pub clamped: bool,
}

fn fold_deg(angle_deg: f64) -> f64 {
    let a = angle_deg.rem_euclid(180.0);
    if a >= 180.0 {
        0.0
    } else {
        a
    }
}

fn realize(
    cell: &ImpedanceCell,
    pitch_mm: f64,
    curve: &ZgCurve,
    policy: ClampPolicy,
    slot: SlotTemplate,
) -> Result<CellGeometry> {
    let (gap_mm, clamped) = match curve.invert(cell.x_eff_max) {
        Ok(g) => (g, false),
        Err(Error::OutOfRange { requested, nearest }) if policy == ClampPolicy::Clamp => {
            log::warn!(
                "cell ({}, {}): x_eff {requested:.3} ohm outside the curve; clamped to {nearest:.3} ohm",
                cell.i,
                cell.j
            );
            (curve.invert(nearest)?, true)
        }
        Err(e) => return Err(e),
    };
    if !(gap_mm > 0.0 && gap_mm < pitch_mm) {
        return Err(Error::InvalidGeometry(format!(
            "cell ({}, {}): gap {gap_mm} mm does not fit the {pitch_mm} mm pitch",
            cell.i, cell.j
        )));
    }
    let w = pitch_mm - gap_mm;
    Ok(CellGeometry {
        i: cell.i,
        j: cell.j,
        x_mm: cell.x_m * 1e3,
        y_mm: cell.y_m * 1e3,
        pitch_mm,
        gap_mm,
        patch_width_mm: w,
        slot_angle_deg: if cell.degenerate {
            0.0
        } else {
            fold_deg(cell.direction_rad.to_degrees())
        },
        slot_length_mm: slot.length_ratio * w,
        slot_width_mm: slot.width_ratio * w,
        degenerate: cell.degenerate,
        clamped,
    })
}

/// Geometry of a single cell on a lattice of pitch `pitch_mm`.
pub fn realize_cell(
    cell: &ImpedanceCell,
    pitch_mm: f64,
    curve: &ZgCurve,
    policy: ClampPolicy,
) -> Result<CellGeometry> {
    realize(cell, pitch_mm, curve, policy, SlotTemplate::default())
}

/// Realized board: one [`CellGeometry`] per field cell, same ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub name: String,
    pub n_cells: usize,
    pub pitch_mm: f64,
    pub slot: SlotTemplate,
    pub cells: Vec<CellGeometry>,
}

pub fn realize_layout(
    field: &TensorImpedanceField,
    curve: &ZgCurve,
    policy: ClampPolicy,
) -> Result<Layout> {
    realize_layout_with(field, curve, policy, SlotTemplate::default())
}

pub fn realize_layout_with(
    field: &TensorImpedanceField,
    curve: &ZgCurve,
    policy: ClampPolicy,
    slot: SlotTemplate,
) -> Result<Layout> {
    let pitch_mm = field.pitch_m() * 1e3;
    let (g_lo, g_hi) = curve.gap_range();
    if g_hi >= pitch_mm || g_lo <= 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "curve gaps [{g_lo}, {g_hi}] mm do not fit the {pitch_mm} mm pitch"
        )));
    }
    let cells = field
        .cells()
        .par_iter()
        .map(|c| realize(c, pitch_mm, curve, policy, slot))
        .collect::<Result<Vec<_>>>()?;
    let clamped = cells.iter().filter(|c| c.clamped).count();
    if clamped > 0 {
        log::warn!(
            "{clamped} of {} cells were clamped to the curve range",
            cells.len()
        );
    }
    Ok(Layout {
        name: field.name.clone(),
        n_cells: field.n_cells(),
        pitch_mm,
        slot,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutFormat {
    Json,
    Csv,
    Svg,
}

impl LayoutFormat {
    pub const SUPPORTED: &'static str = "json, csv, svg";
    pub const ALL: [LayoutFormat; 3] = [LayoutFormat::Json, LayoutFormat::Csv, LayoutFormat::Svg];

    pub fn extension(&self) -> &'static str {
        match self {
            LayoutFormat::Json => "json",
            LayoutFormat::Csv => "csv",
            LayoutFormat::Svg => "svg",
        }
    }
}

impl FromStr for LayoutFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            _ => Err(Error::UnsupportedFormat {
                requested: s.to_string(),
                supported: Self::SUPPORTED,
            }),
        }
    }
}

impl fmt::Display for LayoutFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl Layout {
    /// Board side length in mm.
    pub fn extent_mm(&self) -> f64 {
        self.n_cells as f64 * self.pitch_mm
    }

    pub fn cell(&self, i: usize, j: usize) -> &CellGeometry {
        &self.cells[j * self.n_cells + i]
    }

    fn check_complete(&self) -> Result<()> {
        if self.cells.len() != self.n_cells * self.n_cells {
            return Err(Error::InvalidGeometry(format!(
                "layout has {} cells, expected {}",
                self.cells.len(),
                self.n_cells * self.n_cells
            )));
        }
        Ok(())
    }

    pub fn export(&self, format: LayoutFormat) -> Result<String> {
        self.check_complete()?;
        Ok(match format {
            LayoutFormat::Json => self.to_json(),
            LayoutFormat::Csv => self.to_csv(),
            LayoutFormat::Svg => self.to_svg(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes") + "\n"
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let layout: Self = serde_json::from_str(text).map_err(|e| Error::Json {
            path: source.to_string(),
            source: e,
        })?;
        layout.check_complete()?;
        Ok(layout)
    }

    pub fn to_csv(&self) -> String {
        let mut out = LAYOUT_CSV_HEADER.join(",");
        out.push('\n');
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                c.i, c.j, c.gap_mm, c.patch_width_mm, c.slot_angle_deg
            );
        }
        out
    }

    /// SVG in board coordinates: 1 user unit = 1 mm, origin at the board
    /// corner, y pointing up on the board (down in the image).
    pub fn to_svg(&self) -> String {
        let ext = self.extent_mm();
        let half = ext / 2.0;
        let mut out = String::with_capacity(self.cells.len() * 260);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {ext} {ext}" width="{ext}mm" height="{ext}mm">"#
        );
        let _ = writeln!(
            out,
            r##"<rect x="0" y="0" width="{ext}" height="{ext}" fill="#1b5e20"/>"##
        );
        for c in &self.cells {
            let cx = c.x_mm + half;
            let cy = half - c.y_mm;
            let w = c.patch_width_mm;
            let (sl, sw) = (c.slot_length_mm, c.slot_width_mm);
            // SVG rotation is clockwise because the image y axis points down.
            let _ = writeln!(
                out,
                concat!(
                    r#"<g id="c{}_{}" transform="translate({:.4} {:.4})">"#,
                    r##"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="#d4a017"/>"##,
                    r##"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="#1b5e20" transform="rotate({:.4})"/>"##,
                    "</g>"
                ),
                c.i,
                c.j,
                cx,
                cy,
                -w / 2.0,
                -w / 2.0,
                w,
                w,
                -sl / 2.0,
                -sw / 2.0,
                sl,
                sw,
                -c.slot_angle_deg
            );
        }
        out.push_str("</svg>\n");
        out
    }

    /// Parses the CSV export back into rows.
    pub fn rows_from_csv<R: Read>(reader: R, source: &str) -> Result<Vec<LayoutRow>> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header = rdr.headers().map_err(|e| Error::Parse {
            path: source.to_string(),
            line: 1,
            message: e.to_string(),
        })?;
        if header.iter().collect::<Vec<_>>() != LAYOUT_CSV_HEADER {
            return Err(Error::Parse {
                path: source.to_string(),
                line: 1,
                message: format!("expected header {}", LAYOUT_CSV_HEADER.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let line = (k + 2) as u64;
            let err = |message: String| Error::Parse {
                path: source.to_string(),
                line,
                message,
            };
            let rec = rec.map_err(|e| err(e.to_string()))?;
            let int = |idx: usize| {
                rec[idx]
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| err(format!("{}: {e}", LAYOUT_CSV_HEADER[idx])))
            };
            let num = |idx: usize| {
                rec[idx]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| err(format!("{}: {e}", LAYOUT_CSV_HEADER[idx])))
            };
            rows.push((int(0)?, int(1)?, num(2)?, num(3)?, num(4)?));
        }
        Ok(rows)
    }

    /// Writes the requested formats as `<dir>/layout.<ext>`.
    pub fn write_all(
        &self,
        dir: &Path,
        formats: &[LayoutFormat],
    ) -> Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        for f in formats {
            let path = dir.join(format!("layout.{}", f.extension()));
            std::fs::write(&path, self.export(*f)?).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
