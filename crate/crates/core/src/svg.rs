//! Minimal SVG heatmaps for impedance and far-field maps.

use std::fmt::Write as _;

/// Colormap anchors, low to high. Values are mapped linearly from
/// `[min, max]` onto `[0, 1]` and colors are interpolated linearly in RGB
/// between neighbouring anchors.
const ANCHORS: [(f64, [f64; 3]); 5] = [
    (0.00, [68.0, 1.0, 84.0]),
    (0.25, [59.0, 82.0, 139.0]),
    (0.50, [33.0, 145.0, 140.0]),
    (0.75, [94.0, 201.0, 98.0]),
    (1.00, [253.0, 231.0, 37.0]),
];

fn color(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let k = ANCHORS
        .iter()
        .position(|a| a.0 >= t)
        .unwrap_or(ANCHORS.len() - 1)
        .max(1);
    let (t0, c0) = ANCHORS[k - 1];
    let (t1, c1) = ANCHORS[k];
    let s = (t - t0) / (t1 - t0);
    let ch = |i: usize| (c0[i] + s * (c1[i] - c0[i])).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(0), ch(1), ch(2))
}

/// Heatmap of an `nx × ny` grid. `values[j * nx + i]` is drawn at column `i`,
/// row `j` counted from the bottom; `None` cells are left blank. `range`
/// overrides the color limits, which otherwise span the finite values.
pub fn heatmap(
    title: &str,
    unit: &str,
    nx: usize,
    ny: usize,
    values: &[Option<f64>],
    range: Option<(f64, f64)>,
) -> String {
    let (lo, hi) = range.unwrap_or_else(|| {
        values
            .iter()
            .flatten()
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            })
    });
    let (lo, hi) = if lo.is_finite() && hi.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    };
    let span = if hi > lo { hi - lo } else { 1.0 };

    let bar = 24usize;
    let (w, h) = (nx + bar + 40, ny + 16);
    let mut out = String::with_capacity(nx * ny * 64);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{}" height="{}" shape-rendering="crispEdges">"#,
        w * 4,
        h * 4
    );
    let _ = writeln!(
        out,
        "<!-- {title}: linear color scale, {lo} {unit} (dark purple) to {hi} {unit} (yellow) -->"
    );
    let _ = writeln!(
        out,
        r#"<text x="1" y="10" font-size="8">{title} [{unit}]</text>"#
    );
    for j in 0..ny {
        let row = 16 + (ny - 1 - j);
        for i in 0..nx {
            if let Some(v) = values.get(j * nx + i).copied().flatten() {
                let _ = writeln!(
                    out,
                    r#"<rect x="{i}" y="{row}" width="1" height="1" fill="{}"/>"#,
                    color((v - lo) / span)
                );
            }
        }
    }
    let x0 = nx + 4;
    for k in 0..ny {
        let t = 1.0 - k as f64 / (ny.max(2) - 1) as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x0}" y="{}" width="6" height="1" fill="{}"/>"#,
            16 + k,
            color(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-size="5">{hi:.4}</text>"#,
        x0 + 8
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="5">{lo:.4}</text>"#,
        x0 + 8,
        16 + ny
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_ends() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#440154");
    }

    #[test]
    fn blank_cells_are_skipped() {
        let svg = heatmap("t", "dB", 2, 1, &[Some(1.0), None], None);
        assert_eq!(svg.matches(r#"width="1" height="1""#).count(), 1);
        assert!(svg.contains("linear color scale"));
    }
}
