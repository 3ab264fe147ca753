//! Slotted-patch layout of a Janus design, exported in every format.

use janus_holo::hologram::synthesize_field;
use janus_holo::layout::{realize_layout, ClampPolicy, LayoutFormat};
use janus_holo::unitcell::{build_zg_curve, MonotonePolicy, SyntheticSweep};
use janus_holo::DesignSpec;

fn main() -> janus_holo::Result<()> {
    let spec = DesignSpec::design_i();
    let f = spec.center_freq_ghz();
    let curve = build_zg_curve(
        &SyntheticSweep::default().table(&[f])?,
        f,
        MonotonePolicy::Reject,
    )?;
    let layout = realize_layout(&synthesize_field(&spec)?, &curve, ClampPolicy::Clamp)?;

    let (lo, hi) = layout
        .cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
            (a.min(c.gap_mm), b.max(c.gap_mm))
        });
    println!(
        "{}x{} cells, {} mm board, gaps {lo:.3}..{hi:.3} mm",
        layout.n_cells,
        layout.n_cells,
        layout.extent_mm()
    );

    let dir = std::env::temp_dir().join("janus_layout");
    std::fs::create_dir_all(&dir).expect("create output dir");
    for path in layout.write_all(&dir, &LayoutFormat::ALL)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
