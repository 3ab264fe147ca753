//! Janus impedance field of a design, with per-region statistics.

use janus_holo::hologram::{synthesize_field, Region};
use janus_holo::DesignSpec;

fn main() -> janus_holo::Result<()> {
    let spec = DesignSpec::design_i();
    let field = synthesize_field(&spec)?;

    for region in [Region::CpHalf, Region::LpHalf, Region::FeedExcluded] {
        let cells: Vec<_> = field
            .cells()
            .iter()
            .filter(|c| c.region == region)
            .collect();
        let (lo, hi) = cells
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), c| {
                (a.min(c.x_eff_max), b.max(c.x_eff_max))
            });
        println!(
            "{:14} {:5} cells, X_eff-max {lo:.1}..{hi:.1} ohm",
            region.as_str(),
            cells.len()
        );
    }

    let c = field.cell(50, 50);
    println!(
        "cell (50, 50) at ({:.1}, {:.1}) mm: Zxx {:.1}, Zxy {:.1}, Zyy {:.1} ohm, slot at {:.1} deg",
        c.x_m * 1e3,
        c.y_m * 1e3,
        c.z.xx,
        c.z.xy,
        c.z.yy,
        c.direction_rad.to_degrees()
    );

    let path = std::env::temp_dir().join("janus_field.csv");
    std::fs::write(&path, field.to_csv()).expect("write field");
    println!("field written to {}", path.display());
    Ok(())
}
