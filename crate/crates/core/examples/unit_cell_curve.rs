//! Eigenmode phase sweep to an invertible reactance-versus-gap curve.

use janus_holo::unitcell::{build_zg_curve, invert_zg, MonotonePolicy, SyntheticSweep};

fn main() -> janus_holo::Result<()> {
    let sweep = SyntheticSweep::default();
    let table = sweep.table(&[11.5, 11.75, 12.0])?;
    let curve = build_zg_curve(&table, 11.75, MonotonePolicy::Reject)?;

    let (x_min, x_max) = curve.reactance_range();
    println!(
        "{} knots, x_eff from {x_min:.1} to {x_max:.1} ohm",
        curve.knots().len()
    );
    for x in [150.0, 226.0, 300.0, 397.0] {
        println!(
            "x_eff = {x:6.1} ohm  ->  g = {:.4} mm",
            invert_zg(&curve, x)?
        );
    }
    match invert_zg(&curve, 900.0) {
        Err(e) => println!("out of range: {e}"),
        Ok(g) => println!("unexpected gap {g}"),
    }
    Ok(())
}
