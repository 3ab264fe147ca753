//! Effective reactance versus propagation angle for an anisotropic cell.

use janus_holo::hologram::{dispersion_roots, max_impedance_direction, ReactanceTensor};

fn main() -> janus_holo::Result<()> {
    let z = ReactanceTensor::new(260.0, 60.0, 180.0);
    let dir = max_impedance_direction(&z);
    println!(
        "principal direction {:.2} deg, X_eff-max {:.2} ohm",
        dir.angle_rad.to_degrees(),
        dir.x_eff_max
    );
    for deg in (0..180).step_by(15) {
        let roots = dispersion_roots(&z, (deg as f64).to_radians())?;
        match roots.effective_reactance() {
            Some(x) => println!("theta_k = {deg:3} deg  X_eff = {x:7.2} ohm"),
            None => println!("theta_k = {deg:3} deg  no bound mode"),
        }
    }
    Ok(())
}
