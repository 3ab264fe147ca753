//! Beam angles and axial ratio of the three preset designs across the band.

use janus_holo::aperture::{aperture_fields, beam_metrics, cut_directions, pattern_cut, FarField};
use janus_holo::hologram::synthesize_field;
use janus_holo::DesignSpec;

fn main() -> janus_holo::Result<()> {
    let dirs = cut_directions(&[0.0], 0.5);
    println!("design       f/GHz   CP/deg  AR/dB   LP/deg  AR/dB");
    for spec in [
        DesignSpec::design_i(),
        DesignSpec::design_ii(),
        DesignSpec::design_iii(),
    ] {
        let field = synthesize_field(&spec)?;
        for f in [spec.f_lower_ghz, spec.center_freq_ghz(), spec.f_upper_ghz] {
            let ff = FarField::compute(&aperture_fields(&field, f)?, &spec.name, &dirs)?;
            let cut = pattern_cut(&ff, 0.0)?;
            let m = beam_metrics(
                &cut,
                &spec.name,
                spec.handedness,
                spec.theta_cp_deg,
                spec.theta_lp_deg,
            )?;
            println!(
                "{:12} {f:5.2}  {:+6.1}  {:5.2}  {:+6.1}  {:5.1}",
                spec.name, m.cp_peak_deg, m.ar_cp_peak_db, m.lp_peak_deg, m.ar_lp_peak_db
            );
        }
    }
    Ok(())
}
