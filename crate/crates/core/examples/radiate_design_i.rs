//! Far-field couplet of the Janus aperture on the φ = 0° cut.

use janus_holo::aperture::{
    aperture_fields, beam_metrics, cut_directions, pattern_cut, Component, FarField,
};
use janus_holo::hologram::synthesize_field;
use janus_holo::DesignSpec;

fn main() -> janus_holo::Result<()> {
    let spec = DesignSpec::design_i();
    let field = synthesize_field(&spec)?;
    let ap = aperture_fields(&field, 11.75)?;
    let ff = FarField::compute(&ap, &spec.name, &cut_directions(&[0.0], 0.5))?;
    let cut = pattern_cut(&ff, 0.0)?;

    let (lhcp, rhcp, ephi) = (
        cut.db(Component::Lhcp),
        cut.db(Component::Rhcp),
        cut.db(Component::EPhi),
    );
    println!("theta   LHCP    RHCP    E_phi  [dB]");
    for (k, th) in cut.theta_deg().iter().enumerate() {
        if th.rem_euclid(10.0) == 0.0 {
            println!("{th:5.0} {:7.1} {:7.1} {:7.1}", lhcp[k], rhcp[k], ephi[k]);
        }
    }

    let m = beam_metrics(
        &cut,
        &spec.name,
        spec.handedness,
        spec.theta_cp_deg,
        spec.theta_lp_deg,
    )?;
    println!(
        "\nCP peak {:+.1} deg (AR {:.2} dB, suppression {:.1} dB); linear peak {:+.1} deg (AR {:.1} dB)",
        m.cp_peak_deg, m.ar_cp_peak_db, m.cp_suppression_db, m.lp_peak_deg, m.ar_lp_peak_db
    );
    if let Some(w) = m.cp_window {
        println!(
            "CP window: phase(E_phi) - phase(E_theta) = {:.1} deg",
            w.mean_deg
        );
    }
    Ok(())
}
