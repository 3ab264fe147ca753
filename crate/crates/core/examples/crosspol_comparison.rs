//! Cross-polarization of single-beam holograms built from different desired
//! radiated fields.

use janus_holo::aperture::{aperture_fields, crosspol_report, cut_directions, FarField};
use janus_holo::hologram::{synthesize_single_beam, RadiatedFieldModel};
use janus_holo::{Complex64, DesignSpec, Handedness};

fn main() -> janus_holo::Result<()> {
    let spec = DesignSpec::design_i();
    let theta = 45f64.to_radians();
    let f = spec.center_freq_ghz();
    let dirs = cut_directions(&[0.0], 0.5);
    let far = |model: RadiatedFieldModel, label: &str| -> janus_holo::Result<FarField> {
        let field = synthesize_single_beam(&spec, theta, Handedness::Lhcp, model)?;
        FarField::compute(&aperture_fields(&field, f)?, label, &dirs)
    };

    let proposed = far(RadiatedFieldModel::Proposed, "proposed")?;
    let baselines = [
        ("transverse", RadiatedFieldModel::Transverse),
        (
            "y scaled by cos(theta)",
            RadiatedFieldModel::Custom {
                e_x: Complex64::new(0.0, -1.0),
                e_y: Complex64::new(theta.cos(), 0.0),
            },
        ),
    ];
    for (label, model) in baselines {
        let r = crosspol_report(&proposed, &far(model, label)?, 0.0, Handedness::Lhcp)?;
        println!(
            "{label:24} max cross {:6.2} dB vs proposed {:6.2} dB, co-pol delta {:+.2} dB",
            r.baseline.max_cross_db, r.proposed.max_cross_db, r.co_peak_delta_db
        );
    }
    Ok(())
}
