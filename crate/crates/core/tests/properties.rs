use janus_holo::aperture::{
    aperture_fields, axial_ratio, cp_decompose, far_field_components, spectral_fields,
    spectral_grid, ApertureField, FarField,
};
use janus_holo::design::BandEdge;
use janus_holo::hologram::{
    checkerboard_partner, desired_erad, dispersion_roots, max_impedance_direction, surface_current,
    surface_index, synthesize_field, tensor_cp, tensor_cp_interference, tensor_from_interference,
    tensor_janus, tensor_wideband, wideband_closed_form, ReactanceTensor, Region,
};
use janus_holo::{free_space_wavenumber, Complex64, DesignSpec, Handedness};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point(r: &mut ChaCha8Rng, half: f64, min_r: f64) -> (f64, f64) {
    loop {
        let (x, y) = (r.gen_range(-half..half), r.gen_range(-half..half));
        if x.hypot(y) >= min_r {
            return (x, y);
        }
    }
}

fn random_edge(r: &mut ChaCha8Rng) -> BandEdge {
    BandEdge {
        freq_ghz: r.gen_range(8.0..16.0),
        x_ohm: r.gen_range(50.0..400.0),
        m_ohm: r.gen_range(10.0..250.0),
    }
}

#[test]
fn closed_form_equals_interference_on_random_points() {
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for n in 0..20_000 {
        let edge = random_edge(&mut r);
        let (x, y) = random_point(&mut r, 0.12, 1e-4);
        let theta = r.gen_range(-80f64..80.0).to_radians();
        let hand = if n % 2 == 0 {
            Handedness::Lhcp
        } else {
            Handedness::Rhcp
        };
        let a = tensor_cp(x, y, &edge, theta, hand, 0.0).unwrap();
        let b = tensor_cp_interference(x, y, &edge, theta, hand, 0.0).unwrap();
        worst = worst.max(a.max_abs_diff(&b) / edge.m_ohm);
    }
    assert!(worst < 1e-9, "worst relative deviation {worst:e}");
}

#[test]
fn wideband_is_mean_of_band_edges() {
    let mut r = rng(2);
    for n in 0..10_000 {
        let mut spec = DesignSpec::design_i();
        spec.f_lower_ghz = r.gen_range(9.0..12.0);
        spec.f_upper_ghz = spec.f_lower_ghz + r.gen_range(0.1..2.0);
        spec.m1 = r.gen_range(50.0..250.0);
        spec.m2 = r.gen_range(50.0..250.0);
        spec.x1 = r.gen_range(0.3..1.0);
        spec.x2 = r.gen_range(0.3..1.0);
        let hand = if n % 3 == 0 {
            Handedness::Rhcp
        } else {
            Handedness::Lhcp
        };
        let theta = r.gen_range(-60f64..60.0).to_radians();
        let (x, y) = random_point(&mut r, 0.105, 0.005);
        let lo = tensor_cp(x, y, &spec.lower_edge(), theta, hand, 0.0).unwrap();
        let hi = tensor_cp(x, y, &spec.upper_edge(), theta, hand, 0.0).unwrap();
        let mean = ReactanceTensor::new(
            0.5 * (lo.xx + hi.xx),
            0.5 * (lo.xy + hi.xy),
            0.5 * (lo.yy + hi.yy),
        );
        let w = tensor_wideband(x, y, &spec, theta, hand).unwrap();
        assert_eq!(w, mean);
        let closed = wideband_closed_form(x, y, &spec, theta, hand).unwrap();
        assert!(
            closed.max_abs_diff(&mean)
                < 1e-12 * (spec.m1 + spec.m2 + spec.x1_ohm() + spec.x2_ohm())
        );
    }
}

#[test]
fn checkerboard_partner_is_the_plus_j_hologram() {
    // Oracle: interference synthesis with the transverse field (+j, 1),
    // averaged over the band edges.
    let spec = DesignSpec::design_i();
    let mut r = rng(3);
    for _ in 0..5_000 {
        let (x, y) = random_point(&mut r, 0.105, 0.005);
        let theta = r.gen_range(-60f64..60.0).to_radians();
        let edge_tensor = |edge: BandEdge| {
            let k0 = edge.k0();
            let jv = surface_current(x, y, surface_index(edge.x_ohm) * k0, 0.0).unwrap();
            let phase = Complex64::from_polar(1.0, -k0 * x * theta.sin());
            let e = [J * phase, phase, Complex64::new(0.0, 0.0)];
            tensor_from_interference(&e, &jv, edge.x_ohm, edge.m_ohm)
        };
        let oracle = ReactanceTensor::mean(
            &edge_tensor(spec.lower_edge()),
            &edge_tensor(spec.upper_edge()),
        );
        let got = checkerboard_partner(x, y, &spec, theta).unwrap();
        assert!(
            got.max_abs_diff(&oracle) < 1e-9 * spec.m1,
            "{got:?} vs {oracle:?}"
        );
    }
}

#[test]
fn rhcp_is_lhcp_mirrored_in_y() {
    let mut r = rng(4);
    for _ in 0..5_000 {
        let edge = random_edge(&mut r);
        let (x, y) = random_point(&mut r, 0.1, 1e-3);
        let theta = r.gen_range(-70f64..70.0).to_radians();
        let rh = tensor_cp(x, y, &edge, theta, Handedness::Rhcp, 0.0).unwrap();
        let lh = tensor_cp(x, -y, &edge, theta, Handedness::Lhcp, 0.0).unwrap();
        assert!((rh.xx - lh.xx).abs() < 1e-9);
        assert!((rh.yy - lh.yy).abs() < 1e-9);
        assert!((rh.xy + lh.xy).abs() < 1e-9);
    }
}

#[test]
fn janus_regions_cover_the_checkerboard() {
    let mut spec = DesignSpec::design_i();
    spec.n_cells = 20;
    let field = synthesize_field(&spec).unwrap();
    let rf = spec.feed_exclusion_radius_m();
    for c in field.cells() {
        if c.x_m.hypot(c.y_m) < rf {
            assert_eq!(c.region, Region::FeedExcluded);
            continue;
        }
        let theta_lp = spec.theta_lp_deg.to_radians();
        let expected = if c.y_m >= 0.0 {
            tensor_wideband(
                c.x_m,
                c.y_m,
                &spec,
                spec.theta_cp_deg.to_radians(),
                Handedness::Lhcp,
            )
            .unwrap()
        } else if (c.i + c.j) % 2 == 1 {
            checkerboard_partner(c.x_m, c.y_m, &spec, theta_lp).unwrap()
        } else {
            tensor_wideband(c.x_m, c.y_m, &spec, theta_lp, Handedness::Lhcp).unwrap()
        };
        assert_eq!(c.z, expected);
        let (z, region) = tensor_janus(c.i, c.j, c.x_m, c.y_m, &spec).unwrap();
        assert_eq!((z, region), (c.z, c.region));
    }
}

#[test]
fn dispersion_maximum_follows_principal_direction() {
    let mut r = rng(5);
    let mut checked = 0;
    while checked < 1_000 {
        let z = ReactanceTensor::new(
            r.gen_range(50.0..400.0),
            r.gen_range(-120.0..120.0),
            r.gen_range(50.0..400.0),
        );
        let dir = max_impedance_direction(&z);
        let spread = (0.5 * (z.xx - z.yy)).hypot(z.xy);
        // Inductive cells only: both principal reactances positive.
        if spread < 10.0 || 0.5 * (z.xx + z.yy) - spread <= 0.0 {
            continue;
        }
        let mut best = (f64::NEG_INFINITY, 0.0);
        for k in 0..1800 {
            let th = (k as f64 * 0.1).to_radians();
            if let Ok(Some(x)) = dispersion_roots(&z, th).map(|d| d.effective_reactance()) {
                if x > best.0 {
                    best = (x, th);
                }
            }
        }
        assert!(best.0.is_finite(), "{z:?}");
        let d = (best.1 - dir.angle_rad).rem_euclid(PI);
        let d = d.min(PI - d);
        assert!(
            d.to_degrees() <= 0.15,
            "{z:?}: sweep {} vs {}",
            best.1.to_degrees(),
            dir.angle_rad.to_degrees()
        );
        checked += 1;
    }
}

#[test]
fn dispersion_roots_swap_symmetry() {
    let mut r = rng(6);
    for _ in 0..2_000 {
        let (a, b) = (r.gen_range(20.0..500.0), r.gen_range(20.0..500.0));
        let th = r.gen_range(0.0..PI);
        let p = dispersion_roots(&ReactanceTensor::new(a, 0.0, b), th).unwrap();
        let q = dispersion_roots(&ReactanceTensor::new(b, 0.0, a), th + PI / 2.0).unwrap();
        for k in 0..2 {
            assert!((p.roots[k] - q.roots[k]).norm() <= 1e-12 * p.roots[k].norm().max(1.0));
        }
    }
}

fn random_aperture(r: &mut ChaCha8Rng, nx: usize, ny: usize, real: bool) -> ApertureField {
    let freq = r.gen_range(8.0..16.0);
    let (dx, dy) = (r.gen_range(1e-3..5e-3), r.gen_range(1e-3..5e-3));
    let (ox, oy) = (r.gen_range(-0.02..0.02), r.gen_range(-0.02..0.02));
    let xs = (0..nx).map(|i| ox + i as f64 * dx).collect();
    let ys = (0..ny).map(|j| oy + j as f64 * dy).collect();
    let mut sample = || {
        let im = if real { 0.0 } else { r.gen_range(-1.0..1.0) };
        Complex64::new(r.gen_range(-1.0..1.0), im)
    };
    let ex = (0..nx * ny).map(|_| sample()).collect();
    let ey = (0..nx * ny).map(|_| sample()).collect();
    ApertureField::from_samples(freq, xs, ys, dx, dy, ex, ey).unwrap()
}

fn direct_sum(ap: &ApertureField, u: f64, v: f64) -> (Complex64, Complex64) {
    let k0 = free_space_wavenumber(ap.freq_ghz);
    let (mut fx, mut fy) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (j, &y) in ap.ys.iter().enumerate() {
        for (i, &x) in ap.xs.iter().enumerate() {
            let k = j * ap.xs.len() + i;
            let w = Complex64::from_polar(ap.dx * ap.dy, k0 * (x * u + y * v));
            fx += ap.ex[k] * w;
            fy += ap.ey[k] * w;
        }
    }
    (fx, fy)
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale
}

#[test]
fn accelerated_transform_matches_direct_sum() {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..60 {
        let (nx, ny) = (r.gen_range(1..=16), r.gen_range(1..=16));
        let ap = random_aperture(&mut r, nx, ny, false);
        let uv: Vec<(f64, f64)> = (0..40)
            .map(|_| (r.gen_range(-1.2..1.2), r.gen_range(-1.2..1.2)))
            .collect();
        let fast = spectral_fields(&ap, &uv).unwrap();
        // Bound on |F|: every term has magnitude ≤ dx·dy·|E|.
        let scale = ap.dx * ap.dy * ap.ex.iter().chain(&ap.ey).map(|e| e.norm()).sum::<f64>();
        for (s, &(u, v)) in fast.iter().zip(&uv) {
            let (fx, fy) = direct_sum(&ap, u, v);
            worst = worst.max(rel(s.fx, fx, scale)).max(rel(s.fy, fy, scale));
        }
        let us: Vec<f64> = (0..7).map(|_| r.gen_range(-1.0..1.0)).collect();
        let vs: Vec<f64> = (0..5).map(|_| r.gen_range(-1.0..1.0)).collect();
        let grid = spectral_grid(&ap, &us, &vs).unwrap();
        for (m, &u) in us.iter().enumerate() {
            for (n, &v) in vs.iter().enumerate() {
                let (fx, fy) = direct_sum(&ap, u, v);
                worst = worst
                    .max(rel(grid[m][n].fx, fx, scale))
                    .max(rel(grid[m][n].fy, fy, scale));
            }
        }
    }
    assert!(worst < 1e-9, "worst relative error {worst:e}");
}

#[test]
fn power_split_on_every_far_field_sample() {
    let mut spec = DesignSpec::design_i();
    spec.n_cells = 24;
    let field = synthesize_field(&spec).unwrap();
    let ap = aperture_fields(&field, 11.75).unwrap();
    let ff = FarField::compute_uv_grid(&ap, "split", 41).unwrap();
    assert!(!ff.samples.is_empty());
    for s in &ff.samples {
        let lr = s.e_lhcp.norm_sqr() + s.e_rhcp.norm_sqr();
        let tp = s.e_theta.norm_sqr() + s.e_phi.norm_sqr();
        assert!(
            (lr - tp).abs() <= 1e-12 * tp.max(f64::MIN_POSITIVE),
            "{lr} vs {tp}"
        );
    }
}

#[test]
fn transform_is_linear_and_obeys_shift_theorem() {
    let mut r = rng(8);
    for _ in 0..20 {
        let (nx, ny) = (r.gen_range(1..=12), r.gen_range(1..=12));
        let a = random_aperture(&mut r, nx, ny, false);
        let mut b = random_aperture(&mut r, nx, ny, false);
        b.xs = a.xs.clone();
        b.ys = a.ys.clone();
        b.freq_ghz = a.freq_ghz;
        b.dx = a.dx;
        b.dy = a.dy;
        let sum = a.superpose(&b).unwrap();
        let uv: Vec<(f64, f64)> = (0..30)
            .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let (fa, fb, fs) = (
            spectral_fields(&a, &uv).unwrap(),
            spectral_fields(&b, &uv).unwrap(),
            spectral_fields(&sum, &uv).unwrap(),
        );
        for k in 0..uv.len() {
            let scale = fs[k].fx.norm().max(fs[k].fy.norm()).max(1e-12);
            assert!(rel(fa[k].fx + fb[k].fx, fs[k].fx, scale) < 1e-12);
            assert!(rel(fa[k].fy + fb[k].fy, fs[k].fy, scale) < 1e-12);
        }

        let (sx, sy) = (r.gen_range(-0.03..0.03), r.gen_range(-0.03..0.03));
        let moved = spectral_fields(&a.translated(sx, sy), &uv).unwrap();
        let k0 = free_space_wavenumber(a.freq_ghz);
        for (k, &(u, v)) in uv.iter().enumerate() {
            let shift = Complex64::from_polar(1.0, k0 * (u * sx + v * sy));
            let scale = fa[k].fx.norm().max(fa[k].fy.norm()).max(1e-12);
            assert!(rel(moved[k].fx, fa[k].fx * shift, scale) < 1e-9);
            assert!(rel(moved[k].fy, fa[k].fy * shift, scale) < 1e-9);
        }
    }
}

#[test]
fn real_aperture_has_conjugate_symmetric_spectrum() {
    let mut r = rng(9);
    for _ in 0..20 {
        let (nx, ny) = (r.gen_range(1..=10), r.gen_range(1..=10));
        let ap = random_aperture(&mut r, nx, ny, true);
        let uv: Vec<(f64, f64)> = (0..20)
            .map(|_| (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let neg: Vec<(f64, f64)> = uv.iter().map(|&(u, v)| (-u, -v)).collect();
        let (p, n) = (
            spectral_fields(&ap, &uv).unwrap(),
            spectral_fields(&ap, &neg).unwrap(),
        );
        for k in 0..uv.len() {
            let scale = p[k].fx.norm().max(p[k].fy.norm()).max(1e-12);
            assert!(rel(n[k].fx, p[k].fx.conj(), scale) < 1e-12);
            assert!(rel(n[k].fy, p[k].fy.conj(), scale) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn interference_tensor_is_symmetric_and_real(
        ex in (-2.0..2.0f64, -2.0..2.0f64), ey in (-2.0..2.0f64, -2.0..2.0f64),
        jx in (-2.0..2.0f64, -2.0..2.0f64), jy in (-2.0..2.0f64, -2.0..2.0f64),
        x_avg in 0.0..500.0f64, m in 0.0..300.0f64,
    ) {
        let e = [Complex64::new(ex.0, ex.1), Complex64::new(ey.0, ey.1), Complex64::new(0.0, 0.0)];
        let jv = [Complex64::new(jx.0, jx.1), Complex64::new(jy.0, jy.1)];
        let z = tensor_from_interference(&e, &jv, x_avg, m);
        // The anti-Hermitian bracket has Im(b01) == Im(b10) exactly.
        let b01 = e[0] * jv[1].conj() - jv[0] * e[1].conj();
        let b10 = e[1] * jv[0].conj() - jv[1] * e[0].conj();
        prop_assert!((b01.im - b10.im).abs() <= 1e-12 * (1.0 + b01.im.abs()));
        prop_assert_eq!(z.xy, z.yx());
        prop_assert!(z.xx.is_finite() && z.yy.is_finite());
    }

    #[test]
    fn principal_direction_is_an_eigenvector(xx in 0.0..500.0f64, xy in -200.0..200.0f64, yy in 0.0..500.0f64) {
        let z = ReactanceTensor::new(xx, xy, yy);
        let d = max_impedance_direction(&z);
        prop_assert!((0.0..PI).contains(&d.angle_rad));
        let (s, c) = d.angle_rad.sin_cos();
        let v = [xx * c + xy * s, xy * c + yy * s];
        prop_assert!((v[0] - d.x_eff_max * c).abs() < 1e-9 * (1.0 + d.x_eff_max));
        prop_assert!((v[1] - d.x_eff_max * s).abs() < 1e-9 * (1.0 + d.x_eff_max));
        prop_assert!(d.x_eff_max >= xx.max(yy) - 1e-9);
    }

    #[test]
    fn cp_split_conserves_power(
        t in (-5.0..5.0f64, -5.0..5.0f64), p in (-5.0..5.0f64, -5.0..5.0f64),
    ) {
        let (et, ep) = (Complex64::new(t.0, t.1), Complex64::new(p.0, p.1));
        let (l, r) = cp_decompose(et, ep);
        let lhs = l.norm_sqr() + r.norm_sqr();
        let rhs = et.norm_sqr() + ep.norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
        if lhs > 0.0 {
            let ar = axial_ratio(l, r).unwrap();
            prop_assert!((0.0..=60.0).contains(&ar));
        }
    }

    #[test]
    fn far_field_components_preserve_transverse_power_at_broadside(
        fx in (-3.0..3.0f64, -3.0..3.0f64), fy in (-3.0..3.0f64, -3.0..3.0f64), phi in 0.0..(2.0 * PI),
    ) {
        let (fx, fy) = (Complex64::new(fx.0, fx.1), Complex64::new(fy.0, fy.1));
        let (et, ep) = far_field_components(fx, fy, 0.0, phi);
        let a = et.norm_sqr() + ep.norm_sqr();
        let b = fx.norm_sqr() + fy.norm_sqr();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn desired_field_polarization_is_handedness_pure(x in -0.1..0.1f64, theta_deg in -80.0..80.0f64) {
        let k0 = free_space_wavenumber(11.75);
        let th = theta_deg.to_radians();
        let l = desired_erad(x, Handedness::Lhcp, th, k0);
        let r = desired_erad(x, Handedness::Rhcp, th, k0);
        prop_assert!((l[0] - r[0]).norm() < 1e-15);
        prop_assert!((l[1] + r[1]).norm() < 1e-15);
        prop_assert!((l[0] + J * l[1]).norm() < 1e-12);
    }
}
