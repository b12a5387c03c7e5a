use proptest::prelude::*;
use qmoire::*;
use std::f64::consts::PI;

fn k702() -> Wavenumber {
    Wavenumber::from_wavelength(702e-9).unwrap()
}

fn rel_l2(a: &SampledField, b: &SampledField) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.values().iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Sum of Gaussians with random centres, widths and phases, all well inside the window.
fn bandlimited(grid: TransverseGrid, parts: &[(f64, f64, f64, f64)]) -> SampledField {
    SampledField::from_fn(grid, |x| {
        parts
            .iter()
            .map(|&(c, w, amp, ph)| Complex64::from_polar(amp * (-((x - c) / w).powi(2)).exp(), ph))
            .sum()
    })
}

fn parts() -> impl Strategy<Value = Vec<(f64, f64, f64, f64)>> {
    prop::collection::vec((-8e-4..8e-4f64, 3e-4..6e-4f64, 0.2..1.0f64, 0.0..6.3f64), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn power_is_conserved(p in parts(), z in 0.3..1.2f64) {
        let g = make_position_grid(2048, 0.02, 0.0).unwrap();
        let f = bandlimited(g, &p);
        let out = fresnel_propagate(&f, z, k702()).unwrap();
        prop_assert!((out.total_power() - f.total_power()).abs() <= 1e-6 * f.total_power());
    }

    #[test]
    fn propagation_composes(p in parts(), z1 in 0.3..0.6f64, z2 in 0.3..0.6f64) {
        let g = make_position_grid(2048, 0.02, 0.0).unwrap();
        let f = bandlimited(g, &p);
        let once = fresnel_propagate(&f, z1 + z2, k702()).unwrap();
        let twice = fresnel_propagate(&fresnel_propagate(&f, z1, k702()).unwrap(), z2, k702()).unwrap();
        prop_assert!(rel_l2(&twice, &once) <= 1e-6);
    }

    #[test]
    fn elements_are_linear(p in parts(), q in parts(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let g = make_position_grid(512, 8e-3, 0.0).unwrap();
        let (f1, f2) = (bandlimited(g, &p), bandlimited(g, &q));
        let mix = SampledField::new(g, f1.values().iter().zip(f2.values()).map(|(x, y)| x * a + y * b).collect()).unwrap();
        let mask = ronchi_grating(g, 3e-4, 0.4, 1e-5).unwrap();
        for e in [OpticalElement::free_space(0.3).unwrap(), OpticalElement::thin_lens(0.7).unwrap(), OpticalElement::mask(mask)] {
            let o1 = apply_element(&f1, &e, k702()).unwrap();
            let o2 = apply_element(&f2, &e, k702()).unwrap();
            let om = apply_element(&mix, &e, k702()).unwrap();
            let scale = om.max_abs().max(1e-12);
            for ((x, y), m) in o1.values().iter().zip(o2.values()).zip(om.values()) {
                prop_assert!((x * a + y * b - m).norm() <= 1e-10 * scale.max(o1.max_abs()).max(o2.max_abs()));
            }
        }
    }

    #[test]
    fn ronchi_repeats_every_period(steps in 2usize..40, duty in 0.0..1.0f64, offset_steps in 0usize..40) {
        let dx = 1e-6;
        let g = TransverseGrid::new(600, 0.0, dx, GridKind::Position).unwrap();
        let period = steps as f64 * dx;
        let r = ronchi_grating(g, period, duty, offset_steps as f64 * dx * 0.37).unwrap();
        let v = r.real_parts();
        for i in 0..v.len() - steps {
            prop_assert_eq!(v[i], v[i + steps]);
        }
    }
}

#[test]
fn gaussian_width_follows_beam_law() {
    let w0 = 0.5e-3;
    let k = k702();
    let zr = PI * w0 * w0 / k.wavelength();
    let g = make_position_grid(1024, 8e-3, 0.0).unwrap();
    let f = gaussian_beam(g, w0, 0.0).unwrap();
    for frac in [0.1, 0.5, 1.0, 1.5, 2.0] {
        let out = fresnel_propagate(&f, frac * zr, k).unwrap();
        let wz = w0 * (1.0 + frac * frac).sqrt();
        assert!((out.rms_width() - wz).abs() <= 0.01 * wz, "z = {frac} zR");
    }
}

#[test]
fn two_lens_relay_images_a_slit_to_the_mirror_point() {
    let f = 0.1;
    let k = k702();
    let work = make_position_grid(8192, 16e-3, 0.0).unwrap();
    let centre = 1.2e-3;
    let slit = SampledField::from_real_fn(work, |x| if (x - centre).abs() <= 50e-6 { 1.0 } else { 0.0 });
    let chain = [
        OpticalElement::free_space(f).unwrap(),
        OpticalElement::thin_lens(f).unwrap(),
        OpticalElement::free_space(2.0 * f).unwrap(),
        OpticalElement::thin_lens(f).unwrap(),
        OpticalElement::free_space(f).unwrap(),
    ];
    let mut field = slit.clone();
    for e in &chain {
        field = apply_element(&field, e, k).unwrap();
    }
    let mag = field.intensities();
    let peak = (0..mag.len()).max_by(|&a, &b| mag[a].total_cmp(&mag[b])).unwrap();
    assert!((work.sample(peak) + centre).abs() <= 50e-6, "image at {}", work.sample(peak));
}

#[test]
fn lens_arm_matches_analytic_transfer_function() {
    // crystal -z1- lens f -z2- detector, no imaging condition: each column is
    // sqrt(k/2 pi i z2) sqrt(pi / i alpha) exp(i[(q - k x/z2)^2/(4 alpha) - q^2 z1/2k + k x^2/2 z2])
    let k = k702();
    let (z1, f, z2) = (0.1, 0.5, 0.6);
    let work = make_position_grid(65536, 128e-3, 0.0).unwrap();
    let arm = Arm::new(
        vec![
            OpticalElement::free_space(z1).unwrap(),
            OpticalElement::thin_lens(f).unwrap(),
            OpticalElement::free_space(z2).unwrap(),
        ],
        work,
    )
    .unwrap();
    let q = TransverseGrid::frequency(64, 2.0 * PI / 16e-3).unwrap();
    let xs: Vec<f64> = (0..16).map(|i| work.sample(32768 + 128 * i) - 8e-4).map(|x| work.sample(work.nearest_index(x).unwrap())).collect();
    let h = arm_transfer_matrix_at(&arm, k, &q, &xs, TransferOptions::default()).unwrap();
    let kv = k.value();
    let alpha = kv / (2.0 * f) - kv / (2.0 * z2);
    let pre = (kv / (2.0 * PI * z2)).sqrt() * (PI / alpha).sqrt() * Complex64::from_polar(1.0, -PI / 2.0);
    let mut worst: f64 = 0.0;
    for (m, &x) in xs.iter().enumerate() {
        for j in 16..48 {
            let qj = q.sample(j);
            let phase = (qj - kv * x / z2).powi(2) / (4.0 * alpha) - qj * qj * z1 / (2.0 * kv) + kv * x * x / (2.0 * z2);
            let expect = pre * Complex64::from_polar(1.0, phase);
            worst = worst.max((h[[m, j]] - expect).norm() / pre.norm());
        }
    }
    assert!(worst < 0.01, "worst relative deviation {worst}");

    // the q^2 phase coefficient is what PumpIdlerGeometry::b_constant reports for this arm
    let geom = PumpIdlerGeometry::new(1.0 / (1.0 / f - 1.0 / z2) - z1, z1, f).unwrap();
    let b = 1.0 / (4.0 * alpha) - z1 / (2.0 * kv);
    assert!((geom.b_constant(k) - b).abs() <= 1e-12 * b.abs());
}
