mod common;

use common::*;
use num_complex::Complex64;
use qrdyn_core::bottcher::{DEFAULT_DEPTH, DEFAULT_R0};
use qrdyn_core::conformal::{commutation_residual, DEFAULT_POLE_MARGIN, DEFAULT_STEP};
use qrdyn_core::{
    bottcher_build, commutation_check, compose, conjugated_commuter, dilatation_field, Error, SampleRegion, Vector,
};

#[test]
fn radial_stretch_dilatation_is_max_of_m_and_inverse() {
    for m in [0.5, 1.7, 2.0] {
        let f = map("radial_stretch", &[("m", m)]);
        let est = dilatation_field(&f, &SampleRegion::annulus(0.1, 2.0), 2000, DEFAULT_STEP, 42).unwrap();
        let want = m.max(1.0 / m);
        assert!((est.max_k / want - 1.0).abs() <= 0.01, "m={m}: {}", est.max_k);
        assert_eq!(f.nominal_dilatation, Some(want));
        assert!(!est.quality_warning);
    }
}

#[test]
fn holomorphic_maps_are_conformal_on_annuli() {
    // annuli avoid poles and critical points (0 for z^n, ±1 for chebyshev 2..3 rescaled)
    let cases = [
        (power(2), SampleRegion::annulus(0.5, 2.0)),
        (power(3), SampleRegion::annulus(0.5, 2.0)),
        (chebyshev(2), SampleRegion::annulus(0.5, 2.0)),
        (chebyshev(3), SampleRegion::annulus(1.5, 3.0)),
        (map("exp", &[]), SampleRegion::annulus(0.5, 3.0)),
        (sine_plus_z(0.0), SampleRegion::annulus(3.3, 3.7)),
        (map("exp_sq", &[]), SampleRegion::annulus(0.5, 1.5)),
        (map("lattes_sqrt2i", &[]), SampleRegion::annulus(0.2, 0.8)),
    ];
    for (f, region) in cases {
        let est = dilatation_field(&f, &region, 1000, DEFAULT_STEP, 42).unwrap();
        assert!(est.max_k - 1.0 <= 1e-3, "{}: {}", f.id, est.max_k);
        assert!(est.max_k >= 1.0 - 1e-6);
    }
}

#[test]
fn zorich_dilatation_is_finite_and_stable_off_the_blend_layer() {
    let f = zorich_g();
    for (lo, hi) in [(-2.0, 0.0), (1.0, 2.5)] {
        let region = SampleRegion::Box { lo: Vector::new3(-2.0, -2.0, lo), hi: Vector::new3(2.0, 2.0, hi) };
        let small = dilatation_field(&f, &region, 500, DEFAULT_STEP, 42).unwrap();
        let large = dilatation_field(&f, &region, 4000, DEFAULT_STEP, 42).unwrap();
        for est in [&small, &large] {
            assert_eq!(est.flagged, 0);
            assert!(est.max_k.is_finite() && !est.quality_warning);
        }
        assert!((large.q99_k_o / small.q99_k_o - 1.0).abs() < 0.1, "{} {}", small.q99_k_o, large.q99_k_o);
        assert!((large.q99_k_i / small.q99_k_i - 1.0).abs() < 0.1, "{} {}", small.q99_k_i, large.q99_k_i);
        assert!(large.max_k < 50.0, "{}", large.max_k);
    }
}

#[test]
fn zorich_blend_layer_folds() {
    // x + β Z is not locally injective for 0 < x3 < L: the Jacobian changes sign
    let f = zorich_g();
    let region = SampleRegion::Box { lo: Vector::new3(-2.0, -2.0, 0.0), hi: Vector::new3(2.0, 2.0, 1.0) };
    let est = dilatation_field(&f, &region, 4000, DEFAULT_STEP, 42).unwrap();
    let reversed = est.samples.iter().filter(|s| s.jac_det < 0.0).count();
    assert!(reversed > 100, "{reversed}");
}

#[test]
fn seams_are_rejected_not_measured() {
    let f = map("zorich", &[]);
    let on_seam = Vector::new3(1.0, 0.3, 0.0);
    assert!(matches!(qrdyn_core::jacobian(&f, on_seam, 1e-5), Err(Error::Seam { .. })));
}

#[test]
fn bottcher_functional_equation_holds() {
    let f = map("exp_sq", &[]);
    let model = bottcher_build(&f, DEFAULT_R0, DEFAULT_DEPTH).unwrap();
    let pts = SampleRegion::disk(DEFAULT_R0).sample(2, 1000, 42);
    let mut worst: f64 = 0.0;
    for p in pts {
        let z = p.to_complex();
        let fz = at(&f, p).to_complex();
        let phi = model.phi(z).unwrap();
        worst = worst.max((model.phi(fz).unwrap() - phi * phi).norm());
        let back = model.phi_inverse(phi).unwrap();
        assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()) + 1e-15);
    }
    assert!(worst <= 1e-8, "{worst:e}");
    let d = model.phi_with_derivative(Complex64::new(0.0, 0.0)).unwrap().1;
    assert!((d - Complex64::new(10.0, 0.0)).norm() < 1e-12);
}

#[test]
fn bottcher_commuter_commutes_and_has_dilatation_m() {
    let f = map("exp_sq", &[]);
    let model = bottcher_build(&f, DEFAULT_R0, DEFAULT_DEPTH).unwrap();
    let g = conjugated_commuter(&model, 2.0).unwrap();
    let region = SampleRegion::disk(model.commuter_radius(2.0));
    let report = commutation_check(&f, &g, &region, 1000, 42, DEFAULT_POLE_MARGIN).unwrap();
    assert!(report.max_residual <= 1e-6, "{:e}", report.max_residual);
    assert!(report.rejected < 10);
    let est = dilatation_field(&g, &SampleRegion::annulus(0.002, 0.02), 1000, DEFAULT_STEP, 42).unwrap();
    assert!((est.max_k / 2.0 - 1.0).abs() <= 0.02, "{}", est.max_k);

    // the identity is recovered at m = 1, and G_m is not a commuter for the wrong model
    let id = conjugated_commuter(&model, 1.0).unwrap();
    let z = Vector::new2(0.011, -0.004);
    assert!(at(&id, z).dist(z) < 1e-14);
    let other = map("radial_stretch", &[("m", 2.0)]);
    assert!(commutation_residual(&f, &other, Vector::new2(0.3, 0.2), DEFAULT_POLE_MARGIN).unwrap() > 1e-3);
}

#[test]
fn nearby_non_commuting_pairs_are_detected() {
    let f = sine_plus_z(0.0);
    let twice = qrdyn_core::translate_map(&f, 2.0, Vector::ZERO).unwrap();
    let r = commutation_check(&f, &twice, &SampleRegion::square(2.0), 1000, 42, DEFAULT_POLE_MARGIN).unwrap();
    assert!(r.max_residual > 0.1);
    let ff = compose(&f, &f).unwrap();
    let r = commutation_check(&f, &ff, &SampleRegion::square(2.0), 1000, 42, DEFAULT_POLE_MARGIN).unwrap();
    assert!(r.max_residual <= 1e-12);
}
