mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use qrdyn_core::conformal::{commutation_residual, default_step, DEFAULT_POLE_MARGIN, DEFAULT_STEP};
use qrdyn_core::{
    dilatation_field, jacobian, translate_map, MapDescriptor, Point, SampleRegion, Vector,
};

fn plane(r: f64) -> impl Strategy<Value = Vector> {
    (-r..r, -r..r).prop_map(|(x, y)| Vector::new2(x, y))
}

fn space(r: f64, h: f64) -> impl Strategy<Value = Vector> {
    (-r..r, -r..r, -h..h).prop_map(|(x, y, z)| Vector::new3(x, y, z))
}

fn period_residual(f: &MapDescriptor, x: Vector) -> f64 {
    let mut worst: f64 = 0.0;
    for p in &f.periods {
        let (a, b) = (f.eval(x + p.shift), f.eval(x));
        if let (Point::Finite(a), Point::Finite(b)) = (a, b) {
            worst = worst.max((a - (b + p.offset)).norm() / (1.0 + b.norm()));
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn planar_periods_hold(x in plane(4.0)) {
        for f in [sine_plus_z(0.0), sine_plus_z(1.3), map("exp", &[]), map("tangent", &[])] {
            prop_assert!(!f.periods.is_empty());
            if f.pole_distance(x) > 1e-3 {
                prop_assert!(period_residual(&f, x) <= 1e-12, "{}", f.id);
            }
        }
    }

    #[test]
    fn spatial_periods_hold(x in space(6.0, 3.0)) {
        let fs = [map("zorich", &[]), zorich_g(), map("zorich_h", &[("L", 1.0), ("L_prime", 0.5)]), zorich_g_shifted()];
        for f in fs {
            prop_assert!(f.periods.len() >= 2, "{}", f.id);
            prop_assert!(period_residual(&f, x) <= 1e-12, "{}", f.id);
        }
    }

    #[test]
    fn zorich_modulus_is_exponential(x in space(50.0, 20.0)) {
        let z = at(&map("zorich", &[]), x);
        prop_assert!((z.norm() / x.0[2].exp() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn sine_translation_identity(x in plane(4.0), n in 0u32..=10) {
        let f = sine_plus_z(0.0);
        let shift = Vector::new2(2.0 * PI * n as f64, 0.0);
        let lhs = at(&f, x + shift);
        let rhs = at(&f, x) + shift;
        prop_assert!(lhs.dist(rhs) <= 1e-10);
    }

    #[test]
    fn trivial_translation_is_pointwise_equal(x in space(3.0, 2.0)) {
        for f in [zorich_g(), map("zorich", &[])] {
            let g = translate_map(&f, 1.0, Vector::ZERO).unwrap();
            prop_assert_eq!(g.eval(x), f.eval(x));
        }
        let s = sine_plus_z(0.0);
        let y = Vector::new2(x.0[0], x.0[1]);
        prop_assert_eq!(translate_map(&s, 1.0, Vector::ZERO).unwrap().eval(y), s.eval(y));
    }

    #[test]
    fn commuting_pairs_pointwise(x in plane(2.0), y in space(4.0, 2.0)) {
        let pairs = [
            (power(2), power(3)),
            (chebyshev(2), chebyshev(3)),
            (map("radial_stretch", &[("m", 1.7)]), power(2)),
            (map("radial_stretch", &[("m", 0.5)]), power(3)),
            (sine_plus_z(0.0), sine_plus_z(2.0 * PI)),
        ];
        for (f, g) in &pairs {
            if let Some(r) = commutation_residual(f, g, x, DEFAULT_POLE_MARGIN) {
                prop_assert!(r <= 1e-12, "{} {}: {r:e}", f.id, g.id);
            }
        }
        let r = commutation_residual(&zorich_g(), &zorich_g_shifted(), y, DEFAULT_POLE_MARGIN).unwrap();
        prop_assert!(r <= 1e-12);
        let (f, g) = (map("lattes_double", &[]), map("lattes_sqrt2i", &[]));
        if let Some(r) = commutation_residual(&f, &g, x, DEFAULT_POLE_MARGIN) {
            prop_assert!(r <= 1e-9, "{r:e}");
        }
    }

    #[test]
    fn jacobian_matches_closed_form(x in plane(2.0)) {
        use num_complex::Complex64;
        let z = x.to_complex();
        let h = default_step(x);
        let holomorphic: [(MapDescriptor, Complex64); 3] = [
            (power(3), 3.0 * z * z),
            (chebyshev(3), 3.0 * z * z - 3.0),
            (map("exp", &[]), z.exp()),
        ];
        for (f, d) in holomorphic {
            let j = jacobian(&f, x, h).unwrap();
            let want = [[d.re, -d.im], [d.im, d.re]];
            for i in 0..2 {
                for k in 0..2 {
                    prop_assert!((j.m[i][k] - want[i][k]).abs() <= 10.0 * h * (1.0 + d.norm()), "{}", f.id);
                }
            }
        }
        // G(x) = |x|^{m-1} x has DG = |x|^{m-1} (I + (m-1) x xᵀ/|x|^2)
        let m = 1.7;
        let r = x.norm();
        prop_assume!(r > 0.05);
        let j = jacobian(&map("radial_stretch", &[("m", m)]), x, h).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                let want = r.powf(m - 1.0) * (if i == k { 1.0 } else { 0.0 } + (m - 1.0) * x.0[i] * x.0[k] / (r * r));
                prop_assert!((j.m[i][k] - want).abs() <= 10.0 * h * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn polynomial_type_maps_blow_up(theta in 0.0..(2.0 * PI)) {
        for f in [power(2), chebyshev(3), map("radial_stretch", &[("m", 0.5)])] {
            let moduli: Vec<f64> = [1e1, 1e2, 1e3, 1e4]
                .iter()
                .map(|&r| at(&f, Vector::new2(r * theta.cos(), r * theta.sin())).norm())
                .collect();
            prop_assert!(moduli.windows(2).all(|w| w[1] > w[0]), "{}", f.id);
        }
    }
}

#[test]
fn dilatation_never_below_one() {
    let region = SampleRegion::annulus(0.3, 1.9);
    for f in [power(2), chebyshev(3), map("radial_stretch", &[("m", 0.7)]), sine_plus_z(0.0)] {
        let est = dilatation_field(&f, &region, 500, DEFAULT_STEP, 9).unwrap();
        assert!(est.samples.iter().filter(|s| s.is_regular()).all(|s| s.k_o >= 1.0 - 1e-6 && s.k_i >= 1.0 - 1e-6));
        assert!(est.max_k_o >= 1.0 - 1e-6 && est.max_k_i >= 1.0 - 1e-6);
    }
    let zbox = SampleRegion::Box { lo: Vector::new3(-2.0, -2.0, 0.1), hi: Vector::new3(2.0, 2.0, 2.0) };
    let est = dilatation_field(&map("zorich", &[]), &zbox, 500, DEFAULT_STEP, 9).unwrap();
    assert!(est.max_k_o >= 1.0 - 1e-6 && est.max_k_i >= 1.0 - 1e-6);
}
