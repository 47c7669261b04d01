mod common;

use common::*;
use num_complex::Complex64;
use qrdyn_core::modulus::default_sphere_samples;
use qrdyn_core::{
    composition_growth, compose, growth_profile, make_map, pits_detect, rickman_check, transcendence_ratio, Kind,
    MapDescriptor, Params, Point,
};

fn ladder(top: u32) -> Vec<f64> {
    (0..=top).map(|k| 2f64.powi(k as i32)).collect()
}

fn poly(id: &str, p: fn(Complex64) -> Complex64) -> MapDescriptor {
    MapDescriptor::new(id, 2, Kind::PolynomialType, move |x| Point::from(p(x.to_complex())))
}

#[test]
fn transcendental_ratios_strictly_increase() {
    for f in [map("exp", &[]), sine_plus_z(0.0), zorich_g()] {
        let profile = growth_profile(&f, &ladder(11), default_sphere_samples(f.dimension)).unwrap();
        let ratios = transcendence_ratio(&profile, 2.0).unwrap();
        assert_eq!(ratios.len(), 11, "{}", f.id);
        assert!(ratios.windows(2).all(|w| w[1].log_ratio > w[0].log_ratio), "{}: {ratios:?}", f.id);
    }
    // M(2r)/M(r) = e^r for the exponential
    let profile = growth_profile(&map("exp", &[]), &[1.0, 2.0, 4.0, 8.0], 4096).unwrap();
    for s in transcendence_ratio(&profile, 2.0).unwrap() {
        assert!((s.log_ratio - s.r).abs() < 1e-9);
    }
}

#[test]
fn polynomial_ratios_converge_to_lambda_power_degree() {
    let cases: [(MapDescriptor, u32); 6] = [
        (power(2), 2),
        (power(3), 3),
        (chebyshev(3), 3),
        (poly("lattes_double_num", |w| (w * w + 1.0).powu(2)), 4),
        (poly("lattes_double_den", |w| 4.0 * w * (w * w - 1.0)), 3),
        (poly("lattes_sqrt2i_num", |w| Complex64::new(0.0, -1.0) * (w * w - 1.0)), 2),
    ];
    for (f, deg) in cases {
        let profile = growth_profile(&f, &ladder(10), 4096).unwrap();
        let top = *transcendence_ratio(&profile, 2.0).unwrap().last().unwrap();
        let want = 2f64.powi(deg as i32);
        assert!((top.ratio / want - 1.0).abs() <= 0.05, "{}: {} vs {want}", f.id, top.ratio);
    }
}

#[test]
fn max_modulus_increases_along_ladders() {
    let maps = [
        power(2),
        chebyshev(2),
        map("radial_stretch", &[("m", 0.5)]),
        map("exp", &[]),
        map("exp_sq", &[]),
        sine_plus_z(1.0),
        map("zorich", &[]),
        zorich_g(),
        map("zorich_h", &[("L", 1.0), ("L_prime", 2.0)]),
    ];
    for f in maps {
        let profile = growth_profile(&f, &[0.5, 1.0, 2.0, 4.0, 8.0], default_sphere_samples(f.dimension)).unwrap();
        assert!(profile.samples.windows(2).all(|w| w[1].log_m > w[0].log_m), "{}", f.id);
    }
    // fixture: zorich_g at radii 2, 4, 8
    let profile = growth_profile(&zorich_g(), &[2.0, 4.0, 8.0], default_sphere_samples(3)).unwrap();
    let m: Vec<f64> = profile.samples.iter().map(|s| s.m).collect();
    assert!(m[0] < m[1] && m[1] < m[2]);
    for (got, want) in m.iter().zip([2.0f64.exp() + 2.0, 4.0f64.exp() + 4.0, 8.0f64.exp() + 8.0]) {
        assert!((got / want - 1.0).abs() < 1e-6, "{got} vs {want}");
    }
}

#[test]
fn rickman_envelopes() {
    let radii: Vec<f64> = (0..=12).map(|k| 2f64.powi(k)).collect();
    let f = power(2);
    let profile = growth_profile(&f, &radii, 4096).unwrap();
    let report = rickman_check(&f, &profile, 2, 1.0, 1.0).unwrap();
    assert!(report.pass);
    assert!((report.fitted_a - 1.0).abs() < 1e-9 && (report.fitted_b - 1.0).abs() < 1e-9);
    assert!(!rickman_check(&f, &profile, 3, 1.0, 1.0).unwrap().pass);

    let g = compose(&map("radial_stretch", &[("m", 2.0)]), &f).unwrap();
    let profile = growth_profile(&g, &radii, 4096).unwrap();
    let report = rickman_check(&g, &profile, 2, 2.0, 2.0).unwrap();
    assert_eq!((report.n1, report.n2), (1.0, 4.0));
    assert!(report.pass);
    assert!(rickman_check(&map("exp", &[]), &profile, 2, 1.0, 1.0).is_err());
}

#[test]
fn composition_growth_constant() {
    let exp = map("exp", &[]);
    for s in composition_growth(&exp, &power(2), &[4.0, 8.0, 16.0], 4096).unwrap() {
        assert!((s.c_hat - 4.0).abs() <= 1e-6, "r={}: {}", s.r, s.c_hat);
    }
    let id = make_map("identity", &Params::from([("dim".into(), 2.0)])).unwrap();
    for s in composition_growth(&exp, &id, &[3.0, 5.0], 4096).unwrap() {
        assert!((s.c_hat - 2.0).abs() <= 1e-6);
    }
    let radii = [2.0, 4.0, 8.0, 16.0];
    for (f, g) in [(exp.clone(), power(2)), (exp.clone(), chebyshev(2)), (sine_plus_z(0.0), power(2))] {
        let c = composition_growth(&f, &g, &radii, 4096).unwrap();
        let inf = c.iter().map(|s| s.c_hat).fold(f64::INFINITY, f64::min);
        assert!(inf > 0.5, "{} {}: {c:?}", f.id, g.id);
    }
}

#[test]
fn sine_plus_z_has_no_pits_effect() {
    let f = sine_plus_z(0.0);
    let mut extents = Vec::new();
    for k in 0..4 {
        let r = 100.0 * 2f64.powi(k);
        let report = pits_detect(&f, r, 2.0, 2.0, 0.1, 200).unwrap();
        assert!(report.cover_count >= 5, "R={r}: {}", report.cover_count);
        // the real segment [R, 2R] is low
        assert!(report.low_cells.iter().any(|c| c.0[0] > 1.8 * r && c.0[1].abs() < 0.05 * r));
        let extent = report.low_cells.iter().map(|c| c.norm()).fold(0.0, f64::max);
        extents.push(extent / r);
    }
    assert!(extents.iter().all(|&e| e > 1.8));
}

#[test]
fn pits_with_huge_balls_need_one() {
    let report = pits_detect(&sine_plus_z(0.0), 100.0, 2.0, 2.0, 3.0, 100).unwrap();
    assert_eq!(report.cover_count, 1);
    // |z^2| <= 10^1.5 forces |z| < 10, so the annulus has no low cells
    let none = pits_detect(&power(2), 10.0, 2.0, 1.5, 0.1, 64).unwrap();
    assert_eq!((none.low_cell_count, none.cover_count), (0, 0));
}
