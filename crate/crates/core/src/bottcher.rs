//! Böttcher coordinate of `f(z) = c(e^{z^2} - 1)` at its superattracting
//! fixed point 0, and the commuting maps `φ^{-1} ∘ G ∘ φ` with
//! `G(w) = |w|^{m-1} w`.
//!
//! With `y_0 = z`, `y_{k+1} = f(y_k)` and `E(u) = (e^u - 1)/u`,
//! `φ(z) = c z exp(Σ_k 2^{-(k+1)} ln E(y_k^2))`, so `φ(f(z)) = φ(z)^2`.

use alloc::format;
use alloc::string::String;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::maps::{Family, Kind, MapDescriptor};
use crate::point::{cexpm1, Point, Vector};
use crate::sampling::sphere_points;

pub const DEFAULT_R0: f64 = 0.02;
pub const DEFAULT_DEPTH: usize = 20;
const CONTRACTION_SAMPLES: usize = 4096;
const NEWTON_MAX_ITER: usize = 100;

#[derive(Clone, Debug)]
pub struct BottcherModel {
    pub map_id: String,
    pub center: Vector,
    pub c: f64,
    pub r0: f64,
    pub depth: usize,
}

/// `E(u) = (e^u - 1)/u` and `E'(u)`.
fn e_and_derivative(u: Complex64) -> (Complex64, Complex64) {
    if u.norm() < 0.5 {
        // Taylor series: E = Σ u^n/(n+1)!, E' = Σ n u^{n-1}/(n+1)!
        let (mut e, mut de) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..24 {
            fact *= (n + 1) as f64;
            e += pow / fact;
            if n + 1 < 24 {
                de += pow * ((n + 1) as f64) / (fact * (n + 2) as f64);
            }
            pow *= u;
        }
        (e, de)
    } else {
        let em1 = cexpm1(u);
        let e = em1 / u;
        (e, (u * (em1 + 1.0) - em1) / (u * u))
    }
}

impl BottcherModel {
    fn f(&self, z: Complex64) -> Complex64 {
        cexpm1(z * z) * self.c
    }

    /// `(φ(z), φ'(z))`.
    pub fn phi_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (mut y, mut dy) = (z, Complex64::new(1.0, 0.0));
        let (mut s, mut ds) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut weight = 0.5;
        for k in 0..self.depth {
            let u = y * y;
            let (e, de) = e_and_derivative(u);
            // E stays near 1 on the contracting disk; the principal log is continuous there
            if e.re <= 0.0 {
                return Err(Error::BranchTracking { depth: k });
            }
            s += e.ln() * weight;
            ds += de / e * (y * dy * 2.0) * weight;
            // f'(y) = 2 c y e^{y^2}
            dy *= y * (u.exp() * (2.0 * self.c));
            y = self.f(y);
            weight *= 0.5;
        }
        let es = s.exp() * self.c;
        Ok((es * z, es * (ds * z + 1.0)))
    }

    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.phi_with_derivative(z)?.0)
    }

    /// `φ^{-1}(w)` by damped Newton seeded at `w / c`.
    pub fn phi_inverse(&self, w: Complex64) -> Result<Complex64> {
        let mut z = w / self.c;
        let mut resid = (self.phi(z)? - w).norm();
        for _ in 0..NEWTON_MAX_ITER {
            if resid <= 4.0 * f64::EPSILON * w.norm() || resid == 0.0 {
                return Ok(z);
            }
            let (p, dp) = self.phi_with_derivative(z)?;
            let step = (p - w) / dp;
            let mut t = 1.0;
            loop {
                let cand = z - step * t;
                let r = (self.phi(cand)? - w).norm();
                if r < resid {
                    z = cand;
                    resid = r;
                    break;
                }
                t *= 0.5;
                if t < 1e-6 {
                    // no further progress at rounding level
                    return if resid <= 1e-12 * w.norm().max(1e-300) {
                        Ok(z)
                    } else {
                        Err(Error::DomainRestriction(format!("Newton stalled at w = {w}")))
                    };
                }
            }
            if step.norm() * t <= 1e-16 * z.norm() {
                return Ok(z);
            }
        }
        Err(Error::DomainRestriction(format!("Newton did not converge at w = {w}")))
    }

    /// Radius of the disk on which `conjugated_commuter(self, m)` is defined.
    pub fn commuter_radius(&self, m: f64) -> f64 {
        if m >= 1.0 {
            self.r0
        } else {
            self.r0.min((self.c * self.r0).powf(1.0 / m) / self.c)
        }
    }
}

/// Builds the Böttcher model of an `exp_sq` map after checking
/// `|f(z)| <= |z|/2` on `|z| <= r0`.
pub fn bottcher_build(f: &MapDescriptor, r0: f64, depth: usize) -> Result<BottcherModel> {
    let Some(Family::ExpSq { c }) = f.family else {
        return Err(Error::UnsupportedMap(format!("{} (Böttcher model needs exp_sq)", f.id)));
    };
    if !(r0 > 0.0 && r0.is_finite()) || depth == 0 {
        return Err(Error::InvalidParameter(format!("r0 {r0}, depth {depth}")));
    }
    let model = BottcherModel { map_id: f.id.clone(), center: Vector::ZERO, c, r0, depth };
    // f(z)/z is holomorphic, so its modulus peaks on the boundary circle
    for p in sphere_points(2, r0, CONTRACTION_SAMPLES) {
        let z = p.to_complex();
        let image = model.f(z).norm();
        if !(image <= 0.5 * r0) {
            return Err(Error::ContractionFailure { radius: r0, image });
        }
        model.phi(z)?;
    }
    Ok(model)
}

/// `g = φ^{-1} ∘ G ∘ φ` on `|z| <= model.commuter_radius(m)`. Outside that
/// disk, or where the inversion fails, `g` returns NaN coordinates.
pub fn conjugated_commuter(model: &BottcherModel, m: f64) -> Result<MapDescriptor> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
    }
    let rho = model.commuter_radius(m);
    let mdl = model.clone();
    let nan = Point::Finite(Vector([f64::NAN; 3]));
    let eval = move |x: Vector| -> Point {
        if x.norm() > rho {
            return nan;
        }
        let z = x.to_complex();
        if z.norm() == 0.0 {
            return Point::Finite(Vector::ZERO);
        }
        let Ok(w) = mdl.phi(z) else { return nan };
        let gw = w * w.norm().powf(m - 1.0);
        match mdl.phi_inverse(gw) {
            Ok(y) => Point::from(y),
            Err(_) => nan,
        }
    };
    let mut g = MapDescriptor::new(format!("bottcher_commuter(m={m})"), 2, Kind::TranscendentalType, eval)
        .with_seams(|x| x.norm());
    g.nominal_dilatation = Some(if m >= 1.0 { m } else { 1.0 / m });
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_map, Params};

    fn model() -> BottcherModel {
        let f = make_map("exp_sq", &Params::new()).unwrap();
        bottcher_build(&f, DEFAULT_R0, DEFAULT_DEPTH).unwrap()
    }

    #[test]
    fn normalization_at_the_fixed_point() {
        let m = model();
        let (p, dp) = m.phi_with_derivative(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(p, Complex64::new(0.0, 0.0));
        assert!((dp - 10.0).norm() < 1e-14);
    }

    #[test]
    fn functional_equation_and_inverse() {
        let m = model();
        let z = Complex64::new(0.01, 0.0);
        let lhs = m.phi(m.f(z)).unwrap();
        let rhs = m.phi(z).unwrap().powi(2);
        assert!((lhs - rhs).norm() <= 1e-8 * 1e-6);
        for z in [Complex64::new(0.013, -0.007), Complex64::new(-0.019, 0.001)] {
            let w = m.phi(z).unwrap();
            assert!((m.phi_inverse(w).unwrap() - z).norm() <= 1e-15);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let m = model();
        let z = Complex64::new(0.011, 0.008);
        let h = 1e-7;
        let fd = (m.phi(z + h).unwrap() - m.phi(z - h).unwrap()) / (2.0 * h);
        assert!((fd - m.phi_with_derivative(z).unwrap().1).norm() < 1e-7);
    }

    #[test]
    fn contraction_failure_for_large_disk() {
        let f = make_map("exp_sq", &Params::new()).unwrap();
        assert!(matches!(bottcher_build(&f, 0.2, 20), Err(Error::ContractionFailure { .. })));
        let sq = make_map("power", &[("n".into(), 2.0)].into_iter().collect()).unwrap();
        assert!(matches!(bottcher_build(&sq, 0.02, 20), Err(Error::UnsupportedMap(_))));
    }

    #[test]
    fn unit_exponent_gives_identity() {
        let g = conjugated_commuter(&model(), 1.0).unwrap();
        let x = Vector::new2(0.012, -0.004);
        assert!(g.eval(x).finite().unwrap().dist(x) < 1e-16);
        assert!(g.eval(Vector::new2(0.05, 0.0)).finite().unwrap().0[0].is_nan());
    }
}
