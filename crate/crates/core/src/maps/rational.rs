//! Complex rational functions with explicit coefficients, used for the Lattès maps.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0)
    }

    fn sub_scaled(&self, other: &Poly, w: Complex64) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += *c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] -= *c * w;
        }
        Poly(out)
    }

    /// All complex roots (Durand–Kerner, then Newton polish).
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = self.degree();
        if deg == 0 {
            return Vec::new();
        }
        let lead = self.0[deg];
        let monic: Vec<Complex64> = self.0[..=deg].iter().map(|c| c / lead).collect();
        let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * z + c);
        let bound = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * bound * 0.5).collect();
        for _ in 0..500 {
            let mut delta = 0.0f64;
            for i in 0..deg {
                let zi = roots[i];
                let mut den = Complex64::new(1.0, 0.0);
                for (j, zj) in roots.iter().enumerate() {
                    if j != i {
                        den *= zi - zj;
                    }
                }
                if den.norm() == 0.0 {
                    den = Complex64::new(1e-300, 0.0);
                }
                let step = eval(zi) / den;
                roots[i] = zi - step;
                delta = delta.max(step.norm() / (1.0 + zi.norm()));
            }
            if delta < 1e-15 {
                break;
            }
        }
        let dmonic: Vec<Complex64> = (1..=deg).map(|k| monic[k] * k as f64).collect();
        let deval = |z: Complex64| dmonic.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &c| a * z + c);
        for r in roots.iter_mut() {
            for _ in 0..3 {
                let d = deval(*r);
                if d.norm() == 0.0 {
                    break;
                }
                let next = *r - eval(*r) / d;
                if !next.is_finite() {
                    break;
                }
                *r = next;
            }
        }
        roots
    }
}

/// `num / den`; infinity is a pole whenever `den` vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Solutions of `r(z) = w` (finite ones only).
    pub fn preimages(&self, w: Complex64) -> Vec<Complex64> {
        self.num.sub_scaled(&self.den, w).roots()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots()
    }
}
