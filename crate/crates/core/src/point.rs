//! Points of `R^d` (d = 2 or 3) and the point at infinity.

use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Float;

/// A finite vector. Planar maps leave the third coordinate at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector(pub [f64; 3]);

impl Vector {
    pub const ZERO: Vector = Vector([0.0; 3]);

    pub const fn new2(x: f64, y: f64) -> Self {
        Vector([x, y, 0.0])
    }

    pub const fn new3(x: f64, y: f64, z: f64) -> Self {
        Vector([x, y, z])
    }

    pub fn from_complex(z: Complex64) -> Self {
        Vector([z.re, z.im, 0.0])
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.0[0], self.0[1])
    }

    pub fn norm(self) -> f64 {
        let [x, y, z] = self.0;
        // hypot-style scaling keeps huge orbit points from overflowing early
        let m = x.abs().max(y.abs()).max(z.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let (a, b, c) = (x / m, y / m, z / m);
        m * (a * a + b * b + c * c).sqrt()
    }

    pub fn dot(self, other: Vector) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn cross(self, o: Vector) -> Vector {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vector([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn scale(self, s: f64) -> Vector {
        Vector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dist(self, other: Vector) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, o: Vector) -> Vector {
        Vector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, o: Vector) -> Vector {
        Vector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Mul<Vector> for f64 {
    type Output = Vector;
    fn mul(self, v: Vector) -> Vector {
        v.scale(self)
    }
}

/// A point of the one-point compactification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Finite(Vector),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<Vector> {
        match self {
            Point::Finite(v) => Some(v),
            Point::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, Point::Infinity)
    }

    /// Euclidean norm, `+inf` for the infinity marker.
    pub fn norm(self) -> f64 {
        match self {
            Point::Finite(v) => v.norm(),
            Point::Infinity => f64::INFINITY,
        }
    }
}

impl From<Vector> for Point {
    fn from(v: Vector) -> Self {
        Point::Finite(v)
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point::Finite(Vector::from_complex(z))
    }
}

/// `exp(w) - 1` without cancellation for small `|w|`.
pub fn cexpm1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-5 {
        // w + w^2/2 + w^3/6 + w^4/24
        w * (Complex64::new(1.0, 0.0) + w * (0.5 + w * (1.0 / 6.0 + w / 24.0)))
    } else {
        w.exp() - 1.0
    }
}

/// `tan z`, stable for large `|Im z|` where `sinh`/`cosh` overflow.
pub fn ctan(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        return Complex64::new(x.tan(), 0.0);
    }
    if y.abs() <= 20.0 {
        return z.sin() / z.cos();
    }
    let e = (-2.0 * y.abs()).exp();
    let (s2, c2) = (2.0 * x).sin_cos();
    let den = 1.0 + 2.0 * c2 * e + e * e;
    Complex64::new(2.0 * e * s2 / den, y.signum() * (1.0 - e * e) / den)
}

/// `ln |sin z + z + shift|` without overflowing for large `|Im z|`.
pub fn log_abs_sin_plus_linear(z: Complex64, shift: Complex64) -> f64 {
    let y = z.im;
    if y.abs() <= 1.0 {
        return (z.sin() + z + shift).norm().ln();
    }
    let i = Complex64::i();
    let lin = z + shift;
    // sin z = (i/2) e^{-iz} (1 - e^{2iz}) for y > 0, mirrored for y < 0.
    let inner = if y > 0.0 {
        let eiz = (i * z).exp();
        Complex64::new(1.0, 0.0) - eiz * eiz - 2.0 * i * lin * eiz
    } else {
        let emiz = (-i * z).exp();
        Complex64::new(1.0, 0.0) - emiz * emiz + 2.0 * i * lin * emiz
    };
    y.abs() - core::f64::consts::LN_2 + inner.norm().ln()
}
