//! Seeded sampling regions and deterministic sphere point sets.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::Vector;

pub const DEFAULT_SEED: u64 = 42;

/// Region from which seeded random samples are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleRegion {
    /// Axis-aligned box; the unused third axis of planar boxes has `lo = hi = 0`.
    Box { lo: Vector, hi: Vector },
    Ball { center: Vector, radius: f64 },
    Annulus { center: Vector, inner: f64, outer: f64 },
}

impl SampleRegion {
    pub fn square(half_width: f64) -> Self {
        SampleRegion::Box { lo: Vector::new2(-half_width, -half_width), hi: Vector::new2(half_width, half_width) }
    }

    pub fn disk(radius: f64) -> Self {
        SampleRegion::Ball { center: Vector::ZERO, radius }
    }

    pub fn annulus(inner: f64, outer: f64) -> Self {
        SampleRegion::Annulus { center: Vector::ZERO, inner, outer }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SampleRegion::Box { lo, hi } => lo.is_finite() && hi.is_finite() && (0..3).all(|i| lo.0[i] <= hi.0[i]),
            SampleRegion::Ball { center, radius } => center.is_finite() && radius > 0.0 && radius.is_finite(),
            SampleRegion::Annulus { center, inner, outer } => {
                center.is_finite() && inner >= 0.0 && outer > inner && outer.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(alloc::format!("degenerate sample region {self:?}")))
        }
    }

    /// `n` seeded samples in dimension `dim`.
    pub fn sample(&self, dim: usize, n: usize, seed: u64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(dim, &mut rng)).collect()
    }

    fn draw(&self, dim: usize, rng: &mut ChaCha8Rng) -> Vector {
        match *self {
            SampleRegion::Box { lo, hi } => {
                let mut v = Vector::ZERO;
                for i in 0..dim {
                    v.0[i] = lo.0[i] + (hi.0[i] - lo.0[i]) * rng.random::<f64>();
                }
                v
            }
            SampleRegion::Ball { center, radius } => shell(center, 0.0, radius, dim, rng),
            SampleRegion::Annulus { center, inner, outer } => shell(center, inner, outer, dim, rng),
        }
    }
}

fn shell(center: Vector, inner: f64, outer: f64, dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    let d = dim as f64;
    let u: f64 = rng.random();
    let r = (inner.powf(d) + u * (outer.powf(d) - inner.powf(d))).powf(1.0 / d);
    center + random_direction(dim, rng).scale(r)
}

fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Vector {
    let phi = 2.0 * PI * rng.random::<f64>();
    if dim == 2 {
        Vector::new2(phi.cos(), phi.sin())
    } else {
        let z = 2.0 * rng.random::<f64>() - 1.0;
        let s = (1.0 - z * z).max(0.0).sqrt();
        Vector::new3(s * phi.cos(), s * phi.sin(), z)
    }
}

/// Deterministic points on the sphere of radius `r`: equally spaced angles
/// (starting at angle 0) in the plane, a Fibonacci lattice in space.
pub fn sphere_points(dim: usize, r: f64, n: usize) -> Vec<Vector> {
    let n = n.max(1);
    if dim == 2 {
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                Vector::new2(r * t.cos(), r * t.sin())
            })
            .collect()
    } else {
        let golden = PI * (3.0 - 5f64.sqrt());
        (0..n)
            .map(|k| {
                let z = 1.0 - (2 * k + 1) as f64 / n as f64;
                let s = (1.0 - z * z).max(0.0).sqrt();
                let t = golden * k as f64;
                Vector::new3(r * s * t.cos(), r * s * t.sin(), r * z)
            })
            .collect()
    }
}
