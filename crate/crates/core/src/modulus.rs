//! Maximum of `|f|` over a sphere: dense deterministic sampling followed by a
//! local pattern-search ascent from the best sample.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::exec::map_indices;
use crate::maps::MapDescriptor;
use crate::point::Vector;
use crate::sampling::sphere_points;

/// Largest finite `ln` of an `f64`.
pub(crate) const LN_MAX: f64 = 709.782712893384;

/// Default sphere sample count for a dimension.
pub fn default_sphere_samples(dim: usize) -> usize {
    if dim == 2 {
        4096
    } else {
        20000
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusEstimate {
    /// `ln M(r, f)`.
    pub log_max: f64,
    /// `M(r, f)`, evaluated directly at the maximiser when representable.
    pub value: f64,
    pub argmax: Vector,
}

fn estimate(f: &MapDescriptor, argmax: Vector, log_max: f64) -> ModulusEstimate {
    let direct = f.eval(argmax).norm();
    let value = if direct.is_finite() && direct > 0.0 {
        direct
    } else if log_max > LN_MAX {
        f64::INFINITY
    } else {
        log_max.exp()
    };
    ModulusEstimate { log_max, value, argmax }
}

/// `ln M(r, f)` estimated from `samples` sphere points plus one refinement.
pub fn max_log_modulus(f: &MapDescriptor, r: f64, samples: usize) -> ModulusEstimate {
    let dim = f.dimension;
    let pts = sphere_points(dim, r, samples);
    let vals: Vec<f64> = map_indices(pts.len(), |i| f.log_modulus(pts[i]));
    let mut best = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &v) in vals.iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    if best_val == f64::INFINITY {
        return estimate(f, pts[best], best_val);
    }
    let step = if dim == 2 { 2.0 * PI / pts.len() as f64 } else { (4.0 * PI / pts.len() as f64).sqrt() };
    let (argmax, log_max) = ascend(f, r, pts[best], best_val, step);
    estimate(f, argmax, log_max)
}

fn tangents(u: Vector, dim: usize) -> [Vector; 2] {
    if dim == 2 {
        let t = Vector::new2(-u.0[1], u.0[0]);
        [t, t]
    } else {
        let helper = if u.0[0].abs() < 0.9 { Vector::new3(1.0, 0.0, 0.0) } else { Vector::new3(0.0, 1.0, 0.0) };
        let t1 = u.cross(helper);
        let t1 = t1.scale(1.0 / t1.norm());
        [t1, u.cross(t1)]
    }
}

fn ascend(f: &MapDescriptor, r: f64, start: Vector, start_val: f64, step0: f64) -> (Vector, f64) {
    let dim = f.dimension;
    let mut u = start.scale(1.0 / r);
    let mut val = start_val;
    let mut step = step0;
    let mut evals = 0;
    let n_dirs = if dim == 2 { 1 } else { 2 };
    while step > 1e-13 && evals < 800 {
        let basis = tangents(u, dim);
        let mut moved = false;
        'dirs: for t in basis.iter().take(n_dirs) {
            for s in [step, -step] {
                let c = u + t.scale(s);
                let c = c.scale(1.0 / c.norm());
                let v = f.log_modulus(c.scale(r));
                evals += 1;
                // ignore rounding-level gains so flat maxima stay put
                if v > val + 1e-14 * (1.0 + val.abs()) {
                    u = c;
                    val = v;
                    moved = true;
                    break 'dirs;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (u.scale(r), val)
}

/// `M(r, f)`; `+inf` when the maximum exceeds the floating range.
pub fn max_modulus(f: &MapDescriptor, r: f64, samples: usize) -> f64 {
    max_log_modulus(f, r, samples).value
}
