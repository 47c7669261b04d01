//! Finite-difference Jacobians, local dilatation, and commutation residuals.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::exec::map_indices;
use crate::linalg::Matrix;
use crate::maps::MapDescriptor;
use crate::point::{Point, Vector};
use crate::sampling::SampleRegion;

/// Relative finite-difference step: the absolute step is `h * max(1, |x|)`.
pub const DEFAULT_STEP: f64 = 1e-5;

pub fn default_step(x: Vector) -> f64 {
    DEFAULT_STEP * x.norm().max(1.0)
}

/// Central-difference Jacobian with absolute step `h` per axis. Entries are
/// NaN when a stencil point is undefined or a pole.
pub fn jacobian(f: &MapDescriptor, x: Vector, h: f64) -> Result<Matrix> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("finite-difference step {h}")));
    }
    let seam = f.seam_distance(x);
    if seam <= 2.0 * h {
        return Err(Error::Seam { distance: seam });
    }
    let d = f.dimension;
    let mut m = Matrix { dim: d, m: [[0.0; 3]; 3] };
    for j in 0..d {
        let mut e = Vector::ZERO;
        e.0[j] = h;
        let diff = match (f.eval(x + e), f.eval(x - e)) {
            (Point::Finite(a), Point::Finite(b)) => (a - b).scale(0.5 / h),
            _ => Vector([f64::NAN; 3]),
        };
        for i in 0..d {
            m.m[i][j] = diff.0[i];
        }
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DilatationSample {
    pub point: Vector,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub jac_det: f64,
    pub k_o: f64,
    pub k_i: f64,
}

impl DilatationSample {
    /// Orientation-preserving and non-degenerate.
    pub fn is_regular(&self) -> bool {
        self.jac_det > 0.0 && self.k_o.is_finite() && self.k_i.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DilatationEstimate {
    pub samples: Vec<DilatationSample>,
    pub max_k_o: f64,
    pub max_k_i: f64,
    pub q99_k_o: f64,
    pub q99_k_i: f64,
    /// `max(max_k_o, max_k_i)`.
    pub max_k: f64,
    /// Relative step; see `DEFAULT_STEP`.
    pub h: f64,
    pub seam_rejected: usize,
    /// Samples with `jac_det <= 0` or undefined entries; not aggregated.
    pub flagged: usize,
    /// More than 10% of the draws were rejected or flagged.
    pub quality_warning: bool,
}

fn local(f: &MapDescriptor, x: Vector, h_rel: f64) -> Result<DilatationSample> {
    let jm = jacobian(f, x, h_rel * x.norm().max(1.0))?;
    let (sigma_max, sigma_min) = jm.singular_values();
    let jac_det = jm.det();
    let d = f.dimension as i32;
    Ok(DilatationSample {
        point: x,
        sigma_max,
        sigma_min,
        jac_det,
        k_o: sigma_max.powi(d) / jac_det,
        k_i: jac_det / sigma_min.powi(d),
    })
}

/// Nearest-rank quantile of an unsorted list.
fn quantile(values: &mut [f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let rank = ((q * values.len() as f64).ceil() as usize).clamp(1, values.len());
    values[rank - 1]
}

/// Local dilatations at `n_samples` seeded points of `region`.
pub fn dilatation_field(
    f: &MapDescriptor,
    region: &SampleRegion,
    n_samples: usize,
    h: f64,
    seed: u64,
) -> Result<DilatationEstimate> {
    if n_samples < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 samples, got {n_samples}")));
    }
    region.validate()?;
    let pts = region.sample(f.dimension, n_samples, seed);
    let results = map_indices(pts.len(), |i| local(f, pts[i], h));
    let mut samples = Vec::new();
    let mut seam_rejected = 0;
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(Error::Seam { .. }) => seam_rejected += 1,
            Err(e) => return Err(e),
        }
    }
    let flagged = samples.iter().filter(|s| !s.is_regular()).count();
    let mut k_o: Vec<f64> = samples.iter().filter(|s| s.is_regular()).map(|s| s.k_o).collect();
    let mut k_i: Vec<f64> = samples.iter().filter(|s| s.is_regular()).map(|s| s.k_i).collect();
    if k_o.is_empty() {
        return Err(Error::AllSamplesRejected { rejected: n_samples });
    }
    let max_k_o = k_o.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_k_i = k_i.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let quality_warning = 10 * (seam_rejected + flagged) > n_samples;
    if quality_warning {
        log::warn!("{}: {seam_rejected} seam and {flagged} degenerate samples of {n_samples}", f.id);
    }
    Ok(DilatationEstimate {
        q99_k_o: quantile(&mut k_o, 0.99),
        q99_k_i: quantile(&mut k_i, 0.99),
        max_k_o,
        max_k_i,
        max_k: max_k_o.max(max_k_i),
        h,
        samples,
        seam_rejected,
        flagged,
        quality_warning,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutationReport {
    pub sample_count: usize,
    pub rejected: usize,
    /// Largest `|f(g(x)) - g(f(x))| / (1 + |f(g(x))|)`.
    pub max_residual: f64,
    pub mean_residual: f64,
    pub argmax: Vector,
}

/// Points closer than this to a pole of the outer map are not sampled.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-6;

fn finite(p: Point) -> Option<Vector> {
    p.finite().filter(|v| v.is_finite())
}

/// Relative residual of `f∘g` against `g∘f` at `x`, or `None` when either
/// composition is undefined or passes within `margin` of a pole.
pub fn commutation_residual(f: &MapDescriptor, g: &MapDescriptor, x: Vector, margin: f64) -> Option<f64> {
    if f.pole_distance(x) < margin || g.pole_distance(x) < margin {
        return None;
    }
    let gx = finite(g.eval(x))?;
    let fx = finite(f.eval(x))?;
    if f.pole_distance(gx) < margin || g.pole_distance(fx) < margin {
        return None;
    }
    let fgx = finite(f.eval(gx))?;
    let gfx = finite(g.eval(fx))?;
    Some((fgx - gfx).norm() / (1.0 + fgx.norm()))
}

/// Residual statistics of `f∘g - g∘f` over seeded samples of `region`.
pub fn commutation_check(
    f: &MapDescriptor,
    g: &MapDescriptor,
    region: &SampleRegion,
    n_samples: usize,
    seed: u64,
    pole_margin: f64,
) -> Result<CommutationReport> {
    if f.dimension != g.dimension {
        return Err(Error::InvalidParameter(format!("{} and {} differ in dimension", f.id, g.id)));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("no samples requested".into()));
    }
    region.validate()?;
    let pts = region.sample(f.dimension, n_samples, seed);
    let res = map_indices(pts.len(), |i| commutation_residual(f, g, pts[i], pole_margin));
    let (mut count, mut sum, mut max, mut argmax) = (0usize, 0.0, f64::NEG_INFINITY, Vector::ZERO);
    for (x, r) in pts.iter().zip(&res) {
        if let Some(r) = *r {
            count += 1;
            sum += r;
            if r > max {
                max = r;
                argmax = *x;
            }
        }
    }
    if count == 0 {
        return Err(Error::AllSamplesRejected { rejected: n_samples });
    }
    Ok(CommutationReport {
        sample_count: count,
        rejected: n_samples - count,
        max_residual: max,
        mean_residual: sum / count as f64,
        argmax,
    })
}
