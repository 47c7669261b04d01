//! Rectangular sampling grids: planar, planar slices of space, and volumes.

use alloc::format;

use crate::error::{Error, Result};
use crate::point::Vector;

pub const MAX_RESOLUTION: usize = 8192;

/// Axis-aligned plane `x[axis] = offset` inside `R^3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    pub axis: usize,
    pub offset: f64,
}

impl Slice {
    /// World axes spanned by the slice, in increasing order.
    pub fn free_axes(&self) -> [usize; 2] {
        match self.axis {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        }
    }
}

/// Cell-centred grid. Cell `(i, j, k)` has flat index `i + nx * (j + ny * k)`;
/// grid axis 0 is the first free world axis, axis 1 the second.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    /// Ambient dimension of the maps evaluated on the grid.
    pub dimension: usize,
    /// Box corners in grid-axis order; unused axes are 0.
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    /// Cells per grid axis; unused axes are 1.
    pub shape: [usize; 3],
    pub slice: Option<Slice>,
}

impl GridSpec {
    pub fn plane(lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize) -> Self {
        GridSpec { dimension: 2, lo: [lo[0], lo[1], 0.0], hi: [hi[0], hi[1], 0.0], shape: [nx, ny, 1], slice: None }
    }

    pub fn square(half_width: f64, n: usize) -> Self {
        Self::plane([-half_width, -half_width], [half_width, half_width], n, n)
    }

    /// Planar slice `x[axis] = offset` of space; `lo`/`hi` refer to the free axes.
    pub fn slice(axis: usize, offset: f64, lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize) -> Self {
        GridSpec {
            dimension: 3,
            lo: [lo[0], lo[1], 0.0],
            hi: [hi[0], hi[1], 0.0],
            shape: [nx, ny, 1],
            slice: Some(Slice { axis, offset }),
        }
    }

    pub fn volume(lo: [f64; 3], hi: [f64; 3], shape: [usize; 3]) -> Self {
        GridSpec { dimension: 3, lo, hi, shape, slice: None }
    }

    /// Number of grid axes (2 for planes and slices, 3 for volumes).
    pub fn axes(&self) -> usize {
        if self.dimension == 2 || self.slice.is_some() {
            2
        } else {
            3
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::InvalidParameter(m));
        if self.dimension != 2 && self.dimension != 3 {
            return bad(format!("grid dimension {} not in {{2,3}}", self.dimension));
        }
        if let Some(s) = self.slice {
            if self.dimension != 3 || s.axis > 2 || !s.offset.is_finite() {
                return bad(format!("invalid slice {s:?}"));
            }
        }
        for a in 0..self.axes() {
            let n = self.shape[a];
            if n == 0 || n > MAX_RESOLUTION {
                return bad(format!("resolution {n} on grid axis {a} outside 1..={MAX_RESOLUTION}"));
            }
            if !(self.lo[a].is_finite() && self.hi[a].is_finite() && self.lo[a] < self.hi[a]) {
                return bad(format!("empty or non-finite box on grid axis {a}"));
            }
        }
        for a in self.axes()..3 {
            if self.shape[a] != 1 {
                return bad(format!("grid axis {a} unused but has resolution {}", self.shape[a]));
            }
        }
        Ok(())
    }

    /// Cell width along a grid axis.
    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.shape[axis] as f64
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.shape[0] * (c[1] + self.shape[1] * c[2])
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.shape[0];
        let rest = idx / self.shape[0];
        [i, rest % self.shape[1], rest / self.shape[1]]
    }

    fn center_1d(&self, axis: usize, i: usize) -> f64 {
        let span = self.hi[axis] - self.lo[axis];
        self.lo[axis] + (span * (2 * i + 1) as f64) / (2 * self.shape[axis]) as f64
    }

    /// World coordinates of a cell centre.
    pub fn center(&self, idx: usize) -> Vector {
        let c = self.coords(idx);
        let mut g = [0.0; 3];
        for (a, v) in g.iter_mut().enumerate().take(self.axes()) {
            *v = self.center_1d(a, c[a]);
        }
        self.embed(g)
    }

    fn embed(&self, g: [f64; 3]) -> Vector {
        match self.slice {
            Some(s) => {
                let [a, b] = s.free_axes();
                let mut v = Vector::ZERO;
                v.0[a] = g[0];
                v.0[b] = g[1];
                v.0[s.axis] = s.offset;
                v
            }
            None => Vector(g),
        }
    }

    /// Cell containing a world point. For slices the point must lie within
    /// half the smaller cell width of the slice plane.
    pub fn locate(&self, x: Vector) -> Option<usize> {
        let g = match self.slice {
            Some(s) => {
                let tol = 0.5 * self.step(0).min(self.step(1));
                if (x.0[s.axis] - s.offset).abs() > tol {
                    return None;
                }
                let [a, b] = s.free_axes();
                [x.0[a], x.0[b], 0.0]
            }
            None => x.0,
        };
        let mut c = [0usize; 3];
        for a in 0..self.axes() {
            let t = (g[a] - self.lo[a]) / self.step(a);
            if !(t >= 0.0 && t <= self.shape[a] as f64) {
                return None;
            }
            c[a] = (t as usize).min(self.shape[a] - 1);
        }
        Some(self.index(c))
    }
}
