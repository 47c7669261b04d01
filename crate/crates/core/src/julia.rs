//! Julia-set approximations (escape boundaries and backward orbits of
//! infinity) and their comparison on a common grid.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::exec::map_indices;
use crate::grid::GridSpec;
use crate::iteration::{classify_grid, ClassificationField, ClassificationPolicy, OrbitTag};
use crate::maps::{Kind, MapDescriptor, Window};
use crate::point::{Point, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryMethod {
    EscapeBoundary,
    FastEscapeBoundary,
    BackwardOrbit,
}

impl BoundaryMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMethod::EscapeBoundary => "escape_boundary",
            BoundaryMethod::FastEscapeBoundary => "fast_escape_boundary",
            BoundaryMethod::BackwardOrbit => "backward_orbit",
        }
    }

    /// Method used for a map of the given kind.
    pub fn for_kind(kind: Kind) -> Self {
        match kind {
            Kind::PolynomialType => BoundaryMethod::EscapeBoundary,
            Kind::TranscendentalType => BoundaryMethod::FastEscapeBoundary,
            Kind::Quasimeromorphic => BoundaryMethod::BackwardOrbit,
        }
    }
}

/// Set of grid cells, stored as sorted unique flat indices.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySet {
    pub grid: GridSpec,
    pub cells: Vec<usize>,
    pub method: BoundaryMethod,
}

impl BoundarySet {
    pub fn new(grid: GridSpec, mut cells: Vec<usize>, method: BoundaryMethod) -> Self {
        cells.sort_unstable();
        cells.dedup();
        BoundarySet { grid, cells, method }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.cells.binary_search(&idx).is_ok()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.grid.len()];
        for &c in &self.cells {
            m[c] = true;
        }
        m
    }
}

/// Face neighbours (4 in the plane, 6 in a volume) of a cell.
pub fn face_neighbours(grid: &GridSpec, idx: usize) -> impl Iterator<Item = usize> + '_ {
    let c = grid.coords(idx);
    let axes = grid.axes();
    (0..axes).flat_map(move |a| {
        let mut out = [None, None];
        if c[a] > 0 {
            let mut d = c;
            d[a] -= 1;
            out[0] = Some(grid.index(d));
        }
        if c[a] + 1 < grid.shape[a] {
            let mut d = c;
            d[a] += 1;
            out[1] = Some(grid.index(d));
        }
        out.into_iter().flatten()
    })
}

/// Cells whose closed face neighbourhood meets both the (fast-)escaping
/// region and its complement.
pub fn julia_boundary(field: &ClassificationField, fast_only: bool) -> Result<BoundarySet> {
    let inside: Vec<bool> = field
        .cells
        .iter()
        .map(|c| if fast_only { c.tag == OrbitTag::FastEscaping } else { c.tag.is_escaping() })
        .collect();
    let side = if fast_only { "fast-escaping" } else { "escaping" };
    if !inside.iter().any(|&b| b) {
        return Err(Error::EmptySide(side));
    }
    if inside.iter().all(|&b| b) {
        return Err(Error::EmptySide(if fast_only { "non-fast-escaping" } else { "non-escaping" }));
    }
    let grid = &field.grid;
    let flags = map_indices(grid.len(), |i| {
        let me = inside[i];
        face_neighbours(grid, i).any(|j| inside[j] != me)
    });
    let cells = flags.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    let method = if fast_only { BoundaryMethod::FastEscapeBoundary } else { BoundaryMethod::EscapeBoundary };
    Ok(BoundarySet::new(*grid, cells, method))
}

/// Limits for materializing backward orbits of infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackwardOrbitOptions {
    /// Half-width of the square in which preimages are enumerated. Points
    /// outside it are dropped, together with their own preimages.
    pub enumeration_radius: f64,
    /// Maximal number of materialized points over all depths.
    pub budget: usize,
}

pub const DEFAULT_ENUMERATION_RADIUS: f64 = 32.0;

impl Default for BackwardOrbitOptions {
    fn default() -> Self {
        BackwardOrbitOptions { enumeration_radius: DEFAULT_ENUMERATION_RADIUS, budget: 5_000_000 }
    }
}

/// `f^{-n}(infinity)` for `n = 1..=depth`, one list per level.
pub fn backward_orbit_levels(f: &MapDescriptor, depth: usize, opts: &BackwardOrbitOptions) -> Result<Vec<Vec<Vector>>> {
    if f.dimension != 2 {
        return Err(Error::UnsupportedMap(format!("{} (backward orbits are planar only)", f.id)));
    }
    let window = Window::centered_square(opts.enumeration_radius);
    let mut levels: Vec<Vec<Vector>> = Vec::with_capacity(depth);
    let mut total = 0usize;
    for n in 1..=depth {
        let next = if n == 1 {
            f.poles_in(&window)?
        } else {
            let prev = &levels[n - 2];
            let parts = map_indices(prev.len(), |i| f.preimages(Point::Finite(prev[i]), &window));
            let mut out = Vec::new();
            for p in parts {
                out.extend(p?);
            }
            out
        };
        total += next.len();
        if total > opts.budget {
            return Err(Error::MaterializationBudget(opts.budget));
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Rasterizes `U_{n <= depth} f^{-n}(infinity)` onto `grid`.
pub fn backward_orbit_julia(
    f: &MapDescriptor,
    depth: usize,
    grid: &GridSpec,
    opts: &BackwardOrbitOptions,
) -> Result<BoundarySet> {
    grid.validate()?;
    if f.kind != Kind::Quasimeromorphic {
        return Err(Error::UnsupportedMap(format!("{} is not quasimeromorphic", f.id)));
    }
    if f.poles.is_none() && !f.has_inverse() {
        return Err(Error::UnsupportedMap(f.id.clone()));
    }
    let levels = backward_orbit_levels(f, depth, opts)?;
    let cells = levels.iter().flatten().filter_map(|&x| grid.locate(x)).collect();
    Ok(BoundarySet::new(*grid, cells, BoundaryMethod::BackwardOrbit))
}

const EDT_INF: f64 = 1e30;

/// Squared distance transform along one line (lower envelope of parabolas).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let parabola = |q: usize, p: usize| {
        ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
    };
    for q in 1..n {
        let mut s = parabola(q, v[k]);
        // z[0] = -inf, so the loop stops at k = 0
        while s <= z[k] {
            k -= 1;
            s = parabola(q, v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Exact squared Euclidean distance (in cell units) from every cell to the set.
pub fn squared_distance_transform(set: &BoundarySet) -> Vec<f64> {
    let grid = &set.grid;
    let mut d = vec![EDT_INF; grid.len()];
    for &c in &set.cells {
        d[c] = 0.0;
    }
    for axis in 0..grid.axes() {
        let n = grid.shape[axis];
        let stride: usize = grid.shape[..axis].iter().product();
        let lines: Vec<usize> = (0..grid.len()).filter(|&i| grid.coords(i)[axis] == 0).collect();
        let results = map_indices(lines.len(), |li| {
            let start = lines[li];
            let f: Vec<f64> = (0..n).map(|t| d[start + t * stride]).collect();
            let mut out = vec![0.0; n];
            let mut v = vec![0usize; n];
            let mut z = vec![0.0; n + 1];
            edt_1d(&f, &mut out, &mut v, &mut z);
            out
        });
        for (li, out) in results.into_iter().enumerate() {
            let start = lines[li];
            for (t, val) in out.into_iter().enumerate() {
                d[start + t * stride] = val.min(EDT_INF);
            }
        }
    }
    d
}

fn check_same_grid(a: &BoundarySet, b: &BoundarySet) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)));
    }
    Ok(())
}

/// Directed distance `max_{a in A} min_{b in B} |a - b|` in cell units.
fn directed(a: &BoundarySet, dt_b: &[f64]) -> f64 {
    a.cells.iter().map(|&c| dt_b[c]).fold(0.0, f64::max).sqrt()
}

/// Symmetric Hausdorff distance between cell-centre sets, in cell units.
/// Two empty sets are at distance 0; an empty and a non-empty set at `+inf`.
pub fn grid_hausdorff(a: &BoundarySet, b: &BoundarySet) -> Result<f64> {
    check_same_grid(a, b)?;
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok(f64::INFINITY),
        _ => {}
    }
    let da = squared_distance_transform(a);
    let db = squared_distance_transform(b);
    Ok(directed(a, &db).max(directed(b, &da)))
}

/// `|A ∩ B| / |A ∪ B|`; 1 for two empty sets.
pub fn overlap_fraction(a: &BoundarySet, b: &BoundarySet) -> Result<f64> {
    check_same_grid(a, b)?;
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.cells.len() && j < b.cells.len() {
        match a.cells[i].cmp(&b.cells[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct JuliaComparison {
    pub hausdorff_cells: f64,
    pub overlap_fraction: f64,
    pub grid: GridSpec,
    pub boundary_f: BoundarySet,
    pub boundary_g: BoundarySet,
}

/// Options for `compare_julia`; `None` policies select the per-map default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JuliaOptions {
    pub policy: Option<ClassificationPolicy>,
    pub backward_depth: usize,
    pub backward: BackwardOrbitOptions,
}

impl Default for JuliaOptions {
    fn default() -> Self {
        JuliaOptions { policy: None, backward_depth: 2, backward: BackwardOrbitOptions::default() }
    }
}

/// Julia-set approximation of one map with the method for its kind.
pub fn approximate_julia(f: &MapDescriptor, grid: &GridSpec, opts: &JuliaOptions) -> Result<BoundarySet> {
    match BoundaryMethod::for_kind(f.kind) {
        BoundaryMethod::BackwardOrbit => backward_orbit_julia(f, opts.backward_depth, grid, &opts.backward),
        method => {
            let policy = match opts.policy {
                Some(p) => p,
                None => ClassificationPolicy::for_map(f)?,
            };
            let field = classify_grid(f, grid, &policy)?;
            julia_boundary(&field, method == BoundaryMethod::FastEscapeBoundary)
        }
    }
}

pub fn compare_julia(f: &MapDescriptor, g: &MapDescriptor, grid: &GridSpec, opts: &JuliaOptions) -> Result<JuliaComparison> {
    if f.dimension != g.dimension {
        return Err(Error::GridMismatch(format!("{} and {} differ in dimension", f.id, g.id)));
    }
    let a = approximate_julia(f, grid, opts)?;
    let b = approximate_julia(g, grid, opts)?;
    Ok(JuliaComparison {
        hausdorff_cells: grid_hausdorff(&a, &b)?,
        overlap_fraction: overlap_fraction(&a, &b)?,
        grid: *grid,
        boundary_f: a,
        boundary_g: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iteration::OrbitClass;
    use crate::maps::{make_map, Params};

    fn cells(grid: GridSpec, pts: &[[usize; 2]]) -> BoundarySet {
        BoundarySet::new(grid, pts.iter().map(|p| grid.index([p[0], p[1], 0])).collect(), BoundaryMethod::EscapeBoundary)
    }

    fn brute(a: &BoundarySet, b: &BoundarySet) -> f64 {
        let d = |x: usize, y: usize| {
            let (p, q) = (a.grid.coords(x), a.grid.coords(y));
            (0..3).map(|i| (p[i] as f64 - q[i] as f64).powi(2)).sum::<f64>().sqrt()
        };
        let h = |s: &BoundarySet, t: &BoundarySet| {
            s.cells.iter().map(|&x| t.cells.iter().map(|&y| d(x, y)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
        };
        h(a, b).max(h(b, a))
    }

    #[test]
    fn hausdorff_of_two_cells() {
        let g = GridSpec::square(1.0, 10);
        let a = cells(g, &[[0, 0]]);
        let b = cells(g, &[[3, 4]]);
        assert_eq!(grid_hausdorff(&a, &b).unwrap(), 5.0);
        assert_eq!(grid_hausdorff(&a, &a).unwrap(), 0.0);
        assert_eq!(overlap_fraction(&a, &b).unwrap(), 0.0);
        assert_eq!(overlap_fraction(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let g = GridSpec::volume([0.0; 3], [1.0; 3], [7, 5, 4]);
        let a = BoundarySet::new(g, vec![3, 40, 77, 100], BoundaryMethod::EscapeBoundary);
        let b = BoundarySet::new(g, vec![0, 139, 55], BoundaryMethod::EscapeBoundary);
        assert!((grid_hausdorff(&a, &b).unwrap() - brute(&a, &b)).abs() < 1e-12);
        let other = GridSpec::volume([0.0; 3], [1.0; 3], [7, 5, 5]);
        let c = BoundarySet::new(other, vec![1], BoundaryMethod::EscapeBoundary);
        assert!(matches!(grid_hausdorff(&a, &c), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn all_bounded_field_has_empty_side() {
        let g = GridSpec::square(1.0, 4);
        let field = ClassificationField {
            grid: g,
            cells: vec![OrbitClass { tag: OrbitTag::Bounded, first_index: None, lag: None }; 16],
            policy: ClassificationPolicy::with_radius(2, 2.0),
        };
        assert!(matches!(julia_boundary(&field, false), Err(Error::EmptySide(_))));
    }

    #[test]
    fn tangent_depth_one_is_pole_row() {
        let tan = make_map("tangent", &Params::new()).unwrap();
        let g = GridSpec::square(4.0, 64);
        let set = backward_orbit_julia(&tan, 1, &g, &BackwardOrbitOptions::default()).unwrap();
        let expected: Vec<usize> = [-1.0, 1.0]
            .iter()
            .map(|k| g.locate(Vector::new2(k * core::f64::consts::FRAC_PI_2, 0.0)).unwrap())
            .collect();
        assert_eq!(set.cells.len(), 2);
        for e in expected {
            assert!(set.contains(e));
        }
        assert!(backward_orbit_julia(&tan, 0, &g, &BackwardOrbitOptions::default()).unwrap().is_empty());
        let sq = make_map("power", &[("n".into(), 2.0)].into_iter().collect()).unwrap();
        assert!(matches!(backward_orbit_julia(&sq, 1, &g, &BackwardOrbitOptions::default()), Err(Error::UnsupportedMap(_))));
    }
}
