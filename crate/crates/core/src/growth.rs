//! Growth of the maximum modulus: profiles, ratios, polynomial-type
//! envelopes, composition constants, and the low-modulus covering count.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::exec::map_indices;
use crate::grid::GridSpec;
use crate::maps::{compose, Kind, MapDescriptor};
use crate::modulus::{max_log_modulus, LN_MAX};
use crate::point::Vector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthSample {
    pub r: f64,
    /// `M(r, f)`; `+inf` past the floating range.
    pub m: f64,
    pub log_m: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProfile {
    pub map_id: String,
    pub samples: Vec<GrowthSample>,
    pub sphere_samples: usize,
}

impl GrowthProfile {
    /// `ln M` at `r`, interpolated linearly in `ln r` between samples.
    pub fn log_m_at(&self, r: f64) -> Option<f64> {
        let s = &self.samples;
        let i = s.iter().position(|p| p.r >= r * (1.0 - 1e-12))?;
        if (s[i].r - r).abs() <= 1e-12 * r {
            return Some(s[i].log_m);
        }
        if i == 0 {
            return None;
        }
        let (a, b) = (s[i - 1], s[i]);
        let t = (r.ln() - a.r.ln()) / (b.r.ln() - a.r.ln());
        Some(a.log_m + t * (b.log_m - a.log_m))
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InsufficientRadii("empty radius list".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("radii must be positive and strictly increasing: {radii:?}")));
    }
    Ok(())
}

/// `M(r, f)` at each radius.
pub fn growth_profile(f: &MapDescriptor, radii: &[f64], sphere_samples: usize) -> Result<GrowthProfile> {
    check_radii(radii)?;
    let samples = radii
        .iter()
        .map(|&r| {
            let est = max_log_modulus(f, r, sphere_samples);
            let log_m = if est.value.is_finite() && est.value > 0.0 { est.value.ln() } else { est.log_max };
            GrowthSample { r, m: est.value, log_m }
        })
        .collect();
    Ok(GrowthProfile { map_id: f.id.clone(), samples, sphere_samples })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioSample {
    pub r: f64,
    /// `M(λr) / M(r)`; `+inf` when it exceeds the floating range.
    pub ratio: f64,
    pub log_ratio: f64,
}

/// `M(λr, f) / M(r, f)` for every profile radius with `λr` inside the profile.
pub fn transcendence_ratio(profile: &GrowthProfile, lambda: f64) -> Result<Vec<RatioSample>> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must exceed 1, got {lambda}")));
    }
    let out: Vec<RatioSample> = profile
        .samples
        .iter()
        .filter_map(|s| {
            let hi = profile.log_m_at(lambda * s.r)?;
            let log_ratio = hi - s.log_m;
            let ratio = if log_ratio > LN_MAX { f64::INFINITY } else { log_ratio.exp() };
            Some(RatioSample { r: s.r, ratio, log_ratio })
        })
        .collect();
    if out.is_empty() {
        return Err(Error::InsufficientRadii(format!("no radius r with {lambda}r inside the profile")));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RickmanBoundReport {
    pub deg: u32,
    pub k_i: f64,
    pub k_o: f64,
    pub n1: f64,
    pub n2: f64,
    pub fitted_a: f64,
    pub fitted_b: f64,
    pub pass: bool,
}

/// Minimal top radius for a meaningful envelope check.
pub const RICKMAN_MIN_TOP_RADIUS: f64 = 1e3;
const ENVELOPE_SLACK: f64 = 1e-9;

/// Fits `A = min M/r^{n1}` and `B = max M/r^{n2}` on the lower half of the
/// ladder and checks `A r^{n1} <= M(r) <= B r^{n2}` on the upper half.
pub fn rickman_check(f: &MapDescriptor, profile: &GrowthProfile, deg: u32, k_i: f64, k_o: f64) -> Result<RickmanBoundReport> {
    if f.kind != Kind::PolynomialType {
        return Err(Error::NotPolynomialType(f.id.clone()));
    }
    if deg == 0 || !(k_i >= 1.0 && k_o >= 1.0 && k_i.is_finite() && k_o.is_finite()) {
        return Err(Error::InvalidParameter(format!("deg {deg}, K_I {k_i}, K_O {k_o}")));
    }
    let s = &profile.samples;
    if s.len() < 4 || s.last().map_or(true, |p| p.r < RICKMAN_MIN_TOP_RADIUS) {
        return Err(Error::InsufficientRadii(format!(
            "need at least 4 radii reaching {RICKMAN_MIN_TOP_RADIUS}"
        )));
    }
    let e = 1.0 / (f.dimension as f64 - 1.0);
    let n1 = (deg as f64 / k_i).powf(e);
    let n2 = (deg as f64 * k_o).powf(e);
    let (head, tail) = s.split_at(s.len() / 2);
    let lower = |p: &GrowthSample| p.log_m - n1 * p.r.ln();
    let upper = |p: &GrowthSample| p.log_m - n2 * p.r.ln();
    let log_a = head.iter().map(lower).fold(f64::INFINITY, f64::min);
    let log_b = head.iter().map(upper).fold(f64::NEG_INFINITY, f64::max);
    let pass = tail.iter().all(|p| lower(p) >= log_a - ENVELOPE_SLACK && upper(p) <= log_b + ENVELOPE_SLACK);
    Ok(RickmanBoundReport { deg, k_i, k_o, n1, n2, fitted_a: log_a.exp(), fitted_b: log_b.exp(), pass })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositionSample {
    pub r: f64,
    pub c_hat: f64,
}

/// `s` with `ln M(s, f) = target`, by bisection in `ln s`.
fn invert_log_modulus(f: &MapDescriptor, target: f64, samples: usize) -> Result<f64> {
    let lm = |s: f64| {
        let est = max_log_modulus(f, s, samples);
        if est.value.is_finite() && est.value > 0.0 {
            est.value.ln()
        } else {
            est.log_max
        }
    };
    let fail = |m: String| Err(Error::InversionFailure(m));
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let (mut f_lo, mut f_hi) = (lm(lo), lm(hi));
    while f_lo > target {
        lo *= 0.5;
        f_lo = lm(lo);
        if lo < 1e-300 {
            return fail(format!("no radius below target {target}"));
        }
    }
    while f_hi < target {
        hi *= 2.0;
        f_hi = lm(hi);
        if hi > 1e300 || f_hi.is_nan() {
            return fail(format!("no radius reaches target {target}"));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = (lo * hi).sqrt();
        let f_mid = lm(mid);
        if !(f_mid >= f_lo && f_mid <= f_hi) {
            return fail(format!("M not monotone on [{lo}, {hi}]"));
        }
        if f_mid < target {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    // log-log interpolation inside the final bracket
    if f_hi > f_lo {
        let t = (target - f_lo) / (f_hi - f_lo);
        Ok((lo.ln() + t * (hi.ln() - lo.ln())).exp())
    } else {
        Ok(lo)
    }
}

/// `c_hat(r) = M_f^{-1}(M(r, f∘g)) / M(r/2, g)` at each radius.
pub fn composition_growth(f: &MapDescriptor, g: &MapDescriptor, radii: &[f64], samples: usize) -> Result<Vec<CompositionSample>> {
    check_radii(radii)?;
    let fg = compose(f, g)?;
    radii
        .iter()
        .map(|&r| {
            let lhs = max_log_modulus(&fg, r, samples);
            let target = if lhs.value.is_finite() && lhs.value > 0.0 { lhs.value.ln() } else { lhs.log_max };
            let s = invert_log_modulus(f, target, samples)?;
            let half = max_log_modulus(g, r / 2.0, samples).value;
            Ok(CompositionSample { r, c_hat: s / half })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PitsReport {
    pub r: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub grid_density: usize,
    pub low_cell_count: usize,
    /// Greedy cover size, an upper bound on the minimal number of balls.
    pub cover_count: usize,
    pub low_cells: Vec<Vector>,
    pub cover_centers: Vec<Vector>,
}

/// Low set `{R <= |x| <= λR : |f(x)| <= R^α}` rasterized on a grid of
/// `grid_density` cells per axis over `[-λR, λR]^d`, then covered greedily
/// by balls of radius `εR` centred at low cells or at the origin.
pub fn pits_detect(f: &MapDescriptor, r: f64, lambda: f64, alpha: f64, epsilon: f64, grid_density: usize) -> Result<PitsReport> {
    if !(r > 0.0 && r.is_finite() && lambda > 1.0 && lambda.is_finite() && alpha > 1.0 && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("R {r}, lambda {lambda}, alpha {alpha}, epsilon {epsilon}")));
    }
    let half = lambda * r;
    let grid = if f.dimension == 2 {
        GridSpec::square(half, grid_density)
    } else {
        GridSpec::volume([-half; 3], [half; 3], [grid_density; 3])
    };
    grid.validate()?;
    let threshold = alpha * r.ln();
    let flags = map_indices(grid.len(), |i| {
        let x = grid.center(i);
        let n = x.norm();
        n >= r && n <= half && f.log_modulus(x) <= threshold
    });
    let low: Vec<usize> = (0..grid.len()).filter(|&i| flags[i]).collect();
    let low_cells: Vec<Vector> = low.iter().map(|&i| grid.center(i)).collect();
    let radius = epsilon * r;
    let mut report = PitsReport {
        r,
        lambda,
        alpha,
        epsilon,
        grid_density,
        low_cell_count: low.len(),
        cover_count: 0,
        low_cells,
        cover_centers: Vec::new(),
    };
    if low.is_empty() {
        return Ok(report);
    }
    if report.low_cells.iter().all(|c| c.norm() <= radius) {
        report.cover_count = 1;
        report.cover_centers.push(Vector::ZERO);
        return Ok(report);
    }
    let centers = greedy_cover(&grid, &low, &report.low_cells, radius);
    report.cover_count = centers.len();
    report.cover_centers = centers.into_iter().map(|k| report.low_cells[k]).collect();
    Ok(report)
}

/// Greedy set cover of low cells by balls centred at low cells. Ties go to the
/// lowest cell index. Returns positions into `low`.
fn greedy_cover(grid: &GridSpec, low: &[usize], pts: &[Vector], radius: f64) -> Vec<usize> {
    let pos_of = {
        let mut m = vec![usize::MAX; grid.len()];
        for (k, &i) in low.iter().enumerate() {
            m[i] = k;
        }
        m
    };
    let axes = grid.axes();
    let reach: Vec<usize> = (0..3).map(|a| if a < axes { (radius / grid.step(a)).ceil() as usize } else { 0 }).collect();
    let neighbours: Vec<Vec<usize>> = map_indices(low.len(), |k| {
        let c = grid.coords(low[k]);
        let range = |a: usize| c[a].saturating_sub(reach[a])..=(c[a] + reach[a]).min(grid.shape[a] - 1);
        let mut out = Vec::new();
        for z in range(2) {
            for y in range(1) {
                for x in range(0) {
                    let p = pos_of[grid.index([x, y, z])];
                    if p != usize::MAX && pts[p].dist(pts[k]) <= radius {
                        out.push(p);
                    }
                }
            }
        }
        out
    });
    let mut covered = vec![false; low.len()];
    let mut remaining = low.len();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        neighbours.iter().enumerate().map(|(k, n)| (n.len(), Reverse(k))).collect();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let Some((gain, Reverse(k))) = heap.pop() else { break };
        let fresh = neighbours[k].iter().filter(|&&p| !covered[p]).count();
        if fresh < gain {
            if fresh > 0 {
                heap.push((fresh, Reverse(k)));
            }
            continue;
        }
        for &p in &neighbours[k] {
            if !covered[p] {
                covered[p] = true;
                remaining -= 1;
            }
        }
        chosen.push(k);
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_map, Params};
    use core::f64::consts::E;

    fn map(name: &str, params: &[(&str, f64)]) -> MapDescriptor {
        let p: Params = params.iter().map(|(k, v)| ((*k).into(), *v)).collect();
        make_map(name, &p).unwrap()
    }

    #[test]
    fn profiles_of_closed_forms() {
        let p = growth_profile(&map("power", &[("n", 2.0)]), &[1.0, 2.0, 4.0], 4096).unwrap();
        let m: Vec<f64> = p.samples.iter().map(|s| s.m).collect();
        for (got, want) in m.iter().zip([1.0, 4.0, 16.0]) {
            assert!((got - want).abs() < 1e-13 * want);
        }
        let p = growth_profile(&map("exp", &[]), &[1.0, 2.0, 3.0], 4096).unwrap();
        for (s, k) in p.samples.iter().zip([1.0, 2.0, 3.0]) {
            assert!((s.m - E.powf(k)).abs() < 1e-12 * s.m);
        }
        assert!(growth_profile(&map("exp", &[]), &[2.0, 1.0], 64).is_err());
    }

    #[test]
    fn ratios() {
        let radii = [1.0, 2.0, 4.0, 8.0];
        let p = growth_profile(&map("power", &[("n", 2.0)]), &radii, 4096).unwrap();
        let t = transcendence_ratio(&p, 2.0).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|s| (s.ratio - 4.0).abs() < 1e-12));
        let p = growth_profile(&map("exp", &[]), &radii, 4096).unwrap();
        let t = transcendence_ratio(&p, 2.0).unwrap();
        for (s, r) in t.iter().zip([1.0, 2.0, 4.0]) {
            assert!((s.log_ratio - r).abs() < 1e-12);
        }
        let short = growth_profile(&map("exp", &[]), &[1.0], 64).unwrap();
        assert!(matches!(transcendence_ratio(&short, 2.0), Err(Error::InsufficientRadii(_))));
    }

    #[test]
    fn profile_interpolates_in_log_log() {
        let p = growth_profile(&map("power", &[("n", 3.0)]), &[1.0, 4.0], 4096).unwrap();
        assert!((p.log_m_at(2.0).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert_eq!(p.log_m_at(0.5), None);
        assert_eq!(p.log_m_at(5.0), None);
    }

    #[test]
    fn envelopes() {
        let radii: Vec<f64> = (0..12).map(|k| 2f64.powi(k)).collect();
        let sq = map("power", &[("n", 2.0)]);
        let p = growth_profile(&sq, &radii, 4096).unwrap();
        let rep = rickman_check(&sq, &p, 2, 1.0, 1.0).unwrap();
        assert!(rep.pass && (rep.fitted_a - 1.0).abs() < 1e-9 && (rep.fitted_b - 1.0).abs() < 1e-9);
        assert!(!rickman_check(&sq, &p, 3, 1.0, 1.0).unwrap().pass);
        let e = map("exp", &[]);
        assert!(matches!(rickman_check(&e, &p, 2, 1.0, 1.0), Err(Error::NotPolynomialType(_))));
        let short = growth_profile(&sq, &radii[..5], 64).unwrap();
        assert!(matches!(rickman_check(&sq, &short, 2, 1.0, 1.0), Err(Error::InsufficientRadii(_))));
    }

    #[test]
    fn composition_constant_for_exp_and_square() {
        let e = map("exp", &[]);
        let c = composition_growth(&e, &map("power", &[("n", 2.0)]), &[4.0, 8.0], 4096).unwrap();
        for s in c {
            assert!((s.c_hat - 4.0).abs() < 1e-9, "{s:?}");
        }
        let c = composition_growth(&e, &map("identity", &[]), &[3.0], 4096).unwrap();
        assert!((c[0].c_hat - 2.0).abs() < 1e-9);
    }

    #[test]
    fn pits_on_square_and_huge_ball() {
        let sq = map("power", &[("n", 2.0)]);
        // the low set of z^2 is the ring 10 <= |z| <= 10^{α/2}
        for alpha in [2.0, 2.1] {
            let rep = pits_detect(&sq, 10.0, 2.0, alpha, 0.1, 200).unwrap();
            let grid = GridSpec::square(20.0, 200);
            let oracle = (0..grid.len())
                .map(|i| grid.center(i).norm())
                .filter(|&n| n >= 10.0 && n <= 20.0 && n * n <= 10f64.powf(alpha))
                .count();
            assert_eq!(rep.low_cell_count, oracle);
            assert!(rep.low_cells.iter().all(|c| c.norm() <= 10f64.powf(alpha / 2.0)));
            assert_eq!(rep.cover_count == 0, oracle == 0);
        }
        let rep = pits_detect(&sq, 10.0, 2.0, 3.0, 2.0 * 2f64.sqrt(), 50).unwrap();
        assert!(rep.low_cell_count > 0);
        assert_eq!(rep.cover_count, 1);
        let none = pits_detect(&map("exp", &[]), 10.0, 2.0, 1.01, 0.1, 40).unwrap();
        assert!(none.low_cell_count > 0);
        let empty = pits_detect(&sq, 10.0, 2.0, 1.5, 0.1, 40).unwrap();
        assert_eq!((empty.low_cell_count, empty.cover_count), (0, 0));
    }
}
