//! Orbits and per-point classification, including the fast-escape test
//! against the iterated max-modulus ladder `M^0 = R`, `M^{k+1} = M(M^k, f)`.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::exec::map_indices;
use crate::grid::GridSpec;
use crate::maps::{Kind, MapDescriptor};
use crate::modulus::{default_sphere_samples, max_log_modulus};
use crate::point::{Point, Vector};

/// Orbit points beyond this modulus are treated as having reached infinity.
pub const OVERFLOW_MODULUS: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbitTag {
    FastEscaping,
    Escaping,
    Bounded,
    HitPole,
    Undetermined,
}

impl OrbitTag {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitTag::FastEscaping => "fast_escaping",
            OrbitTag::Escaping => "escaping",
            OrbitTag::Bounded => "bounded",
            OrbitTag::HitPole => "hit_pole",
            OrbitTag::Undetermined => "undetermined",
        }
    }

    /// Fast-escaping cells are also escaping.
    pub fn is_escaping(self) -> bool {
        matches!(self, OrbitTag::FastEscaping | OrbitTag::Escaping)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitClass {
    pub tag: OrbitTag,
    /// First escape index or index of the point mapped to a pole.
    pub first_index: Option<usize>,
    /// Smallest lag certifying fast escape.
    pub lag: Option<usize>,
}

impl OrbitClass {
    fn plain(tag: OrbitTag) -> Self {
        OrbitClass { tag, first_index: None, lag: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassificationPolicy {
    pub base_radius: f64,
    pub max_iter: usize,
    pub escape_radius: f64,
    pub max_lag: usize,
    pub modulus_samples: usize,
}

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;
pub const DEFAULT_MAX_ITER: usize = 60;
pub const DEFAULT_MAX_LAG: usize = 8;
const MAX_RADIUS_DOUBLINGS: u32 = 30;
/// Minimal gain in `ln M` per ladder step.
const MONOTONE_TOL: f64 = 1e-9;

impl ClassificationPolicy {
    /// Default policy for dimension `dim` with base radius `r`.
    pub fn with_radius(dim: usize, r: f64) -> Self {
        ClassificationPolicy {
            base_radius: r,
            max_iter: DEFAULT_MAX_ITER,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            max_lag: DEFAULT_MAX_LAG,
            modulus_samples: default_sphere_samples(dim),
        }
    }

    /// Default policy with the base radius doubled from 1 until the
    /// max-modulus ladder of `f` is increasing.
    pub fn for_map(f: &MapDescriptor) -> Result<Self> {
        let mut p = Self::with_radius(f.dimension, 1.0);
        admissible_radius(f, &mut p)?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.base_radius > 0.0
            && self.base_radius.is_finite()
            && self.escape_radius >= self.base_radius
            && self.escape_radius.is_finite()
            && self.max_lag >= 1
            && self.max_iter >= self.max_lag + 2
            && self.modulus_samples >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("inconsistent classification policy {self:?}")))
        }
    }
}

/// Doubles `policy.base_radius` until the ladder is increasing.
pub fn admissible_radius(f: &MapDescriptor, policy: &mut ClassificationPolicy) -> Result<Vec<f64>> {
    let mut last = None;
    for _ in 0..=MAX_RADIUS_DOUBLINGS {
        match max_modulus_sequence(f, policy.base_radius, policy.max_iter, policy.modulus_samples) {
            Ok(seq) => {
                if policy.escape_radius < policy.base_radius {
                    policy.escape_radius = policy.base_radius;
                }
                return Ok(seq);
            }
            Err(e) => last = Some(e),
        }
        policy.base_radius *= 2.0;
    }
    Err(last.unwrap_or_else(|| Error::InvalidParameter("no admissible base radius".into())))
}

/// `M^0 = R, ..., M^n`. Entries past the floating range are `+inf`.
pub fn max_modulus_sequence(f: &MapDescriptor, r: f64, n: usize, samples: usize) -> Result<Vec<f64>> {
    Ok(ladder(f, r, n, samples)?.0)
}

/// `ln M^0, ..., ln M^n`. This reaches one level further than
/// `max_modulus_sequence`: `ln M^{k+1}` is finite whenever `M^k` is.
pub fn log_max_modulus_sequence(f: &MapDescriptor, r: f64, n: usize, samples: usize) -> Result<Vec<f64>> {
    Ok(ladder(f, r, n, samples)?.1)
}

fn ladder(f: &MapDescriptor, r: f64, n: usize, samples: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut values = Vec::with_capacity(n + 1);
    let mut logs = Vec::with_capacity(n + 1);
    values.push(r);
    logs.push(r.ln());
    for step in 1..=n {
        let cur = values[step - 1];
        if !cur.is_finite() {
            values.push(f64::INFINITY);
            logs.push(f64::INFINITY);
            continue;
        }
        let est = max_log_modulus(f, cur, samples);
        let next_log = if est.value.is_finite() && est.value > 0.0 { est.value.ln() } else { est.log_max };
        // rounding can lift a flat ladder (|z^2| on the unit circle) just above itself
        if next_log.is_nan() || (next_log.is_finite() && next_log <= logs[step - 1] + MONOTONE_TOL) {
            return Err(Error::NonMonotoneModulus { step, prev: cur, next: est.value });
        }
        values.push(est.value);
        logs.push(next_log);
    }
    Ok((values, logs))
}

/// Outcome of one step of an orbit.
enum Step {
    Next(Vector),
    Pole,
    Overflow,
    Undefined,
}

fn step(f: &MapDescriptor, x: Vector) -> Step {
    match f.eval(x) {
        Point::Infinity if f.kind == Kind::Quasimeromorphic => Step::Pole,
        Point::Infinity => Step::Overflow,
        Point::Finite(y) if y.is_finite() && y.norm() <= OVERFLOW_MODULUS => Step::Next(y),
        Point::Finite(_) => {
            // a non-finite image is an overflow only if the modulus really is huge
            let lm = f.log_modulus(x);
            if lm >= OVERFLOW_MODULUS.ln() {
                Step::Overflow
            } else {
                Step::Undefined
            }
        }
    }
}

/// `x0, f(x0), ...`, stopping after `max_iter` steps, at the first point
/// beyond `escape_radius`, or at a pole (last element is then infinity).
pub fn orbit(f: &MapDescriptor, x0: Vector, policy: &ClassificationPolicy) -> Vec<Point> {
    let mut out = Vec::with_capacity(policy.max_iter + 1);
    out.push(Point::Finite(x0));
    let mut x = x0;
    if x.norm() > policy.escape_radius {
        return out;
    }
    for _ in 0..policy.max_iter {
        match step(f, x) {
            Step::Next(y) => {
                out.push(Point::Finite(y));
                if y.norm() > policy.escape_radius {
                    break;
                }
                x = y;
            }
            Step::Pole | Step::Overflow => {
                out.push(Point::Infinity);
                break;
            }
            Step::Undefined => break,
        }
    }
    out
}

/// Classifier with a precomputed max-modulus ladder.
#[derive(Clone, Debug)]
pub struct Classifier {
    pub policy: ClassificationPolicy,
    /// `ln M^n` for `n = 0..=max_iter`.
    pub log_ladder: Vec<f64>,
}

impl Classifier {
    pub fn new(f: &MapDescriptor, policy: ClassificationPolicy) -> Result<Self> {
        policy.validate()?;
        let log_ladder = log_max_modulus_sequence(f, policy.base_radius, policy.max_iter, policy.modulus_samples)?;
        Ok(Classifier { policy, log_ladder })
    }

    pub fn classify(&self, f: &MapDescriptor, x0: Vector) -> OrbitClass {
        let p = &self.policy;
        // moduli |f^n(x0)|; +inf once the orbit overflows
        let mut moduli = Vec::with_capacity(p.max_iter + 1);
        moduli.push(x0.norm());
        let mut x = x0;
        let mut overflowed = false;
        for n in 0..p.max_iter {
            match step(f, x) {
                Step::Next(y) => {
                    moduli.push(y.norm());
                    x = y;
                }
                Step::Pole => {
                    return OrbitClass { tag: OrbitTag::HitPole, first_index: Some(n), lag: None };
                }
                Step::Overflow => {
                    overflowed = true;
                    break;
                }
                Step::Undefined => return OrbitClass::plain(OrbitTag::Undetermined),
            }
        }
        let at = |n: usize| -> f64 {
            if n < moduli.len() {
                moduli[n]
            } else {
                f64::INFINITY
            }
        };
        let horizon = if overflowed { usize::MAX } else { moduli.len() - 1 };

        let above: Vec<bool> = moduli.iter().map(|&m| m > p.escape_radius).collect();
        let escape_from = match above.iter().rposition(|&a| !a) {
            None => Some(0),
            Some(last_below) if last_below + 1 < moduli.len() || overflowed => Some(last_below + 1),
            Some(_) => None,
        };
        let Some(first) = escape_from else {
            return if above.iter().any(|&a| a) {
                OrbitClass::plain(OrbitTag::Undetermined)
            } else {
                OrbitClass::plain(OrbitTag::Bounded)
            };
        };

        let fast_lag = (1..=p.max_lag).find(|&lag| {
            let mut checked = 0;
            for (n, &lm) in self.log_ladder.iter().enumerate() {
                if !lm.is_finite() || n + lag > horizon {
                    break;
                }
                if at(n + lag).ln() <= lm {
                    return false;
                }
                checked += 1;
            }
            checked > 0 || overflowed
        });
        OrbitClass {
            tag: if fast_lag.is_some() { OrbitTag::FastEscaping } else { OrbitTag::Escaping },
            first_index: Some(first),
            lag: fast_lag,
        }
    }
}

pub fn classify_point(f: &MapDescriptor, x0: Vector, policy: &ClassificationPolicy) -> Result<OrbitClass> {
    Ok(Classifier::new(f, *policy)?.classify(f, x0))
}

/// Per-cell classifications of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationField {
    pub grid: GridSpec,
    pub cells: Vec<OrbitClass>,
    pub policy: ClassificationPolicy,
}

impl ClassificationField {
    pub fn count(&self, tag: OrbitTag) -> usize {
        self.cells.iter().filter(|c| c.tag == tag).count()
    }
}

pub fn classify_grid(f: &MapDescriptor, grid: &GridSpec, policy: &ClassificationPolicy) -> Result<ClassificationField> {
    grid.validate()?;
    if grid.dimension != f.dimension {
        return Err(Error::GridMismatch(format!(
            "grid is {}-dimensional but map `{}` is {}-dimensional",
            grid.dimension, f.id, f.dimension
        )));
    }
    let classifier = Classifier::new(f, *policy)?;
    let cells = map_indices(grid.len(), |i| classifier.classify(f, grid.center(i)));
    let undetermined = cells.iter().filter(|c| c.tag == OrbitTag::Undetermined).count();
    if undetermined > 0 {
        log::warn!("{}: {undetermined} of {} cells undetermined", f.id, cells.len());
    }
    Ok(ClassificationField { grid: *grid, cells, policy: *policy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_map, Params};

    fn map(name: &str, params: &[(&str, f64)]) -> MapDescriptor {
        let p: Params = params.iter().map(|(k, v)| ((*k).into(), *v)).collect();
        make_map(name, &p).unwrap()
    }

    fn policy(r: f64) -> ClassificationPolicy {
        ClassificationPolicy::with_radius(2, r)
    }

    #[test]
    fn square_orbit_stops_past_escape_radius() {
        let f = map("power", &[("n", 2.0)]);
        let mut p = policy(2.0);
        p.escape_radius = 100.0;
        let o: Vec<f64> = orbit(&f, Vector::new2(2.0, 0.0), &p).iter().map(|q| q.norm()).collect();
        assert_eq!(o, [2.0, 4.0, 16.0, 256.0]);
    }

    #[test]
    fn chebyshev_orbit_reaches_fixed_point() {
        let f = map("chebyshev", &[("n", 2.0)]);
        let o = orbit(&f, Vector::new2(1.0, 0.0), &policy(2.0));
        assert_eq!(o.len(), DEFAULT_MAX_ITER + 1);
        assert_eq!(o[1], Point::Finite(Vector::new2(-1.0, 0.0)));
        assert!(o.iter().skip(1).all(|q| *q == Point::Finite(Vector::new2(-1.0, 0.0))));
    }

    #[test]
    fn tangent_pole_at_start() {
        let f = map("tangent", &[]);
        let x0 = Vector::new2(core::f64::consts::FRAC_PI_2, 0.0);
        let o = orbit(&f, x0, &policy(1.0));
        assert_eq!(o, [Point::Finite(x0), Point::Infinity]);
        let c = Classifier { policy: policy(1.0), log_ladder: alloc::vec![0.0] }.classify(&f, x0);
        assert_eq!(c, OrbitClass { tag: OrbitTag::HitPole, first_index: Some(0), lag: None });
    }

    #[test]
    fn ladders() {
        let sq = map("power", &[("n", 2.0)]);
        assert_eq!(max_modulus_sequence(&sq, 2.0, 3, 4096).unwrap(), [2.0, 4.0, 16.0, 256.0]);
        assert!(matches!(max_modulus_sequence(&sq, 1.0, 3, 4096), Err(Error::NonMonotoneModulus { step: 1, .. })));
        let e = map("exp", &[]);
        let s = max_modulus_sequence(&e, 1.0, 2, 4096).unwrap();
        assert!((s[1] - core::f64::consts::E).abs() < 1e-14);
        assert!((s[2] - core::f64::consts::E.exp()).abs() < 1e-12);
        let z = map("zorich", &[]);
        let s = max_modulus_sequence(&z, 1.0, 1, 20000).unwrap();
        assert!((s[1] - core::f64::consts::E).abs() < 1e-10);
        // e^{e^e} is representable but its exponential is not
        let l = log_max_modulus_sequence(&e, 1.0, 4, 4096).unwrap();
        assert!((l[3] - core::f64::consts::E.exp()).abs() < 1e-12);
        assert!((l[4] - l[3].exp()).abs() < 1e-6 * l[4]);
        assert_eq!(max_modulus_sequence(&e, 1.0, 5, 4096).unwrap()[5], f64::INFINITY);
    }

    #[test]
    fn exp_fast_escape_with_unit_lag() {
        let e = map("exp", &[]);
        let mut p = policy(1.0);
        p.max_lag = 2;
        let c = classify_point(&e, Vector::new2(10.0, 0.0), &p).unwrap();
        assert_eq!(c.tag, OrbitTag::FastEscaping);
        assert_eq!(c.lag, Some(1));
    }

    #[test]
    fn square_inside_disk_is_bounded() {
        let f = map("power", &[("n", 2.0)]);
        let c = classify_point(&f, Vector::new2(0.5, 0.0), &policy(2.0)).unwrap();
        assert_eq!(c.tag, OrbitTag::Bounded);
        let c = classify_point(&f, Vector::new2(1.5, 0.0), &policy(2.0)).unwrap();
        assert!(c.tag.is_escaping());
    }

    #[test]
    fn default_policy_doubles_radius() {
        let f = map("power", &[("n", 2.0)]);
        assert_eq!(ClassificationPolicy::for_map(&f).unwrap().base_radius, 2.0);
        let e = map("exp", &[]);
        assert_eq!(ClassificationPolicy::for_map(&e).unwrap().base_radius, 1.0);
    }

    #[test]
    fn one_cell_grid_matches_point() {
        let f = map("power", &[("n", 2.0)]);
        let g = GridSpec::plane([0.4, -0.1], [0.6, 0.1], 1, 1);
        let field = classify_grid(&f, &g, &policy(2.0)).unwrap();
        assert_eq!(field.cells, [classify_point(&f, Vector::new2(0.5, 0.0), &policy(2.0)).unwrap()]);
    }
}
