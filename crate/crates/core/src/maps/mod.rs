//! Evaluable map families and the combinators that build commuting partners.

mod families;
pub(crate) mod rational;
pub(crate) mod zorich;

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::point::{Point, Vector};

pub use families::{make_map, Family, Params};
pub use rational::{Poly, Rational};

pub type Evaluator = Arc<dyn Fn(Vector) -> Point + Send + Sync>;
pub type ScalarField = Arc<dyn Fn(Vector) -> f64 + Send + Sync>;
pub type InverseRule = Arc<dyn Fn(Point, &Window) -> Vec<Vector> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    PolynomialType,
    TranscendentalType,
    Quasimeromorphic,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::PolynomialType => "polynomial_type",
            Kind::TranscendentalType => "transcendental_type",
            Kind::Quasimeromorphic => "quasimeromorphic",
        }
    }
}

/// `f(x + shift) = f(x) + offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Period {
    pub shift: Vector,
    pub offset: Vector,
}

/// Axis-aligned box used to materialize infinite pole and preimage sets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub lo: Vector,
    pub hi: Vector,
}

impl Window {
    /// Square window `[-r, r]^2` in the plane (third axis collapsed to 0).
    pub fn centered_square(r: f64) -> Self {
        Window { lo: Vector::new2(-r, -r), hi: Vector::new2(r, r) }
    }

    pub fn contains(&self, x: Vector) -> bool {
        (0..3).all(|i| x.0[i] >= self.lo.0[i] && x.0[i] <= self.hi.0[i])
    }
}

/// How the poles of a quasimeromorphic map are enumerated.
#[derive(Clone, Debug, PartialEq)]
pub enum PoleRule {
    Finite(Vec<Vector>),
    /// `base + k * step` for every integer `k`.
    Arithmetic { base: Vector, step: Vector },
}

impl PoleRule {
    pub fn poles_in(&self, window: &Window) -> Vec<Vector> {
        match self {
            PoleRule::Finite(list) => list.iter().copied().filter(|p| window.contains(*p)).collect(),
            PoleRule::Arithmetic { base, step } => {
                let (mut k_lo, mut k_hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for i in 0..3 {
                    let (b, s) = (base.0[i], step.0[i]);
                    if s == 0.0 {
                        if b < window.lo.0[i] || b > window.hi.0[i] {
                            return Vec::new();
                        }
                        continue;
                    }
                    let (a, c) = ((window.lo.0[i] - b) / s, (window.hi.0[i] - b) / s);
                    k_lo = k_lo.max(a.min(c));
                    k_hi = k_hi.min(a.max(c));
                }
                if !(k_lo.is_finite() && k_hi.is_finite()) || k_lo > k_hi {
                    return Vec::new();
                }
                let (first, last) = (k_lo.floor() as i64 - 1, k_hi.ceil() as i64 + 1);
                (first..=last)
                    .map(|k| *base + step.scale(k as f64))
                    .filter(|p| window.contains(*p))
                    .collect()
            }
        }
    }

    pub fn distance(&self, x: Vector) -> f64 {
        match self {
            PoleRule::Finite(list) => list.iter().map(|p| p.dist(x)).fold(f64::INFINITY, f64::min),
            PoleRule::Arithmetic { base, step } => {
                let s2 = step.dot(*step);
                let k = ((x - *base).dot(*step) / s2).round();
                [-1.0, 0.0, 1.0]
                    .iter()
                    .map(|d| x.dist(*base + step.scale(k + d)))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// An evaluable map `R^d -> R^d` (or into the compactification) with metadata.
#[derive(Clone)]
pub struct MapDescriptor {
    pub id: String,
    pub dimension: usize,
    pub kind: Kind,
    pub family: Option<Family>,
    pub poles: Option<PoleRule>,
    pub periods: Vec<Period>,
    pub nominal_degree: Option<u32>,
    pub nominal_dilatation: Option<f64>,
    pub(crate) evaluator: Evaluator,
    pub(crate) log_modulus: Option<ScalarField>,
    pub(crate) pole_distance: Option<ScalarField>,
    pub(crate) seam_distance: Option<ScalarField>,
    pub(crate) inverse: Option<InverseRule>,
}

impl fmt::Debug for MapDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapDescriptor")
            .field("id", &self.id)
            .field("dimension", &self.dimension)
            .field("kind", &self.kind)
            .field("poles", &self.poles)
            .field("periods", &self.periods)
            .field("nominal_degree", &self.nominal_degree)
            .field("nominal_dilatation", &self.nominal_dilatation)
            .finish_non_exhaustive()
    }
}

impl MapDescriptor {
    /// A bare map with no optional metadata.
    pub fn new(
        id: impl Into<String>,
        dimension: usize,
        kind: Kind,
        evaluator: impl Fn(Vector) -> Point + Send + Sync + 'static,
    ) -> Self {
        MapDescriptor {
            id: id.into(),
            dimension,
            kind,
            family: None,
            poles: None,
            periods: Vec::new(),
            nominal_degree: None,
            nominal_dilatation: None,
            evaluator: Arc::new(evaluator),
            log_modulus: None,
            pole_distance: None,
            seam_distance: None,
            inverse: None,
        }
    }

    pub fn with_log_modulus(mut self, f: impl Fn(Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.log_modulus = Some(Arc::new(f));
        self
    }

    pub fn with_seams(mut self, f: impl Fn(Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.seam_distance = Some(Arc::new(f));
        self
    }

    pub fn with_inverse(mut self, f: impl Fn(Point, &Window) -> Vec<Vector> + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(f));
        self
    }

    pub fn with_pole_rule(mut self, rule: PoleRule) -> Self {
        let r = rule.clone();
        self.pole_distance = Some(Arc::new(move |x| r.distance(x)));
        self.poles = Some(rule);
        self
    }

    #[inline]
    pub fn eval(&self, x: Vector) -> Point {
        (self.evaluator)(x)
    }

    /// Evaluation on the compactification: infinity is absorbing.
    #[inline]
    pub fn eval_point(&self, p: Point) -> Point {
        match p {
            Point::Finite(x) => self.eval(x),
            Point::Infinity => Point::Infinity,
        }
    }

    /// `ln |f(x)|`, computed without overflow where a closed form is known.
    pub fn log_modulus(&self, x: Vector) -> f64 {
        match &self.log_modulus {
            Some(f) => f(x),
            None => match self.eval(x) {
                Point::Finite(y) => y.norm().ln(),
                Point::Infinity => f64::INFINITY,
            },
        }
    }

    /// Distance from `x` to the nearest pole (`+inf` for pole-free maps).
    pub fn pole_distance(&self, x: Vector) -> f64 {
        self.pole_distance.as_ref().map_or(f64::INFINITY, |f| f(x))
    }

    /// Distance from `x` to the nearest non-smooth seam (`+inf` for smooth maps).
    pub fn seam_distance(&self, x: Vector) -> f64 {
        self.seam_distance.as_ref().map_or(f64::INFINITY, |f| f(x))
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    /// Preimages of `target` inside `window`.
    pub fn preimages(&self, target: Point, window: &Window) -> Result<Vec<Vector>> {
        match &self.inverse {
            Some(inv) => Ok(inv(target, window)),
            None => Err(Error::UnsupportedMap(self.id.clone())),
        }
    }

    /// Poles of the map inside `window`.
    pub fn poles_in(&self, window: &Window) -> Result<Vec<Vector>> {
        match (&self.poles, &self.inverse) {
            (Some(rule), _) => Ok(rule.poles_in(window)),
            (None, Some(inv)) => Ok(inv(Point::Infinity, window)),
            (None, None) => Err(Error::UnsupportedMap(self.id.clone())),
        }
    }
}

fn fmt_vec(v: Vector, dim: usize) -> String {
    let parts: Vec<String> = v.0[..dim].iter().map(|c| format!("{c}")).collect();
    format!("({})", parts.join(","))
}

/// `g = a f + c`.
pub fn translate_map(f: &MapDescriptor, a: f64, c: Vector) -> Result<MapDescriptor> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale a must be positive, got {a}")));
    }
    if !c.is_finite() || (f.dimension == 2 && c.0[2] != 0.0) {
        return Err(Error::InvalidParameter("translation vector must be finite and match the dimension".into()));
    }
    let id = format!("{}*{}+{}", f.id, a, fmt_vec(c, f.dimension));
    let inner = f.evaluator.clone();
    let mut g = MapDescriptor::new(id, f.dimension, f.kind, move |x| match inner(x) {
        Point::Finite(y) => Point::Finite(y.scale(a) + c),
        Point::Infinity => Point::Infinity,
    });
    g.poles = f.poles.clone();
    g.pole_distance = f.pole_distance.clone();
    g.seam_distance = f.seam_distance.clone();
    g.nominal_degree = f.nominal_degree;
    g.nominal_dilatation = f.nominal_dilatation;
    g.periods = f.periods.iter().map(|p| Period { shift: p.shift, offset: p.offset.scale(a) }).collect();
    let base = f.clone();
    g.log_modulus = Some(Arc::new(move |x| match base.eval(x) {
        Point::Finite(y) if y.norm().is_finite() => (y.scale(a) + c).norm().ln(),
        Point::Finite(_) => a.ln() + base.log_modulus(x),
        Point::Infinity => f64::INFINITY,
    }));
    if let Some(inv) = f.inverse.clone() {
        g.inverse = Some(Arc::new(move |w: Point, win: &Window| match w {
            Point::Finite(w) => inv(Point::Finite((w - c).scale(1.0 / a)), win),
            Point::Infinity => inv(Point::Infinity, win),
        }));
    }
    Ok(g)
}

/// `outer ∘ inner`.
pub fn compose(outer: &MapDescriptor, inner: &MapDescriptor) -> Result<MapDescriptor> {
    if outer.dimension != inner.dimension {
        return Err(Error::InvalidParameter(format!(
            "cannot compose maps of dimension {} and {}",
            outer.dimension, inner.dimension
        )));
    }
    let kind = match (outer.kind, inner.kind) {
        (Kind::Quasimeromorphic, _) | (_, Kind::Quasimeromorphic) => Kind::Quasimeromorphic,
        (Kind::PolynomialType, Kind::PolynomialType) => Kind::PolynomialType,
        _ => Kind::TranscendentalType,
    };
    let id = format!("{}∘{}", outer.id, inner.id);
    let (o, i) = (outer.clone(), inner.clone());
    let mut h = MapDescriptor::new(id, outer.dimension, kind, move |x| o.eval_point(i.eval(x)));
    h.nominal_degree = match (outer.nominal_degree, inner.nominal_degree) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    h.nominal_dilatation = match (outer.nominal_dilatation, inner.nominal_dilatation) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    let (o, i) = (outer.clone(), inner.clone());
    h.log_modulus = Some(Arc::new(move |x| match i.eval(x) {
        Point::Finite(y) if y.is_finite() => o.log_modulus(y),
        _ => f64::INFINITY,
    }));
    if outer.pole_distance.is_some() || inner.pole_distance.is_some() {
        let (o, i) = (outer.clone(), inner.clone());
        h.pole_distance = Some(Arc::new(move |x| match i.eval(x) {
            Point::Finite(y) => i.pole_distance(x).min(o.pole_distance(y)),
            Point::Infinity => 0.0,
        }));
    }
    if outer.seam_distance.is_some() || inner.seam_distance.is_some() {
        let (o, i) = (outer.clone(), inner.clone());
        h.seam_distance = Some(Arc::new(move |x| match i.eval(x) {
            Point::Finite(y) => i.seam_distance(x).min(o.seam_distance(y)),
            Point::Infinity => 0.0,
        }));
    }
    if let (Some(oi), Some(ii)) = (outer.inverse.clone(), inner.inverse.clone()) {
        let outer_has_poles = outer.kind == Kind::Quasimeromorphic;
        h.inverse = Some(Arc::new(move |w: Point, win: &Window| {
            let mut mids = oi(w, win);
            let mut out = Vec::new();
            if w.is_infinity() && outer_has_poles {
                // inner points that are themselves poles also reach infinity
                out.extend(ii(Point::Infinity, win));
            }
            mids.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]).then(a.0[1].total_cmp(&b.0[1])));
            for m in mids {
                out.extend(ii(Point::Finite(m), win));
            }
            out
        }));
    }
    Ok(h)
}

/// `f^n`; a pole hit at any intermediate step yields infinity.
pub fn iterate_map(f: &MapDescriptor, n: u32) -> Result<MapDescriptor> {
    if n == 0 {
        return Err(Error::InvalidParameter("iteration count must be at least 1".into()));
    }
    let mut g = f.clone();
    for _ in 1..n {
        g = compose(f, &g)?;
    }
    g.id = format!("{}^{}", f.id, n);
    if n > 1 {
        // (p, q) survives iteration when q = 0 or q = p
        g.periods = f
            .periods
            .iter()
            .filter(|p| p.offset == Vector::ZERO || p.offset == p.shift)
            .copied()
            .collect();
    }
    Ok(g)
}
