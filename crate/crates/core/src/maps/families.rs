//! The registry of concrete map families.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_traits::Float;

use super::rational::{Poly, Rational};
use super::zorich;
use super::{Kind, MapDescriptor, Period, PoleRule, Window};
use crate::error::{Error, Result};
use crate::point::{cexpm1, ctan, log_abs_sin_plus_linear, Point, Vector};

pub type Params = BTreeMap<String, f64>;

/// Points closer than this to a pole evaluate to infinity.
pub const POLE_CAPTURE: f64 = 1e-9;

/// Default constant of `c (e^{z^2} - 1)`.
pub const DEFAULT_EXP_SQ_C: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Power { n: u32 },
    /// `T_n(w + 1/w) = w^n + w^{-n}`, so `T_2(x) = x^2 - 2`.
    Chebyshev { n: u32 },
    LattesDouble,
    LattesSqrt2i,
    RadialStretch { m: f64 },
    ExpSq { c: f64 },
    /// `sin z + z + shift`.
    PeriodicTranslate { shift: f64 },
    Tangent,
    Exp,
    Zorich,
    ZorichG { l: f64 },
    ZorichH { l: f64, l_prime: f64 },
    Identity { dim: usize },
}

struct ParamReader<'a> {
    family: &'a str,
    params: &'a Params,
    used: Vec<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn get(&mut self, key: &'static str, default: Option<f64>) -> Result<f64> {
        self.used.push(key);
        match (self.params.get(key), default) {
            (Some(v), _) if v.is_finite() => Ok(*v),
            (Some(v), _) => Err(Error::InvalidParameter(format!("{}: {key} must be finite, got {v}", self.family))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidParameter(format!("{}: missing parameter `{key}`", self.family))),
        }
    }

    fn integer(&mut self, key: &'static str, min: u32) -> Result<u32> {
        let v = self.get(key, None)?;
        if v.fract() != 0.0 || v < min as f64 || v > 64.0 {
            return Err(Error::InvalidParameter(format!(
                "{}: {key} must be an integer in [{min}, 64], got {v}",
                self.family
            )));
        }
        Ok(v as u32)
    }

    fn positive(&mut self, key: &'static str, default: Option<f64>) -> Result<f64> {
        let v = self.get(key, default)?;
        if v <= 0.0 {
            return Err(Error::InvalidParameter(format!("{}: {key} must be positive, got {v}", self.family)));
        }
        Ok(v)
    }

    fn finish(self) -> Result<()> {
        match self.params.keys().find(|k| !self.used.contains(&k.as_str())) {
            Some(extra) => Err(Error::InvalidParameter(format!("{}: unknown parameter `{extra}`", self.family))),
            None => Ok(()),
        }
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Power { .. } => "power",
            Family::Chebyshev { .. } => "chebyshev",
            Family::LattesDouble => "lattes_double",
            Family::LattesSqrt2i => "lattes_sqrt2i",
            Family::RadialStretch { .. } => "radial_stretch",
            Family::ExpSq { .. } => "exp_sq",
            Family::PeriodicTranslate { .. } => "periodic_translate",
            Family::Tangent => "tangent",
            Family::Exp => "exp",
            Family::Zorich => "zorich",
            Family::ZorichG { .. } => "zorich_g",
            Family::ZorichH { .. } => "zorich_h",
            Family::Identity { .. } => "identity",
        }
    }

    pub fn parse(family: &str, params: &Params) -> Result<Family> {
        let mut p = ParamReader { family, params, used: Vec::new() };
        let fam = match family {
            "power" => Family::Power { n: p.integer("n", 2)? },
            "chebyshev" => Family::Chebyshev { n: p.integer("n", 2)? },
            "lattes_double" => Family::LattesDouble,
            "lattes_sqrt2i" => Family::LattesSqrt2i,
            "radial_stretch" => Family::RadialStretch { m: p.positive("m", None)? },
            "exp_sq" => Family::ExpSq { c: p.positive("c", Some(DEFAULT_EXP_SQ_C))? },
            "periodic_translate" => Family::PeriodicTranslate { shift: p.get("c_shift", Some(0.0))? },
            "tangent" => Family::Tangent,
            "exp" => Family::Exp,
            "zorich" => Family::Zorich,
            "zorich_g" => Family::ZorichG { l: p.positive("L", None)? },
            "zorich_h" => Family::ZorichH { l: p.positive("L", None)?, l_prime: p.positive("L_prime", None)? },
            "identity" => {
                let d = p.get("dim", Some(2.0))?;
                if d != 2.0 && d != 3.0 {
                    return Err(Error::InvalidParameter(format!("identity: dim must be 2 or 3, got {d}")));
                }
                Family::Identity { dim: d as usize }
            }
            other => return Err(Error::UnknownFamily(other.to_string())),
        };
        p.finish()?;
        Ok(fam)
    }

    fn label(&self) -> String {
        match *self {
            Family::Power { n } | Family::Chebyshev { n } => format!("{}(n={n})", self.name()),
            Family::RadialStretch { m } => format!("radial_stretch(m={m})"),
            Family::ExpSq { c } => format!("exp_sq(c={c})"),
            Family::PeriodicTranslate { shift } => format!("periodic_translate(c_shift={shift})"),
            Family::ZorichG { l } => format!("zorich_g(L={l})"),
            Family::ZorichH { l, l_prime } => format!("zorich_h(L={l},L_prime={l_prime})"),
            Family::Identity { dim } => format!("identity(dim={dim})"),
            _ => self.name().to_string(),
        }
    }

    pub fn build(self) -> MapDescriptor {
        let mut map = match self {
            Family::Power { n } => power(n),
            Family::Chebyshev { n } => chebyshev(n),
            Family::LattesDouble => lattes(lattes_double_rational(), vec![-1.0, 0.0, 1.0], 4),
            Family::LattesSqrt2i => lattes(lattes_sqrt2i_rational(), vec![0.0], 2),
            Family::RadialStretch { m } => radial_stretch(m),
            Family::ExpSq { c } => exp_sq(c),
            Family::PeriodicTranslate { shift } => periodic_translate(shift),
            Family::Tangent => tangent(),
            Family::Exp => exp(),
            Family::Zorich => zorich_map(),
            Family::ZorichG { l } => zorich_blend(l, 0.0),
            Family::ZorichH { l, l_prime } => zorich_blend(l, l_prime),
            Family::Identity { dim } => identity(dim),
        };
        map.id = self.label();
        map.family = Some(self);
        map
    }
}

/// Builds a map from its registry id and parameter object.
pub fn make_map(family: &str, params: &Params) -> Result<MapDescriptor> {
    Ok(Family::parse(family, params)?.build())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn holo(f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> impl Fn(Vector) -> Point + Send + Sync {
    move |x: Vector| Point::from(f(x.to_complex()))
}

fn power(n: u32) -> MapDescriptor {
    let mut m = MapDescriptor::new("", 2, Kind::PolynomialType, holo(move |z| z.powu(n)))
        .with_log_modulus(move |x| n as f64 * x.norm().ln());
    m.nominal_degree = Some(n);
    m.nominal_dilatation = Some(1.0);
    m
}

pub(crate) fn chebyshev_eval(n: u32, z: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (c(2.0, 0.0), z);
    for _ in 1..n {
        let next = z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ln |T_n(z)|` via `z = w + 1/w`, `T_n(z) = w^n + w^{-n}` with `|w| >= 1`.
fn chebyshev_log_modulus(n: u32, z: Complex64) -> f64 {
    if z.norm() < 1e100 {
        chebyshev_eval(n, z).norm().ln()
    } else {
        chebyshev_log_modulus_far(n, z)
    }
}

fn chebyshev_log_modulus_far(n: u32, z: Complex64) -> f64 {
    let r = z.norm();
    let q = z.conj() / r / r * 2.0;
    let w = z * (c(1.0, 0.0) + (c(1.0, 0.0) - q * q).sqrt()) * 0.5;
    n as f64 * w.norm().ln() + (c(1.0, 0.0) + w.powi(-2 * n as i32)).norm().ln()
}

fn chebyshev(n: u32) -> MapDescriptor {
    let mut m = MapDescriptor::new("", 2, Kind::PolynomialType, holo(move |z| chebyshev_eval(n, z)))
        .with_log_modulus(move |x| chebyshev_log_modulus(n, x.to_complex()));
    m.nominal_degree = Some(n);
    m.nominal_dilatation = Some(1.0);
    m
}

/// `(w^2 + 1)^2 / (4 w (w^2 - 1))`: `f(℘(z)) = ℘(2z)` when `g2 = 4, g3 = 0`.
pub fn lattes_double_rational() -> Rational {
    Rational {
        num: Poly(vec![c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        den: Poly(vec![c(0.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]),
    }
}

/// `-i (w^2 - 1) / (2 w)`: `g(℘(z)) = ℘((1+i) z)` on the same lattice.
pub fn lattes_sqrt2i_rational() -> Rational {
    Rational {
        num: Poly(vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, -1.0)]),
        den: Poly(vec![c(0.0, 0.0), c(2.0, 0.0)]),
    }
}

fn lattes(r: Rational, real_poles: Vec<f64>, degree: u32) -> MapDescriptor {
    let poles: Vec<Vector> = real_poles.iter().map(|&p| Vector::new2(p, 0.0)).collect();
    let rule = PoleRule::Finite(poles.clone());
    let num_deg = r.num.degree() as i32;
    let den_deg = r.den.degree() as i32;
    let eval_r = r.clone();
    let eval = move |x: Vector| {
        if rule_distance(&poles, x) < POLE_CAPTURE {
            return Point::Infinity;
        }
        let w = x.to_complex();
        if w.norm() > 1e30 {
            // divide through by the leading powers to stay finite
            let inv = w.inv();
            let scale = |p: &Poly, d: i32| {
                p.0.iter()
                    .enumerate()
                    .fold(c(0.0, 0.0), |acc, (k, &a)| acc + a * inv.powi(d - k as i32))
            };
            let ratio = scale(&eval_r.num, num_deg) / scale(&eval_r.den, den_deg);
            return Point::from(ratio * w.powi(num_deg - den_deg));
        }
        Point::from(eval_r.eval(w))
    };
    let inv_r = r;
    let mut m = MapDescriptor::new("", 2, Kind::Quasimeromorphic, eval)
        .with_pole_rule(rule)
        .with_inverse(move |target, win: &Window| {
            let roots = match target {
                Point::Infinity => inv_r.poles(),
                Point::Finite(w) => inv_r.preimages(w.to_complex()),
            };
            roots.into_iter().map(Vector::from_complex).filter(|v| win.contains(*v)).collect()
        });
    m.nominal_degree = Some(degree);
    m.nominal_dilatation = Some(1.0);
    m
}

fn rule_distance(poles: &[Vector], x: Vector) -> f64 {
    poles.iter().map(|p| p.dist(x)).fold(f64::INFINITY, f64::min)
}

fn radial_stretch(m: f64) -> MapDescriptor {
    let eval = move |x: Vector| {
        let r = x.norm();
        if r == 0.0 {
            return Point::Finite(Vector::ZERO);
        }
        Point::Finite(x.scale(r.powf(m - 1.0)))
    };
    let mut d = MapDescriptor::new("", 2, Kind::PolynomialType, eval)
        .with_log_modulus(move |x| m * x.norm().ln())
        .with_seams(|x| x.norm());
    d.nominal_degree = Some(1);
    d.nominal_dilatation = Some(if m >= 1.0 { m } else { 1.0 / m });
    d
}

fn exp_sq(cc: f64) -> MapDescriptor {
    let eval = holo(move |z| cexpm1(z * z) * cc);
    let mut m = MapDescriptor::new("", 2, Kind::TranscendentalType, eval).with_log_modulus(move |x| {
        let u = x.to_complex();
        let u = u * u;
        if u.re > 30.0 {
            cc.ln() + u.re + (c(1.0, 0.0) - (-u).exp()).norm().ln()
        } else {
            (cexpm1(u) * cc).norm().ln()
        }
    });
    m.nominal_dilatation = Some(1.0);
    m
}

fn periodic_translate(shift: f64) -> MapDescriptor {
    let s = c(shift, 0.0);
    let mut m = MapDescriptor::new("", 2, Kind::TranscendentalType, holo(move |z| z.sin() + z + s))
        .with_log_modulus(move |x| log_abs_sin_plus_linear(x.to_complex(), s));
    let p = Vector::new2(2.0 * PI, 0.0);
    m.periods = vec![Period { shift: p, offset: p }];
    m.nominal_dilatation = Some(1.0);
    m
}

fn tangent() -> MapDescriptor {
    let rule = PoleRule::Arithmetic { base: Vector::new2(FRAC_PI_2, 0.0), step: Vector::new2(PI, 0.0) };
    let near = rule.clone();
    let poles = rule.clone();
    let eval = move |x: Vector| {
        if near.distance(x) < POLE_CAPTURE {
            Point::Infinity
        } else {
            Point::from(ctan(x.to_complex()))
        }
    };
    let mut m = MapDescriptor::new("", 2, Kind::Quasimeromorphic, eval)
        .with_pole_rule(rule)
        .with_inverse(move |target, win: &Window| match target {
            Point::Infinity => poles.poles_in(win),
            Point::Finite(w) => tan_preimages(w.to_complex(), win),
        });
    m.periods = vec![Period { shift: Vector::new2(PI, 0.0), offset: Vector::ZERO }];
    m.nominal_dilatation = Some(1.0);
    m
}

/// `arctan(w) + k π` for every `k` landing in the window.
fn tan_preimages(w: Complex64, win: &Window) -> Vec<Vector> {
    if w.re == 0.0 && w.im.abs() == 1.0 {
        // +-i are omitted values
        return Vec::new();
    }
    let base = if w.im == 0.0 { c(w.re.atan(), 0.0) } else { w.atan() };
    if !base.is_finite() || base.im < win.lo.0[1] || base.im > win.hi.0[1] {
        return Vec::new();
    }
    let k_lo = ((win.lo.0[0] - base.re) / PI).ceil() as i64;
    let k_hi = ((win.hi.0[0] - base.re) / PI).floor() as i64;
    (k_lo..=k_hi)
        .map(|k| Vector::new2(base.re + k as f64 * PI, base.im))
        .filter(|v| win.contains(*v))
        .collect()
}

fn exp() -> MapDescriptor {
    let mut m = MapDescriptor::new("", 2, Kind::TranscendentalType, holo(|z| z.exp())).with_log_modulus(|x| x.0[0]);
    m.periods = vec![Period { shift: Vector::new2(0.0, 2.0 * PI), offset: Vector::ZERO }];
    m.nominal_dilatation = Some(1.0);
    m
}

fn zorich_periods(offset: bool) -> Vec<Period> {
    [Vector::new3(4.0, 0.0, 0.0), Vector::new3(0.0, 4.0, 0.0)]
        .into_iter()
        .map(|p| Period { shift: p, offset: if offset { p } else { Vector::ZERO } })
        .collect()
}

fn zorich_map() -> MapDescriptor {
    let mut m = MapDescriptor::new("", 3, Kind::TranscendentalType, |x| Point::Finite(zorich::zorich(x)))
        .with_log_modulus(|x| x.0[2])
        .with_seams(zorich::zorich_seam_distance);
    m.periods = zorich_periods(false);
    m
}

fn zorich_blend(l: f64, drop: f64) -> MapDescriptor {
    let mut m = MapDescriptor::new("", 3, Kind::TranscendentalType, move |x| {
        Point::Finite(zorich::zorich_blend(x, l, drop))
    })
    .with_log_modulus(move |x| zorich::zorich_blend_log_modulus(x, l, drop))
    .with_seams(|x| if x.0[2] <= 0.0 { f64::INFINITY } else { zorich::zorich_seam_distance(x) });
    m.periods = zorich_periods(true);
    m
}

fn identity(dim: usize) -> MapDescriptor {
    let mut m = MapDescriptor::new("", dim, Kind::PolynomialType, Point::Finite).with_log_modulus(|x| x.norm().ln());
    m.nominal_degree = Some(1);
    m.nominal_dilatation = Some(1.0);
    m
}
