//! The Zorich map and the interpolated family built on it.
//!
//! The square `[-1,1]^2` is sent onto the closed upper hemisphere by
//! `h(u,v) = (u, v, 1 - max(|u|,|v|)) / |(u, v, 1 - max(|u|,|v|))|`.
//! The plane is tiled by squares `(2m,2n) + [-1,1]^2`; each tile is the mirror
//! image of its neighbours across the shared edge, and tiles with `m+n` odd go
//! to the lower hemisphere. This makes `h` continuous and 4-periodic in both
//! variables, and `Z(x) = e^{x_3} h(x_1,x_2)`.

use num_traits::Float;

use crate::point::Vector;

/// Folds `t` into the tile `[-1,1]` around the nearest even integer.
/// Returns the local coordinate and the parity of the tile index.
fn fold(t: f64) -> (f64, bool) {
    let k = (t * 0.5).round();
    let u = t - 2.0 * k;
    (u, k - 2.0 * (k * 0.5).floor() == 1.0)
}

pub(crate) fn hemisphere(x1: f64, x2: f64) -> Vector {
    let (u, m) = fold(x1);
    let (v, n) = fold(x2);
    // odd tiles are mirror images of tile (0,0)
    let u = if m { -u } else { u };
    let v = if n { -v } else { v };
    let w = 1.0 - u.abs().max(v.abs());
    let s = (u * u + v * v + w * w).sqrt();
    let sign = if m != n { -1.0 } else { 1.0 };
    Vector::new3(u / s, v / s, sign * w / s)
}

pub(crate) fn zorich(x: Vector) -> Vector {
    let [x1, x2, x3] = x.0;
    hemisphere(x1, x2).scale(x3.exp())
}

/// Distance (in the `x_1,x_2` plane) to the lines where `h` is not smooth:
/// tile edges and the diagonals `|u| = |v|` of each tile.
pub(crate) fn zorich_seam_distance(x: Vector) -> f64 {
    let (u, _) = fold(x.0[0]);
    let (v, _) = fold(x.0[1]);
    let edge = (1.0 - u.abs()).min(1.0 - v.abs());
    let diag = (u.abs() - v.abs()).abs() / core::f64::consts::SQRT_2;
    edge.min(diag)
}

/// Smooth monotone blend: 0 for `t <= 0`, 1 for `t >= l`, cubic in between.
pub(crate) fn blend(t: f64, l: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= l {
        1.0
    } else {
        let s = t / l;
        s * s * (3.0 - 2.0 * s)
    }
}

/// `x + blend(x_3) Z(x) - (0, 0, drop)`. Inside the blend layer the Jacobian
/// changes sign on odd tiles, so this is quasiregular only off `0 < x_3 < l`.
pub(crate) fn zorich_blend(x: Vector, l: f64, drop: f64) -> Vector {
    let b = blend(x.0[2], l);
    let mut y = if b == 0.0 { x } else { x + zorich(x).scale(b) };
    y.0[2] -= drop;
    y
}

pub(crate) fn zorich_blend_log_modulus(x: Vector, l: f64, drop: f64) -> f64 {
    let x3 = x.0[2];
    if x3 < l || x3 < 30.0 {
        return zorich_blend(x, l, drop).norm().ln();
    }
    // |e^{x3} h + x - drop e3| = e^{x3} |h + (x - drop e3) e^{-x3}|
    let mut shifted = x;
    shifted.0[2] -= drop;
    let h = hemisphere(x.0[0], x.0[1]);
    x3 + (h + shifted.scale((-x3).exp())).norm().ln()
}
