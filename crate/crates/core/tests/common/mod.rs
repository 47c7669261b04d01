#![allow(dead_code)]

use qrdyn_core::{make_map, translate_map, MapDescriptor, Params, Vector};

pub fn map(name: &str, params: &[(&str, f64)]) -> MapDescriptor {
    let p: Params = params.iter().map(|(k, v)| ((*k).into(), *v)).collect();
    make_map(name, &p).unwrap()
}

pub fn power(n: u32) -> MapDescriptor {
    map("power", &[("n", n as f64)])
}

pub fn chebyshev(n: u32) -> MapDescriptor {
    map("chebyshev", &[("n", n as f64)])
}

pub fn sine_plus_z(shift: f64) -> MapDescriptor {
    map("periodic_translate", &[("c_shift", shift)])
}

pub fn zorich_g() -> MapDescriptor {
    map("zorich_g", &[("L", 1.0)])
}

pub fn zorich_g_shifted() -> MapDescriptor {
    translate_map(&zorich_g(), 1.0, Vector::new3(4.0, 0.0, 0.0)).unwrap()
}

pub fn at(f: &MapDescriptor, x: Vector) -> Vector {
    f.eval(x).finite().expect("finite image")
}
