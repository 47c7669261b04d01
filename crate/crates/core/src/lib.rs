//! Numerical laboratory for commuting quasiregular and holomorphic maps.
//!
//! The crate is `no_std` (with `alloc`). Grid and sampling kernels run on
//! rayon when the `parallel` feature is enabled; results never depend on
//! the number of worker threads.
#![no_std]
// rayon links std, whose inherent float methods shadow `num_traits::Float`
#![cfg_attr(feature = "parallel", allow(unused_imports))]

extern crate alloc;

pub mod bottcher;
pub mod conformal;
pub mod error;
mod exec;
pub mod grid;
pub mod growth;
pub mod iteration;
pub mod julia;
pub mod linalg;
pub mod maps;
pub mod modulus;
pub mod point;
pub mod sampling;

pub use error::{Error, Result};
pub use grid::{GridSpec, Slice};
pub use iteration::{
    classify_grid, classify_point, log_max_modulus_sequence, max_modulus_sequence, orbit, ClassificationField, ClassificationPolicy, Classifier,
    OrbitClass, OrbitTag,
};
pub use maps::{compose, iterate_map, make_map, translate_map, Family, Kind, MapDescriptor, Params, Period, PoleRule, Window};
pub use modulus::{max_modulus, ModulusEstimate};
pub use point::{Point, Vector};
pub use sampling::SampleRegion;
pub use julia::{
    backward_orbit_julia, compare_julia, grid_hausdorff, julia_boundary, overlap_fraction, BackwardOrbitOptions,
    BoundaryMethod, BoundarySet, JuliaComparison, JuliaOptions,
};
pub use growth::{
    composition_growth, growth_profile, pits_detect, rickman_check, transcendence_ratio, CompositionSample,
    GrowthProfile, GrowthSample, PitsReport, RatioSample, RickmanBoundReport,
};
pub use conformal::{commutation_check, dilatation_field, jacobian, CommutationReport, DilatationEstimate, DilatationSample};
pub use bottcher::{bottcher_build, conjugated_commuter, BottcherModel};
