use std::path::{Path, PathBuf};

use qrdyn_core::grid::MAX_RESOLUTION;
use qrdyn_core::sampling::DEFAULT_SEED;
use qrdyn_core::{
    compose, iterate_map, make_map, translate_map, ClassificationPolicy, GridSpec, MapDescriptor, Params,
    SampleRegion, Vector,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A registry map, optionally iterated, composed and rescaled:
/// `scale * (family^iterate ∘ inner) + shift`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub family: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterate: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<MapSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<f64>>,
}

impl MapSpec {
    pub fn new(family: &str, params: &[(&str, f64)]) -> Self {
        MapSpec {
            family: family.into(),
            params: params.iter().map(|(k, v)| ((*k).into(), *v)).collect(),
            iterate: None,
            inner: None,
            scale: None,
            shift: None,
        }
    }

    pub fn build(&self) -> Result<MapDescriptor, String> {
        let mut f = make_map(&self.family, &self.params).map_err(|e| e.to_string())?;
        if let Some(n) = self.iterate {
            f = iterate_map(&f, n).map_err(|e| e.to_string())?;
        }
        if let Some(inner) = &self.inner {
            f = compose(&f, &inner.build()?).map_err(|e| e.to_string())?;
        }
        if self.scale.is_some() || self.shift.is_some() {
            let c = match &self.shift {
                Some(v) => vector(v, f.dimension, "shift")?,
                None => Vector::ZERO,
            };
            f = translate_map(&f, self.scale.unwrap_or(1.0), c).map_err(|e| e.to_string())?;
        }
        Ok(f)
    }
}

pub(crate) fn vector(v: &[f64], dim: usize, what: &str) -> Result<Vector, String> {
    if v.len() != dim {
        return Err(format!("{what} has {} coordinates, the map lives in dimension {dim}", v.len()));
    }
    Ok(if dim == 2 { Vector::new2(v[0], v[1]) } else { Vector::new3(v[0], v[1], v[2]) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub axis: usize,
    pub offset: f64,
}

/// Box and resolution; `lo`/`hi` follow the free axes of the slice when one is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceConfig>,
}

impl GridConfig {
    pub fn to_grid(&self, dim: usize) -> Result<GridSpec, String> {
        let axes = if dim == 2 || self.slice.is_some() { 2 } else { 3 };
        if self.slice.is_some() && dim != 3 {
            return Err("slices need a map of dimension 3".into());
        }
        if self.lo.len() != axes || self.hi.len() != axes || self.resolution.len() != axes {
            return Err(format!("grid needs {axes} entries in lo, hi and resolution"));
        }
        if let Some(&n) = self.resolution.iter().find(|&&n| n == 0 || n > MAX_RESOLUTION) {
            return Err(format!("grid resolution {n} outside 1..={MAX_RESOLUTION}"));
        }
        let (lo, hi, n) = (&self.lo, &self.hi, &self.resolution);
        let grid = match (axes, self.slice) {
            (2, Some(s)) => GridSpec::slice(s.axis, s.offset, [lo[0], lo[1]], [hi[0], hi[1]], n[0], n[1]),
            (2, None) => GridSpec::plane([lo[0], lo[1]], [hi[0], hi[1]], n[0], n[1]),
            _ => GridSpec::volume([lo[0], lo[1], lo[2]], [hi[0], hi[1], hi[2]], [n[0], n[1], n[2]]),
        };
        grid.validate().map_err(|e| e.to_string())?;
        Ok(grid)
    }
}

/// Overrides on top of the map's default classification policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub base_radius: Option<f64>,
    pub max_iter: Option<usize>,
    pub escape_radius: Option<f64>,
    pub max_lag: Option<usize>,
    pub modulus_samples: Option<usize>,
}

impl PolicyConfig {
    /// Defaults for `f` with the overrides applied. The base radius is searched
    /// only when not given explicitly.
    pub fn resolve(&self, f: &MapDescriptor) -> Result<ClassificationPolicy, qrdyn_core::Error> {
        let mut p = match self.base_radius {
            Some(r) => ClassificationPolicy::with_radius(f.dimension, r),
            None => ClassificationPolicy::for_map(f)?,
        };
        if let Some(v) = self.max_iter {
            p.max_iter = v;
        }
        if let Some(v) = self.escape_radius {
            p.escape_radius = v;
        }
        if let Some(v) = self.max_lag {
            p.max_lag = v;
        }
        if let Some(v) = self.modulus_samples {
            p.modulus_samples = v;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn from_policy(p: &ClassificationPolicy) -> Self {
        PolicyConfig {
            base_radius: Some(p.base_radius),
            max_iter: Some(p.max_iter),
            escape_radius: Some(p.escape_radius),
            max_lag: Some(p.max_lag),
            modulus_samples: Some(p.modulus_samples),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionConfig {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
}

impl RegionConfig {
    pub fn to_region(&self, dim: usize) -> Result<SampleRegion, String> {
        let region = match self {
            RegionConfig::Box { lo, hi } => SampleRegion::Box { lo: vector(lo, dim, "lo")?, hi: vector(hi, dim, "hi")? },
            RegionConfig::Ball { center, radius } => {
                SampleRegion::Ball { center: vector(center, dim, "center")?, radius: *radius }
            }
            RegionConfig::Annulus { center, inner, outer } => {
                SampleRegion::Annulus { center: vector(center, dim, "center")?, inner: *inner, outer: *outer }
            }
        };
        region.validate().map_err(|e| e.to_string())?;
        Ok(region)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RickmanConfig {
    pub deg: u32,
    pub k_i: f64,
    pub k_o: f64,
}

fn default_backward_depth() -> usize {
    2
}
fn default_commute_samples() -> usize {
    10_000
}
fn default_pole_margin() -> f64 {
    qrdyn_core::conformal::DEFAULT_POLE_MARGIN
}
fn default_dilatation_samples() -> usize {
    1000
}
fn default_step() -> f64 {
    qrdyn_core::conformal::DEFAULT_STEP
}
fn default_r0() -> f64 {
    qrdyn_core::bottcher::DEFAULT_R0
}
fn default_depth() -> usize {
    qrdyn_core::bottcher::DEFAULT_DEPTH
}
fn default_bottcher_samples() -> usize {
    1000
}

/// Command and its parameters. Unknown or missing fields are validation errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case", deny_unknown_fields)]
pub enum Job {
    RenderJulia {
        f: MapSpec,
        grid: GridConfig,
        #[serde(default)]
        policy: PolicyConfig,
        #[serde(default = "default_backward_depth")]
        backward_depth: usize,
    },
    CompareJulia {
        f: MapSpec,
        g: MapSpec,
        grid: GridConfig,
        #[serde(default)]
        policy: PolicyConfig,
        #[serde(default = "default_backward_depth")]
        backward_depth: usize,
    },
    CheckCommute {
        f: MapSpec,
        g: MapSpec,
        region: RegionConfig,
        #[serde(default = "default_commute_samples")]
        samples: usize,
        #[serde(default = "default_pole_margin")]
        pole_margin: f64,
    },
    Growth {
        f: MapSpec,
        radii: Vec<f64>,
        #[serde(default)]
        sphere_samples: Option<usize>,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        rickman: Option<RickmanConfig>,
        /// Inner map for the composition growth constant.
        #[serde(default)]
        g: Option<MapSpec>,
    },
    Pits {
        f: MapSpec,
        r: f64,
        lambda: f64,
        alpha: f64,
        epsilon: f64,
        grid_density: usize,
    },
    Dilatation {
        f: MapSpec,
        region: RegionConfig,
        #[serde(default = "default_dilatation_samples")]
        samples: usize,
        #[serde(default = "default_step")]
        step: f64,
    },
    Bottcher {
        f: MapSpec,
        #[serde(default = "default_r0")]
        r0: f64,
        #[serde(default = "default_depth")]
        depth: usize,
        #[serde(default = "default_bottcher_samples")]
        samples: usize,
        /// Exponent of the radial stretch conjugated into a commuter.
        #[serde(default)]
        m: Option<f64>,
    },
}

pub const COMMANDS: [&str; 7] =
    ["render_julia", "compare_julia", "check_commute", "growth", "pits", "dilatation", "bottcher"];

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::RenderJulia { .. } => COMMANDS[0],
            Job::CompareJulia { .. } => COMMANDS[1],
            Job::CheckCommute { .. } => COMMANDS[2],
            Job::Growth { .. } => COMMANDS[3],
            Job::Pits { .. } => COMMANDS[4],
            Job::Dilatation { .. } => COMMANDS[5],
            Job::Bottcher { .. } => COMMANDS[6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(flatten)]
    pub job: Job,
}

impl RunConfig {
    /// Parses a JSON config. `command`, when given, must agree with the
    /// config's own `command` field (which it fills in when absent).
    pub fn from_json(text: &str, command: Option<&str>, out_dir: &Path, seed: Option<u64>) -> Result<Self, String> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
        let obj = value.as_object_mut().ok_or("config must be a JSON object")?;
        if let Some(cmd) = command {
            match obj.get("command") {
                Some(Value::String(c)) if c != cmd => {
                    return Err(format!("command `{cmd}` does not match config command `{c}`"));
                }
                Some(Value::String(_)) => {}
                Some(_) => return Err("`command` must be a string".into()),
                None => {
                    obj.insert("command".into(), Value::String(cmd.into()));
                }
            }
        }
        let file_seed = match obj.remove("seed") {
            None => None,
            Some(v) => Some(v.as_u64().ok_or("`seed` must be a non-negative 64-bit integer")?),
        };
        let job: Job = serde_json::from_value(value).map_err(|e| format!("invalid config: {e}"))?;
        Ok(RunConfig { seed: seed.or(file_seed).unwrap_or(DEFAULT_SEED), out_dir: out_dir.to_path_buf(), job })
    }
}
