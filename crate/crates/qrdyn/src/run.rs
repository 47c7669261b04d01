use std::fs;
use std::path::{Path, PathBuf};

use qrdyn_core::bottcher::BottcherModel;
use qrdyn_core::julia::{approximate_julia, BackwardOrbitOptions, BoundaryMethod};
use qrdyn_core::{
    bottcher_build, classify_grid, commutation_check, composition_growth, conjugated_commuter, dilatation_field,
    grid_hausdorff, growth_profile, julia_boundary, overlap_fraction, pits_detect, rickman_check,
    transcendence_ratio, BoundarySet, ClassificationPolicy, GridSpec, JuliaOptions, MapDescriptor, OrbitTag,
    SampleRegion, Vector,
};
use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{Job, MapSpec, PolicyConfig, RunConfig};
use crate::pnm::{self, ImageField};
use crate::report::{self, Table};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(#[from] qrdyn_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 2,
            // parameters rejected by the core are validation failures too
            RunError::Numerical(qrdyn_core::Error::InvalidParameter(_) | qrdyn_core::Error::UnknownFamily(_)) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

fn config_err(e: impl Into<String>) -> RunError {
    RunError::Config(e.into())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub seed: u64,
    pub config: Value,
    /// Defaults that depend on the maps (classification policies).
    pub resolved: Map<String, Value>,
    pub results: Map<String, Value>,
    pub artifacts: Vec<String>,
}

/// Sequential artifact writer rooted at the output directory.
struct Out<'a> {
    dir: &'a Path,
    prefix: &'static str,
    written: Vec<String>,
}

impl Out<'_> {
    fn path(&self, name: &str) -> (String, PathBuf) {
        let file = format!("{}_{name}", self.prefix);
        let path = self.dir.join(&file);
        (file, path)
    }

    fn io(path: PathBuf) -> impl FnOnce(std::io::Error) -> RunError {
        move |source| RunError::Io { path, source }
    }

    fn image(&mut self, name: &str, img: Result<ImageField, String>) -> Result<(), RunError> {
        let img = img.map_err(config_err)?;
        let (file, path) = self.path(name);
        img.write(&path).map_err(Self::io(path))?;
        self.written.push(file);
        Ok(())
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<(), RunError> {
        let (file, path) = self.path(name);
        t.write(&path).map_err(Self::io(path))?;
        self.written.push(file);
        Ok(())
    }

    fn json(&mut self, name: &str, v: &impl Serialize) -> Result<(), RunError> {
        let (file, path) = self.path(name);
        let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
        fs::write(&path, text).map_err(Self::io(path))?;
        self.written.push(file);
        Ok(())
    }
}

fn build(spec: &MapSpec) -> Result<MapDescriptor, RunError> {
    spec.build().map_err(config_err)
}

fn planar(grid: &GridSpec) -> Result<(), RunError> {
    if grid.axes() == 2 {
        Ok(())
    } else {
        Err(config_err("images need a planar grid or a slice"))
    }
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn policy_json(p: &ClassificationPolicy) -> Value {
    to_value(&PolicyConfig::from_policy(p))
}

fn vector_json(v: Vector, dim: usize) -> Value {
    json!(v.0[..dim])
}

fn tag_counts(cells: &[qrdyn_core::OrbitClass]) -> Value {
    let tags = [OrbitTag::FastEscaping, OrbitTag::Escaping, OrbitTag::Bounded, OrbitTag::HitPole, OrbitTag::Undetermined];
    let mut m = Map::new();
    for t in tags {
        m.insert(t.as_str().into(), json!(cells.iter().filter(|c| c.tag == t).count()));
    }
    Value::Object(m)
}

/// Julia approximation of `f`, with the classification field when one was computed.
fn julia_of(
    f: &MapDescriptor,
    grid: &GridSpec,
    policy: &PolicyConfig,
    depth: usize,
    resolved: &mut Map<String, Value>,
    key: &str,
    allow_empty: bool,
) -> Result<(BoundarySet, Option<qrdyn_core::ClassificationField>), RunError> {
    let method = BoundaryMethod::for_kind(f.kind);
    if method == BoundaryMethod::BackwardOrbit {
        let opts = JuliaOptions { policy: None, backward_depth: depth, backward: BackwardOrbitOptions::default() };
        resolved.insert(format!("enumeration_radius_{key}"), json!(opts.backward.enumeration_radius));
        return Ok((approximate_julia(f, grid, &opts)?, None));
    }
    let p = policy.resolve(f)?;
    resolved.insert(format!("policy_{key}"), policy_json(&p));
    let field = classify_grid(f, grid, &p)?;
    let set = match julia_boundary(&field, method == BoundaryMethod::FastEscapeBoundary) {
        // a field with one class still renders; it just has no boundary
        Err(qrdyn_core::Error::EmptySide(side)) if allow_empty => {
            log::warn!("{}: no {side} cells, boundary is empty", f.id);
            BoundarySet::new(*grid, Vec::new(), method)
        }
        other => other?,
    };
    Ok((set, Some(field)))
}

/// Runs one job and writes its artifacts and `<command>_summary.json`.
pub fn run(config: &RunConfig) -> Result<RunSummary, RunError> {
    fs::create_dir_all(&config.out_dir).map_err(Out::io(config.out_dir.clone()))?;
    let name = config.job.name();
    let mut out = Out { dir: &config.out_dir, prefix: name, written: Vec::new() };
    let mut resolved = Map::new();
    let mut results = Map::new();
    let seed = config.seed;

    match &config.job {
        Job::RenderJulia { f, grid, policy, backward_depth } => {
            let f = build(f)?;
            let grid = grid.to_grid(f.dimension).map_err(config_err)?;
            planar(&grid)?;
            let (set, field) = julia_of(&f, &grid, policy, *backward_depth, &mut resolved, "f", true)?;
            results.insert("map".into(), json!(f.id));
            results.insert("method".into(), json!(set.method.as_str()));
            results.insert("boundary_cells".into(), json!(set.len()));
            if let Some(field) = &field {
                results.insert("classes".into(), tag_counts(&field.cells));
                out.image("classes.ppm", pnm::class_image(field))?;
                out.image("escape.pgm", pnm::escape_mask(field))?;
            }
            out.image("boundary.pgm", pnm::boundary_mask(&set))?;
        }
        Job::CompareJulia { f, g, grid, policy, backward_depth } => {
            let (f, g) = (build(f)?, build(g)?);
            if f.dimension != g.dimension {
                return Err(config_err("f and g differ in dimension"));
            }
            let grid = grid.to_grid(f.dimension).map_err(config_err)?;
            let (a, _) = julia_of(&f, &grid, policy, *backward_depth, &mut resolved, "f", false)?;
            let (b, _) = julia_of(&g, &grid, policy, *backward_depth, &mut resolved, "g", false)?;
            results.insert("f".into(), json!(f.id));
            results.insert("g".into(), json!(g.id));
            results.insert("method_f".into(), json!(a.method.as_str()));
            results.insert("method_g".into(), json!(b.method.as_str()));
            results.insert("boundary_cells_f".into(), json!(a.len()));
            results.insert("boundary_cells_g".into(), json!(b.len()));
            results.insert("hausdorff_cells".into(), json!(grid_hausdorff(&a, &b)?));
            results.insert("overlap_fraction".into(), json!(overlap_fraction(&a, &b)?));
            if grid.axes() == 2 {
                out.image("boundary_f.pgm", pnm::boundary_mask(&a))?;
                out.image("boundary_g.pgm", pnm::boundary_mask(&b))?;
                out.image("overlay.ppm", pnm::overlay_image(&a, &b))?;
            }
        }
        Job::CheckCommute { f, g, region, samples, pole_margin } => {
            let (f, g) = (build(f)?, build(g)?);
            let region = region.to_region(f.dimension).map_err(config_err)?;
            let r = commutation_check(&f, &g, &region, *samples, seed, *pole_margin)?;
            results.insert("f".into(), json!(f.id));
            results.insert("g".into(), json!(g.id));
            results.insert("sample_count".into(), json!(r.sample_count));
            results.insert("rejected".into(), json!(r.rejected));
            results.insert("max_residual".into(), json!(r.max_residual));
            results.insert("mean_residual".into(), json!(r.mean_residual));
            results.insert("argmax".into(), vector_json(r.argmax, f.dimension));
            out.table("commutation.csv", &report::commutation_table(&r))?;
        }
        Job::Growth { f, radii, sphere_samples, lambda, rickman, g } => {
            let f = build(f)?;
            let n = sphere_samples.unwrap_or_else(|| qrdyn_core::modulus::default_sphere_samples(f.dimension));
            resolved.insert("sphere_samples".into(), json!(n));
            let profile = growth_profile(&f, radii, n)?;
            results.insert("map".into(), json!(f.id));
            results.insert("log_m".into(), json!(profile.samples.iter().map(|s| s.log_m).collect::<Vec<_>>()));
            out.table("profile.csv", &report::growth_table(&profile))?;
            if let Some(l) = lambda {
                let ratios = transcendence_ratio(&profile, *l)?;
                let increasing = ratios.windows(2).all(|w| w[1].log_ratio > w[0].log_ratio);
                results.insert("log_ratio".into(), json!(ratios.iter().map(|s| s.log_ratio).collect::<Vec<_>>()));
                results.insert("ratio_strictly_increasing".into(), json!(increasing));
                out.table("ratio.csv", &report::ratio_table(&ratios))?;
            }
            if let Some(rk) = rickman {
                let rep = rickman_check(&f, &profile, rk.deg, rk.k_i, rk.k_o)?;
                results.insert("rickman_pass".into(), json!(rep.pass));
                results.insert("rickman_fitted_a".into(), json!(rep.fitted_a));
                results.insert("rickman_fitted_b".into(), json!(rep.fitted_b));
                out.table("rickman.csv", &report::rickman_table(&rep))?;
            }
            if let Some(g) = g {
                let g = build(g)?;
                let c = composition_growth(&f, &g, radii, n)?;
                let inf = c.iter().map(|s| s.c_hat).fold(f64::INFINITY, f64::min);
                results.insert("inner".into(), json!(g.id));
                results.insert("c_hat".into(), json!(c.iter().map(|s| s.c_hat).collect::<Vec<_>>()));
                results.insert("c_hat_inf".into(), json!(inf));
                out.table("composition.csv", &report::composition_table(&c))?;
            }
        }
        Job::Pits { f, r, lambda, alpha, epsilon, grid_density } => {
            let f = build(f)?;
            let rep = pits_detect(&f, *r, *lambda, *alpha, *epsilon, *grid_density)?;
            results.insert("map".into(), json!(f.id));
            results.insert("low_cell_count".into(), json!(rep.low_cell_count));
            results.insert("cover_count".into(), json!(rep.cover_count));
            let (cells, centers, summary) = report::pits_tables(&rep, f.dimension);
            out.table("cells.csv", &cells)?;
            out.table("centers.csv", &centers)?;
            out.table("report.csv", &summary)?;
        }
        Job::Dilatation { f, region, samples, step } => {
            let f = build(f)?;
            let region = region.to_region(f.dimension).map_err(config_err)?;
            let est = dilatation_field(&f, &region, *samples, *step, seed)?;
            results.insert("map".into(), json!(f.id));
            results.insert("max_k_o".into(), json!(est.max_k_o));
            results.insert("max_k_i".into(), json!(est.max_k_i));
            results.insert("q99_k_o".into(), json!(est.q99_k_o));
            results.insert("q99_k_i".into(), json!(est.q99_k_i));
            results.insert("max_k".into(), json!(est.max_k));
            results.insert("nominal_dilatation".into(), json!(f.nominal_dilatation));
            results.insert("seam_rejected".into(), json!(est.seam_rejected));
            results.insert("flagged".into(), json!(est.flagged));
            results.insert("quality_warning".into(), json!(est.quality_warning));
            out.table("samples.csv", &report::dilatation_table(&est, f.dimension))?;
        }
        Job::Bottcher { f, r0, depth, samples, m } => {
            let fd = build(f)?;
            let model = bottcher_build(&fd, *r0, *depth)?;
            let worst = functional_equation_residual(&model, &fd, *samples, seed)?;
            results.insert("map".into(), json!(fd.id));
            results.insert("functional_equation_residual".into(), json!(worst));
            out.json("model.json", &ModelFile::from(&model))?;
            if let Some(m) = m {
                let g = conjugated_commuter(&model, *m)?;
                let rho = model.commuter_radius(*m);
                resolved.insert("commuter_radius".into(), json!(rho));
                let disk = SampleRegion::disk(rho);
                let c = commutation_check(&fd, &g, &disk, *samples, seed, qrdyn_core::conformal::DEFAULT_POLE_MARGIN)?;
                let ring = SampleRegion::annulus(0.1 * rho, rho);
                let est = dilatation_field(&g, &ring, (*samples).max(100), qrdyn_core::conformal::DEFAULT_STEP, seed)?;
                results.insert("commuter".into(), json!(g.id));
                results.insert("commuter_max_residual".into(), json!(c.max_residual));
                results.insert("commuter_rejected".into(), json!(c.rejected));
                results.insert("commuter_max_k".into(), json!(est.max_k));
                out.table("commutation.csv", &report::commutation_table(&c))?;
            }
        }
    }

    let summary = RunSummary {
        command: name.into(),
        seed,
        config: to_value(config),
        resolved,
        results,
        artifacts: out.written.clone(),
    };
    out.json("summary.json", &summary)?;
    log::info!("{name}: wrote {} artifacts to {}", out.written.len(), config.out_dir.display());
    Ok(summary)
}

/// Max of `|φ(f(z)) - φ(z)^2|` over seeded points of the disk `|z| <= r0`.
fn functional_equation_residual(model: &BottcherModel, f: &MapDescriptor, n: usize, seed: u64) -> Result<f64, RunError> {
    let mut worst: f64 = 0.0;
    for p in SampleRegion::disk(model.r0).sample(2, n, seed) {
        let fz = f.eval(p).finite().ok_or_else(|| qrdyn_core::Error::DomainRestriction("f(z) undefined".into()))?;
        let phi = model.phi(p.to_complex())?;
        worst = worst.max((model.phi(fz.to_complex())? - phi * phi).norm());
    }
    Ok(worst)
}

#[derive(Serialize)]
struct ModelFile {
    map: String,
    center: [f64; 2],
    c: f64,
    r0: f64,
    depth: usize,
}

impl From<&BottcherModel> for ModelFile {
    fn from(m: &BottcherModel) -> Self {
        ModelFile { map: m.map_id.clone(), center: [m.center.0[0], m.center.0[1]], c: m.c, r0: m.r0, depth: m.depth }
    }
}

/// Reads a config file and runs it; `command` must match the file's command when both are given.
pub fn run_file(path: &Path, command: Option<&str>, out_dir: &Path, seed: Option<u64>) -> Result<RunSummary, RunError> {
    let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let config = RunConfig::from_json(&text, command, out_dir, seed).map_err(config_err)?;
    run(&config)
}
