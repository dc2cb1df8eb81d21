//! Batch experiment harness: certification sweeps, reconstruction
//! landscapes, noise sweeps and admissible-set grids, emitted as CSV and
//! JSON artifacts.
//!
//! Every run is deterministic for a fixed master seed: sweep cells receive
//! seeds derived from `(seed, cell index)`, cells are evaluated over
//! immutable inputs (in parallel with the `parallel` feature), and results
//! are written in cell order. Column contracts are documented in
//! `docs/experiments.md`.

use crate::assembly::{assemble, AssembledSystem, Conductivity};
use crate::certify::{criterion_lambda, CriterionSummary};
use crate::config::{geometry_from_config, ConfigMap};
use crate::exec;
use crate::forward::{measure, read_measurement, RobinParam};
use crate::geometry::{build_geometry, GeometryConfig};
use crate::mesh::{generate_mesh, validate_mesh};
use crate::reconstruct::{
    admissible_set_sample, lsq_baseline, noise_matrix, solve_sdp, solve_sdp_noisy, LsqOptions,
    NoisyInput, SdpOptions,
};
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub geometry: GeometryConfig,
    pub refinement: u32,
    pub sigma: Conductivity,
    pub a: f64,
    pub b: f64,
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    pub m_max: usize,
    pub delta_list: Option<Vec<f64>>,
    pub grid_resolution: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub deterministic: bool,
    pub sdp: SdpOptions,
    pub lsq: LsqOptions,
    pub data_file: Option<PathBuf>,
    pub cache: bool,
}

impl ExperimentSpec {
    /// Builds a spec from a parsed config file. `seed_override` and
    /// `deterministic` come from the command line.
    pub fn from_config(
        map: &ConfigMap,
        out_dir: PathBuf,
        seed_override: Option<u64>,
        deterministic: bool,
    ) -> Result<Self> {
        let (geometry, refinement) = geometry_from_config(map)?;
        let a = map.get_f64("a")?.unwrap_or(1.0);
        let b = map.get_f64("b")?.unwrap_or(3.0);
        if !(a > 0.0 && a < b) {
            return Err(Error::Config(format!(
                "bounds must satisfy 0 < a < b, got a = {a}, b = {b}"
            )));
        }
        let n_list = map.get_usize_list("n_list")?.unwrap_or(vec![geometry.n]);
        if n_list.is_empty() {
            return Err(Error::Config("n_list must not be empty".into()));
        }
        let m_max = map.get_usize("m_max")?.unwrap_or(12);
        let m_list = map
            .get_usize_list("m_list")?
            .unwrap_or_else(|| (2..=m_max).collect());
        if m_list.is_empty() {
            return Err(Error::Config("m_list must not be empty".into()));
        }
        let grid_resolution = map.get_usize("grid_resolution")?.unwrap_or(21);
        if grid_resolution < 2 {
            return Err(Error::Config("grid_resolution must be at least 2".into()));
        }
        let defaults = SdpOptions::default();
        let sdp = SdpOptions {
            gap_tol: map.get_f64("gap_tol")?.unwrap_or(defaults.gap_tol),
            feas_tol: map.get_f64("feas_tol")?.unwrap_or(defaults.feas_tol),
            max_outer: map.get_usize("max_outer")?.unwrap_or(defaults.max_outer),
            max_newton: map.get_usize("max_newton")?.unwrap_or(defaults.max_newton),
            ..defaults
        };
        Ok(ExperimentSpec {
            geometry,
            refinement,
            sigma: Conductivity::default(),
            a,
            b,
            n_list,
            m_list,
            m_max,
            delta_list: map.get_f64_list("delta_list")?,
            grid_resolution,
            seed: seed_override.or(map.get_u64("seed")?).unwrap_or(0),
            out_dir,
            deterministic,
            sdp,
            lsq: LsqOptions::default(),
            data_file: map.get("data").map(PathBuf::from),
            cache: map.get_bool("cache")?.unwrap_or(true),
        })
    }

    fn cell_seed(&self, index: u64) -> u64 {
        self.seed
            .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

fn fnv1a(data: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for byte in data.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Builds (or loads from the on-disk cache) the assembled system for a
/// geometry variant of the spec.
fn build_system(spec: &ExperimentSpec, cfg: &GeometryConfig) -> Result<AssembledSystem> {
    let geometry = build_geometry(cfg)?;
    if spec.cache {
        let key = format!(
            "{cfg:?} refinement={} sigma=({},{})",
            spec.refinement, spec.sigma.sigma1, spec.sigma.sigma2
        );
        let path = spec
            .out_dir
            .join("cache")
            .join(format!("system_{:016x}.txt", fnv1a(&key)));
        if path.exists() {
            if let Ok(file) = std::fs::File::open(&path) {
                if let Ok(sys) = AssembledSystem::read_text(&mut std::io::BufReader::new(file)) {
                    return Ok(sys);
                }
            }
        }
        let mesh = generate_mesh(&geometry, spec.refinement)?;
        let sys = assemble(&mesh, &geometry, &spec.sigma)?;
        std::fs::create_dir_all(path.parent().unwrap())?;
        let mut file = std::io::BufWriter::new(std::fs::File::create(&path)?);
        sys.write_text(&mut file)?;
        Ok(sys)
    } else {
        let mesh = generate_mesh(&geometry, spec.refinement)?;
        assemble(&mesh, &geometry, &spec.sigma)
    }
}

fn write_bytes(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, bytes)?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::Numeric(format!("json serialization failed: {e}")))?;
    bytes.push(b'\n');
    write_bytes(dir, name, &bytes)
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// mesh

#[derive(Debug, Clone, Serialize)]
pub struct MeshSummary {
    pub nodes: usize,
    pub triangles: usize,
    pub interface_edges: usize,
    pub boundary_edges: usize,
    /// DOF count after electrode merging.
    pub dofs: usize,
    pub refinement: u32,
    pub valid: bool,
    pub files: Vec<PathBuf>,
}

/// Generates, validates and exports the mesh plus a size summary.
pub fn run_mesh(spec: &ExperimentSpec) -> Result<MeshSummary> {
    let geometry = build_geometry(&spec.geometry)?;
    let mesh = generate_mesh(&geometry, spec.refinement)?;
    let report = validate_mesh(&mesh);
    let sys = assemble(&mesh, &geometry, &spec.sigma)?;
    let mut text = Vec::new();
    mesh.write_text(&mut text)?;
    let mesh_path = write_bytes(&spec.out_dir, "mesh.txt", &text)?;
    let mut summary = MeshSummary {
        nodes: mesh.node_count(),
        triangles: mesh.triangle_count(),
        interface_edges: mesh.interface_edges.len(),
        boundary_edges: mesh.boundary_edges.len(),
        dofs: sys.dof_count,
        refinement: spec.refinement,
        valid: report.is_valid(),
        files: vec![mesh_path],
    };
    let json_path = write_json(&spec.out_dir, "mesh_summary.json", &summary)?;
    summary.files.push(json_path);
    Ok(summary)
}

// ---------------------------------------------------------------------------
// certify (single configuration, both criteria)

#[derive(Debug, Clone, Serialize)]
pub struct CertifySummary {
    pub c1: CriterionSummary,
    pub cn1: CriterionSummary,
    pub files: Vec<PathBuf>,
}

/// Evaluates both criteria (`C = 1` and `C = n−1`) for the configured
/// geometry and writes the probe tables.
pub fn run_certify(spec: &ExperimentSpec) -> Result<CertifySummary> {
    let sys = build_system(spec, &spec.geometry)?;
    let c1 = criterion_lambda(&sys, spec.a, spec.b, 1.0)?;
    let cn1 = criterion_lambda(&sys, spec.a, spec.b, (sys.n - 1) as f64)?;
    let mut files = Vec::new();
    for (name, crit) in [("criterion_c1.csv", &c1), ("criterion_cn1.csv", &cn1)] {
        let mut buf = Vec::new();
        crit.write_csv(&mut buf)?;
        files.push(write_bytes(&spec.out_dir, name, &buf)?);
    }
    let mut summary = CertifySummary {
        c1: c1.summary(),
        cn1: cn1.summary(),
        files,
    };
    let json = write_json(&spec.out_dir, "certify_summary.json", &summary)?;
    summary.files.push(json);
    Ok(summary)
}

// ---------------------------------------------------------------------------
// sweep-n (minimal electrode count per resolution, uniqueness and convex
// criteria side by side)

#[derive(Debug, Clone, Serialize)]
pub struct SweepNRow {
    pub n: usize,
    /// "c1" or "cn1".
    pub criterion: String,
    pub m_required: Option<usize>,
    pub lambda: Option<f64>,
    /// λ recomputed with five extra electrodes.
    pub lambda_plus5: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepNSummary {
    pub rows: Vec<SweepNRow>,
    pub m_max: usize,
    pub files: Vec<PathBuf>,
}

fn minimal_m(
    spec: &ExperimentSpec,
    n: usize,
    c: f64,
    trace: &mut Vec<(usize, String, usize, usize, f64, bool)>,
    label: &str,
) -> Result<(Option<usize>, Option<f64>)> {
    for m in 2..=spec.m_max {
        let cfg = GeometryConfig {
            n,
            m,
            ..spec.geometry.clone()
        };
        let sys = build_system(spec, &cfg)?;
        let crit = criterion_lambda(&sys, spec.a, spec.b, c)?;
        trace.push((n, label.to_string(), m, crit.grid.k_max, crit.lambda, crit.satisfied));
        if crit.satisfied {
            return Ok((Some(m), Some(crit.lambda)));
        }
    }
    Ok((None, None))
}

/// For each resolution in `n_list`, finds the smallest electrode count
/// satisfying each criterion, plus λ at that count and with five extra
/// electrodes.
pub fn run_sweep_n(spec: &ExperimentSpec) -> Result<SweepNSummary> {
    let mut rows = Vec::new();
    let mut trace = Vec::new();
    for &n in &spec.n_list {
        if n < 2 {
            return Err(Error::Config(format!("n_list entries must be >= 2, got {n}")));
        }
        for (label, c) in [("c1", 1.0), ("cn1", (n - 1) as f64)] {
            let (m_required, lambda) = minimal_m(spec, n, c, &mut trace, label)?;
            let lambda_plus5 = match m_required {
                Some(m) => {
                    let cfg = GeometryConfig {
                        n,
                        m: m + 5,
                        ..spec.geometry.clone()
                    };
                    let sys = build_system(spec, &cfg)?;
                    Some(criterion_lambda(&sys, spec.a, spec.b, c)?.lambda)
                }
                None => None,
            };
            rows.push(SweepNRow {
                n,
                criterion: label.to_string(),
                m_required,
                lambda,
                lambda_plus5,
            });
        }
    }

    let mut csv = Vec::new();
    writeln!(csv, "n,criterion,m_required,lambda,lambda_plus5")?;
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.n,
            r.criterion,
            r.m_required.map(|m| m.to_string()).unwrap_or_default(),
            opt_f64(r.lambda),
            opt_f64(r.lambda_plus5)
        )?;
    }
    let mut trace_csv = Vec::new();
    writeln!(trace_csv, "n,criterion,m,k,lambda,satisfied")?;
    for (n, label, m, k, lambda, sat) in &trace {
        writeln!(trace_csv, "{n},{label},{m},{k},{lambda},{}", u8::from(*sat))?;
    }
    let mut files = vec![
        write_bytes(&spec.out_dir, "sweep_n.csv", &csv)?,
        write_bytes(&spec.out_dir, "sweep_n_trace.csv", &trace_csv)?,
    ];
    let mut summary = SweepNSummary {
        rows,
        m_max: spec.m_max,
        files: Vec::new(),
    };
    files.push(write_json(&spec.out_dir, "sweep_n_summary.json", &summary)?);
    summary.files = files;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// sweep-m (λ against electrode count at fixed resolution)

#[derive(Debug, Clone, Serialize)]
pub struct SweepMRow {
    pub m: usize,
    pub lambda_c1: f64,
    pub satisfied_c1: bool,
    pub lambda_cn1: f64,
    pub satisfied_cn1: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepMSummary {
    pub n: usize,
    pub rows: Vec<SweepMRow>,
    pub files: Vec<PathBuf>,
}

/// λ for both criteria over the configured electrode counts at fixed `n`.
pub fn run_sweep_m(spec: &ExperimentSpec) -> Result<SweepMSummary> {
    let n = spec.geometry.n;
    let mut rows = Vec::new();
    for &m in &spec.m_list {
        if m < 2 {
            return Err(Error::Config(format!("m_list entries must be >= 2, got {m}")));
        }
        let cfg = GeometryConfig {
            m,
            ..spec.geometry.clone()
        };
        let sys = build_system(spec, &cfg)?;
        let c1 = criterion_lambda(&sys, spec.a, spec.b, 1.0)?;
        let cn1 = criterion_lambda(&sys, spec.a, spec.b, (n - 1) as f64)?;
        rows.push(SweepMRow {
            m,
            lambda_c1: c1.lambda,
            satisfied_c1: c1.satisfied,
            lambda_cn1: cn1.lambda,
            satisfied_cn1: cn1.satisfied,
        });
    }
    let mut csv = Vec::new();
    writeln!(csv, "m,lambda_c1,satisfied_c1,lambda_cn1,satisfied_cn1")?;
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.m,
            r.lambda_c1,
            u8::from(r.satisfied_c1),
            r.lambda_cn1,
            u8::from(r.satisfied_cn1)
        )?;
    }
    let mut files = vec![write_bytes(&spec.out_dir, "sweep_m.csv", &csv)?];
    let mut summary = SweepMSummary {
        n,
        rows,
        files: Vec::new(),
    };
    files.push(write_json(&spec.out_dir, "sweep_m_summary.json", &summary)?);
    summary.files = files;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// reconstruct (single solve; synthetic seeded truth or measured data file)

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructSummary {
    pub solution: crate::reconstruct::SdpSolution,
    pub gamma_hat: Option<Vec<f64>>,
    pub err_inf: Option<f64>,
    pub err_2: Option<f64>,
    pub files: Vec<PathBuf>,
}

fn seeded_gamma(rng: &mut ChaCha8Rng, n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(a..b)).collect()
}

/// Reconstructs from a measurement file (`data` key) or from a seeded
/// synthetic truth.
pub fn run_reconstruct(spec: &ExperimentSpec) -> Result<ReconstructSummary> {
    let sys = build_system(spec, &spec.geometry)?;
    let (target, gamma_hat) = match &spec.data_file {
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let y = read_measurement(&mut std::io::BufReader::new(file))?;
            (y, None)
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let ghat = seeded_gamma(&mut rng, sys.n, spec.a, spec.b);
            let y = measure(&sys, &RobinParam::new(ghat.clone())?)?;
            (y, Some(ghat))
        }
    };
    let solution = solve_sdp(&sys, &target, spec.a, spec.b, &spec.sdp)?;
    let (err_inf, err_2) = match &gamma_hat {
        Some(ghat) => {
            let inf = solution
                .gamma
                .iter()
                .zip(ghat)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            let two = solution
                .gamma
                .iter()
                .zip(ghat)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            (Some(inf), Some(two))
        }
        None => (None, None),
    };
    let mut trace = Vec::new();
    solution.write_trace_csv(&mut trace)?;
    let mut files = vec![write_bytes(&spec.out_dir, "reconstruct_trace.csv", &trace)?];
    let mut summary = ReconstructSummary {
        solution,
        gamma_hat,
        err_inf,
        err_2,
        files: Vec::new(),
    };
    files.push(write_json(&spec.out_dir, "reconstruct_solution.json", &summary)?);
    summary.files = files;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// landscape (SDP vs least-squares over a grid of true coefficients)

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeCell {
    pub ghat: [f64; 2],
    pub sdp_err_2: Option<f64>,
    pub sdp_status: String,
    pub lsq_err_2: Option<f64>,
    pub lsq_converged: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeSummary {
    pub grid_resolution: usize,
    pub max_sdp_err_2: f64,
    pub max_lsq_err_2: f64,
    pub worst_lsq_ghat: [f64; 2],
    pub cells_with_errors: usize,
    pub files: Vec<PathBuf>,
}

/// Reconstruction error of the convex program and of the least-squares
/// baseline (started from the box midpoint) over a grid of true two-arc
/// coefficients.
pub fn run_landscape(spec: &ExperimentSpec) -> Result<LandscapeSummary> {
    if spec.geometry.n != 2 {
        return Err(Error::Config(format!(
            "landscape needs n = 2, configured n = {}",
            spec.geometry.n
        )));
    }
    let sys = build_system(spec, &spec.geometry)?;
    let res = spec.grid_resolution;
    let coord = |i: usize| spec.a + (spec.b - spec.a) * i as f64 / (res - 1) as f64;
    let start = [0.5 * (spec.a + spec.b), 0.5 * (spec.a + spec.b)];

    let cells: Vec<LandscapeCell> = exec::map_indexed(res * res, |idx| {
        let ghat = [coord(idx / res), coord(idx % res)];
        let target = match measure(&sys, &RobinParam::new(ghat.to_vec()).unwrap()) {
            Ok(t) => t,
            Err(e) => {
                return LandscapeCell {
                    ghat,
                    sdp_err_2: None,
                    sdp_status: format!("error: {e}"),
                    lsq_err_2: None,
                    lsq_converged: None,
                }
            }
        };
        let err2 = |g: &[f64]| {
            g.iter()
                .zip(ghat.iter())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let (sdp_err_2, sdp_status) = match solve_sdp(&sys, &target, spec.a, spec.b, &spec.sdp) {
            Ok(sol) => (Some(err2(&sol.gamma)), sol.status.to_string()),
            Err(e) => (None, format!("error: {e}")),
        };
        let (lsq_err_2, lsq_converged) =
            match lsq_baseline(&sys, &target, &start, spec.a, spec.b, &spec.lsq) {
                Ok(r) => (Some(err2(&r.gamma)), Some(r.converged)),
                Err(_) => (None, None),
            };
        LandscapeCell {
            ghat,
            sdp_err_2,
            sdp_status,
            lsq_err_2,
            lsq_converged,
        }
    });

    let mut csv = Vec::new();
    writeln!(csv, "ghat1,ghat2,sdp_err,sdp_status,lsq_err,lsq_converged")?;
    for c in &cells {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            c.ghat[0],
            c.ghat[1],
            opt_f64(c.sdp_err_2),
            c.sdp_status,
            opt_f64(c.lsq_err_2),
            c.lsq_converged.map(|b| u8::from(b).to_string()).unwrap_or_default()
        )?;
    }

    let max_sdp = cells
        .iter()
        .filter_map(|c| c.sdp_err_2)
        .fold(0.0f64, f64::max);
    let (max_lsq, worst) = cells.iter().fold((0.0f64, [0.0; 2]), |(mx, w), c| {
        match c.lsq_err_2 {
            Some(e) if e > mx => (e, c.ghat),
            _ => (mx, w),
        }
    });
    let failures = cells
        .iter()
        .filter(|c| c.sdp_err_2.is_none() || c.lsq_err_2.is_none())
        .count();

    let mut files = vec![write_bytes(&spec.out_dir, "landscape.csv", &csv)?];
    let mut summary = LandscapeSummary {
        grid_resolution: res,
        max_sdp_err_2: max_sdp,
        max_lsq_err_2: max_lsq,
        worst_lsq_ghat: worst,
        cells_with_errors: failures,
        files: Vec::new(),
    };
    files.push(write_json(&spec.out_dir, "landscape_summary.json", &summary)?);
    summary.files = files;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// noise-sweep (reconstruction error against the noise level)

#[derive(Debug, Clone, Serialize)]
pub struct NoiseRow {
    pub delta: f64,
    pub err_inf: f64,
    pub err_2: f64,
    /// `2δ(n−1)/λ` when the `C = n−1` criterion is satisfied.
    pub bound: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSweepSummary {
    pub gamma_hat: Vec<f64>,
    pub lambda_cn1: f64,
    pub criterion_satisfied: bool,
    pub rows: Vec<NoiseRow>,
    pub files: Vec<PathBuf>,
}

/// Default noise levels: `10⁻¹ … 10⁻¹⁰` then exact data.
fn default_noise_levels() -> Vec<f64> {
    let mut v: Vec<f64> = (1..=10).map(|e| 10f64.powi(-e)).collect();
    v.push(0.0);
    v
}

/// Solves the noisy program over a sweep of noise levels with one shared
/// unit-norm noise direction, reporting errors and the stability bound.
pub fn run_noise_sweep(spec: &ExperimentSpec) -> Result<NoiseSweepSummary> {
    let sys = build_system(spec, &spec.geometry)?;
    let mut deltas = spec.delta_list.clone().unwrap_or_else(default_noise_levels);
    if deltas.iter().any(|&d| !(d.is_finite() && d >= 0.0)) {
        return Err(Error::Config("delta_list entries must be >= 0".into()));
    }
    // descending, exact data last
    deltas.sort_by(|x, y| y.partial_cmp(x).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let gamma_hat = seeded_gamma(&mut rng, sys.n, spec.a, spec.b);
    let target = measure(&sys, &RobinParam::new(gamma_hat.clone())?)?;
    let unit_noise = noise_matrix(sys.m, spec.cell_seed(1));
    let criterion = criterion_lambda(&sys, spec.a, spec.b, (sys.n - 1) as f64)?;

    let rows: Vec<NoiseRow> = exec::try_map_indexed(deltas.len(), |i| {
        let delta = deltas[i];
        let y_delta = &target + &unit_noise * delta;
        let noisy = NoisyInput::new(y_delta, delta)?;
        let (sol, report) =
            solve_sdp_noisy(&sys, &noisy, spec.a, spec.b, &spec.sdp, Some(&criterion))?;
        let err_inf = sol
            .gamma
            .iter()
            .zip(&gamma_hat)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        let err_2 = sol
            .gamma
            .iter()
            .zip(&gamma_hat)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        Ok::<NoiseRow, Error>(NoiseRow {
            delta,
            err_inf,
            err_2,
            bound: report.bound,
            status: sol.status.to_string(),
        })
    })?;

    let mut csv = Vec::new();
    writeln!(csv, "delta,err_inf,err_2,bound,status")?;
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            r.delta,
            r.err_inf,
            r.err_2,
            opt_f64(r.bound),
            r.status
        )?;
    }
    let mut files = vec![write_bytes(&spec.out_dir, "noise_sweep.csv", &csv)?];
    let mut summary = NoiseSweepSummary {
        gamma_hat,
        lambda_cn1: criterion.lambda,
        criterion_satisfied: criterion.satisfied,
        rows,
        files: Vec::new(),
    };
    files.push(write_json(&spec.out_dir, "noise_sweep_summary.json", &summary)?);
    summary.files = files;
    Ok(summary)
}

// ---------------------------------------------------------------------------
// admissible (feasible-set grids for exact and noisy data)

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibleSummary {
    pub gamma_hat: [f64; 2],
    pub grid_resolution: usize,
    pub deltas: Vec<f64>,
    /// Admissible cell count per delta.
    pub admissible_counts: Vec<usize>,
    pub files: Vec<PathBuf>,
}

/// Samples the admissible set `{γ : F(γ) ⪯ Y^δ + δI}` for each noise level
/// (default `0, 10⁻⁴, 10⁻³, 10⁻²`) on a shared grid.
pub fn run_admissible(spec: &ExperimentSpec) -> Result<AdmissibleSummary> {
    if spec.geometry.n != 2 {
        return Err(Error::Config(format!(
            "admissible needs n = 2, configured n = {}",
            spec.geometry.n
        )));
    }
    let sys = build_system(spec, &spec.geometry)?;
    let deltas = spec
        .delta_list
        .clone()
        .unwrap_or_else(|| vec![0.0, 1e-4, 1e-3, 1e-2]);
    let mid = 0.5 * (spec.a + spec.b);
    let gamma_hat = [mid, mid];
    let target = measure(&sys, &RobinParam::new(gamma_hat.to_vec())?)?;
    let unit_noise = noise_matrix(sys.m, spec.cell_seed(1));

    let mut csv = Vec::new();
    writeln!(csv, "delta,i1,i2,gamma1,gamma2,admissible")?;
    let mut counts = Vec::new();
    for &delta in &deltas {
        let y_delta = &target + &unit_noise * delta;
        let grid = admissible_set_sample(&sys, &y_delta, delta, spec.a, spec.b, spec.grid_resolution)?;
        counts.push(grid.cells.iter().filter(|&&c| c).count());
        for i1 in 0..grid.resolution {
            for i2 in 0..grid.resolution {
                writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    delta,
                    i1,
                    i2,
                    grid.coordinate(i1),
                    grid.coordinate(i2),
                    u8::from(grid.cell(i1, i2))
                )?;
            }
        }
    }
    let mut files = vec![write_bytes(&spec.out_dir, "admissible.csv", &csv)?];
    let mut summary = AdmissibleSummary {
        gamma_hat,
        grid_resolution: spec.grid_resolution,
        deltas,
        admissible_counts: counts,
        files: Vec::new(),
    };
    files.push(write_json(&spec.out_dir, "admissible_summary.json", &summary)?);
    summary.files = files;
    Ok(summary)
}

// ---------------------------------------------------------------------------
