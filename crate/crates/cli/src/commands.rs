use std::fs;
use std::path::Path;

use finsler_core::catalog::CATALOG;
use finsler_core::geodesics::{compare_geodesics, IntegratorConfig};
use finsler_core::geometry::{Frame, SlitPoint};
use finsler_core::randers::RandersPoint;
use finsler_core::tensor::Tensor;
use finsler_core::verify::run_checks;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{parse_config, ConfigError};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Usage(_) => EXIT_CONFIG,
            CommandError::Runtime(_) => EXIT_FAILURE,
        }
    }
}

fn read(path: &Path) -> Result<String, CommandError> {
    fs::read_to_string(path).map_err(|source| {
        ConfigError::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CommandError> {
    fs::write(path, contents).map_err(|e| CommandError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Runs the configured checks; the report is written to `out` when given.
pub fn verify(config_path: &Path, out: Option<&Path>) -> Result<Report, CommandError> {
    let text = read(config_path)?;
    let cfg = parse_config(&text)?;
    let checks = run_checks(&cfg.bundle, &cfg.checks, &cfg.plan).map_err(|e| CommandError::Runtime(e.to_string()))?;
    let report = Report::new(&text, &cfg.instance, checks);
    if let Some(out) = out {
        write(out, &report.to_json())?;
    }
    Ok(report)
}

fn tensor(t: &Tensor<finsler_core::jet::Jet>) -> Value {
    serde_json::to_value(t.value()).expect("tensors serialize")
}

fn frame_json(f: &Frame) -> Value {
    json!({
        "L": f.l.value(),
        "g": tensor(&f.g),
        "g_inv": tensor(&f.g_inv),
        "ell_low": tensor(&f.ell_low),
        "ell_up": tensor(&f.ell_up),
        "h": tensor(&f.h),
        "cartan_low": tensor(&f.cartan_low),
        "cartan": tensor(&f.cartan),
        "cartan_trace": tensor(&f.cartan_trace),
        "spray": tensor(&f.spray),
        "nonlinear": tensor(&f.nonlinear),
        "gamma_bar": tensor(&f.gamma_bar),
        "gamma": tensor(&f.gamma),
    })
}

/// Every frame component of `L` and `L*` and every closed-form quantity at one point.
pub fn jet(config_path: &Path, x: &[f64], y: &[f64]) -> Result<Value, CommandError> {
    let cfg = parse_config(&read(config_path)?)?;
    let n = cfg.dimension;
    if x.len() != n || y.len() != n {
        return Err(CommandError::Usage(format!("--x and --y need {n} components")));
    }
    let p = SlitPoint::new(x.to_vec(), y.to_vec()).map_err(|e| CommandError::Usage(e.to_string()))?;
    let rp = RandersPoint::compute(&cfg.bundle, &p, cfg.jet_order).map_err(|e| CommandError::Runtime(e.to_string()))?;
    let s = &rp.star;
    let mut star = Map::new();
    for (name, v) in [
        ("alpha", s.alpha.value()),
        ("L_star", s.l_star.value()),
        ("tau", s.tau.value()),
        ("b2", s.b2.value()),
        ("mu", s.mu.value()),
        ("nu_m", s.nu_m.value()),
        ("b_00", s.b_00.value()),
    ] {
        star.insert(name.into(), json!(v));
    }
    for (name, t) in [
        ("b_low", &s.b_low),
        ("b_up", &s.b_up),
        ("ell_star_low", &s.ell_star_low),
        ("ell_star_up", &s.ell_star_up),
        ("h_star", &s.h_star),
        ("g_star", &s.g_star),
        ("g_star_inv", &s.g_star_inv),
        ("m", &s.m),
        ("nu", &s.nu),
        ("phi", &s.phi),
        ("phi_star", &s.phi_star),
        ("omega_t", &s.omega_t),
        ("A", &s.a),
        ("A_star_low", &s.a_star_low),
        ("cartan_star", &s.cartan_star),
        ("cartan_star_low", &s.cartan_star_low),
        ("cartan_star_trace", &s.cartan_star_trace),
        ("T_star_low", &s.t_star_low),
        ("b_cov", &s.b_cov),
        ("b_sym", &s.b_sym),
        ("b_anti", &s.b_anti),
        ("b_i0", &s.b_i0),
        ("b_sym_i0", &s.b_sym_i0),
        ("b_anti_i0", &s.b_anti_i0),
        ("h_star_mixed", &s.h_star_mixed),
        ("N0", &s.n0),
        ("N", &s.n_conn),
        ("B", &s.b_conn),
    ] {
        star.insert(name.into(), tensor(t));
    }
    Ok(json!({
        "instance": cfg.instance,
        "point": p,
        "base": frame_json(&rp.base),
        "star_frame": frame_json(&rp.star_frame),
        "star": Value::Object(star),
    }))
}

/// Integrates both geodesics, writes `base.csv`, `star.csv` and `summary.json`.
pub fn geodesic(config_path: &Path, out_dir: &Path) -> Result<Value, CommandError> {
    let cfg = parse_config(&read(config_path)?)?;
    let job = cfg
        .geodesic
        .clone()
        .ok_or_else(|| CommandError::Config(ConfigError::Missing("geodesic")))?;
    let mut icfg = IntegratorConfig::default();
    if let Some(rtol) = job.rtol {
        icfg.rtol = rtol;
    }
    let cmp = compare_geodesics(&cfg.bundle, &job.x0, &job.y0, job.t_end, &icfg)
        .map_err(|e| CommandError::Runtime(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|e| CommandError::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    for (name, trace) in [("base.csv", &cmp.base), ("star.csv", &cmp.star)] {
        let path = out_dir.join(name);
        let file = fs::File::create(&path).map_err(|e| CommandError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        trace.write_csv(file).map_err(|e| CommandError::Runtime(e.to_string()))?;
    }
    let summary = json!({
        "instance": cfg.instance,
        "x0": job.x0,
        "y0": job.y0,
        "t_end": job.t_end,
        "comparison": cmp,
        "base_steps": cmp.base.steps,
        "star_steps": cmp.star.steps,
    });
    write(
        &out_dir.join("summary.json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    Ok(summary)
}

pub fn catalog() -> String {
    let mut out = String::new();
    for e in CATALOG {
        let tags: Vec<&str> = e.tags.iter().map(|t| t.name()).collect();
        out.push_str(&format!(
            "{:<18} n={}  [{}]  {}\n",
            e.id,
            e.dimension,
            tags.join(", "),
            e.description
        ));
    }
    out
}
