//! Dataset bundles for the pictured parameter values.
//!
//! Interior presets (`mu=-20`, ..., `mu=8`) hold an orbit started next to O,
//! the limit cycle when the orbit converges to one, and the traced manifolds
//! of O while it is a saddle-focus. Boundary presets (`case=I`, ...,
//! `case=VII`) hold orbits on the six invariant faces. Every bundle has an
//! `equilibria.csv` and a `manifest.json` naming the files, columns and axes.

use std::path::Path;

use polyrep_core::bifurcation;
use polyrep_core::equilibria;
use polyrep_core::flow::{self, FlowOptions, OmegaVerdict};
use polyrep_core::lyapunov;
use polyrep_core::CubeState;
use serde_json::{json, Value};

use crate::cli::{self, AppError, Branches};
use crate::output::{num, write_file, Table};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PresetKind {
    /// Orbit from the standard start next to O over `[0, t_end]`.
    Interior { t_end: f64 },
    /// Orbits on the faces of the cube.
    Boundary { case: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub mu: f64,
    pub kind: PresetKind,
}

const fn interior(name: &'static str, mu: f64, t_end: f64) -> Preset {
    Preset { name, mu, kind: PresetKind::Interior { t_end } }
}

const fn boundary(name: &'static str, mu: f64, case: &'static str) -> Preset {
    Preset { name, mu, kind: PresetKind::Boundary { case } }
}

pub const PRESETS: [Preset; 16] = [
    interior("mu=-20", -20.0, 200.0),
    interior("mu=-17.5", -17.5, 200.0),
    interior("mu=-14", -14.0, 200.0),
    interior("mu=-8.5", -8.5, 200.0),
    interior("mu=-7", -7.0, 200.0),
    interior("mu=1.1", 1.1, 200.0),
    interior("mu=3.6", 3.6, 170.0),
    interior("mu=6.5", 6.5, 200.0),
    interior("mu=8", 8.0, 200.0),
    boundary("case=I", -25.0, "I"),
    boundary("case=II", -14.0, "II"),
    boundary("case=III", -10.0, "III"),
    boundary("case=IV", -7.0, "IV"),
    boundary("case=V", 0.0, "V"),
    boundary("case=VI", 5.0, "VI"),
    boundary("case=VII", 9.0, "VII"),
];

/// Looks a preset up by name; `mu=` presets also match by value (`mu=-20.0`).
pub fn find(name: &str) -> Option<&'static Preset> {
    let name = name.trim();
    if let Some(p) = PRESETS.iter().find(|p| p.name == name) {
        return Some(p);
    }
    let v: f64 = name.strip_prefix("mu=")?.parse().ok()?;
    PRESETS.iter().find(|p| matches!(p.kind, PresetKind::Interior { .. }) && p.mu == v)
}

/// Sampling interval of gallery orbits.
pub const SAMPLE_DT: f64 = 0.05;
const CYCLE_HORIZON: f64 = 2000.0;
const FACE_T_END: f64 = 100.0;
const MANIFOLD_SEEDS: usize = 16;
const MANIFOLD_T_END: f64 = 200.0;
const MANIFOLD_STRIDE: usize = 10;

fn file_entry(path: &str, table: &Table, description: &str, series: Option<&str>) -> Value {
    json!({
        "path": path,
        "description": description,
        "columns": table.header,
        "rows": table.rows.len(),
        "axes": ["x", "y", "z"],
        "series": series,
    })
}

fn equilibria_table(mu: f64) -> Result<Table, AppError> {
    let mut t = Table::new(&["name", "stratum", "x", "y", "z", "classification"]);
    for e in equilibria::closed_form_equilibria(mu).into_iter().filter(|e| e.in_cube) {
        let class = equilibria::eigen_analysis(mu, e.location)?.classification;
        t.push(vec![
            e.name.to_string(),
            e.stratum.as_str().to_string(),
            num(e.location.x),
            num(e.location.y),
            num(e.location.z),
            class.to_string(),
        ]);
    }
    Ok(t)
}

fn push_orbit(t: &mut Table, label: &str, traj: &flow::Trajectory) {
    for (ti, p) in traj.times.iter().zip(&traj.states) {
        t.push(vec![label.to_string(), num(*ti), num(p.x), num(p.y), num(p.z)]);
    }
}

/// Invariant faces with a 3x3 grid of starting points on each.
fn face_seeds() -> Vec<(String, CubeState)> {
    let mut out = Vec::new();
    for axis in 0..3 {
        for side in [0.0, 1.0] {
            let face = format!("{}={}", ["x", "y", "z"][axis], side as u8);
            for (i, a) in [0.2, 0.5, 0.8].into_iter().enumerate() {
                for (j, b) in [0.2, 0.5, 0.8].into_iter().enumerate() {
                    let mut q = [0.0; 3];
                    let others: Vec<usize> = (0..3).filter(|&k| k != axis).collect();
                    q[axis] = side;
                    q[others[0]] = a;
                    q[others[1]] = b;
                    out.push((format!("{face}/{}", 3 * i + j), CubeState::from(q)));
                }
            }
        }
    }
    out
}

/// Writes the bundle of `preset` into `dir` and returns the manifest.
pub fn write_bundle(preset: &Preset, dir: &Path) -> Result<Value, AppError> {
    std::fs::create_dir_all(dir)?;
    let mu = preset.mu;
    let opts = FlowOptions::default();
    let case = bifurcation::classify_case(mu).map(|c| c.as_str()).ok();
    let mut files = Vec::new();

    let eq = equilibria_table(mu)?;
    write_file(&dir.join("equilibria.csv"), &eq.to_bytes())?;
    files.push(file_entry("equilibria.csv", &eq, "equilibria in the cube", None));

    let mut params = json!({"dt": SAMPLE_DT, "rtol": opts.rtol, "atol": opts.atol});
    match preset.kind {
        PresetKind::Interior { t_end } => {
            let p0 = lyapunov::initial_condition(mu, lyapunov::DEFAULT_EPS)?;
            let traj = flow::integrate_sampled(mu, p0, t_end, SAMPLE_DT, &opts)?;
            let mut t = Table::new(&["orbit", "t", "x", "y", "z"]);
            push_orbit(&mut t, "0", &traj);
            write_file(&dir.join("trajectory.csv"), &t.to_bytes())?;
            files.push(file_entry("trajectory.csv", &t, "orbit from the start next to O", Some("orbit")));
            params["t_span"] = json!([0.0, t_end]);
            params["initial_point"] = json!([p0.x, p0.y, p0.z]);

            let omega = flow::classify_omega_limit_with(mu, p0, CYCLE_HORIZON, &opts)?;
            params["omega_limit"] = json!(omega.verdict.label());
            if let OmegaVerdict::Periodic { period, .. } = omega.verdict {
                let start = *omega.return_points.last().expect("periodic verdict has returns");
                let cycle = flow::integrate_sampled(mu, start, period, period / 500.0, &opts)?;
                let mut c = Table::new(&["orbit", "t", "x", "y", "z"]);
                push_orbit(&mut c, "cycle", &cycle);
                write_file(&dir.join("cycle.csv"), &c.to_bytes())?;
                files.push(file_entry("cycle.csv", &c, "one period of the limit cycle", Some("orbit")));
                params["period"] = json!(period);
            }

            let t = bifurcation::interior_thresholds(1e-12)?;
            if mu > t.hopf1 && mu < t.hopf2 {
                let traces = cli::parallel_traces(
                    mu,
                    Branches::Both,
                    MANIFOLD_SEEDS,
                    MANIFOLD_T_END,
                    polyrep_core::geometry::SEED_RADIUS,
                )?;
                let m = cli::trace_table(&traces, MANIFOLD_STRIDE);
                write_file(&dir.join("manifolds.csv"), &m.to_bytes())?;
                files.push(file_entry(
                    "manifolds.csv",
                    &m,
                    "unstable and stable manifold branches of O",
                    Some("manifold,branch"),
                ));
            }
        }
        PresetKind::Boundary { .. } => {
            let mut t = Table::new(&["orbit", "t", "x", "y", "z"]);
            for (label, p0) in face_seeds() {
                let traj = flow::integrate_sampled(mu, p0, FACE_T_END, SAMPLE_DT, &opts)?;
                push_orbit(&mut t, &label, &traj);
            }
            write_file(&dir.join("boundary.csv"), &t.to_bytes())?;
            files.push(file_entry("boundary.csv", &t, "orbits on the six faces", Some("orbit")));
            params["t_span"] = json!([0.0, FACE_T_END]);
        }
    }

    let manifest = json!({
        "preset": preset.name,
        "mu": mu,
        "case": case,
        "kind": match preset.kind {
            PresetKind::Interior { .. } => json!("interior"),
            PresetKind::Boundary { case } => json!({"boundary_case": case}),
        },
        "parameters": params,
        "files": files,
    });
    write_file(&dir.join("manifest.json"), &crate::output::json_bytes(&manifest))?;
    Ok(manifest)
}
