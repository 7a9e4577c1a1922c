//! File export: CSV and OBJ surfaces, trajectory and coefficient JSON.
//! All writers are byte-deterministic for fixed inputs.

use moyal_spin_core::evolve::Trajectory;
use moyal_spin_core::wigner::WignerCoeffs;
use std::fmt::Write as _;
use std::path::Path;

use crate::surface::SampledSurface;

/// CSV with header `theta,phi,re,im`, rows theta-outer.
pub fn surface_to_csv(surface: &SampledSurface) -> String {
    let mut out = String::from("theta,phi,re,im\n");
    for (ti, &theta) in surface.thetas.iter().enumerate() {
        for (pi, &phi) in surface.phis.iter().enumerate() {
            let v = surface.value(ti, pi);
            writeln!(out, "{theta},{phi},{},{}", v.re, v.im).unwrap();
        }
    }
    out
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (f64, f64, f64) {
    let h = h.rem_euclid(1.0) * 6.0;
    let i = h.floor() as i32 % 6;
    let f = h - h.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - f * s);
    let t = v * (1.0 - (1.0 - f) * s);
    match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    }
}

/// Wavefront OBJ mesh: the radius in the direction (theta, phi) is |W|,
/// vertex colors encode the complex phase on the hue wheel. Vertices are
/// emitted as `v x y z r g b` (a common OBJ color extension); faces wrap
/// around in phi. Exactly resolution^2 vertices.
pub fn surface_to_obj(surface: &SampledSurface) -> String {
    let n_theta = surface.thetas.len();
    let n_phi = surface.phis.len();
    let mut out = String::new();
    writeln!(out, "# phase-space surface, {n_theta}x{n_phi} grid").unwrap();
    for (ti, &theta) in surface.thetas.iter().enumerate() {
        for (pi, &phi) in surface.phis.iter().enumerate() {
            let value = surface.value(ti, pi);
            let radius = value.norm();
            let x = radius * theta.sin() * phi.cos();
            let y = radius * theta.sin() * phi.sin();
            let z = radius * theta.cos();
            let hue =
                value.arg().rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
            let (r, g, b) = hsv_to_rgb(hue, 1.0, 1.0);
            writeln!(out, "v {x} {y} {z} {r:.6} {g:.6} {b:.6}").unwrap();
        }
    }
    // Quad faces; phi wraps, theta does not. OBJ indices are 1-based.
    for ti in 0..n_theta - 1 {
        for pi in 0..n_phi {
            let pj = (pi + 1) % n_phi;
            let a = ti * n_phi + pi + 1;
            let b = ti * n_phi + pj + 1;
            let c = (ti + 1) * n_phi + pj + 1;
            let d = (ti + 1) * n_phi + pi + 1;
            writeln!(out, "f {a} {b} {c} {d}").unwrap();
        }
    }
    out
}

/// Counts vertices and faces of an OBJ document (for validation).
pub fn parse_obj_counts(text: &str) -> (usize, usize) {
    let mut vertices = 0;
    let mut faces = 0;
    for line in text.lines() {
        if line.starts_with("v ") {
            vertices += 1;
        } else if line.starts_with("f ") {
            faces += 1;
        }
    }
    (vertices, faces)
}

/// Trajectory as a JSON array of {t, coeffs} (plus the per-time oracle
/// deviation when available).
pub fn trajectory_to_json(traj: &Trajectory, deviations: Option<&[(f64, f64)]>) -> String {
    let mut entries = Vec::with_capacity(traj.times.len());
    for (i, (&t, state)) in traj.times.iter().zip(traj.states.iter()).enumerate() {
        let coeffs: serde_json::Value =
            serde_json::from_str(&state.to_json()).expect("internal JSON is valid");
        let mut obj = serde_json::Map::new();
        obj.insert("t".into(), serde_json::json!(t));
        obj.insert("coeffs".into(), coeffs);
        if let Some(devs) = deviations {
            obj.insert("max_oracle_dev".into(), serde_json::json!(devs[i].1));
        }
        entries.push(serde_json::Value::Object(obj));
    }
    serde_json::to_string_pretty(&entries).expect("serialization cannot fail")
}

/// Writes text to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)
}

/// Export format selector shared by the CLI surface commands.
#[derive(Clone, Copy, PartialEq, Eq, Debug, clap::ValueEnum)]
pub enum SurfaceFormat {
    Csv,
    Json,
    Obj,
}

/// Renders a surface in the requested format.
pub fn render_surface(surface: &SampledSurface, format: SurfaceFormat) -> String {
    match format {
        SurfaceFormat::Csv => surface_to_csv(surface),
        SurfaceFormat::Obj => surface_to_obj(surface),
        SurfaceFormat::Json => {
            let rows: Vec<serde_json::Value> = surface
                .thetas
                .iter()
                .enumerate()
                .flat_map(|(ti, &theta)| {
                    let s = &surface;
                    s.phis.iter().enumerate().map(move |(pi, &phi)| {
                        let v = s.value(ti, pi);
                        serde_json::json!({"theta": theta, "phi": phi, "re": v.re, "im": v.im})
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("serialization cannot fail")
        }
    }
}

/// Renders a coefficient set (stable entry order, pretty JSON).
pub fn coeffs_to_json(w: &WignerCoeffs) -> String {
    w.to_json()
}
