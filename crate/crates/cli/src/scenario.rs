//! Declarative simulation scenarios: an initial state, a Hamiltonian, a
//! time grid, and a list of requested outputs, all serializable as JSON.
//! A handful of named built-in scenarios cover standard coupled-spin
//! experiments.

use anyhow::{bail, Context};
use moyal_spin_core::angular::HalfInt;
use moyal_spin_core::evolve::{build_generator, compare_with_oracle, propagate};
use moyal_spin_core::spinop::{entanglement_entropy, SpinOperator};
use moyal_spin_core::wigner::{inverse_wigner, wigner_transform};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::export;
use crate::opspec;
use crate::surface::sample_surface;

/// Operator specification: an expression string, a map of term
/// expressions to real coefficients, or a raw matrix file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Expression(String),
    Terms(BTreeMap<String, f64>),
    MatrixFile { matrix_file: PathBuf },
}

impl OperatorSpec {
    pub fn resolve(&self, n_spins: usize, base_dir: &Path) -> anyhow::Result<SpinOperator> {
        match self {
            OperatorSpec::Expression(text) => {
                let slot = opspec::max_slot(text)?;
                if slot > n_spins {
                    bail!("operator '{text}' references spin {slot} but the scenario has {n_spins} spins");
                }
                Ok(opspec::parse_operator(text, n_spins)?)
            }
            OperatorSpec::Terms(terms) => {
                let mut op = SpinOperator::zeros(n_spins, HalfInt::HALF);
                for (text, coeff) in terms {
                    let slot = opspec::max_slot(text)?;
                    if slot > n_spins {
                        bail!("term '{text}' references spin {slot} but the scenario has {n_spins} spins");
                    }
                    let term = opspec::parse_operator(text, n_spins)?;
                    op = op.add(&term.scale(C64::new(*coeff, 0.0)))?;
                }
                Ok(op)
            }
            OperatorSpec::MatrixFile { matrix_file } => {
                let path = if matrix_file.is_absolute() {
                    matrix_file.clone()
                } else {
                    base_dir.join(matrix_file)
                };
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading matrix file {}", path.display()))?;
                let op = SpinOperator::from_json(&text)?;
                if op.n_spins() != n_spins {
                    bail!(
                        "matrix file {} holds {} spins, scenario says {n_spins}",
                        path.display(),
                        op.n_spins()
                    );
                }
                Ok(op)
            }
        }
    }
}

/// Uniform time grid, inclusive of both ends (the last step may be short).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn times(&self) -> anyhow::Result<Vec<f64>> {
        if self.step <= 0.0 {
            bail!("time step must be positive, got {}", self.step);
        }
        if self.stop < self.start {
            bail!("stop time precedes start time");
        }
        let mut times = Vec::new();
        let mut t = self.start;
        while t < self.stop - 1e-12 * self.step {
            times.push(t);
            t += self.step;
        }
        times.push(self.stop);
        Ok(times)
    }
}

/// A requested output artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputSpec {
    /// Trajectory of coefficient sets as JSON.
    Coefficients,
    /// Surface samples of the final state on one sphere.
    Surface {
        spin: usize,
        #[serde(default = "default_resolution")]
        resolution: usize,
        #[serde(default)]
        fixed: Vec<(f64, f64)>,
        #[serde(default = "default_format")]
        format: String,
    },
    /// Von-Neumann entanglement entropy of a subsystem over time, CSV.
    Entropy { subsystem: Vec<usize> },
    /// Maximum deviation from the matrix oracle over time, JSON.
    OracleDev,
}

fn default_resolution() -> usize {
    48
}

fn default_format() -> String {
    "csv".into()
}

/// Declarative scenario.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub n_spins: usize,
    pub hamiltonian: OperatorSpec,
    pub initial_state: OperatorSpec,
    pub times: TimeGrid,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

impl Scenario {
    pub fn from_json(text: &str) -> anyhow::Result<Scenario> {
        serde_json::from_str(text).context("parsing scenario JSON")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }
}

/// Built-in scenario names.
pub const BUILTIN_NAMES: &[&str] = &[
    "single-precession",
    "two-spin-zz",
    "cnot",
    "cnot-bell",
    "three-spin-triplet",
    "coherence",
];

/// Returns a named built-in scenario, if it exists. Frequencies are fixed
/// to omega = 1 and nu = 1 so characteristic times are pi and 1/2.
pub fn builtin(name: &str) -> Option<Scenario> {
    let pi = std::f64::consts::PI;
    let scenario = match name {
        // Single spin precessing about z from I_x.
        "single-precession" => Scenario {
            name: name.into(),
            n_spins: 1,
            hamiltonian: OperatorSpec::Expression("I1z".into()),
            initial_state: OperatorSpec::Expression("I1x".into()),
            times: TimeGrid {
                start: 0.0,
                stop: 2.0 * pi,
                step: pi / 20.0,
            },
            outputs: vec![
                OutputSpec::Coefficients,
                OutputSpec::OracleDev,
                OutputSpec::Surface {
                    spin: 1,
                    resolution: 48,
                    fixed: vec![],
                    format: "obj".into(),
                },
            ],
        },
        // Weak coupling evolving I_1x into the antiphase state.
        "two-spin-zz" => Scenario {
            name: name.into(),
            n_spins: 2,
            hamiltonian: OperatorSpec::Terms(BTreeMap::from([("2*I1z*I2z".to_string(), pi)])),
            initial_state: OperatorSpec::Expression("I1x".into()),
            times: TimeGrid {
                start: 0.0,
                stop: 0.5,
                step: 0.025,
            },
            outputs: vec![OutputSpec::Coefficients, OutputSpec::OracleDev],
        },
        // Controlled flip of spin 2 with the control set to beta.
        "cnot" => Scenario {
            name: name.into(),
            n_spins: 2,
            hamiltonian: OperatorSpec::Expression("I1b*I2x + 0.5*I1z".into()),
            initial_state: OperatorSpec::Expression("I1b*I2a".into()),
            times: TimeGrid {
                start: 0.0,
                stop: pi,
                step: pi / 20.0,
            },
            outputs: vec![OutputSpec::Coefficients, OutputSpec::OracleDev],
        },
        // Entanglement build-up from a separable state under the same gate.
        "cnot-bell" => Scenario {
            name: name.into(),
            n_spins: 2,
            hamiltonian: OperatorSpec::Expression("I1b*I2x + 0.5*I1z".into()),
            initial_state: OperatorSpec::Expression("0.5*I2a + I1x*I2a".into()),
            times: TimeGrid {
                start: 0.0,
                stop: pi,
                step: pi / 40.0,
            },
            outputs: vec![
                OutputSpec::Coefficients,
                OutputSpec::Entropy { subsystem: vec![1] },
                OutputSpec::OracleDev,
            ],
        },
        // Linear three-spin chain producing the 1:2:1 multiplet pattern.
        "three-spin-triplet" => Scenario {
            name: name.into(),
            n_spins: 3,
            hamiltonian: OperatorSpec::Terms(BTreeMap::from([
                ("2*I1z*I2z".to_string(), pi),
                ("2*I2z*I3z".to_string(), pi),
            ])),
            initial_state: OperatorSpec::Expression("I2x".into()),
            times: TimeGrid {
                start: 0.0,
                stop: 0.5,
                step: 0.0125,
            },
            outputs: vec![OutputSpec::Coefficients, OutputSpec::OracleDev],
        },
        // Non-hermitian lowering state: the function only picks up a phase.
        "coherence" => Scenario {
            name: name.into(),
            n_spins: 1,
            hamiltonian: OperatorSpec::Expression("I1z".into()),
            initial_state: OperatorSpec::Expression("I1x - i*I1y".into()),
            times: TimeGrid {
                start: 0.0,
                stop: 2.0 * pi,
                step: pi / 20.0,
            },
            outputs: vec![OutputSpec::Coefficients],
        },
        _ => return None,
    };
    Some(scenario)
}

/// Loads a scenario by built-in name or JSON file path.
pub fn load(name_or_path: &str) -> anyhow::Result<(Scenario, PathBuf)> {
    if let Some(s) = builtin(name_or_path) {
        return Ok((s, PathBuf::from(".")));
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario file {}", path.display()))?;
        let scenario = Scenario::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        return Ok((scenario, base));
    }
    bail!(
        "'{name_or_path}' is neither a built-in scenario ({}) nor an existing file",
        BUILTIN_NAMES.join(", ")
    );
}

/// Runs a scenario and writes all requested outputs under `out_dir`.
/// Returns the paths written, in a deterministic order.
pub fn run_scenario(
    scenario: &Scenario,
    base_dir: &Path,
    out_dir: &Path,
    times_override: Option<Vec<f64>>,
) -> anyhow::Result<Vec<PathBuf>> {
    let h = scenario
        .hamiltonian
        .resolve(scenario.n_spins, base_dir)
        .context("resolving hamiltonian")?;
    let rho0 = scenario
        .initial_state
        .resolve(scenario.n_spins, base_dir)
        .context("resolving initial state")?;

    let times = match times_override {
        Some(t) => t,
        None => scenario.times.times()?,
    };

    let w_h = wigner_transform(&h);
    let w0 = wigner_transform(&rho0);
    let generator = build_generator(&w_h)?;
    let trajectory = propagate(&generator, &w0, &times)?;

    let mut written = Vec::new();
    for output in &scenario.outputs {
        match output {
            OutputSpec::Coefficients => {
                let path = out_dir.join(format!("{}_traj.json", scenario.name));
                export::write_text(&path, &export::trajectory_to_json(&trajectory, None))?;
                written.push(path);
            }
            OutputSpec::Surface {
                spin,
                resolution,
                fixed,
                format,
            } => {
                let final_state = trajectory.states.last().expect("times is never empty");
                let surface = sample_surface(final_state, *spin, *resolution, fixed)?;
                let fmt = match format.as_str() {
                    "csv" => export::SurfaceFormat::Csv,
                    "json" => export::SurfaceFormat::Json,
                    "obj" => export::SurfaceFormat::Obj,
                    other => bail!("unknown surface format '{other}' (csv, json, obj)"),
                };
                let ext = format.as_str();
                let path = out_dir.join(format!("{}_surface_spin{}.{ext}", scenario.name, spin));
                export::write_text(&path, &export::render_surface(&surface, fmt))?;
                written.push(path);
            }
            OutputSpec::Entropy { subsystem } => {
                let mut csv = String::from("t,entropy_bits\n");
                for (i, state) in trajectory.states.iter().enumerate() {
                    let rho = inverse_wigner(state)?;
                    let s = entanglement_entropy(&rho, subsystem)?;
                    writeln!(csv, "{},{}", trajectory.times[i], s).unwrap();
                }
                let path = out_dir.join(format!("{}_entropy.csv", scenario.name));
                export::write_text(&path, &csv)?;
                written.push(path);
            }
            OutputSpec::OracleDev => {
                let (oracle_traj, report) = compare_with_oracle(&h, &rho0, &times)?;
                let path = out_dir.join(format!("{}_oracle.json", scenario.name));
                export::write_text(
                    &path,
                    &export::trajectory_to_json(&oracle_traj, Some(&report.deviations)),
                )?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
