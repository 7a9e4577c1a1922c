use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use moyal_spin::export::{self, SurfaceFormat};
use moyal_spin::scenario;
use moyal_spin::surface::sample_surface;
use moyal_spin_core::angular::{coeff_lambda, coeff_q, coeff_u, coeff_z, HalfInt};
use moyal_spin_core::quad::validate_stratonovich;
use moyal_spin_core::spinop::{decompose, SpinOperator};
use moyal_spin_core::star::{prestar_multi, star_multi};
use moyal_spin_core::wigner::{wigner_transform, WignerCoeffs};

/// Phase-space simulator for coupled spin-1/2 systems.
#[derive(Parser)]
#[command(name = "moyal-spin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in or JSON scenario and write its outputs.
    Scenario(ScenarioArgs),
    /// Transform an operator JSON file to phase-space coefficients.
    Transform {
        /// Operator JSON file.
        #[arg(long)]
        op: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a coefficient file at one point per sphere.
    Eval {
        /// Coefficient JSON file.
        #[arg(long)]
        coeffs: PathBuf,
        /// Comma-separated angles theta1,phi1,...,thetaN,phiN.
        #[arg(long)]
        angles: String,
    },
    /// Star product (or prestar product) of two coefficient files.
    Star {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Emit the untruncated prestar product instead.
        #[arg(long)]
        prestar: bool,
    },
    /// Propagate a scenario and emit the trajectory.
    Evolve {
        /// Built-in scenario name or JSON file.
        #[arg(long)]
        scenario: String,
        /// Times as start:step:stop (overrides the scenario grid).
        #[arg(long)]
        times: Option<String>,
        /// Trajectory output file; stdout when omitted.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Attach per-time deviations from the matrix oracle.
        #[arg(long)]
        oracle: bool,
    },
    /// Sample one sphere of a coefficient file on an equiangular grid.
    Sample {
        #[arg(long)]
        coeffs: PathBuf,
        /// Sphere to sample (1-based).
        #[arg(long, default_value_t = 1)]
        spin: usize,
        #[arg(long, default_value_t = 48)]
        resolution: usize,
        /// Fixed angles for the remaining spheres: theta,phi,...
        #[arg(long)]
        fixed: Option<String>,
        #[arg(long, value_enum, default_value_t = SurfaceFormat::Csv)]
        format: SurfaceFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose a coefficient file into products of single-sphere
    /// functions; optionally sample every factor for plotting.
    Props {
        #[arg(long)]
        coeffs: PathBuf,
        /// Write per-term factor surfaces into this directory.
        #[arg(long)]
        sample: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = SurfaceFormat::Obj)]
        format: SurfaceFormat,
    },
    /// Run the phase-space postulate validation suite.
    Validate {
        #[arg(long, default_value_t = 2)]
        spins: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Coupling-coefficient table utilities.
    Coeffs {
        #[command(subcommand)]
        command: CoeffsCommand,
    },
    /// Operator file utilities.
    Op {
        #[command(subcommand)]
        command: OpCommand,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in scenario name or JSON file path.
    name_or_path: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed recorded for reproducibility (scenarios are deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum CoeffsCommand {
    /// Dump all nonzero Z/U/Q/Lambda coefficients up to a maximum rank as
    /// CSV (name, j1, j2, L, re, im). Q is evaluated at J = 1/2.
    Dump {
        #[arg(long, default_value_t = 2)]
        max_j: u32,
    },
}

#[derive(Subcommand)]
enum OpCommand {
    /// Pretty-print an operator JSON file.
    Show {
        #[arg(long)]
        file: PathBuf,
    },
    /// Expand an operator over the orthonormal product basis.
    Decompose {
        #[arg(long)]
        file: PathBuf,
    },
}

fn parse_times(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        anyhow::bail!("times must be start:step:stop, got '{spec}'");
    }
    let start: f64 = parts[0].parse()?;
    let step: f64 = parts[1].parse()?;
    let stop: f64 = parts[2].parse()?;
    scenario::TimeGrid { start, stop, step }.times()
}

fn parse_angle_list(spec: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    if !values.len().is_multiple_of(2) {
        anyhow::bail!("expected an even number of angles (theta,phi pairs)");
    }
    Ok(values.chunks(2).map(|c| (c[0], c[1])).collect())
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            export::write_text(path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => print_stdout(text)?,
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as success.
fn print_stdout(text: &str) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    match stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
    {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Scenario(args) => {
            let (s, base) = scenario::load(&args.name_or_path)?;
            let written = scenario::run_scenario(&s, &base, &args.out, None)?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Transform { op, out } => {
            let text = std::fs::read_to_string(&op)?;
            let operator = SpinOperator::from_json(&text)?;
            let w = wigner_transform(&operator);
            emit(out.as_ref(), &w.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { coeffs, angles } => {
            let w = WignerCoeffs::from_json(&std::fs::read_to_string(&coeffs)?)?;
            let points = parse_angle_list(&angles)?;
            if points.len() != w.n_spins() {
                anyhow::bail!(
                    "{} angle pairs for a {}-sphere function",
                    points.len(),
                    w.n_spins()
                );
            }
            let value = w.evaluate(&points);
            print_stdout(&format!("{} {}\n", value.re, value.im))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Star { a, b, prestar } => {
            let wa = WignerCoeffs::from_json(&std::fs::read_to_string(&a)?)?;
            let wb = WignerCoeffs::from_json(&std::fs::read_to_string(&b)?)?;
            let result = if prestar {
                prestar_multi(&wa, &wb)?
            } else {
                star_multi(&wa, &wb)?
            };
            print_stdout(&format!("{}\n", result.to_json()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Evolve {
            scenario: name,
            times,
            emit: emit_path,
            oracle,
        } => {
            let (s, base) = scenario::load(&name)?;
            let override_times = times.as_deref().map(parse_times).transpose()?;
            let time_list = match &override_times {
                Some(t) => t.clone(),
                None => s.times.times()?,
            };
            let h = s.hamiltonian.resolve(s.n_spins, &base)?;
            let rho0 = s.initial_state.resolve(s.n_spins, &base)?;
            let text = if oracle {
                let (traj, report) =
                    moyal_spin_core::evolve::compare_with_oracle(&h, &rho0, &time_list)?;
                export::trajectory_to_json(&traj, Some(&report.deviations))
            } else {
                let generator = moyal_spin_core::evolve::build_generator(&wigner_transform(&h))?;
                let traj = moyal_spin_core::evolve::propagate(
                    &generator,
                    &wigner_transform(&rho0),
                    &time_list,
                )?;
                export::trajectory_to_json(&traj, None)
            };
            emit(emit_path.as_ref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample {
            coeffs,
            spin,
            resolution,
            fixed,
            format,
            out,
        } => {
            let w = WignerCoeffs::from_json(&std::fs::read_to_string(&coeffs)?)?;
            let fixed_angles = match fixed {
                Some(spec) => parse_angle_list(&spec)?,
                None => Vec::new(),
            };
            let surface = sample_surface(&w, spin, resolution, &fixed_angles)?;
            emit(out.as_ref(), &export::render_surface(&surface, format))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Props {
            coeffs,
            sample,
            resolution,
            format,
        } => {
            let w = WignerCoeffs::from_json(&std::fs::read_to_string(&coeffs)?)?;
            let terms = moyal_spin::props::props_decompose(&w);
            let summary: Vec<serde_json::Value> = terms
                .iter()
                .map(|term| {
                    let factors: Vec<serde_json::Value> = term
                        .factors
                        .iter()
                        .map(|f| serde_json::from_str(&f.to_json()).expect("valid JSON"))
                        .collect();
                    serde_json::json!({
                        "scale": {"re": term.scale.re, "im": term.scale.im},
                        "factors": factors,
                    })
                })
                .collect();
            print_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&summary).expect("serialization cannot fail")
            ))?;
            if let Some(dir) = sample {
                let ext = match format {
                    SurfaceFormat::Csv => "csv",
                    SurfaceFormat::Json => "json",
                    SurfaceFormat::Obj => "obj",
                };
                for (term_id, term) in terms.iter().enumerate() {
                    for sphere in 1..=term.factors.len() {
                        let surface = moyal_spin::surface::sample_props_factor(
                            term, sphere, resolution, term_id,
                        )?;
                        let path = dir.join(format!("term{term_id}_spin{sphere}.{ext}"));
                        export::write_text(&path, &export::render_surface(&surface, format))?;
                        eprintln!("wrote {}", path.display());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate {
            spins,
            trials,
            seed,
        } => {
            let report = validate_stratonovich(spins, trials, seed);
            print_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("report serializes")
            ))?;
            if report.all_pass() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        Command::Coeffs {
            command: CoeffsCommand::Dump { max_j },
        } => {
            use std::fmt::Write as _;
            let mut csv = String::from("name,j1,j2,L,re,im\n");
            let int = |n: u32| HalfInt::from_int(n as i32);
            for j1 in 0..=max_j {
                for j2 in 0..=max_j {
                    for l in 0..=2 * max_j {
                        let z = coeff_z(int(j1), int(j2), int(l));
                        if z != 0.0 {
                            writeln!(csv, "Z,{j1},{j2},{l},{z},0").unwrap();
                        }
                        let u = coeff_u(int(j1), int(j2), int(l));
                        if u.norm() != 0.0 {
                            writeln!(csv, "U,{j1},{j2},{l},{},{}", u.re, u.im).unwrap();
                        }
                        let q = coeff_q(HalfInt::HALF, int(j1), int(j2), int(l));
                        if q != 0.0 {
                            writeln!(csv, "Q,{j1},{j2},{l},{q},0").unwrap();
                        }
                        let lam = coeff_lambda(int(j1), int(j2), int(l));
                        if lam.norm() != 0.0 {
                            writeln!(csv, "Lambda,{j1},{j2},{l},{},{}", lam.re, lam.im).unwrap();
                        }
                    }
                }
            }
            print_stdout(&csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Op { command } => match command {
            OpCommand::Show { file } => {
                use std::fmt::Write as _;
                let op = SpinOperator::from_json(&std::fs::read_to_string(&file)?)?;
                let mut text = format!(
                    "{} spins, J = {}, dimension {}\n",
                    op.n_spins(),
                    op.spin(),
                    op.dim()
                );
                let trace = op.trace();
                writeln!(text, "trace = {} + {}i", trace.re, trace.im).unwrap();
                writeln!(text, "frobenius norm = {}", op.frobenius_norm()).unwrap();
                writeln!(
                    text,
                    "hermiticity deviation = {:.3e}",
                    op.hermiticity_deviation()
                )
                .unwrap();
                for r in 0..op.dim() {
                    let row: Vec<String> = (0..op.dim())
                        .map(|c| {
                            let z = op.matrix()[(r, c)];
                            format!("{:+.4}{:+.4}i", z.re, z.im)
                        })
                        .collect();
                    writeln!(text, "  [{}]", row.join(", ")).unwrap();
                }
                print_stdout(&text)?;
                Ok(ExitCode::SUCCESS)
            }
            OpCommand::Decompose { file } => {
                use std::fmt::Write as _;
                let op = SpinOperator::from_json(&std::fs::read_to_string(&file)?)?;
                let mut text = String::from("index -> coefficient\n");
                for (idx, v) in decompose(&op) {
                    let labels: Vec<String> = idx
                        .iter()
                        .map(|jm| format!("({},{})", jm.j, jm.m))
                        .collect();
                    writeln!(text, "  {} -> {} + {}i", labels.join(" "), v.re, v.im).unwrap();
                }
                print_stdout(&text)?;
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
