//! `bigiso`: structure checks, simulation and reduction from project files.
//!
//! Exit codes: 0 success, 1 a check or hypothesis failed, 2 the input could
//! not be parsed or is not schema-valid, 3 the integration blew up (partial
//! output is still written).

mod project;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bigiso::port_ham::{self, SimOptions, Trajectory};
use bigiso::reduction;
use bigiso::sampling::{Sampler, DEFAULT_SEED};
use bigiso::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use project::{ProjectFile, SchemaError};

#[derive(Parser)]
#[command(name = "bigiso", version, about = "Big-isotropic structures: integrability checks, port-Hamiltonian simulation and reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the integrability conditions and Courant closure of `[structure]`.
    CheckStructure(Common),
    /// Simulate `[port_system]` or `[mechanics]` and write a CSV trajectory.
    Simulate(Common),
    /// Verify the reduction hypotheses of `[reduction]` and write the reduced project.
    Reduce(Common),
}

#[derive(Args)]
struct Common {
    /// Project file (TOML).
    file: PathBuf,
    /// Seed for the pseudorandom sample points.
    #[arg(long)]
    seed: Option<u64>,
    /// RK4 step size.
    #[arg(long)]
    step: Option<f64>,
    /// Integration interval.
    #[arg(long, num_args = 2, value_names = ["T0", "T1"], allow_negative_numbers = true)]
    t_span: Option<Vec<f64>>,
    /// Primary output: CSV for `simulate`, reduced project for `reduce`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

const OK: u8 = 0;
const CHECK_FAILED: u8 = 1;
const BAD_INPUT: u8 = 2;
const BLOWUP: u8 = 3;

/// Run settings after merging flags over the file's `[run]` block.
struct Settings {
    seed: u64,
    opts: SimOptions,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
}

impl Settings {
    fn new(c: &Common, project: &ProjectFile) -> Self {
        let run = project.run.clone().unwrap_or_default();
        let base = c.file.parent().map(Path::to_path_buf).unwrap_or_default();
        let rel = |s: &Option<String>| s.as_ref().map(|p| base.join(p));
        let span = c
            .t_span
            .as_ref()
            .map(|v| [v[0], v[1]])
            .or(run.t_span)
            .unwrap_or([0.0, 10.0]);
        Self {
            seed: c.seed.or(run.seed).unwrap_or(DEFAULT_SEED),
            opts: SimOptions {
                t0: span[0],
                t1: span[1],
                step: c.step.or(run.step).unwrap_or(1e-3),
                project: run.project.unwrap_or(false),
            },
            out: c.out.clone().or_else(|| rel(&run.out)),
            report: c.report.clone().or_else(|| rel(&run.report)),
        }
    }

    fn sampler(&self) -> Sampler {
        Sampler::with_seed(self.seed)
    }
}

enum Failure {
    Input(String),
    Io(String),
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure::Input(e.0)
    }
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit_report(report: &Value, path: Option<&Path>) -> Result<(), Failure> {
    let mut body = serde_json::to_string_pretty(report).expect("serializable");
    body.push('\n');
    match path {
        Some(p) => write(p, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn load(path: &Path) -> Result<ProjectFile, Failure> {
    let src = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    project::parse_project(&src).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn check_structure(c: &Common) -> Result<u8, Failure> {
    let project = load(&c.file)?;
    let set = Settings::new(c, &project);
    let block = project
        .structure
        .as_ref()
        .ok_or_else(|| Failure::Input("missing [structure] block".into()))?;
    let report = match block.build(set.sampler())? {
        Err(e) => json!({ "command": "check-structure", "seed": set.seed, "pass": false, "error": e.to_string() }),
        Ok(s) => {
            let integ = s.check_integrability();
            let courant = s.courant_closure_test();
            let agree = integ.overall == courant.pass
                && integ.predicted_courant_failures() == courant.e_failure_pairs();
            json!({
                "command": "check-structure",
                "seed": set.seed,
                "pass": integ.overall && courant.pass,
                "regularity_certified": s.regularity_certified(),
                "integrability": to_value(&integ),
                "courant_closure": to_value(&courant),
                "conditions_agree_with_courant": agree,
            })
        }
    };
    emit_report(&report, set.report.as_deref())?;
    Ok(if report["pass"] == json!(true) { OK } else { CHECK_FAILED })
}

fn audit(t: &Trajectory, err: Option<&Error>, seed: u64, opts: &SimOptions) -> Value {
    json!({
        "command": "simulate",
        "seed": seed,
        "t_span": [opts.t0, opts.t1],
        "step": opts.step,
        "rows": t.len(),
        "t_end": t.times.last(),
        "max_energy_drift": t.max_energy_drift(),
        "max_constraint_residual": t.max_constraint_residual(),
        "power_balance_residual": t.power_balance_residual(),
        "error": err.map(|e| e.to_string()),
    })
}

fn simulate(c: &Common) -> Result<u8, Failure> {
    let project = load(&c.file)?;
    let set = Settings::new(c, &project);
    let (sys, flow, x0) = if let Some(b) = &project.port_system {
        let (sys, flow) = b.build()?;
        (sys, flow, b.initial.clone())
    } else if let Some(b) = &project.mechanics {
        match b.build(set.sampler())? {
            Ok(m) => (
                m.port_system().map_err(|e| Failure::Input(e.to_string()))?,
                port_ham::Flow::Zero,
                b.initial.clone(),
            ),
            Err(e) => {
                emit_report(&json!({ "command": "simulate", "seed": set.seed, "error": e.to_string() }), set.report.as_deref())?;
                return Ok(CHECK_FAILED);
            }
        }
    } else {
        return Err(Failure::Input("missing [port_system] or [mechanics] block".into()));
    };
    let (traj, err) = port_ham::simulate_partial(&sys, &flow, &x0, &set.opts);
    let csv = traj.csv();
    let report = audit(&traj, err.as_ref(), set.seed, &set.opts);
    match &set.out {
        Some(p) => {
            write(p, &csv)?;
            emit_report(&report, set.report.as_deref())?;
        }
        None => {
            print!("{csv}");
            match &set.report {
                Some(p) => emit_report(&report, Some(p))?,
                None => eprintln!("{}", serde_json::to_string_pretty(&report).expect("serializable")),
            }
        }
    }
    Ok(match err {
        None => OK,
        Some(Error::IntegrationBlowup { .. }) => BLOWUP,
        Some(_) => CHECK_FAILED,
    })
}

fn reduce(c: &Common) -> Result<u8, Failure> {
    let project = load(&c.file)?;
    let set = Settings::new(c, &project);
    let sblock = project
        .structure
        .as_ref()
        .ok_or_else(|| Failure::Input("missing [structure] block".into()))?;
    let rblock = project
        .reduction
        .as_ref()
        .ok_or_else(|| Failure::Input("missing [reduction] block".into()))?;
    let fail = |msg: String| -> Result<u8, Failure> {
        emit_report(&json!({ "command": "reduce", "seed": set.seed, "pass": false, "error": msg }), set.report.as_deref())?;
        Ok(CHECK_FAILED)
    };
    let s = match sblock.build(set.sampler())? {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    let input = match rblock.build(&sblock.variables)? {
        Ok(i) => i,
        Err(e @ Error::InvalidChart(_)) => return Err(Failure::Input(e.to_string())),
        Err(e) => return fail(e.to_string()),
    };
    let red = match reduction::check_reduction(&s, &input.action, &input.momentum, &input.hamiltonian, &input.chart) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let pass = red.passed();
    let mut report = json!({
        "command": "reduce",
        "seed": set.seed,
        "pass": pass,
        "first_failure": red.first_failure().map(|h| h.name.clone()),
        "hypotheses": to_value(&red.hypotheses),
    });
    if pass {
        let qnames = &rblock.chart.quotient_variables;
        let h_red = red.h_red.as_ref().expect("descends");
        report["reduced_hamiltonian"] = json!(h_red.display_with(qnames));
        report["reduced_structure_integrable"] = json!(red.e_red_integrable);
        if let (Some(y0), Some(_)) = (&rblock.initial, input.chart.retraction()) {
            match red.compare_trajectories(y0, set.opts.t1 - set.opts.t0, set.opts.step) {
                Ok(d) => report["max_trajectory_deviation"] = json!(d),
                Err(e) => report["trajectory_comparison_error"] = json!(e.to_string()),
            }
        }
        let reduced = reduced_project(&red, qnames, h_red, rblock.initial.clone(), &set);
        match &reduced {
            Some(p) => {
                let body = toml::to_string(p).expect("serializable");
                if let Some(path) = &set.out {
                    write(path, &body)?;
                }
                report["reduced_project"] = json!(body);
            }
            None => report["reduced_project"] = json!(null),
        }
    }
    emit_report(&report, set.report.as_deref())?;
    Ok(if pass { OK } else { CHECK_FAILED })
}

/// The reduced system as a project file. The structure block is present when
/// the reduced structure is constant; a port system is added when it is the
/// graph of a bivector on the whole cotangent space.
fn reduced_project(
    red: &reduction::Reduction,
    names: &[String],
    h_red: &bigiso::Poly,
    initial: Option<Vec<f64>>,
    set: &Settings,
) -> Option<ProjectFile> {
    let e = red.e_red.as_ref()?;
    let s = bigiso::structure::BigIsoStructure::from_constant_subspace(e).ok()?;
    let q = names.len();
    let port_system = (s.sprime().is_empty() && s.rank_sigma() == q).then(|| {
        let pi = s.pi();
        project::PortSystemBlock {
            variables: names.to_vec(),
            j: (0..q).map(|a| (0..q).map(|c| pi.get(c, a).display_with(names)).collect()).collect(),
            g: Vec::new(),
            hamiltonian: h_red.display_with(names),
            constraints: Vec::new(),
            flow: None,
            initial: initial.unwrap_or_else(|| vec![0.0; q]),
        }
    });
    Some(ProjectFile {
        schema_version: project::SCHEMA_VERSION,
        run: Some(project::RunBlock {
            command: Some("simulate".into()),
            t_span: Some([set.opts.t0, set.opts.t1]),
            step: Some(set.opts.step),
            ..Default::default()
        }),
        structure: Some(project::StructureBlock::from_structure(&s, names)),
        port_system,
        mechanics: None,
        reduction: None,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::CheckStructure(c) => check_structure(c),
        Command::Simulate(c) => simulate(c),
        Command::Reduce(c) => reduce(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(BAD_INPUT)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(BAD_INPUT)
        }
    }
}
