//! `loopkin` command-line interface. Exit codes: 0 success, 1 domain
//! error, 2 usage or I/O error.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loopkin_core::apps::{
    generate_trajectory, sample_workspace, Interpolation, TrajectorySpec, WorkspaceSpec, DEFAULT_GRID_CAP,
};
use loopkin_core::fk::{closure_residuals, forward_kinematics, max_length_residual, Configuration, FkOptions};
use loopkin_core::ik::{relevant_actuators, solve_ik, IkOptions, IkProblem, Solver1d};
use loopkin_core::mrdf::{compile, Robot, RobotDescription};
use loopkin_core::{Topology, Transform};
use serde_json::{json, Value};

use crate::format::{parse_mrdf, parse_unchecked, validate_description, ParseError};
use crate::models::lookup;
use crate::output::{write_trajectory, write_workspace, Format};
use crate::session::{serve_tcp, Session};
use crate::stats::{fk_timing, ik_trials};
use crate::wire::{apply_lengths, lengths_value, pose_value, topology_value, PoseJson};

#[derive(Debug, Parser)]
#[command(name = "loopkin", version, about = "Kinematics for closed-chain linear-actuator robots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TopoFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    Linear,
    CatmullRom,
}

fn parse_solver(s: &str) -> Result<Solver1d, String> {
    Solver1d::from_name(s).ok_or_else(|| format!("unknown solver \"{s}\" (expected gss, brent, newton or secant)"))
}

#[derive(Debug, Clone, Args)]
pub struct IkArgs {
    /// 1-D line-search solver.
    #[arg(long, value_parser = parse_solver, default_value = "gss")]
    pub solver: Solver1d,
    /// Outer convergence threshold on the change of Ψ.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Number of starts (the first is the current configuration).
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
}

impl IkArgs {
    fn options(&self) -> IkOptions {
        IkOptions { solver: self.solver, tol: self.tol, max_iter: self.max_iter, starts: self.starts.max(1), ..IkOptions::default() }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model; prints one `SEVERITY code message` line per finding.
    Validate {
        /// MRDF file or built-in model name.
        model: String,
    },
    /// Four-bars, contracted graph and ITEP types.
    Topo {
        model: String,
        #[arg(long, value_enum, default_value = "json")]
        format: TopoFormat,
    },
    /// Forward kinematics for one length set, or randomized timing trials.
    Fk {
        model: String,
        /// Lengths as `A0=1.2,A1=1.3`, a JSON object, or a JSON file.
        #[arg(long)]
        lengths: Option<String>,
        /// Run randomized activity-pattern timing instead of one solve.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timed runs per pattern (the fastest is kept).
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Inverse kinematics toward a target pose, or randomized trials.
    Ik {
        model: String,
        /// Pose JSON `{"translation": [..], "quaternion": [w, x, y, z]}`
        /// inline or as a file; defaults to the current end-effector pose.
        #[arg(long)]
        target: Option<String>,
        /// End-effector link name; defaults to the model's designated link.
        #[arg(long)]
        ee: Option<String>,
        /// Start configuration lengths (same forms as `fk --lengths`).
        #[arg(long)]
        lengths: Option<String>,
        #[command(flatten)]
        ik: IkArgs,
        /// Solve FK-generated random targets and report statistics.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// FK over a grid of relevant actuator lengths.
    Workspace {
        model: String,
        #[arg(long)]
        ee: Option<String>,
        /// Samples per relevant redundancy class.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        /// Per-class sample counts, comma separated; overrides `--samples`.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
        cap: usize,
        #[arg(long)]
        lengths: Option<String>,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        /// Output file, `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Sequential IK along an interpolated path through via poses.
    Trajectory {
        model: String,
        #[arg(long)]
        ee: Option<String>,
        /// JSON array of poses, inline or as a file.
        #[arg(long, conflicts_with = "via_lengths")]
        via: Option<String>,
        /// JSON array of partial length maps; each via pose is the
        /// end-effector pose reached by FK at those lengths.
        #[arg(long)]
        via_lengths: Option<String>,
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, value_enum, default_value = "linear")]
        interp: InterpArg,
        #[arg(long)]
        lengths: Option<String>,
        #[command(flatten)]
        ik: IkArgs,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: Format,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Session service speaking newline-delimited JSON.
    Serve {
        /// Listen on 127.0.0.1:PORT.
        #[arg(long, conflicts_with = "stdio", required_unless_present = "stdio")]
        port: Option<u16>,
        /// Serve a single session over stdin/stdout.
        #[arg(long)]
        stdio: bool,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    /// Domain failure; an empty message means the details were already
    /// printed on stdout.
    #[error("{0}")]
    Domain(String),
    /// The reader of stdout went away; exit quietly.
    #[error("")]
    Closed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Closed => 0,
            CliError::Domain(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    match e.kind() {
        std::io::ErrorKind::BrokenPipe => CliError::Closed,
        _ => CliError::Io(e.to_string()),
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// A model argument: a file path if one exists, else a built-in name.
fn read_model(arg: &str, checked: bool) -> Result<(RobotDescription, Option<String>), CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{arg}: {e}")))?;
        let parsed = if checked { parse_mrdf(&text) } else { parse_unchecked(&text) };
        return match parsed {
            Ok(d) => Ok((d, None)),
            Err(e @ ParseError::Json { .. }) => Err(CliError::Io(format!("{arg}: {e}"))),
            Err(e) => Err(CliError::Domain(format!("{arg}: {e}"))),
        };
    }
    match lookup(arg) {
        Ok(m) => Ok((m.description, Some(m.end_effector))),
        Err(_) => Err(CliError::Io(format!("{arg}: no such file or built-in model"))),
    }
}

struct Model {
    robot: Robot,
    topo: Topology,
    end_effector: Option<String>,
}

fn load(arg: &str) -> Result<Model, CliError> {
    let (desc, end_effector) = read_model(arg, true)?;
    let robot = compile(&desc).map_err(domain)?;
    let topo = Topology::build(&robot).map_err(domain)?;
    Ok(Model { robot, topo, end_effector })
}

impl Model {
    fn end_effector(&self, ee: Option<&str>) -> Result<usize, CliError> {
        match ee.or(self.end_effector.as_deref()) {
            Some(name) => self.robot.link_id(name).ok_or_else(|| CliError::Domain(format!("unknown end-effector link \"{name}\""))),
            None => Err(CliError::Usage("--ee is required for models without a designated end-effector".into())),
        }
    }

    /// Rest configuration, moved by FK to `lengths` if given.
    fn start(&self, lengths: Option<&str>) -> Result<Configuration, CliError> {
        let mut config = Configuration::rest(&self.robot);
        if let Some(spec) = lengths {
            let targets = apply_lengths(&self.robot, &config.lengths, &read_length_map(spec)?).map_err(CliError::Domain)?;
            forward_kinematics(&self.robot, &self.topo, &targets, &mut config, &FkOptions::default()).map_err(domain)?;
        }
        Ok(config)
    }
}

/// Inline JSON, or the contents of the named file.
fn read_json(arg: &str) -> Result<Value, CliError> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid JSON: {e}")))
}

fn read_length_map(arg: &str) -> Result<BTreeMap<String, f64>, CliError> {
    if !arg.trim_start().starts_with('{') && arg.contains('=') {
        let mut out = BTreeMap::new();
        for item in arg.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| CliError::Usage(format!("expected NAME=LENGTH, got \"{item}\"")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Usage(format!("invalid length \"{v}\"")))?;
            out.insert(k.trim().to_string(), v);
        }
        return Ok(out);
    }
    serde_json::from_value(read_json(arg)?).map_err(|e| CliError::Usage(format!("lengths: {e}")))
}

fn read_pose(v: Value) -> Result<Transform, CliError> {
    let p: PoseJson = serde_json::from_value(v).map_err(|e| CliError::Usage(format!("pose: {e}")))?;
    p.to_transform().map_err(CliError::Usage)
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("values serialize")).map_err(io)
}

fn open_out<'a>(path: &str, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    if path == "-" {
        Ok(Box::new(stdout))
    } else {
        let f = File::create(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn links_value(robot: &Robot, config: &Configuration) -> Vec<Value> {
    (0..robot.body_link_count())
        .map(|i| json!({"id": i, "name": robot.links[i].name, "pose": pose_value(&config.world[i])}))
        .collect()
}

/// Runs one command, writing results to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { model } => {
            let (desc, _) = read_model(&model, false)?;
            let findings = validate_description(&desc).map_err(domain)?;
            for f in &findings {
                writeln!(out, "{f}").map_err(io)?;
            }
            if findings.is_empty() { Ok(()) } else { Err(CliError::Domain(String::new())) }
        }
        Command::Topo { model, format } => {
            let m = load(&model)?;
            match format {
                TopoFormat::Json => print_json(out, &topology_value(&m.robot, &m.topo)),
                TopoFormat::Dot => write!(out, "{}", m.topo.to_dot(&m.robot)).map_err(io),
            }
        }
        Command::Fk { model, lengths, trials, seed, repeats } => {
            let m = load(&model)?;
            if let Some(n) = trials {
                let start = m.start(lengths.as_deref())?;
                let t = fk_timing(&m.robot, &m.topo, &start, n, repeats, seed);
                let [a, b, c, d] = t.mean_active;
                return print_json(
                    out,
                    &json!({
                        "robot": m.robot.name,
                        "trials": t.trials,
                        "seed": t.seed,
                        "failures": t.failures,
                        "mean_seconds": t.mean_seconds,
                        "mean_active": {"A": a, "B": b, "C": c, "D": d},
                        "fit": t.fit,
                    }),
                );
            }
            let mut config = Configuration::rest(&m.robot);
            let targets = match &lengths {
                Some(spec) => apply_lengths(&m.robot, &config.lengths, &read_length_map(spec)?).map_err(CliError::Domain)?,
                None => config.lengths.clone(),
            };
            forward_kinematics(&m.robot, &m.topo, &targets, &mut config, &FkOptions::default()).map_err(domain)?;
            let closure = closure_residuals(&m.robot, &config).into_iter().fold(0.0, f64::max);
            print_json(
                out,
                &json!({
                    "robot": m.robot.name,
                    "lengths": lengths_value(&m.robot, &config.lengths),
                    "links": links_value(&m.robot, &config),
                    "max_length_residual": max_length_residual(&config, &targets),
                    "max_closure_residual": closure,
                }),
            )
        }
        Command::Ik { model, target, ee, lengths, ik, trials, seed } => {
            let m = load(&model)?;
            let ee = m.end_effector(ee.as_deref())?;
            let start = m.start(lengths.as_deref())?;
            let options = ik.options();
            if let Some(n) = trials {
                let s = ik_trials(&m.robot, &m.topo, &start, ee, options, n, seed);
                let mut v = serde_json::to_value(&s).expect("stats serialize");
                v["robot"] = json!(m.robot.name);
                v["end_effector"] = json!(m.robot.links[ee].name);
                return print_json(out, &v);
            }
            let target = match target {
                Some(t) => read_pose(read_json(&t)?)?,
                None => start.world[ee],
            };
            let r = solve_ik(&m.robot, &m.topo, &IkProblem { end_effector: ee, target, initial: start, options });
            print_json(
                out,
                &json!({
                    "robot": m.robot.name,
                    "end_effector": m.robot.links[ee].name,
                    "solver": options.solver.name(),
                    "converged": r.converged,
                    "iterations": r.iterations,
                    "evaluations": r.evaluations,
                    "psi": r.psi,
                    "lengths": lengths_value(&m.robot, &r.lengths),
                    "pose": pose_value(&r.configuration.world[ee]),
                    "trace": r.trace,
                }),
            )
        }
        Command::Workspace { model, ee, samples, counts, cap, lengths, format, out: path } => {
            let m = load(&model)?;
            let ee = m.end_effector(ee.as_deref())?;
            let start = m.start(lengths.as_deref())?;
            let relevant = relevant_actuators(&m.robot, &m.topo, ee);
            let axes = relevant.iter().filter(|&&r| r).count();
            let counts = counts.unwrap_or_else(|| vec![samples; axes]);
            let spec = WorkspaceSpec { end_effector: ee, counts, cap };
            let rows = sample_workspace(&m.robot, &m.topo, &start, &spec).map_err(domain)?;
            let w = open_out(&path, out)?;
            write_workspace(&m.robot, &rows, format, w).map_err(io)
        }
        Command::Trajectory { model, ee, via, via_lengths, samples, interp, lengths, ik, format, out: path } => {
            let m = load(&model)?;
            let ee = m.end_effector(ee.as_deref())?;
            let start = m.start(lengths.as_deref())?;
            let via = match (via, via_lengths) {
                (Some(v), None) => match read_json(&v)? {
                    Value::Array(items) => items.into_iter().map(read_pose).collect::<Result<Vec<_>, _>>()?,
                    _ => return Err(CliError::Usage("--via expects a JSON array of poses".into())),
                },
                (None, Some(v)) => {
                    let maps: Vec<BTreeMap<String, f64>> =
                        serde_json::from_value(read_json(&v)?).map_err(|e| CliError::Usage(format!("--via-lengths: {e}")))?;
                    let mut poses = Vec::with_capacity(maps.len());
                    for map in &maps {
                        let targets = apply_lengths(&m.robot, &start.lengths, map).map_err(CliError::Domain)?;
                        let mut cfg = start.clone();
                        forward_kinematics(&m.robot, &m.topo, &targets, &mut cfg, &FkOptions::default()).map_err(domain)?;
                        poses.push(cfg.world[ee]);
                    }
                    poses
                }
                _ => return Err(CliError::Usage("give one of --via or --via-lengths".into())),
            };
            let interpolation = match interp {
                InterpArg::Linear => Interpolation::Linear,
                InterpArg::CatmullRom => Interpolation::CatmullRom,
            };
            let spec = TrajectorySpec { end_effector: ee, via, samples, interpolation, ik: ik.options() };
            let points = generate_trajectory(&m.robot, &m.topo, &start, &spec).map_err(domain)?;
            let w = open_out(&path, out)?;
            write_trajectory(&m.robot, &points, format, w).map_err(io)
        }
        Command::Serve { port, stdio } => {
            if stdio {
                let stdin = std::io::stdin();
                Session::new().run(stdin.lock(), out).map_err(io)
            } else {
                let port = port.expect("clap enforces --port without --stdio");
                serve_tcp(port, |p| eprintln!("listening on 127.0.0.1:{p}")).map_err(io)
            }
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
/// Diagnostics go to `err`.
pub fn main_with(args: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                let _ = writeln!(err, "error: {msg}");
            }
            e.exit_code()
        }
    }
}
