//! Newline-delimited JSON session: one request per line, one response per
//! line. A failed request never changes the session state.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;

use loopkin_core::apps::{sample_workspace, WorkspaceSpec, DEFAULT_GRID_CAP};
use loopkin_core::fk::{forward_kinematics, Configuration, FkOptions};
use loopkin_core::ik::{solve_ik, IkOptions, IkProblem, Solver1d};
use loopkin_core::mrdf::{compile, Robot};
use loopkin_core::Topology;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::format::parse_mrdf;
use crate::models::lookup;
use crate::wire::{apply_lengths, pose_value, state_value, topology_value, PoseJson};

#[derive(Debug, Deserialize)]
struct Request {
    #[serde(default)]
    id: Value,
    method: String,
    #[serde(default)]
    params: Value,
}

struct Loaded {
    robot: Robot,
    topo: Topology,
    end_effector: Option<usize>,
    config: Configuration,
}

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
}

fn fail(code: &'static str, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn params<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, Failure> {
    let v = if v.is_null() { json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| fail("invalid_params", e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadParams {
    name: Option<String>,
    mrdf: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LengthsParams {
    lengths: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetParams {
    target: PoseJson,
    end_effector: Option<String>,
    solver: Option<String>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    starts: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkspaceParams {
    end_effector: Option<String>,
    counts: Vec<usize>,
    cap: Option<usize>,
}

/// Session state: the loaded robot, its configuration and a revision
/// counter bumped by every successful mutating request.
#[derive(Default)]
pub struct Session {
    loaded: Option<Loaded>,
    revision: u64,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// Handles one request line and returns the response line (no newline).
    pub fn handle_line(&mut self, line: &str) -> String {
        let response = match serde_json::from_str::<Request>(line) {
            Ok(req) => {
                let id = req.id.clone();
                match self.dispatch(&req) {
                    Ok(result) => json!({"id": id, "result": result}),
                    Err(f) => json!({"id": id, "error": {"code": f.code, "message": f.message}}),
                }
            }
            Err(e) => {
                let id = serde_json::from_str::<Value>(line).ok().and_then(|v| v.get("id").cloned()).unwrap_or(Value::Null);
                json!({"id": id, "error": {"code": "parse_error", "message": e.to_string()}})
            }
        };
        response.to_string()
    }

    fn loaded(&self) -> Result<&Loaded, Failure> {
        self.loaded.as_ref().ok_or_else(|| fail("no_model", "no model loaded"))
    }

    fn link(robot: &Robot, name: Option<&str>, default: Option<usize>) -> Result<usize, Failure> {
        match name {
            Some(n) => robot.link_id(n).ok_or_else(|| fail("unknown_link", format!("unknown link \"{n}\""))),
            None => default.ok_or_else(|| fail("invalid_params", "end_effector is required for this model")),
        }
    }

    fn dispatch(&mut self, req: &Request) -> Result<Value, Failure> {
        match req.method.as_str() {
            "load_model" => {
                let p: LoadParams = params(&req.params)?;
                let (desc, ee) = match (p.name, p.mrdf) {
                    (Some(name), None) => {
                        let m = lookup(&name).map_err(|e| fail("unknown_model", e.to_string()))?;
                        (m.description, Some(m.end_effector))
                    }
                    (None, Some(text)) => (parse_mrdf(&text).map_err(|e| fail("parse_error", e.to_string()))?, None),
                    _ => return Err(fail("invalid_params", "give exactly one of \"name\" or \"mrdf\"")),
                };
                let robot = compile(&desc).map_err(|e| fail("compile_error", e.to_string()))?;
                let topo = Topology::build(&robot).map_err(|e| fail("topology_error", e.to_string()))?;
                let end_effector = ee.and_then(|n| robot.link_id(&n));
                let config = Configuration::rest(&robot);
                let result = json!({
                    "robot": robot.name,
                    "end_effector": end_effector.map(|i| robot.links[i].name.clone()),
                    "actuators": robot.actuators.iter().map(|a| json!({"name": a.name, "bounds": [a.bounds.0, a.bounds.1]})).collect::<Vec<_>>(),
                });
                self.loaded = Some(Loaded { robot, topo, end_effector, config });
                self.revision += 1;
                let mut result = result;
                result["revision"] = json!(self.revision);
                Ok(result)
            }
            "get_topology" => {
                let l = self.loaded()?;
                Ok(topology_value(&l.robot, &l.topo))
            }
            "get_state" => {
                let l = self.loaded()?;
                Ok(state_value(&l.robot, &l.config, self.revision))
            }
            "set_lengths" => {
                let p: LengthsParams = params(&req.params)?;
                let l = self.loaded()?;
                let targets = apply_lengths(&l.robot, &l.config.lengths, &p.lengths).map_err(|m| fail("unknown_actuator", m))?;
                let mut config = l.config.clone();
                forward_kinematics(&l.robot, &l.topo, &targets, &mut config, &FkOptions::default())
                    .map_err(|e| fail("fk_error", e.to_string()))?;
                self.commit(config)
            }
            "set_target" => {
                let p: TargetParams = params(&req.params)?;
                let l = self.loaded()?;
                let ee = Self::link(&l.robot, p.end_effector.as_deref(), l.end_effector)?;
                let target = p.target.to_transform().map_err(|m| fail("invalid_params", m))?;
                let mut options = IkOptions::default();
                if let Some(s) = p.solver {
                    options.solver = Solver1d::from_name(&s).ok_or_else(|| fail("invalid_params", format!("unknown solver \"{s}\"")))?;
                }
                if let Some(t) = p.tol {
                    options.tol = t;
                }
                if let Some(m) = p.max_iter {
                    options.max_iter = m;
                }
                if let Some(s) = p.starts {
                    options.starts = s.max(1);
                }
                let problem = IkProblem { end_effector: ee, target, initial: l.config.clone(), options };
                let r = solve_ik(&l.robot, &l.topo, &problem);
                let mut out = json!({
                    "converged": r.converged,
                    "iterations": r.iterations,
                    "psi": r.psi,
                    "trace": r.trace,
                    "pose": pose_value(&r.configuration.world[ee]),
                });
                let state = self.commit(r.configuration)?;
                out["state"] = state;
                Ok(out)
            }
            "sample_workspace" => {
                let p: WorkspaceParams = params(&req.params)?;
                let l = self.loaded()?;
                let ee = Self::link(&l.robot, p.end_effector.as_deref(), l.end_effector)?;
                let spec = WorkspaceSpec { end_effector: ee, counts: p.counts, cap: p.cap.unwrap_or(DEFAULT_GRID_CAP) };
                let samples = sample_workspace(&l.robot, &l.topo, &l.config, &spec).map_err(|e| fail("workspace_error", e.to_string()))?;
                let rows: Vec<Value> = samples
                    .iter()
                    .map(|s| json!({"lengths": s.lengths, "pose": s.pose.as_ref().map(pose_value)}))
                    .collect();
                Ok(json!({"samples": rows}))
            }
            "reset" => {
                let l = self.loaded()?;
                let config = Configuration::rest(&l.robot);
                self.commit(config)
            }
            other => Err(fail("unknown_method", format!("unknown method \"{other}\""))),
        }
    }

    fn commit(&mut self, config: Configuration) -> Result<Value, Failure> {
        let l = self.loaded.as_mut().ok_or_else(|| fail("no_model", "no model loaded"))?;
        l.config = config;
        self.revision += 1;
        Ok(state_value(&l.robot, &l.config, self.revision))
    }

    /// Serves requests from `input` until EOF.
    pub fn run(&mut self, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            writeln!(output, "{}", self.handle_line(&line))?;
            output.flush()?;
        }
        Ok(())
    }
}

/// Accepts connections on `127.0.0.1:port`, one session per connection.
/// `ready` receives the bound port (useful with port 0).
pub fn serve_tcp(port: u16, ready: impl FnOnce(u16)) -> std::io::Result<()> {
    let listener = TcpListener::bind(("127.0.0.1", port))?;
    ready(listener.local_addr()?.port());
    for stream in listener.incoming() {
        let stream = stream?;
        std::thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = Session::new().run(reader, stream);
        });
    }
    Ok(())
}
