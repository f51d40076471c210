mod common;

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::sync::mpsc;

use loopkin::session::{serve_tcp, Session};
use loopkin::wire::PoseJson;
use loopkin_core::geometry::pose_distance;
use serde_json::{json, Value};

fn call(s: &mut Session, req: Value) -> Value {
    serde_json::from_str(&s.handle_line(&req.to_string())).unwrap()
}

fn pose(v: &Value) -> loopkin_core::Transform {
    serde_json::from_value::<PoseJson>(v.clone()).unwrap().to_transform().unwrap()
}

fn link_pose(state: &Value, name: &str) -> loopkin_core::Transform {
    let link = state["links"].as_array().unwrap().iter().find(|l| l["name"] == name).unwrap();
    pose(&link["pose"])
}

#[test]
fn load_then_set_lengths_matches_fk() {
    let mut s = Session::new();
    let r = call(&mut s, json!({"id": 1, "method": "load_model", "params": {"name": "TCCHS"}}));
    assert_eq!(r["id"], 1);
    assert_eq!(r["result"]["revision"], 1);
    assert_eq!(r["result"]["end_effector"], "L4_canopy");
    assert_eq!(r["result"]["actuators"].as_array().unwrap().len(), 11);

    let m = common::load("TCCHS");
    let mut lengths = m.rest.lengths.clone();
    lengths[0] += 0.03;
    lengths[1] += 0.03;
    let expected = m.fk(&lengths).unwrap();
    let r = call(&mut s, json!({"id": 2, "method": "set_lengths", "params": {"lengths": {"A0": lengths[0]}}}));
    let state = &r["result"];
    assert_eq!(state["revision"], 2);
    assert!((state["lengths"]["A1"].as_f64().unwrap() - lengths[1]).abs() < 1e-9, "peer follows");
    assert!(pose_distance(&link_pose(state, "L4_canopy"), &expected.world[m.ee]) < 1e-9);

    let again = call(&mut s, json!({"id": 3, "method": "get_state"}));
    assert_eq!(again["result"], *state);
}

#[test]
fn failures_leave_state_untouched() {
    let mut s = Session::new();
    let r = call(&mut s, json!({"id": "a", "method": "get_state"}));
    assert_eq!(r["error"]["code"], "no_model");
    call(&mut s, json!({"id": 1, "method": "load_model", "params": {"name": "RH"}}));
    let before = call(&mut s, json!({"id": 2, "method": "get_state"}));
    for (req, code) in [
        (json!({"id": 3, "method": "set_lengths", "params": {"lengths": {"A0": 99.0}}}), "fk_error"),
        (json!({"id": 4, "method": "set_lengths", "params": {"lengths": {"Z9": 1.0}}}), "unknown_actuator"),
        (json!({"id": 5, "method": "set_target", "params": {"target": {"translation": [0, 0, 0], "quaternion": [0, 0, 0, 0]}}}), "invalid_params"),
        (json!({"id": 6, "method": "set_target", "params": {"target": {"translation": [0, 0, 0], "quaternion": [1, 0, 0, 0]}, "solver": "bfgs"}}), "invalid_params"),
        (json!({"id": 7, "method": "load_model", "params": {"name": "nope"}}), "unknown_model"),
        (json!({"id": 8, "method": "fly"}), "unknown_method"),
    ] {
        let r = call(&mut s, req.clone());
        assert_eq!(r["error"]["code"], code, "{req}");
        assert_eq!(r["id"], req["id"]);
    }
    assert_eq!(call(&mut s, json!({"id": 9, "method": "get_state"})), json!({"id": 9, "result": before["result"]}));
    assert_eq!(s.revision(), 1);
}

#[test]
fn malformed_json_is_reported() {
    let mut s = Session::new();
    let r: Value = serde_json::from_str(&s.handle_line("{not json")).unwrap();
    assert_eq!(r["id"], Value::Null);
    assert_eq!(r["error"]["code"], "parse_error");
    let r: Value = serde_json::from_str(&s.handle_line(r#"{"id": 7, "params": {}}"#)).unwrap();
    assert_eq!(r["id"], 7);
    assert_eq!(r["error"]["code"], "parse_error");
}

#[test]
fn set_target_solves_and_commits() {
    let mut s = Session::new();
    call(&mut s, json!({"id": 1, "method": "load_model", "params": {"name": "DJ"}}));
    let m = common::load("DJ");
    let mut lengths = m.rest.lengths.clone();
    for g in &m.robot.groups {
        let (lo, hi) = m.robot.actuators[g[0]].bounds;
        for &a in g {
            lengths[a] = lo + 0.3 * (hi - lo);
        }
    }
    let target = m.fk(&lengths).unwrap().world[m.ee];
    let r = call(&mut s, json!({"id": 2, "method": "set_target", "params": {"target": PoseJson::from(&target)}}));
    let res = &r["result"];
    assert_eq!(res["converged"], true);
    assert!(res["psi"].as_f64().unwrap() < 1e-3);
    assert!(pose_distance(&pose(&res["pose"]), &target) < 1e-3);
    assert_eq!(res["state"]["revision"], 2);

    let axes = loopkin_core::ik::relevant_actuators(&m.robot, &m.topo, m.ee).iter().filter(|r| **r).count();
    let ws = call(&mut s, json!({"id": 3, "method": "sample_workspace", "params": {"counts": vec![2; axes]}}));
    assert_eq!(ws["result"]["samples"].as_array().unwrap().len(), 1 << axes);
    let bad = call(&mut s, json!({"id": 3, "method": "sample_workspace", "params": {"counts": vec![2; 9]}}));
    assert_eq!(bad["error"]["code"], "workspace_error");
    let topo = call(&mut s, json!({"id": 4, "method": "get_topology"}));
    assert_eq!(topo["result"]["histogram"], json!({"A": 1, "B": 1, "C": 1, "D": 0}));
    let reset = call(&mut s, json!({"id": 5, "method": "reset"}));
    assert_eq!(reset["result"]["revision"], 3);
}

#[test]
fn load_inline_mrdf() {
    let text = loopkin::format::serialize_mrdf(&loopkin::models::lookup("VD").unwrap().description);
    let mut s = Session::new();
    let r = call(&mut s, json!({"id": 1, "method": "load_model", "params": {"mrdf": text}}));
    assert_eq!(r["result"]["robot"], "VD");
    assert_eq!(r["result"]["end_effector"], Value::Null);
    let t = json!({"translation": [0, 0, 0], "quaternion": [1, 0, 0, 0]});
    let r = call(&mut s, json!({"id": 2, "method": "set_target", "params": {"target": t}}));
    assert_eq!(r["error"]["code"], "invalid_params");
}

#[test]
fn tcp_sessions_are_independent() {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || serve_tcp(0, |port| tx.send(port).unwrap()));
    let port = rx.recv().unwrap();
    let mut clients: Vec<_> = (0..2).map(|_| TcpStream::connect(("127.0.0.1", port)).unwrap()).collect();
    let ask = |c: &mut TcpStream, req: Value| -> Value {
        writeln!(c, "{req}").unwrap();
        let mut line = String::new();
        BufReader::new(c.try_clone().unwrap()).read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap()
    };
    let r = ask(&mut clients[0], json!({"id": 1, "method": "load_model", "params": {"name": "SH"}}));
    assert_eq!(r["result"]["revision"], 1);
    let r = ask(&mut clients[1], json!({"id": 1, "method": "get_state"}));
    assert_eq!(r["error"]["code"], "no_model");
}
