//! MRDF JSON text: parsing with positioned errors, deterministic
//! serialization, and file-level validation.

use loopkin_core::mrdf::{compile, validate, CompileError, DescriptionError, Finding, RobotDescription};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error(transparent)]
    Description(#[from] DescriptionError),
}

/// Parses MRDF text and runs the parse-level checks.
pub fn parse_mrdf(text: &str) -> Result<RobotDescription, ParseError> {
    let desc = parse_unchecked(text)?;
    desc.check()?;
    Ok(desc)
}

/// Parses MRDF text without the semantic checks.
pub fn parse_unchecked(text: &str) -> Result<RobotDescription, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Json {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// Pretty JSON with fixed key order and shortest round-trip floats.
pub fn serialize_mrdf(desc: &RobotDescription) -> String {
    let mut s = serde_json::to_string_pretty(desc).expect("descriptions always serialize");
    s.push('\n');
    s
}

/// Compiles and validates a description. Inverted bounds are reported as a
/// finding rather than a compile error so that the whole report is shown.
pub fn validate_description(desc: &RobotDescription) -> Result<Vec<Finding>, CompileError> {
    let mut relaxed = desc.clone();
    let mut inverted = Vec::new();
    for (i, a) in relaxed.actuators.iter_mut().enumerate() {
        let [lo, hi] = a.bounds;
        if lo.is_finite() && hi.is_finite() && lo >= hi {
            inverted.push((i, lo, hi));
            a.bounds = [hi.min(lo), hi.min(lo) + 1.0];
        }
    }
    let mut robot = compile(&relaxed)?;
    for (i, lo, hi) in inverted {
        robot.actuators[i].bounds = (lo, hi);
    }
    Ok(validate(&robot))
}
