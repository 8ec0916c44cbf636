//! Plain-text instance files.
//!
//! ```text
//! # comment
//! name MM1_0
//! vehicles 2
//! targets 3
//! vehicle 0 0 0 1.25 required 2
//! vehicle 1 10 0 1 required
//! target 0 1.5 2.5
//! target 1 3 4
//! target 2 5 6
//! ```
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so `parse(write(inst))` reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use mmtsp_core::model::{Instance, ModelError, Point, VehicleSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("target {target} appears in the required lists of vehicles {first} and {second}")]
    OverlappingRequired {
        target: usize,
        first: usize,
        second: usize,
    },
    #[error("instance is invalid: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Serializes an instance to the text format.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "name {}", inst.name()).unwrap();
    writeln!(out, "vehicles {}", inst.num_vehicles()).unwrap();
    writeln!(out, "targets {}", inst.num_targets()).unwrap();
    for (j, v) in inst.vehicles().iter().enumerate() {
        write!(out, "vehicle {} {} {} {} required", j, v.depot.x, v.depot.y, v.speed).unwrap();
        for t in &v.required {
            write!(out, " {t}").unwrap();
        }
        out.push('\n');
    }
    for (t, p) in inst.targets().iter().enumerate() {
        writeln!(out, "target {} {} {}", t, p.x, p.y).unwrap();
    }
    out
}

pub fn write_instance_file(inst: &Instance, path: &Path) -> Result<(), FormatError> {
    std::fs::write(path, write_instance(inst))?;
    Ok(())
}

/// Parses the text format, enforcing every model invariant. Syntax errors
/// carry the 1-based line number; an overlapping required target names both
/// vehicles involved.
pub fn parse_instance(document: &str) -> Result<Instance, FormatError> {
    let mut name: Option<String> = None;
    let mut num_vehicles: Option<usize> = None;
    let mut num_targets: Option<usize> = None;
    let mut vehicles: Vec<Option<VehicleSpec>> = Vec::new();
    let mut targets: Vec<Option<Point>> = Vec::new();

    for (idx, raw) in document.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let keyword = words.next().unwrap();
        match keyword {
            "name" => {
                let rest = line["name".len()..].trim();
                if rest.is_empty() {
                    return Err(syntax(lineno, "name requires a value"));
                }
                name = Some(rest.to_string());
            }
            "vehicles" => {
                num_vehicles = Some(parse_count(lineno, words.next(), "vehicles")?);
                vehicles = vec![None; num_vehicles.unwrap()];
            }
            "targets" => {
                num_targets = Some(parse_count(lineno, words.next(), "targets")?);
                targets = vec![None; num_targets.unwrap()];
            }
            "vehicle" => {
                let k = num_vehicles
                    .ok_or_else(|| syntax(lineno, "vehicle line before the vehicles header"))?;
                let id = parse_count(lineno, words.next(), "vehicle id")?;
                if id >= k {
                    return Err(syntax(lineno, format!("vehicle id {id} out of range (k = {k})")));
                }
                if vehicles[id].is_some() {
                    return Err(syntax(lineno, format!("duplicate vehicle {id}")));
                }
                let x = parse_float(lineno, words.next(), "depot x")?;
                let y = parse_float(lineno, words.next(), "depot y")?;
                let speed = parse_float(lineno, words.next(), "speed")?;
                match words.next() {
                    Some("required") => {}
                    other => {
                        return Err(syntax(
                            lineno,
                            format!("expected the keyword 'required', got {other:?}"),
                        ))
                    }
                }
                let mut required = Vec::new();
                for w in words {
                    required.push(w.parse::<usize>().map_err(|_| {
                        syntax(lineno, format!("bad required target id {w:?}"))
                    })?);
                }
                vehicles[id] = Some(VehicleSpec::new(Point::new(x, y), speed, required));
            }
            "target" => {
                let n = num_targets
                    .ok_or_else(|| syntax(lineno, "target line before the targets header"))?;
                let id = parse_count(lineno, words.next(), "target id")?;
                if id >= n {
                    return Err(syntax(lineno, format!("target id {id} out of range (n = {n})")));
                }
                if targets[id].is_some() {
                    return Err(syntax(lineno, format!("duplicate target {id}")));
                }
                let x = parse_float(lineno, words.next(), "x")?;
                let y = parse_float(lineno, words.next(), "y")?;
                targets[id] = Some(Point::new(x, y));
            }
            other => return Err(syntax(lineno, format!("unknown keyword {other:?}"))),
        }
    }

    let name = name.ok_or_else(|| syntax(0, "missing name header"))?;
    let k = num_vehicles.ok_or_else(|| syntax(0, "missing vehicles header"))?;
    let n = num_targets.ok_or_else(|| syntax(0, "missing targets header"))?;
    let vehicles: Vec<VehicleSpec> = vehicles
        .into_iter()
        .enumerate()
        .map(|(j, v)| v.ok_or_else(|| syntax(0, format!("vehicle {j} of {k} never defined"))))
        .collect::<Result<_, _>>()?;
    let targets: Vec<Point> = targets
        .into_iter()
        .enumerate()
        .map(|(t, p)| p.ok_or_else(|| syntax(0, format!("target {t} of {n} never defined"))))
        .collect::<Result<_, _>>()?;

    // Pre-check overlap so the error can name both vehicles.
    let mut owner: Vec<Option<usize>> = vec![None; targets.len()];
    for (j, v) in vehicles.iter().enumerate() {
        for &t in &v.required {
            if t < owner.len() {
                if let Some(first) = owner[t] {
                    return Err(FormatError::OverlappingRequired {
                        target: t,
                        first,
                        second: j,
                    });
                }
                owner[t] = Some(j);
            }
        }
    }

    Ok(Instance::new(name, targets, vehicles)?)
}

pub fn parse_instance_file(path: &Path) -> Result<Instance, FormatError> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

fn parse_count(line: usize, word: Option<&str>, what: &str) -> Result<usize, FormatError> {
    word.ok_or_else(|| syntax(line, format!("missing {what}")))?
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("bad {what}")))
}

fn parse_float(line: usize, word: Option<&str>, what: &str) -> Result<f64, FormatError> {
    word.ok_or_else(|| syntax(line, format!("missing {what}")))?
        .parse::<f64>()
        .map_err(|_| syntax(line, format!("bad {what}")))
}
