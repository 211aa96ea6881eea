//! Plain-text key/value schema for maps and IFSs.
//!
//! ```text
//! # comments start with '#'
//! space = circle                  # or: space = box:xmin,ymin,xmax,ymax
//!
//! [map]
//! kind = affine                   # affine | rotation | moebius | parabolic | pl_circle
//! matrix = 0.5 0 0 0.5            # row-major a11 a12 a21 a22
//! translation = 0 0
//!
//! [map]
//! kind = moebius
//! attracting = 0
//! repelling = 1/2
//! multiplier = 0.5
//!
//! [map]
//! kind = pl_circle
//! breakpoints = 0:0 0.25:0.1 0.5:0.6
//! ```
//!
//! Real values accept decimal literals and rationals such as `1/512`.
//! Written files use Rust's shortest round-trip float formatting, so
//! `parse_ifs(&write_ifs(x))` reproduces `x` bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Ifs, MapSpec, Space};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct SchemaError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> SchemaError {
    SchemaError {
        line,
        message: message.into(),
    }
}

/// Parses a real literal; `p/q` rationals are accepted.
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            if q == 0.0 {
                return None;
            }
            p / q
        }
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Parses `circle` or `box:xmin,ymin,xmax,ymax`.
pub fn parse_space(s: &str) -> Option<Space> {
    let s = s.trim();
    if s == "circle" {
        return Some(Space::Circle);
    }
    let coords = s.strip_prefix("box:")?;
    let v: Vec<f64> = coords.split(',').map(parse_real).collect::<Option<_>>()?;
    if v.len() != 4 {
        return None;
    }
    Space::planar_box([v[0], v[1]], [v[2], v[3]]).ok()
}

/// Generator blocks of a file, with the optional `space` line.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFile {
    pub space: Option<Space>,
    pub maps: Vec<MapSpec>,
}

pub fn parse_map_file(text: &str) -> Result<MapFile, SchemaError> {
    let mut space = None;
    let mut maps = Vec::new();
    let mut block: Option<(usize, BTreeMap<String, (usize, String)>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[map]" {
            if let Some((start, fields)) = block.take() {
                maps.push(build_map(start, &fields)?);
            }
            block = Some((line_no, BTreeMap::new()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        match &mut block {
            None if key == "space" => {
                space = Some(
                    parse_space(&value)
                        .ok_or_else(|| err(line_no, format!("invalid space `{value}`")))?,
                );
            }
            None => return Err(err(line_no, format!("unexpected key `{key}` outside a [map] block"))),
            Some((_, fields)) => {
                if fields.insert(key.clone(), (line_no, value)).is_some() {
                    return Err(err(line_no, format!("duplicate key `{key}`")));
                }
            }
        }
    }
    if let Some((start, fields)) = block.take() {
        maps.push(build_map(start, &fields)?);
    }
    Ok(MapFile { space, maps })
}

pub fn parse_ifs(text: &str) -> Result<Ifs, SchemaError> {
    let file = parse_map_file(text)?;
    let space = file
        .space
        .ok_or_else(|| err(1, "missing `space = ...` line"))?;
    Ifs::new(space, file.maps).map_err(|e| err(0, e.to_string()))
}

fn build_map(start: usize, fields: &BTreeMap<String, (usize, String)>) -> Result<MapSpec, SchemaError> {
    let get = |key: &str| {
        fields
            .get(key)
            .ok_or_else(|| err(start, format!("[map] block missing `{key}`")))
    };
    let real = |key: &str| -> Result<f64, SchemaError> {
        let (line, v) = get(key)?;
        parse_real(v).ok_or_else(|| err(*line, format!("`{key}`: invalid number `{v}`")))
    };
    let reals = |key: &str, n: usize| -> Result<Vec<f64>, SchemaError> {
        let (line, v) = get(key)?;
        let out: Vec<f64> = v
            .split_whitespace()
            .map(parse_real)
            .collect::<Option<_>>()
            .ok_or_else(|| err(*line, format!("`{key}`: invalid number list `{v}`")))?;
        if out.len() != n {
            return Err(err(*line, format!("`{key}` needs {n} numbers, got {}", out.len())));
        }
        Ok(out)
    };
    let (kind_line, kind) = get("kind")?;
    let allowed: &[&str] = match kind.as_str() {
        "affine" => &["kind", "matrix", "translation"],
        "rotation" => &["kind", "angle"],
        "moebius" => &["kind", "attracting", "repelling", "multiplier"],
        "parabolic" => &["kind", "strength"],
        "pl_circle" => &["kind", "breakpoints"],
        other => return Err(err(*kind_line, format!("unknown map kind `{other}`"))),
    };
    if let Some((k, (line, _))) = fields.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(err(*line, format!("unexpected key `{k}` for {kind} map")));
    }
    let spec = match kind.as_str() {
        "affine" => {
            let m = reals("matrix", 4)?;
            let t = reals("translation", 2)?;
            MapSpec::affine([[m[0], m[1]], [m[2], m[3]]], [t[0], t[1]])
        }
        "rotation" => MapSpec::rotation(real("angle")?),
        "moebius" => MapSpec::moebius(real("attracting")?, real("repelling")?, real("multiplier")?),
        "parabolic" => MapSpec::parabolic(real("strength")?),
        _ => {
            let (line, v) = get("breakpoints")?;
            let breakpoints = v
                .split_whitespace()
                .map(|pair| {
                    let (x, y) = pair.split_once(':')?;
                    Some((parse_real(x)?, parse_real(y)?))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| err(*line, format!("invalid breakpoints `{v}`")))?;
            MapSpec::PLCircleHomeo { breakpoints }
        }
    };
    super::Map::new(spec.clone()).map_err(|e| err(start, e.to_string()))?;
    Ok(spec)
}

pub fn write_map(out: &mut String, m: &MapSpec) {
    out.push_str("[map]\n");
    let _ = writeln!(out, "kind = {}", m.name());
    match m {
        MapSpec::Affine2D {
            matrix,
            translation,
        } => {
            let _ = writeln!(
                out,
                "matrix = {} {} {} {}",
                matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]
            );
            let _ = writeln!(out, "translation = {} {}", translation[0], translation[1]);
        }
        MapSpec::Rotation { angle } => {
            let _ = writeln!(out, "angle = {angle}");
        }
        MapSpec::Moebius {
            attracting,
            repelling,
            multiplier,
        } => {
            let _ = writeln!(out, "attracting = {attracting}");
            let _ = writeln!(out, "repelling = {repelling}");
            let _ = writeln!(out, "multiplier = {multiplier}");
        }
        MapSpec::Parabolic { strength } => {
            let _ = writeln!(out, "strength = {strength}");
        }
        MapSpec::PLCircleHomeo { breakpoints } => {
            let pairs: Vec<String> = breakpoints.iter().map(|(x, y)| format!("{x}:{y}")).collect();
            let _ = writeln!(out, "breakpoints = {}", pairs.join(" "));
        }
    }
}

pub fn write_ifs(ifs: &Ifs) -> String {
    let mut out = format!("space = {}\n", ifs.space());
    for m in ifs.specs() {
        out.push('\n');
        write_map(&mut out, m);
    }
    out
}
