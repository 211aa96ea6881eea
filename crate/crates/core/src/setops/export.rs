//! File formats for grids and convergence traces.
//!
//! Run-length text:
//!
//! ```text
//! # optional comment lines
//! space = box:0,0,1,1
//! h = 0.00390625
//! dims = 256 256
//! runs = 12 3 250 1
//! ```
//!
//! `runs` alternates empty and occupied run lengths over the flat cell order,
//! starting with an empty run (possibly 0). Trailing empty cells are implied.

use std::fmt::Write as _;

use bitvec::prelude::*;

use super::{ConvergenceTrace, Geometry, GridSet, SetError};
use crate::dynamics::schema::{parse_real, parse_space};

fn comment_block(header: &[String]) -> String {
    header.iter().map(|l| format!("# {l}\n")).collect()
}

/// Binary P5 graymap, one pixel per cell, 255 for occupied. The top image
/// row is the highest `y` row; the circle is a single row.
pub fn to_pgm(g: &GridSet, header: &[String]) -> Vec<u8> {
    let (nx, ny) = g.geometry().dims();
    let mut out = format!("P5\n{}{nx} {ny}\n255\n", comment_block(header)).into_bytes();
    for y in (0..ny).rev() {
        out.extend((0..nx).map(|x| if g.contains(y * nx + x) { 255u8 } else { 0 }));
    }
    out
}

/// Decodes a P5 file written by [`to_pgm`] into `(width, height, pixels)`,
/// pixels in file order.
pub fn read_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), SetError> {
    let bad = |m: &str| SetError::Format {
        line: 0,
        message: m.to_string(),
    };
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("not an 8-bit P5 graymap"));
    }
    let w: usize = fields[1].parse().map_err(|_| bad("bad width"))?;
    let h: usize = fields[2].parse().map_err(|_| bad("bad height"))?;
    let data = &bytes[pos + 1..];
    if data.len() != w * h {
        return Err(bad("pixel count does not match dimensions"));
    }
    Ok((w, h, data.to_vec()))
}

/// P6 color image: each occupied cell colored by the step at which an orbit
/// first entered it (`first_hit[i] = u64::MAX` for unvisited cells), on a
/// logarithmic blue to yellow ramp.
pub fn orbit_age_ppm(geom: &Geometry, first_hit: &[u64], header: &[String]) -> Vec<u8> {
    let (nx, ny) = geom.dims();
    let max = first_hit
        .iter()
        .filter(|&&s| s != u64::MAX)
        .copied()
        .max()
        .unwrap_or(0);
    let scale = ((max + 1) as f64).ln().max(1e-12);
    let mut out = format!("P6\n{}{nx} {ny}\n255\n", comment_block(header)).into_bytes();
    for y in (0..ny).rev() {
        for x in 0..nx {
            let s = first_hit[y * nx + x];
            if s == u64::MAX {
                out.extend([0, 0, 0]);
            } else {
                let t = ((s + 1) as f64).ln() / scale;
                out.extend([
                    (255.0 * t) as u8,
                    (64.0 + 191.0 * t) as u8,
                    (255.0 * (1.0 - t)) as u8,
                ]);
            }
        }
    }
    out
}

pub fn to_rle(g: &GridSet, header: &[String]) -> String {
    let geom = g.geometry();
    let (nx, ny) = geom.dims();
    let mut out = comment_block(header);
    let _ = writeln!(out, "space = {}", geom.space());
    let _ = writeln!(out, "h = {}", geom.h());
    let _ = writeln!(out, "dims = {nx} {ny}");
    let mut runs = Vec::new();
    let bits = g.bits();
    let mut i = 0;
    let mut want = false;
    while i < bits.len() {
        let run = if want {
            bits[i..].first_zero().unwrap_or(bits.len() - i)
        } else {
            match bits[i..].first_one() {
                Some(r) => r,
                None => break,
            }
        };
        runs.push(run.to_string());
        i += run;
        want = !want;
    }
    let _ = writeln!(out, "runs = {}", runs.join(" "));
    out
}

pub fn parse_rle(text: &str) -> Result<GridSet, SetError> {
    let err = |line: usize, m: String| SetError::Format { line, message: m };
    let mut space = None;
    let mut h = None;
    let mut dims = None;
    let mut runs: Option<(usize, Vec<usize>)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let n = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(n, format!("expected `key = value`, got `{line}`")))?;
        let v = v.trim();
        match k.trim() {
            "space" => space = Some(parse_space(v).ok_or_else(|| err(n, format!("invalid space `{v}`")))?),
            "h" => h = Some(parse_real(v).ok_or_else(|| err(n, format!("invalid resolution `{v}`")))?),
            "dims" => {
                let d: Vec<usize> = v
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(n, format!("invalid dims `{v}`")))?;
                if d.len() != 2 {
                    return Err(err(n, "dims needs two integers".into()));
                }
                dims = Some((n, (d[0], d[1])));
            }
            "runs" => {
                let r = v
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(n, "invalid run length".into()))?;
                runs = Some((n, r));
            }
            other => return Err(err(n, format!("unknown key `{other}`"))),
        }
    }
    let space = space.ok_or_else(|| err(0, "missing `space`".into()))?;
    let h = h.ok_or_else(|| err(0, "missing `h`".into()))?;
    let geom = Geometry::new(space, h)?;
    if let Some((line, d)) = dims {
        if d != geom.dims() {
            return Err(err(line, format!("dims {d:?} do not match the geometry {:?}", geom.dims())));
        }
    }
    let (line, runs) = runs.ok_or_else(|| err(0, "missing `runs`".into()))?;
    let mut bits = bitvec![0; geom.cell_count()];
    let mut i = 0usize;
    for (r, &len) in runs.iter().enumerate() {
        if i + len > bits.len() {
            return Err(err(line, "runs exceed the cell count".into()));
        }
        if r % 2 == 1 {
            bits[i..i + len].fill(true);
        }
        i += len;
    }
    GridSet::from_bits(geom, bits)
}

/// CSV with header `n,dh,cells`, preceded by `#` comment lines.
pub fn trace_csv(trace: &ConvergenceTrace, header: &[String]) -> String {
    let mut out = comment_block(header);
    out.push_str("n,dh,cells\n");
    for e in &trace.entries {
        let _ = writeln!(out, "{},{},{}", e.n, e.dh, e.cells);
    }
    out
}
