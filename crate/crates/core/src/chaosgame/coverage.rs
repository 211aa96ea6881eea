use rayon::prelude::*;

use super::ChaosError;
use crate::dynamics::{Ifs, Point};
use crate::sequences::SymbolStream;
use crate::setops::{GridSet, SetError};
use crate::tolerances::CURVE_POINTS;

/// Outcome of one chaos-game orbit measured against a reference grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub attractor_cells: usize,
    /// Reference cells visited after burn-in.
    pub hit_cells: usize,
    pub coverage: f64,
    /// `(steps, coverage)` at roughly log-spaced checkpoints; ends at `steps`.
    pub curve: Vec<(u64, f64)>,
    pub burn_in: u64,
    pub steps: u64,
    pub h: f64,
    pub seed: Point,
    /// Post-burn-in points that left a planar box.
    pub escaped: u64,
    /// Every cell visited after burn-in, inside the reference or not.
    pub orbit: GridSet,
}

/// Checkpoints for coverage curves: about [`CURVE_POINTS`] geometrically
/// spaced step counts in `burn_in + 1 ..= n`, always ending at `n`.
pub fn checkpoints(burn_in: u64, n: u64) -> Vec<u64> {
    if n <= burn_in {
        return vec![n];
    }
    let lo = (burn_in + 1) as f64;
    let ratio = (n as f64 / lo).powf(1.0 / (CURVE_POINTS - 1).max(1) as f64);
    let mut out: Vec<u64> = (0..CURVE_POINTS)
        .map(|i| ((lo * ratio.powi(i as i32)).round() as u64).clamp(burn_in + 1, n))
        .collect();
    out.push(n);
    out.dedup();
    out
}

fn run_orbit(
    ifs: &Ifs,
    x: Point,
    mut stream: SymbolStream,
    n: u64,
    burn_in: u64,
    reference: &GridSet,
) -> Result<CoverageReport, ChaosError> {
    if !ifs.space().accepts(&x) {
        return Err(ChaosError::Precondition(format!("seed {x} is not a point of {}", ifs.space())));
    }
    let geom = reference.geometry();
    let marks = checkpoints(burn_in, n);
    let mut next_mark = 0;
    let mut orbit = GridSet::empty_like(geom);
    let mut curve = Vec::with_capacity(marks.len());
    let total = reference.count();
    let mut hits = 0usize;
    let mut escaped = 0;
    let mut p = x;
    let ratio = |hits: usize| if total == 0 { 0.0 } else { hits as f64 / total as f64 };
    for step in 1..=n {
        let s = stream.next().ok_or(crate::dynamics::CoreError::StreamExhausted {
            position: stream.cursor(),
        })?;
        p = ifs.apply(s, p)?;
        if step > burn_in {
            match geom.cell_of(&p) {
                Some(c) => {
                    if !orbit.contains(c) {
                        orbit.insert(c);
                        if reference.contains(c) {
                            hits += 1;
                        }
                    }
                }
                None => escaped += 1,
            }
        }
        while next_mark < marks.len() && marks[next_mark] == step {
            curve.push((step, ratio(hits)));
            next_mark += 1;
        }
    }
    if curve.is_empty() {
        curve.push((n, 0.0));
    }
    Ok(CoverageReport {
        attractor_cells: total,
        hit_cells: hits,
        coverage: ratio(hits),
        curve,
        burn_in,
        steps: n,
        h: reference.h(),
        seed: x,
        escaped,
        orbit,
    })
}

fn check_reference(ifs: &Ifs, h: f64, reference: &GridSet, n: u64, burn_in: u64) -> Result<(), ChaosError> {
    if reference.is_empty() {
        return Err(SetError::EmptySet.into());
    }
    if reference.h() != h || reference.space() != ifs.space() {
        return Err(SetError::Comparability(format!(
            "reference grid at h = {} on {} does not match h = {h} on {}",
            reference.h(),
            reference.space(),
            ifs.space()
        ))
        .into());
    }
    if n < burn_in {
        return Err(ChaosError::Precondition(format!("N = {n} is below the burn-in {burn_in}")));
    }
    Ok(())
}

/// Probabilistic chaos game from `x`, consuming a clone of `stream`.
pub fn run_probabilistic(
    ifs: &Ifs,
    x: Point,
    stream: &SymbolStream,
    n: u64,
    burn_in: u64,
    h: f64,
    reference: &GridSet,
) -> Result<CoverageReport, ChaosError> {
    if !stream.is_random() {
        return Err(ChaosError::InvalidStream(
            "the probabilistic chaos game needs a random driver".into(),
        ));
    }
    check_reference(ifs, h, reference, n, burn_in)?;
    run_orbit(ifs, x, stream.clone(), n, burn_in, reference)
}

/// Deterministic chaos game: the same deterministic stream, restarted at
/// position 0, drives an orbit from every seed. Seeds run in parallel.
pub fn run_deterministic(
    ifs: &Ifs,
    seeds: &[Point],
    stream: &SymbolStream,
    n: u64,
    burn_in: u64,
    h: f64,
    reference: &GridSet,
) -> Result<Vec<CoverageReport>, ChaosError> {
    if stream.is_random() {
        return Err(ChaosError::InvalidStream(
            "the deterministic chaos game needs a deterministic stream".into(),
        ));
    }
    check_reference(ifs, h, reference, n, burn_in)?;
    seeds
        .par_iter()
        .map(|&x| run_orbit(ifs, x, stream.restarted(), n, burn_in, reference))
        .collect()
}

/// Step at which an orbit first entered each cell of `geom` (`u64::MAX` if
/// never), for orbit-age images.
pub fn first_hits(
    ifs: &Ifs,
    x: Point,
    stream: &SymbolStream,
    n: u64,
    geom: &crate::setops::Geometry,
) -> Result<Vec<u64>, ChaosError> {
    let mut s = stream.clone();
    let mut out = vec![u64::MAX; geom.cell_count()];
    let mut p = x;
    for step in 1..=n {
        let sym = s.next().ok_or(crate::dynamics::CoreError::StreamExhausted { position: s.cursor() })?;
        p = ifs.apply(sym, p)?;
        if let Some(c) = geom.cell_of(&p) {
            out[c] = out[c].min(step);
        }
    }
    Ok(out)
}
