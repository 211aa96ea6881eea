use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig};
use ifslab::chaosgame::records::Record;
use ifslab::chaosgame::{
    check_backward_minimality_in, check_forward_minimality_in, checkpoints, contractibility_diagnostic,
    fibre_diameter, first_hits, run_deterministic, run_probabilistic, skew_density_check, theorem_b_witness,
    CoverageReport, MinimalityVerdict, Witness,
};
use ifslab::dynamics::{Ifs, Space, SymbolWord};
use ifslab::sequences::SymbolStream;
use ifslab::setops::export::{orbit_age_ppm, to_pgm, to_rle, trace_csv};
use ifslab::setops::{hutchinson_fixed_point, ConvergenceTrace, GridSet, Stamping};

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, dir.join(name)).with_context(|| format!("renaming into {}", dir.display()))?;
    Ok(())
}

fn commented(header: &[String], body: &str) -> String {
    let mut out: String = header.iter().map(|l| format!("# {l}\n")).collect();
    out.push_str(body);
    out
}

fn stamping(cfg: &ExperimentConfig) -> Stamping {
    if cfg.stamping == "outer" {
        Stamping::Outer
    } else {
        Stamping::Nominal
    }
}

/// Grid fixed point of the Hutchinson operator, iterated down from the whole
/// space at resolution `h`.
fn attractor(ifs: &Ifs, h: f64, max_iter: usize, st: Stamping) -> Result<(GridSet, ConvergenceTrace)> {
    let full = GridSet::full(ifs.space().clone(), h)?;
    Ok(hutchinson_fixed_point(ifs, &full, max_iter, st)?)
}

fn stream(cfg: &ExperimentConfig, spec: &str) -> Result<SymbolStream> {
    Ok(SymbolStream::parse(spec, cfg.ifs.k())?)
}

fn one_orbit(cfg: &ExperimentConfig, s: &SymbolStream, reference: &GridSet) -> Result<CoverageReport> {
    let report = if s.is_random() {
        run_probabilistic(&cfg.ifs, cfg.start, s, cfg.n, cfg.burn_in, cfg.h, reference)?
    } else {
        run_deterministic(&cfg.ifs, &[cfg.start], s, cfg.n, cfg.burn_in, cfg.h, reference)?.remove(0)
    };
    Ok(report)
}

pub fn render(cfg: &ExperimentConfig) -> Result<()> {
    let header = cfg.header("render");
    let (a, trace) = attractor(&cfg.ifs, cfg.h, cfg.max_iter, stamping(cfg))?;
    let s = stream(cfg, &cfg.stream)?;
    let report = one_orbit(cfg, &s, &a)?;

    let mut curve = String::from("step,coverage\n");
    for (step, c) in &report.curve {
        let _ = writeln!(curve, "{step},{c}");
    }
    write_atomic(&cfg.out, "attractor.pgm", &to_pgm(&a, &header))?;
    write_atomic(&cfg.out, "orbit.pgm", &to_pgm(&report.orbit, &header))?;
    write_atomic(&cfg.out, "trace.csv", trace_csv(&trace, &header).as_bytes())?;
    write_atomic(&cfg.out, "coverage.csv", commented(&header, &curve).as_bytes())?;
    if cfg.age {
        let hits = first_hits(&cfg.ifs, cfg.start, &s, cfg.n, a.geometry())?;
        write_atomic(&cfg.out, "orbit_age.ppm", &orbit_age_ppm(a.geometry(), &hits, &header))?;
    }
    let summary = format!(
        "record=attractor cells={} iterations={} converged={}\n{}\n",
        a.count(),
        trace.final_n,
        trace.converged,
        report.record()
    );
    write_atomic(&cfg.out, "render.txt", commented(&header, &summary).as_bytes())?;
    print!("{summary}");
    Ok(())
}

/// Circle arc `[a, b]` as grid cells whose centers lie in it.
fn arc_set(space: &Space, h: f64, (a, b): (f64, f64)) -> Result<GridSet> {
    let mut k = GridSet::empty(space.clone(), h)?;
    let geom = k.geometry().clone();
    for c in 0..geom.cell_count() {
        let t = geom.center(c).as_circle().unwrap_or(f64::NAN);
        if (a..=b).contains(&t) {
            k.insert(c);
        }
    }
    Ok(k)
}

/// Target set for witness and contraction diagnostics: the `target` arc on
/// the circle, the attractor in the plane.
fn target_set(cfg: &ExperimentConfig, a: &GridSet) -> Result<GridSet> {
    match cfg.ifs.space() {
        Space::Circle => Ok(arc_set(cfg.ifs.space(), cfg.h, cfg.target)?.intersection(a)?),
        Space::PlanarBox { .. } => Ok(a.clone()),
    }
}

fn witness_file(v: &MinimalityVerdict, header: &[String]) -> Option<(String, String)> {
    let name = format!("witness_{}.rle", v.direction);
    match &v.witness {
        Some(Witness::UnreachedCell { orbit, .. }) => Some((name, to_rle(orbit, header))),
        Some(Witness::InvariantSet { set, .. }) => Some((name, to_rle(set, header))),
        None => None,
    }
}

pub fn check(cfg: &ExperimentConfig) -> Result<()> {
    let header = cfg.header("check");
    let mut lines = Vec::new();
    let mut files = Vec::new();

    if cfg.direction != "none" {
        if cfg.seeds == 0 {
            return Err(ConfigError("`seeds` must be positive".into()).into());
        }
        // planar systems are checked on their attractor, the circle as a whole
        let universe = match cfg.ifs.space() {
            Space::Circle => None,
            Space::PlanarBox { .. } => Some(attractor(&cfg.ifs, cfg.eps / 2.0, cfg.max_iter, Stamping::Outer)?.0),
        };
        let seeds = cfg.seeds as usize;
        if matches!(cfg.direction.as_str(), "forward" | "both") {
            let v = check_forward_minimality_in(&cfg.ifs, cfg.eps, seeds, cfg.max_steps, universe.as_ref())?;
            lines.push(v.record());
            files.extend(witness_file(&v, &header));
        }
        if matches!(cfg.direction.as_str(), "backward" | "both") {
            let v = check_backward_minimality_in(&cfg.ifs, cfg.eps, seeds, cfg.max_steps, universe.as_ref())?;
            lines.push(v.record());
            files.extend(witness_file(&v, &header));
        }
    }

    let wants = |d: &str| cfg.diag.iter().any(|x| x == d);
    if wants("contractible") || wants("fibre") || wants("witness") {
        let (a, _) = attractor(&cfg.ifs, cfg.h, cfg.max_iter, Stamping::Outer)?;
        let k = target_set(cfg, &a)?;
        if wants("contractible") {
            let d = contractibility_diagnostic(&cfg.ifs, &a, &k, cfg.max_len, cfg.beam)?;
            lines.push(d.record());
        }
        if wants("fibre") {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let draw = |rng: &mut ChaCha8Rng, m: usize| ((rng.next_u64() as u128 * m as u128) >> 64) as usize;
            let words: Vec<SymbolWord> = (0..cfg.words)
                .map(|_| {
                    let len = 1 + draw(&mut rng, cfg.word_len);
                    let syms = (0..len).map(|_| 1 + draw(&mut rng, cfg.ifs.k())).collect();
                    SymbolWord::new(syms, cfg.ifs.k())
                })
                .collect::<Result<_, _>>()?;
            let diams = words
                .par_iter()
                .map(|w| fibre_diameter(&cfg.ifs, w, &a))
                .collect::<Result<Vec<_>, _>>()?;
            for (w, d) in words.iter().zip(&diams) {
                lines.push(format!("record=fibre word={w} length={} diameter={d}", w.len()));
            }
            let (lo, hi) = diams
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
            lines.push(format!(
                "record=fibre_summary words={} max_len={} min_diameter={lo} max_diameter={hi}",
                words.len(),
                cfg.word_len
            ));
        }
        if wants("witness") {
            let w = theorem_b_witness(&cfg.ifs, &k, &stream(cfg, &cfg.stream)?, cfg.witness_steps)?;
            lines.push(w.record());
            files.push(("theorem_b_k_n.rle".into(), to_rle(&w.k_n, &header)));
        }
    }
    if wants("skew") {
        let d = skew_density_check(&cfg.ifs, &stream(cfg, &cfg.stream)?, cfg.start, cfg.depth, cfg.eps, cfg.n)?;
        lines.push(d.record());
    }

    let body: String = lines.iter().map(|l| format!("{l}\n")).collect();
    for (name, text) in &files {
        write_atomic(&cfg.out, name, text.as_bytes())?;
    }
    write_atomic(&cfg.out, "verdicts.txt", commented(&header, &body).as_bytes())?;
    print!("{body}");
    Ok(())
}

pub fn compare(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.seeds == 0 {
        return Err(ConfigError("compare needs at least one random seed".into()).into());
    }
    let header = cfg.header("compare");
    let (a, _) = attractor(&cfg.ifs, cfg.h, cfg.max_iter, stamping(cfg))?;
    let k = cfg.ifs.k();

    // (driver, seed label, stream spec)
    let mut runs = Vec::new();
    for d in &cfg.drivers {
        match d.as_str() {
            "champernowne" => runs.push((d.clone(), "none".to_string(), "champernowne".to_string())),
            "shuffled" => runs.push((d.clone(), cfg.seed.to_string(), format!("shuffled:{}", cfg.seed))),
            _ => {
                for s in cfg.seed..cfg.seed + cfg.seeds {
                    let spec = if d == "bernoulli" {
                        format!("bernoulli:uniform:{s}")
                    } else {
                        format!("biased:0.1:{s}")
                    };
                    runs.push((d.clone(), s.to_string(), spec));
                }
            }
        }
    }
    let reports = runs
        .par_iter()
        .map(|(_, _, spec)| one_orbit(cfg, &SymbolStream::parse(spec, k)?, &a))
        .collect::<Result<Vec<_>>>()?;

    let steps = checkpoints(cfg.burn_in, cfg.n);
    let mut csv = String::from("step,coverage,driver,seed\n");
    for ((driver, seed, _), r) in runs.iter().zip(&reports) {
        debug_assert_eq!(r.curve.iter().map(|c| c.0).collect::<Vec<_>>(), steps);
        for (step, c) in &r.curve {
            let _ = writeln!(csv, "{step},{c},{driver},{seed}");
        }
    }
    write_atomic(&cfg.out, "compare.csv", commented(&header, &csv).as_bytes())?;
    for ((driver, seed, _), r) in runs.iter().zip(&reports) {
        let pass = r.coverage >= cfg.threshold;
        println!("driver={driver} seed={seed} {} reaches_threshold={pass}", r.record());
    }
    Ok(())
}
