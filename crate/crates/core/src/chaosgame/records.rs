//! Line-oriented `key=value` records for reports and verdicts.
//!
//! One record per line, fields separated by single spaces; values never
//! contain spaces. Planar points are written `x,y`, words as digit strings.

use std::fmt::Write as _;

use super::{
    ContractDiag, CoverageReport, MinimalityVerdict, Outcome, SkewDensity, TheoremBWitness, Witness,
};
use crate::dynamics::Point;

pub trait Record {
    fn record(&self) -> String;
}

pub fn point_value(p: &Point) -> String {
    match p {
        Point::Plane([x, y]) => format!("{x},{y}"),
        Point::Circle(t) => format!("{t}"),
    }
}

/// Splits a record line into its `(key, value)` pairs.
pub fn parse_record(line: &str) -> Vec<(&str, &str)> {
    line.split_whitespace()
        .filter_map(|f| f.split_once('='))
        .collect()
}

struct Fields(String);

impl Fields {
    fn new(kind: &str) -> Self {
        Fields(format!("record={kind}"))
    }
    fn put(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        let _ = write!(self.0, " {key}={value}");
        self
    }
}

impl Record for CoverageReport {
    fn record(&self) -> String {
        Fields::new("coverage")
            .put("seed", point_value(&self.seed))
            .put("steps", self.steps)
            .put("burn_in", self.burn_in)
            .put("h", self.h)
            .put("attractor_cells", self.attractor_cells)
            .put("hit_cells", self.hit_cells)
            .put("coverage", self.coverage)
            .put("escaped", self.escaped)
            .0
    }
}

impl Record for MinimalityVerdict {
    fn record(&self) -> String {
        let mut f = Fields::new("minimality")
            .put("direction", self.direction)
            .put("verdict", self.outcome)
            .put("eps", self.eps)
            .put("h_internal", self.h_internal)
            .put("seeds", self.seeds)
            .put("max_steps", self.max_steps)
            .put("steps_used", self.steps_used)
            .put("gap", self.worst_gap);
        if self.outcome == Outcome::Inconclusive {
            f = f.put("flag", "budget_exhausted");
        }
        match &self.witness {
            Some(Witness::UnreachedCell { seed, cell, gap, orbit }) => f
                .put("witness", "unreached_cell")
                .put("witness_seed", point_value(seed))
                .put("witness_cell", point_value(cell))
                .put("witness_gap", gap)
                .put("witness_cells", orbit.count())
                .0,
            Some(Witness::InvariantSet { seed, set, gap }) => f
                .put("witness", "invariant_set")
                .put("witness_seed", point_value(seed))
                .put("witness_gap", gap)
                .put("witness_cells", set.count())
                .0,
            None => f.0,
        }
    }
}

impl Record for ContractDiag {
    fn record(&self) -> String {
        Fields::new("contractibility")
            .put("target_cells", self.target.count())
            .put("initial_diameter", self.initial_diameter)
            .put("best_diameter", self.best_diameter)
            .put("best_length", self.best_word.len())
            .put("best_word", &self.best_word)
            .put("max_len", self.curve.len() - 1)
            .put("beam", self.beam)
            .put("samples", self.samples)
            .0
    }
}

impl Record for TheoremBWitness {
    fn record(&self) -> String {
        Fields::new("theorem_b")
            .put("n", self.symbols.len())
            .put("x", point_value(&self.x))
            .put("k_n_cells", self.k_n.count())
            .put("x_in_k_n", self.x_in_k_n)
            .put("stays_in_k", self.stays_in_k)
            .put("forward_defect", self.forward_defect)
            .put(
                "forward_escape",
                self.forward_escape.map_or("none".to_string(), |e| e.to_string()),
            )
            .0
    }
}

impl Record for SkewDensity {
    fn record(&self) -> String {
        Fields::new("skew_density")
            .put("depth", self.depth)
            .put("eps", self.eps)
            .put("steps", self.steps)
            .put("visited", self.visited)
            .put("total", self.total)
            .put("missing", self.missing_count)
            .put("dense", self.complete)
            .0
    }
}
