//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use ifslab::dynamics::{Point, Space};
use ifslab::setops::GridSet;

/// Directed-then-symmetrized Hausdorff distance by scanning all cell pairs.
pub fn brute_hausdorff(a: &GridSet, b: &GridSet) -> f64 {
    let geom = a.geometry();
    let directed = |x: &GridSet, y: &GridSet| {
        x.cells()
            .map(|i| {
                y.cells()
                    .map(|j| geom.center_distance(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Cells of the Sierpinski triangle with vertices (0,0), (1,0), (0,1) on the
/// unit square at `h = 2⁻ᵐ`: cell `(i, j)` is occupied iff `i & j == 0`.
pub fn sierpinski_cells(h: f64) -> GridSet {
    let mut g = GridSet::empty(Space::unit_square(), h).unwrap();
    let (nx, ny) = g.geometry().dims();
    for j in 0..ny {
        for i in 0..nx {
            if i & j == 0 {
                g.insert(j * nx + i);
            }
        }
    }
    g
}

/// Concatenation of every word of length `1..=max_len` over `{1..k}`,
/// shorter words first, each length in lexicographic order.
pub fn champernowne_prefix(k: usize, max_len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for code in 0..k.pow(len as u32) {
            out.extend((0..len).rev().map(|d| code / k.pow(d as u32) % k + 1));
        }
    }
    out
}

/// Circle cells whose centers lie in `[a, b]`.
pub fn arc_grid(h: f64, a: f64, b: f64) -> GridSet {
    let mut g = GridSet::empty(Space::Circle, h).unwrap();
    let geom = g.geometry().clone();
    for c in 0..geom.cell_count() {
        let t = geom.center(c).as_circle().unwrap();
        if a <= t && t <= b {
            g.insert(c);
        }
    }
    g
}

pub fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

pub fn plane(p: &Point) -> [f64; 2] {
    p.as_plane().unwrap()
}
