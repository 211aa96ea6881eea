use rayon::prelude::*;

use super::ChaosError;
use crate::dynamics::{Ifs, Point, Symbol, SymbolWord};
use crate::setops::{map_image, GridSet, Stamping};

/// Most interior sample points taken from a set, on top of its extreme points.
pub const MAX_INTERIOR_SAMPLES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct ContractDiag {
    pub target: GridSet,
    pub best_word: SymbolWord,
    pub best_diameter: f64,
    /// `diam K` as measured on the samples.
    pub initial_diameter: f64,
    /// `(length, best diameter over words of length ≤ length)`, from 0.
    pub curve: Vec<(usize, f64)>,
    pub beam: usize,
    pub samples: usize,
}

/// Diameter of a finite point set: largest pairwise distance in the plane,
/// length of the shortest covering arc on the circle.
pub fn point_diameter(pts: &[Point]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    match pts[0] {
        Point::Circle(_) => {
            let mut t: Vec<f64> = pts.iter().filter_map(Point::as_circle).collect();
            t.sort_by(f64::total_cmp);
            let mut gap = 1.0 - t[t.len() - 1] + t[0];
            for w in t.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            1.0 - gap
        }
        Point::Plane(_) => {
            let p: Vec<[f64; 2]> = pts.iter().filter_map(Point::as_plane).collect();
            let mut best: f64 = 0.0;
            for (i, a) in p.iter().enumerate() {
                for b in &p[i + 1..] {
                    best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
                }
            }
            best
        }
    }
}

/// Sample points of a grid set that realize its grid diameter: on the circle
/// the boundary points of every occupied run, in the plane the extreme cell
/// centers of every row; plus up to [`MAX_INTERIOR_SAMPLES`] evenly thinned
/// cell centers.
pub fn sample_points(k: &GridSet) -> Vec<Point> {
    let geom = k.geometry();
    let (nx, ny) = geom.dims();
    let mut pts = Vec::new();
    if geom.is_circle() {
        let w = 1.0 / nx as f64;
        let bits = k.bits();
        for i in 0..nx {
            let prev = bits[(i + nx - 1) % nx];
            let next = bits[(i + 1) % nx];
            if bits[i] && !prev {
                pts.push(Point::Circle(i as f64 * w));
            }
            if bits[i] && !next {
                pts.push(Point::Circle(((i + 1) as f64 * w).min(1.0 - f64::EPSILON)));
            }
        }
    } else {
        for y in 0..ny {
            let row = &k.bits()[y * nx..(y + 1) * nx];
            if let (Some(a), Some(b)) = (row.first_one(), row.last_one()) {
                pts.push(geom.center(y * nx + a));
                if b != a {
                    pts.push(geom.center(y * nx + b));
                }
            }
        }
    }
    let cells: Vec<usize> = k.cells().collect();
    let take = cells.len().min(MAX_INTERIOR_SAMPLES);
    for i in 0..take {
        pts.push(geom.center(cells[i * cells.len() / take]));
    }
    pts
}

#[derive(Clone)]
struct Candidate {
    word: Vec<Symbol>,
    pts: Vec<Point>,
    diam: f64,
}

/// Beam search for a word `g` making `diam g(K)` small.
///
/// Each level applies one more generator after the current word, `g ↦ fᵢ ∘ g`,
/// so a word `w₁…wₙ` is the orbital branch `f_{wₙ} ∘ … ∘ f_{w₁}`, and keeps the
/// `beam` candidates with the smallest sample diameter (ties broken by word).
/// The target `K` may be all of `A`; `A` only fixes the grid and is checked
/// for containment.
pub fn contractibility_diagnostic(
    ifs: &Ifs,
    a: &GridSet,
    k: &GridSet,
    max_len: usize,
    beam: usize,
) -> Result<ContractDiag, ChaosError> {
    if k.is_empty() {
        return Err(ChaosError::Precondition("K must be nonempty".into()));
    }
    if !k.is_subset(a)? {
        return Err(ChaosError::Precondition("K must be contained in A".into()));
    }
    let beam = beam.max(1);
    let pts = sample_points(k);
    let initial = point_diameter(&pts);
    let mut level = vec![Candidate {
        word: Vec::new(),
        pts,
        diam: initial,
    }];
    let mut best = level[0].clone();
    let mut curve = vec![(0, initial)];
    for len in 1..=max_len {
        let mut next: Vec<Candidate> = level
            .par_iter()
            .flat_map_iter(|c| {
                (1..=ifs.k()).map(move |s| {
                    let m = ifs.generator(s).expect("symbol in range");
                    let pts = c.pts.iter().map(|&p| m.apply(p)).collect::<Result<Vec<_>, _>>()?;
                    let mut word = c.word.clone();
                    word.push(s);
                    Ok(Candidate {
                        diam: point_diameter(&pts),
                        word,
                        pts,
                    })
                })
            })
            .collect::<Result<Vec<_>, crate::dynamics::CoreError>>()?;
        next.sort_by(|x, y| x.diam.total_cmp(&y.diam).then_with(|| x.word.cmp(&y.word)));
        next.truncate(beam);
        if next[0].diam < best.diam {
            best = next[0].clone();
        }
        curve.push((len, best.diam));
        level = next;
    }
    let samples = level[0].pts.len();
    Ok(ContractDiag {
        target: k.clone(),
        best_word: SymbolWord::new(best.word, ifs.k())?,
        best_diameter: best.diam,
        initial_diameter: initial,
        curve,
        beam,
        samples,
    })
}

/// `diam f_{w₁} ∘ … ∘ f_{wₙ}(A)`: note the reversed order, `f_{wₙ}` acting first.
///
/// Computed on the grid with outer images, intersected with `A` after every
/// step, so the value is non-increasing along prefixes when `F(A) ⊆ A`.
pub fn fibre_diameter(ifs: &Ifs, w: &SymbolWord, a: &GridSet) -> Result<f64, ChaosError> {
    Ok(fibre_set(ifs, w.symbols(), a)?.diameter())
}

/// Fibre diameters of every nonempty prefix of `w`, shortest first.
pub fn fibre_diameter_curve(ifs: &Ifs, w: &SymbolWord, a: &GridSet) -> Result<Vec<f64>, ChaosError> {
    (1..=w.len())
        .map(|n| Ok(fibre_set(ifs, &w.symbols()[..n], a)?.diameter()))
        .collect()
}

fn fibre_set(ifs: &Ifs, w: &[Symbol], a: &GridSet) -> Result<GridSet, ChaosError> {
    if w.is_empty() {
        return Err(ChaosError::Precondition("fibre words must be nonempty".into()));
    }
    let mut s = a.clone();
    for &sym in w.iter().rev() {
        s = map_image(ifs.generator(sym)?, &s, Stamping::Outer)?.intersection(a)?;
    }
    Ok(s)
}
