use bitvec::prelude::*;
use rayon::prelude::*;

use super::{hausdorff_distance, Geometry, GridSet, SetError};
use crate::dynamics::{Ifs, Map, Point};

/// How the image of one cell is written into the output grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stamping {
    /// Every cell whose center lies within `L·δ + δ` of the image of the
    /// cell center, with `δ` the half cell diagonal and `L` the local
    /// Lipschitz bound of the map over that cell. Contains the true image of
    /// every point of every occupied cell.
    #[default]
    Outer,
    /// Only the cell containing the image of the cell center. Neither inner
    /// nor outer; used for reference attractors whose thickness should match
    /// what an orbit can actually hit.
    Nominal,
}

const CHUNK: usize = 2048;

fn stamp_cells<F>(a: &GridSet, stamp: F) -> Result<GridSet, SetError>
where
    F: Fn(usize, &Geometry, &mut BitVec) -> Result<(), SetError> + Sync,
{
    let geom = a.geometry();
    let cells: Vec<usize> = a.cells().collect();
    let bits = cells
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut local = bitvec![0; geom.cell_count()];
            for &c in chunk {
                stamp(c, geom, &mut local)?;
            }
            Ok::<_, SetError>(local)
        })
        .try_reduce(
            || bitvec![0; geom.cell_count()],
            |mut x, y| {
                x |= &y;
                Ok(x)
            },
        )?;
    GridSet::from_bits(geom.clone(), bits)
}

fn write_ball(geom: &Geometry, q: Point, radius: f64, stamping: Stamping, out: &mut BitVec) -> Result<(), SetError> {
    let Some(home) = geom.cell_of(&q) else {
        return Err(SetError::Domain(format!(
            "image point {q} leaves {}",
            geom.space()
        )));
    };
    match stamping {
        Stamping::Nominal => out.set(home, true),
        Stamping::Outer => {
            out.set(home, true);
            geom.for_each_in_ball(&q, radius, |i| out.set(i, true));
        }
    }
    Ok(())
}

/// Grid approximation of `m(A)`.
pub fn map_image(m: &Map, a: &GridSet, stamping: Stamping) -> Result<GridSet, SetError> {
    stamp_cells(a, |c, geom, out| {
        let delta = geom.cell_diagonal() / 2.0;
        let q = m.apply(geom.center(c))?;
        let radius = match stamping {
            Stamping::Outer => m.lipschitz(&geom.region(c)) * delta + delta,
            Stamping::Nominal => 0.0,
        };
        write_ball(geom, q, radius, stamping, out)
    })
}

/// Grid approximation of `m⁻¹(A)`, stamped like [`map_image`] with the local
/// expansion bound of the inverse.
pub fn map_preimage(m: &Map, a: &GridSet, stamping: Stamping) -> Result<GridSet, SetError> {
    stamp_cells(a, |c, geom, out| {
        let delta = geom.cell_diagonal() / 2.0;
        let q = m.inverse(geom.center(c))?;
        let radius = match stamping {
            Stamping::Outer => m.inverse_lipschitz(&geom.region(c))? * delta + delta,
            Stamping::Nominal => 0.0,
        };
        write_ball(geom, q, radius, stamping, out)
    })
}

/// Outer approximation of `F(A) = ⋃ᵢ fᵢ(A)`.
pub fn hutchinson_step(ifs: &Ifs, a: &GridSet) -> Result<GridSet, SetError> {
    hutchinson_step_with(ifs, a, Stamping::Outer)
}

pub fn hutchinson_step_with(ifs: &Ifs, a: &GridSet, stamping: Stamping) -> Result<GridSet, SetError> {
    if a.space() != ifs.space() {
        return Err(SetError::Comparability(format!(
            "grid over {} used with an IFS on {}",
            a.space(),
            ifs.space()
        )));
    }
    let mut out = GridSet::empty_like(a.geometry());
    for m in ifs.maps() {
        out.union_with(&map_image(m, a, stamping)?)?;
    }
    Ok(out)
}

/// One row of a [`ConvergenceTrace`]: `dh = d_H(Fⁿ, Fⁿ⁺¹)`, `cells = |Fⁿ⁺¹|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEntry {
    pub n: usize,
    pub dh: f64,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTrace {
    pub entries: Vec<TraceEntry>,
    pub converged: bool,
    /// Index of the returned iterate.
    pub final_n: usize,
    pub tol: f64,
}

/// Iterates [`hutchinson_step`] from `seed` until successive iterates are
/// within `tol` in Hausdorff distance, or `max_n` steps have been taken.
pub fn hutchinson_iterate(
    ifs: &Ifs,
    seed: &GridSet,
    max_n: usize,
    tol: f64,
) -> Result<(GridSet, ConvergenceTrace), SetError> {
    hutchinson_iterate_with(ifs, seed, max_n, tol, Stamping::Outer)
}

pub fn hutchinson_iterate_with(
    ifs: &Ifs,
    seed: &GridSet,
    max_n: usize,
    tol: f64,
    stamping: Stamping,
) -> Result<(GridSet, ConvergenceTrace), SetError> {
    if seed.is_empty() {
        return Err(SetError::EmptySet);
    }
    if !(tol >= seed.h()) {
        return Err(SetError::Resolution(format!(
            "tolerance {tol} is finer than the resolution {}",
            seed.h()
        )));
    }
    let mut current = seed.clone();
    let mut trace = ConvergenceTrace {
        entries: Vec::new(),
        converged: false,
        final_n: 0,
        tol,
    };
    for n in 0..max_n {
        let next = hutchinson_step_with(ifs, &current, stamping)?;
        let dh = hausdorff_distance(&current, &next)?;
        trace.entries.push(TraceEntry {
            n,
            dh,
            cells: next.count(),
        });
        current = next;
        trace.final_n = n + 1;
        if dh <= tol {
            trace.converged = true;
            break;
        }
    }
    Ok((current, trace))
}

/// Iterates until the grid set stops changing, so the result is a fixed point
/// of the discretized operator; `converged` is false if `max_n` steps pass
/// first. The trace records `tol = 0`.
pub fn hutchinson_fixed_point(
    ifs: &Ifs,
    seed: &GridSet,
    max_n: usize,
    stamping: Stamping,
) -> Result<(GridSet, ConvergenceTrace), SetError> {
    if seed.is_empty() {
        return Err(SetError::EmptySet);
    }
    let mut current = seed.clone();
    let mut trace = ConvergenceTrace {
        entries: Vec::new(),
        converged: false,
        final_n: 0,
        tol: 0.0,
    };
    for n in 0..max_n {
        let next = hutchinson_step_with(ifs, &current, stamping)?;
        let dh = hausdorff_distance(&current, &next)?;
        trace.entries.push(TraceEntry {
            n,
            dh,
            cells: next.count(),
        });
        let done = next == current;
        current = next;
        trace.final_n = n + 1;
        if done {
            trace.converged = true;
            break;
        }
    }
    Ok((current, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{MapSpec, Space};

    fn sierpinski() -> Ifs {
        let half = [[0.5, 0.0], [0.0, 0.5]];
        Ifs::new(
            Space::unit_square(),
            vec![
                MapSpec::affine(half, [0.0, 0.0]),
                MapSpec::affine(half, [0.5, 0.0]),
                MapSpec::affine(half, [0.0, 0.5]),
            ],
        )
        .unwrap()
    }

    fn single(h: f64, p: Point) -> GridSet {
        let mut g = GridSet::empty(Space::unit_square(), h).unwrap();
        g.insert_point(&p).unwrap();
        g
    }

    #[test]
    fn identity_step_contains_input() {
        let ifs = Ifs::new(Space::unit_square(), vec![MapSpec::affine([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])]).unwrap();
        let mut a = GridSet::empty(Space::unit_square(), 1.0 / 32.0).unwrap();
        for i in [0, 33, 500, 1023] {
            a.insert(i);
        }
        let f = hutchinson_step(&ifs, &a).unwrap();
        assert!(a.is_subset(&f).unwrap());
        let n = hutchinson_step_with(&ifs, &a, Stamping::Nominal).unwrap();
        assert_eq!(n, a);
    }

    #[test]
    fn sierpinski_single_cell() {
        let h = 1.0 / 64.0;
        let a = single(h, Point::plane(0.0, 0.0));
        let f = hutchinson_step_with(&sierpinski(), &a, Stamping::Nominal).unwrap();
        // cell center (h/2, h/2) maps to (h/4, h/4) + v/2
        let expect: Vec<usize> = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5)]
            .iter()
            .map(|&(x, y)| f.geometry().cell_of(&Point::plane(x + h / 4.0, y + h / 4.0)).unwrap())
            .collect();
        let mut got: Vec<usize> = f.cells().collect();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
        let outer = hutchinson_step(&sierpinski(), &a).unwrap();
        for &c in &expect {
            assert!(outer.contains(c));
        }
        for c in outer.cells() {
            let d = expect
                .iter()
                .map(|&e| outer.geometry().center_distance(c, e))
                .fold(f64::INFINITY, f64::min);
            assert!(d <= 2.0 * h);
        }
    }

    #[test]
    fn sierpinski_converges() {
        let h = 1.0 / 256.0;
        let seed = single(h, Point::plane(0.0, 0.0));
        let (limit, trace) = hutchinson_iterate(&sierpinski(), &seed, 30, 2.0 * h).unwrap();
        assert!(trace.converged, "{trace:?}");
        assert!(trace.final_n <= 30);
        assert!(trace.entries.last().unwrap().dh <= 2.0 * h);
        // run on and confirm the limit is stationary at the tolerance
        let (later, _) = hutchinson_iterate(&sierpinski(), &seed, 40, h).unwrap();
        assert!(hausdorff_distance(&limit, &later).unwrap() <= 2.0 * h);
        let tail: Vec<f64> = trace.entries.iter().skip(3).map(|e| e.dh).collect();
        for w in tail.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{tail:?}");
        }
    }

    #[test]
    fn sierpinski_grid_fixed_point_is_pascal_mod_two() {
        let h = 1.0 / 64.0;
        let full = GridSet::full(Space::unit_square(), h).unwrap();
        let (a, trace) = hutchinson_fixed_point(&sierpinski(), &full, 50, Stamping::Nominal).unwrap();
        assert!(trace.converged);
        // cell (i, j) is occupied iff the binary digits of i and j never overlap
        let mut expect = GridSet::empty(Space::unit_square(), h).unwrap();
        for j in 0..64usize {
            for i in 0..64usize {
                if i & j == 0 {
                    expect.insert(j * 64 + i);
                }
            }
        }
        assert_eq!(a, expect);
        assert_eq!(a.count(), 729);
    }

    #[test]
    fn rotation_fixes_full_circle() {
        let ifs = Ifs::new(Space::Circle, vec![MapSpec::rotation(0.618_033_988_7)]).unwrap();
        let full = GridSet::full(Space::Circle, 1e-3).unwrap();
        let (g, trace) = hutchinson_iterate(&ifs, &full, 10, 2e-3).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.final_n, 1);
        assert!(g.is_full());
    }

    #[test]
    fn tolerance_and_seed_preconditions() {
        let e = GridSet::empty(Space::unit_square(), 0.1).unwrap();
        assert_eq!(hutchinson_iterate(&sierpinski(), &e, 5, 0.2), Err(SetError::EmptySet));
        let a = single(0.1, Point::plane(0.5, 0.5));
        assert!(hutchinson_iterate(&sierpinski(), &a, 5, 0.05).is_err());
        let c = GridSet::full(Space::Circle, 0.1).unwrap();
        assert!(hutchinson_step(&sierpinski(), &c).is_err());
    }

    #[test]
    fn preimage_undoes_rotation() {
        let m = Map::new(MapSpec::rotation(0.25)).unwrap();
        let mut a = GridSet::empty(Space::Circle, 0.01).unwrap();
        a.insert(10);
        let back = map_preimage(&m, &map_image(&m, &a, Stamping::Nominal).unwrap(), Stamping::Nominal).unwrap();
        assert_eq!(back, a);
        let outer = map_preimage(&m, &a, Stamping::Outer).unwrap();
        assert!(outer.contains(85));
    }

    #[test]
    fn image_outside_box_is_domain_error() {
        let ifs = Ifs::new(Space::unit_square(), vec![MapSpec::affine([[1.0, 0.0], [0.0, 1.0]], [0.9, 0.0])]).unwrap();
        let a = single(0.1, Point::plane(0.5, 0.5));
        assert!(matches!(hutchinson_step(&ifs, &a), Err(SetError::Domain(_))));
    }
}
