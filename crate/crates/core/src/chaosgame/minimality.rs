use std::fmt;

use rayon::prelude::*;

use super::ChaosError;
use crate::dynamics::{Ifs, Point};
use crate::setops::{distance_field, map_image, Geometry, GridSet, Stamping};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    MinimalAtResolution,
    NotMinimal,
    /// A budget ran out before a decision was reached.
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::MinimalAtResolution => "minimal_at_resolution",
            Outcome::NotMinimal => "not_minimal",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

/// Evidence attached to a `NotMinimal` verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// The saturated orbit of `seed` misses `cell` by `gap > ε`.
    UnreachedCell { seed: Point, cell: Point, gap: f64, orbit: GridSet },
    /// `set` is a saturated forward-invariant neighborhood of a ball around
    /// `seed` that misses some cell of the universe by `gap > ε`.
    InvariantSet { seed: Point, set: GridSet, gap: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimalityVerdict {
    pub direction: Direction,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub eps: f64,
    /// Resolution of the internal grid, `ε/2`.
    pub h_internal: f64,
    pub seeds: usize,
    pub max_steps: usize,
    /// Largest number of saturation rounds any seed needed.
    pub steps_used: usize,
    /// Smallest ε-density gap over the seeds that decided the verdict.
    pub worst_gap: f64,
}

/// Result of saturating one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedOutcome {
    pub seed: Point,
    /// Visited cells (forward) or the saturated set (backward).
    pub reached: GridSet,
    /// True if the frontier emptied within the step budget.
    pub saturated: bool,
    pub steps: usize,
    /// Largest distance from a universe cell to `reached`.
    pub gap: f64,
    /// A universe cell realizing `gap`.
    pub farthest: usize,
}

fn internal_universe(ifs: &Ifs, eps: f64, universe: Option<&GridSet>) -> Result<GridSet, ChaosError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(ChaosError::Precondition(format!("ε = {eps} must be positive")));
    }
    let h = eps / 2.0;
    match universe {
        Some(u) => {
            if u.h() != h || u.space() != ifs.space() {
                return Err(ChaosError::Precondition(format!(
                    "universe grid must be on {} at h = ε/2 = {h}",
                    ifs.space()
                )));
            }
            if u.is_empty() {
                return Err(crate::setops::SetError::EmptySet.into());
            }
            Ok(u.clone())
        }
        None => Ok(GridSet::full(ifs.space().clone(), h)?),
    }
}

fn gap_to(universe: &GridSet, reached: &GridSet) -> Result<(f64, usize), ChaosError> {
    if reached.is_empty() {
        return Ok((f64::INFINITY, universe.cells().next().unwrap_or(0)));
    }
    let field = distance_field(reached)?;
    Ok(universe
        .cells()
        .map(|c| (field[c], c))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a }))
}

/// Evenly spaced universe cells used as seeds.
fn seed_cells(universe: &GridSet, count: usize) -> Vec<usize> {
    let cells: Vec<usize> = universe.cells().collect();
    let count = count.min(cells.len()).max(1);
    (0..count)
        .map(|i| cells[(2 * i + 1) * cells.len() / (2 * count)])
        .collect()
}

/// Breadth-first saturation of the Γ-orbit of `seed`: the seed's cell is
/// visited, then each round maps the exact representative points of newly
/// visited cells by every generator. Points outside a planar box, or in
/// cells outside `universe`, are dropped.
pub fn forward_orbit_closure(
    ifs: &Ifs,
    seed: Point,
    universe: &GridSet,
    max_steps: usize,
) -> Result<SeedOutcome, ChaosError> {
    let geom = universe.geometry();
    let mut reached = GridSet::empty_like(geom);
    let mut frontier = Vec::new();
    if let Some(c) = geom.cell_of(&seed) {
        reached.insert(c);
        frontier.push(seed);
    }
    let mut steps = 0;
    while !frontier.is_empty() && steps < max_steps {
        steps += 1;
        let mut next = Vec::new();
        for &p in &frontier {
            for m in ifs.maps() {
                let q = m.apply(p)?;
                if let Some(c) = geom.cell_of(&q) {
                    if universe.contains(c) && !reached.contains(c) {
                        reached.insert(c);
                        next.push(q);
                    }
                }
            }
        }
        frontier = next;
    }
    let (gap, farthest) = gap_to(universe, &reached)?;
    Ok(SeedOutcome {
        seed,
        saturated: frontier.is_empty(),
        reached,
        steps,
        gap,
        farthest,
    })
}

/// Smallest grid set containing the cells within `ε/2` of `seed` and closed
/// under outer-stamped images of all generators, intersected with `universe`.
pub fn forward_invariant_hull(
    ifs: &Ifs,
    seed: Point,
    eps: f64,
    universe: &GridSet,
    max_steps: usize,
) -> Result<SeedOutcome, ChaosError> {
    let geom = universe.geometry();
    let mut reached = GridSet::empty_like(geom);
    geom.for_each_in_ball(&seed, eps / 2.0, |c| {
        if universe.contains(c) {
            reached.insert(c)
        }
    });
    let mut frontier = reached.clone();
    let mut steps = 0;
    while !frontier.is_empty() && steps < max_steps {
        steps += 1;
        let mut image = GridSet::empty_like(geom);
        for m in ifs.maps() {
            image.union_with(&map_image(m, &frontier, Stamping::Outer)?)?;
        }
        let image = image.intersection(universe)?;
        frontier = image.difference(&reached)?;
        reached.union_with(&frontier)?;
    }
    let (gap, farthest) = gap_to(universe, &reached)?;
    Ok(SeedOutcome {
        seed,
        saturated: frontier.is_empty(),
        reached,
        steps,
        gap,
        farthest,
    })
}

fn decide(
    direction: Direction,
    eps: f64,
    geom: &Geometry,
    max_steps: usize,
    outcomes: Vec<SeedOutcome>,
) -> MinimalityVerdict {
    let steps_used = outcomes.iter().map(|o| o.steps).max().unwrap_or(0);
    let seeds = outcomes.len();
    let mut verdict = MinimalityVerdict {
        direction,
        outcome: Outcome::MinimalAtResolution,
        witness: None,
        eps,
        h_internal: geom.h(),
        seeds,
        max_steps,
        steps_used,
        worst_gap: outcomes.iter().map(|o| o.gap).fold(0.0, f64::max),
    };
    if let Some(o) = outcomes.iter().find(|o| o.saturated && o.gap > eps) {
        verdict.outcome = Outcome::NotMinimal;
        verdict.worst_gap = o.gap;
        verdict.witness = Some(match direction {
            Direction::Forward => Witness::UnreachedCell {
                seed: o.seed,
                cell: geom.center(o.farthest),
                gap: o.gap,
                orbit: o.reached.clone(),
            },
            Direction::Backward => Witness::InvariantSet {
                seed: o.seed,
                set: o.reached.clone(),
                gap: o.gap,
            },
        });
    } else if outcomes.iter().any(|o| o.gap > eps) {
        verdict.outcome = Outcome::Inconclusive;
    }
    verdict
}

/// Forward minimality at resolution `ε` on the whole space.
///
/// Runs [`forward_orbit_closure`] from `seed_grid` evenly spaced seeds on an
/// internal grid of resolution `ε/2`. Minimal when every orbit is `ε`-dense;
/// not minimal when some saturated orbit is not; inconclusive when an orbit
/// is neither dense nor saturated within `max_steps` rounds.
pub fn check_forward_minimality(
    ifs: &Ifs,
    eps: f64,
    seed_grid: usize,
    max_steps: usize,
) -> Result<MinimalityVerdict, ChaosError> {
    check_forward_minimality_in(ifs, eps, seed_grid, max_steps, None)
}

/// As [`check_forward_minimality`], relative to `universe` (a grid at
/// resolution `ε/2`) instead of the whole space.
pub fn check_forward_minimality_in(
    ifs: &Ifs,
    eps: f64,
    seed_grid: usize,
    max_steps: usize,
    universe: Option<&GridSet>,
) -> Result<MinimalityVerdict, ChaosError> {
    let universe = internal_universe(ifs, eps, universe)?;
    if seed_grid == 0 {
        return Err(ChaosError::Precondition("at least one seed is needed".into()));
    }
    let geom = universe.geometry().clone();
    let outcomes = seed_cells(&universe, seed_grid)
        .into_par_iter()
        .map(|c| forward_orbit_closure(ifs, geom.center(c), &universe, max_steps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(decide(Direction::Forward, eps, &geom, max_steps, outcomes))
}

/// Backward minimality at resolution `ε`, through the complement: a proper
/// open set `U` with `fᵢ(U) ⊆ U` for every generator makes `Uᶜ` a proper
/// backward-invariant closed set.
///
/// For `arc_seeds` evenly spaced seeds, [`forward_invariant_hull`] saturates
/// the `ε/2`-ball around the seed. A saturated hull missing some cell by more
/// than `ε` is returned as the witness.
pub fn check_backward_minimality(
    ifs: &Ifs,
    eps: f64,
    arc_seeds: usize,
    max_steps: usize,
) -> Result<MinimalityVerdict, ChaosError> {
    check_backward_minimality_in(ifs, eps, arc_seeds, max_steps, None)
}

pub fn check_backward_minimality_in(
    ifs: &Ifs,
    eps: f64,
    arc_seeds: usize,
    max_steps: usize,
    universe: Option<&GridSet>,
) -> Result<MinimalityVerdict, ChaosError> {
    let universe = internal_universe(ifs, eps, universe)?;
    if arc_seeds == 0 {
        return Err(ChaosError::Precondition("at least one seed is needed".into()));
    }
    let geom = universe.geometry().clone();
    let outcomes = seed_cells(&universe, arc_seeds)
        .into_par_iter()
        .map(|c| forward_invariant_hull(ifs, geom.center(c), eps, &universe, max_steps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(decide(Direction::Backward, eps, &geom, max_steps, outcomes))
}
