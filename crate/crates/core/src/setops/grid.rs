use bitvec::prelude::*;

use super::SetError;
use crate::dynamics::{canonical_angle, Point, Region, Space};
use crate::tolerances::DEFAULT_CELL_BUDGET;

/// Cell layout shared by comparable grids.
///
/// Planar boxes are cut into `nx × ny` square cells of side `h`, anchored at
/// the lower-left corner; cell `(i, j)` has center `min + ((i + ½)h, (j + ½)h)`
/// and flat index `j·nx + i`. The last row and column may overhang the box.
/// The circle is a ring of `n = ⌈1/h⌉` cells of width `w = 1/n`; cell `i`
/// covers `[i·w, (i + 1)·w)` and has center `(i + ½)·w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    space: Space,
    h: f64,
    nx: usize,
    ny: usize,
}

fn cells_along(len: f64, h: f64) -> f64 {
    (len / h - 1e-9).ceil().max(1.0)
}

impl Geometry {
    pub fn new(space: Space, h: f64) -> Result<Self, SetError> {
        Self::with_budget(space, h, DEFAULT_CELL_BUDGET)
    }

    pub fn with_budget(space: Space, h: f64, budget: usize) -> Result<Self, SetError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(SetError::Resolution(format!("resolution {h} must be positive")));
        }
        let (nx, ny) = match &space {
            Space::PlanarBox { min, max } => (
                cells_along(max[0] - min[0], h),
                cells_along(max[1] - min[1], h),
            ),
            Space::Circle => (cells_along(1.0, h), 1.0),
        };
        let cells = nx * ny;
        if cells > budget as f64 {
            return Err(SetError::Budget(format!(
                "{cells} cells exceed the budget of {budget}"
            )));
        }
        Ok(Geometry {
            space,
            h,
            nx: nx as usize,
            ny: ny as usize,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `(nx, ny)`; `ny = 1` on the circle.
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.space, Space::Circle)
    }

    /// Side of a planar cell, width of a circle cell.
    pub fn cell_side(&self) -> f64 {
        match self.space {
            Space::Circle => 1.0 / self.nx as f64,
            Space::PlanarBox { .. } => self.h,
        }
    }

    /// Largest distance between two points of one cell.
    pub fn cell_diagonal(&self) -> f64 {
        match self.space {
            Space::Circle => self.cell_side(),
            Space::PlanarBox { .. } => self.h * std::f64::consts::SQRT_2,
        }
    }

    pub fn center(&self, idx: usize) -> Point {
        match &self.space {
            Space::Circle => Point::Circle((idx as f64 + 0.5) / self.nx as f64),
            Space::PlanarBox { min, .. } => {
                let (i, j) = (idx % self.nx, idx / self.nx);
                Point::Plane([
                    min[0] + (i as f64 + 0.5) * self.h,
                    min[1] + (j as f64 + 0.5) * self.h,
                ])
            }
        }
    }

    /// The cell as a region for local Lipschitz bounds.
    pub fn region(&self, idx: usize) -> Region {
        match &self.space {
            Space::Circle => {
                let w = self.cell_side();
                Region::Arc {
                    start: idx as f64 * w,
                    len: w,
                }
            }
            Space::PlanarBox { min, .. } => {
                let (i, j) = (idx % self.nx, idx / self.nx);
                let lo = [min[0] + i as f64 * self.h, min[1] + j as f64 * self.h];
                Region::Rect {
                    min: lo,
                    max: [lo[0] + self.h, lo[1] + self.h],
                }
            }
        }
    }

    /// Cell containing `p`; `None` outside the box or for a point of the
    /// wrong kind. Points on the upper box edges belong to the last cell.
    pub fn cell_of(&self, p: &Point) -> Option<usize> {
        match (&self.space, p) {
            (Space::Circle, Point::Circle(t)) => {
                let t = canonical_angle(*t);
                Some(((t * self.nx as f64) as usize).min(self.nx - 1))
            }
            (Space::PlanarBox { .. }, Point::Plane(q)) if self.space.contains(p) => {
                let Space::PlanarBox { min, .. } = &self.space else {
                    unreachable!()
                };
                let i = (((q[0] - min[0]) / self.h) as usize).min(self.nx - 1);
                let j = (((q[1] - min[1]) / self.h) as usize).min(self.ny - 1);
                Some(j * self.nx + i)
            }
            _ => None,
        }
    }

    /// Distance between the centers of two cells.
    pub fn center_distance(&self, a: usize, b: usize) -> f64 {
        if self.is_circle() {
            let n = self.nx;
            let d = a.abs_diff(b);
            d.min(n - d) as f64 / n as f64
        } else {
            let di = (a % self.nx).abs_diff(b % self.nx) as f64;
            let dj = (a / self.nx).abs_diff(b / self.nx) as f64;
            self.h * di.hypot(dj)
        }
    }

    /// Every cell whose center lies within `radius` of `p` (inclusive),
    /// passed to `visit`. Planar discs are clipped to the grid.
    pub fn for_each_in_ball(&self, p: &Point, radius: f64, mut visit: impl FnMut(usize)) {
        // inclusive up to rounding of the center coordinates
        let r = radius * (1.0 + 1e-9) + 1e-15;
        match (&self.space, p) {
            (Space::Circle, Point::Circle(t)) => {
                let n = self.nx as i64;
                if 2.0 * r >= 1.0 {
                    (0..self.nx).for_each(visit);
                    return;
                }
                let lo = ((t - r) * n as f64 - 0.5).ceil() as i64;
                let hi = ((t + r) * n as f64 - 0.5).floor() as i64;
                for j in lo..=hi.min(lo + n - 1) {
                    visit(j.rem_euclid(n) as usize);
                }
            }
            (Space::PlanarBox { min, .. }, Point::Plane(q)) => {
                let fx = (q[0] - min[0]) / self.h - 0.5;
                let fy = (q[1] - min[1]) / self.h - 0.5;
                let rc = r / self.h;
                let i0 = (fx - rc).ceil().max(0.0);
                let i1 = (fx + rc).floor().min(self.nx as f64 - 1.0);
                let j0 = (fy - rc).ceil().max(0.0);
                let j1 = (fy + rc).floor().min(self.ny as f64 - 1.0);
                if i0 > i1 || j0 > j1 {
                    return;
                }
                let r2 = rc * rc;
                for j in j0 as usize..=j1 as usize {
                    let dy = j as f64 - fy;
                    for i in i0 as usize..=i1 as usize {
                        let dx = i as f64 - fx;
                        if dx * dx + dy * dy <= r2 {
                            visit(j * self.nx + i);
                        }
                    }
                }
            }
            _ => {}
        }
    }
}

/// A discretized compact set: an occupancy bitmap over a [`Geometry`].
///
/// Operations combining two grids require equal geometries.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSet {
    geom: Geometry,
    bits: BitVec,
}

impl GridSet {
    pub fn empty(space: Space, h: f64) -> Result<Self, SetError> {
        Ok(Self::empty_like(&Geometry::new(space, h)?))
    }

    pub fn full(space: Space, h: f64) -> Result<Self, SetError> {
        let mut g = Self::empty(space, h)?;
        g.bits.fill(true);
        Ok(g)
    }

    pub fn empty_like(geom: &Geometry) -> Self {
        GridSet {
            geom: geom.clone(),
            bits: bitvec![0; geom.cell_count()],
        }
    }

    pub fn from_bits(geom: Geometry, bits: BitVec) -> Result<Self, SetError> {
        if bits.len() != geom.cell_count() {
            return Err(SetError::Comparability(format!(
                "{} bits for a grid of {} cells",
                bits.len(),
                geom.cell_count()
            )));
        }
        Ok(GridSet { geom, bits })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub fn space(&self) -> &Space {
        &self.geom.space
    }

    pub fn h(&self) -> f64 {
        self.geom.h
    }

    pub fn bits(&self) -> &BitSlice {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    pub fn is_full(&self) -> bool {
        self.bits.all()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.bits.get(idx).is_some_and(|b| *b)
    }

    pub fn insert(&mut self, idx: usize) {
        self.bits.set(idx, true);
    }

    pub fn remove(&mut self, idx: usize) {
        self.bits.set(idx, false);
    }

    /// Marks the cell containing `p`.
    pub fn insert_point(&mut self, p: &Point) -> Result<usize, SetError> {
        let idx = self
            .geom
            .cell_of(p)
            .ok_or_else(|| SetError::Domain(format!("point {p} is not in {}", self.geom.space)))?;
        self.bits.set(idx, true);
        Ok(idx)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.geom.cell_of(p).is_some_and(|i| self.bits[i])
    }

    /// Occupied cell indices in increasing order.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn centers(&self) -> Vec<Point> {
        self.cells().map(|i| self.geom.center(i)).collect()
    }

    fn check(&self, other: &GridSet) -> Result<(), SetError> {
        if self.geom != other.geom {
            return Err(SetError::Comparability(format!(
                "grids over {} at h = {} and {} at h = {}",
                self.geom.space, self.geom.h, other.geom.space, other.geom.h
            )));
        }
        Ok(())
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet, SetError> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits |= &other.bits;
        Ok(out)
    }

    pub fn union_with(&mut self, other: &GridSet) -> Result<(), SetError> {
        self.check(other)?;
        self.bits |= &other.bits;
        Ok(())
    }

    pub fn intersection(&self, other: &GridSet) -> Result<GridSet, SetError> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits &= &other.bits;
        Ok(out)
    }

    pub fn difference(&self, other: &GridSet) -> Result<GridSet, SetError> {
        self.check(other)?;
        let mut out = self.clone();
        out.bits &= !other.bits.clone();
        Ok(out)
    }

    pub fn complement(&self) -> GridSet {
        GridSet {
            geom: self.geom.clone(),
            bits: !self.bits.clone(),
        }
    }

    pub fn is_subset(&self, other: &GridSet) -> Result<bool, SetError> {
        self.check(other)?;
        Ok(self.bits.iter_ones().all(|i| other.bits[i]))
    }

    /// Number of cells occupied in both.
    pub fn overlap(&self, other: &GridSet) -> Result<usize, SetError> {
        self.check(other)?;
        Ok(self.bits.iter_ones().filter(|&i| other.bits[i]).count())
    }

    /// Adds every cell within `r` cells in each axis direction (Chebyshev
    /// neighborhood; the circle wraps around).
    pub fn dilate(&self, r: usize) -> GridSet {
        if r == 0 {
            return self.clone();
        }
        let (nx, ny) = self.geom.dims();
        let mut out = Self::empty_like(&self.geom);
        if self.geom.is_circle() {
            if 2 * r + 1 >= nx {
                if !self.is_empty() {
                    out.bits.fill(true);
                }
                return out;
            }
            for i in self.cells() {
                for d in 0..=2 * r {
                    out.bits.set((i + nx + d - r) % nx, true);
                }
            }
            return out;
        }
        // separable: dilate rows, then columns
        let mut rows = bitvec![0; nx * ny];
        for i in self.cells() {
            let (x, y) = (i % nx, i / nx);
            let lo = x.saturating_sub(r);
            let hi = (x + r).min(nx - 1);
            rows[y * nx + lo..=y * nx + hi].fill(true);
        }
        for i in rows.iter_ones() {
            let (x, y) = (i % nx, i / nx);
            for yy in y.saturating_sub(r)..=(y + r).min(ny - 1) {
                out.bits.set(yy * nx + x, true);
            }
        }
        out
    }

    /// Largest distance between two occupied cell centers.
    ///
    /// On the circle this is instead the length of the shortest arc covering
    /// the occupied cells (whole cells counted), so the full ring measures 1.
    pub fn diameter(&self) -> f64 {
        let (nx, ny) = self.geom.dims();
        if self.is_empty() {
            return 0.0;
        }
        if self.geom.is_circle() {
            return (nx - longest_empty_run(&self.bits)) as f64 / nx as f64;
        }
        // extreme cells per row suffice: the farthest pair is on the hull
        let mut pts = Vec::new();
        for y in 0..ny {
            let row = &self.bits[y * nx..(y + 1) * nx];
            if let (Some(a), Some(b)) = (row.first_one(), row.last_one()) {
                pts.push((a as f64, y as f64));
                if b != a {
                    pts.push((b as f64, y as f64));
                }
            }
        }
        let mut best: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                best = best.max((p.0 - q.0).hypot(p.1 - q.1));
            }
        }
        best * self.geom.h
    }
}

/// Longest cyclic run of unset bits.
fn longest_empty_run(bits: &BitSlice) -> usize {
    let n = bits.len();
    let Some(first) = bits.first_one() else {
        return n;
    };
    let mut best = 0;
    let mut run = 0;
    for k in 1..=n {
        if bits[(first + k) % n] {
            best = best.max(run);
            run = 0;
        } else {
            run += 1;
        }
    }
    best
}

/// Grid of the cells containing at least one of `pts`.
pub fn grid_from_points<'a>(
    pts: impl IntoIterator<Item = &'a Point>,
    space: &Space,
    h: f64,
) -> Result<GridSet, SetError> {
    let mut g = GridSet::empty(space.clone(), h)?;
    for p in pts {
        g.insert_point(p)?;
    }
    Ok(g)
}

/// For each cut `n`, the grid of `{orbit[m] : m ≥ n}`. Cuts must be
/// non-decreasing and at most the orbit length.
pub fn tail_sets(orbit: &[Point], space: &Space, h: f64, cuts: &[usize]) -> Result<Vec<GridSet>, SetError> {
    if let Some(&c) = cuts.iter().find(|&&c| c > orbit.len()) {
        return Err(SetError::Index {
            cut: c,
            len: orbit.len(),
        });
    }
    if cuts.windows(2).any(|w| w[1] < w[0]) {
        return Err(SetError::Index {
            cut: cuts.iter().copied().max().unwrap_or(0),
            len: orbit.len(),
        });
    }
    let mut acc = GridSet::empty(space.clone(), h)?;
    let mut out = vec![acc.clone(); cuts.len()];
    let mut end = orbit.len();
    for (slot, &c) in cuts.iter().enumerate().rev() {
        for p in &orbit[c..end] {
            acc.insert_point(p)?;
        }
        end = c;
        out[slot] = acc.clone();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(h: f64) -> GridSet {
        GridSet::empty(Space::unit_square(), h).unwrap()
    }

    #[test]
    fn points_to_cells() {
        let g = grid_from_points([].iter(), &Space::unit_square(), 0.1).unwrap();
        assert!(g.is_empty());
        let pts = [Point::plane(0.31, 0.52)];
        let g = grid_from_points(pts.iter(), &Space::unit_square(), 0.1).unwrap();
        assert_eq!(g.count(), 1);
        let pts = [Point::plane(0.31, 0.52), Point::plane(0.33, 0.58)];
        let g = grid_from_points(pts.iter(), &Space::unit_square(), 0.1).unwrap();
        assert_eq!(g.count(), 1);
        let bad = [Point::plane(1.5, 0.5)];
        assert!(grid_from_points(bad.iter(), &Space::unit_square(), 0.1).is_err());
    }

    #[test]
    fn cell_layout() {
        let g = Geometry::new(Space::unit_square(), 0.25).unwrap();
        assert_eq!(g.dims(), (4, 4));
        assert_eq!(g.center(5), Point::plane(0.375, 0.375));
        assert_eq!(g.cell_of(&Point::plane(1.0, 1.0)), Some(15));
        assert_eq!(g.cell_of(&Point::plane(0.0, 0.0)), Some(0));
        let c = Geometry::new(Space::Circle, 1e-3).unwrap();
        assert_eq!(c.dims(), (1000, 1));
        assert_eq!(c.cell_of(&Point::Circle(0.9995)), Some(999));
        assert_eq!(c.center_distance(0, 999), 0.001);
        // 1/h is not an integer: the ring rounds up
        assert_eq!(Geometry::new(Space::Circle, 0.3).unwrap().dims(), (4, 1));
    }

    #[test]
    fn budget() {
        assert!(matches!(
            Geometry::new(Space::unit_square(), 1.0 / 16384.0),
            Err(SetError::Budget(_))
        ));
        assert!(Geometry::new(Space::unit_square(), 1.0 / 8192.0).is_ok());
        assert!(Geometry::new(Space::Circle, 0.0).is_err());
    }

    #[test]
    fn comparability() {
        let a = square(0.1);
        let b = square(0.2);
        assert!(matches!(a.union(&b), Err(SetError::Comparability(_))));
        let c = GridSet::empty(Space::Circle, 0.1).unwrap();
        assert!(a.is_subset(&c).is_err());
    }

    #[test]
    fn set_algebra() {
        let mut a = square(0.25);
        let mut b = square(0.25);
        a.insert(1);
        a.insert(2);
        b.insert(2);
        b.insert(3);
        assert_eq!(a.union(&b).unwrap().cells().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(a.intersection(&b).unwrap().cells().collect::<Vec<_>>(), vec![2]);
        assert_eq!(a.difference(&b).unwrap().cells().collect::<Vec<_>>(), vec![1]);
        assert_eq!(a.complement().count(), 14);
        assert!(a.intersection(&b).unwrap().is_subset(&a).unwrap());
        assert!(!a.is_subset(&b).unwrap());
    }

    #[test]
    fn dilation() {
        let mut a = square(0.1);
        a.insert(55);
        let d = a.dilate(1);
        assert_eq!(d.count(), 9);
        let mut corner = square(0.1);
        corner.insert(0);
        assert_eq!(corner.dilate(1).count(), 4);
        let mut ring = GridSet::empty(Space::Circle, 0.1).unwrap();
        ring.insert(0);
        assert_eq!(ring.dilate(1).cells().collect::<Vec<_>>(), vec![0, 1, 9]);
        assert!(ring.dilate(5).is_full());
    }

    #[test]
    fn circle_diameter_is_covering_arc() {
        let mut ring = GridSet::empty(Space::Circle, 0.1).unwrap();
        assert_eq!(ring.diameter(), 0.0);
        ring.insert(9);
        ring.insert(1);
        // cells 9, 0, 1 cover 0.3 going through 0
        assert!((ring.diameter() - 0.3).abs() < 1e-12);
        assert_eq!(GridSet::full(Space::Circle, 1e-3).unwrap().diameter(), 1.0);
    }

    #[test]
    fn planar_diameter_matches_brute_force() {
        let mut g = square(0.1);
        for i in [3, 17, 42, 66, 90, 91, 58] {
            g.insert(i);
        }
        let cs: Vec<usize> = g.cells().collect();
        let brute = cs
            .iter()
            .flat_map(|&a| cs.iter().map(move |&b| (a, b)))
            .map(|(a, b)| g.geometry().center_distance(a, b))
            .fold(0.0, f64::max);
        assert!((g.diameter() - brute).abs() < 1e-12);
    }

    #[test]
    fn ball_enumeration() {
        let g = Geometry::new(Space::unit_square(), 0.1).unwrap();
        let mut hit = vec![];
        g.for_each_in_ball(&Point::plane(0.55, 0.55), 0.1, |i| hit.push(i));
        hit.sort();
        assert_eq!(hit, vec![45, 54, 55, 56, 65]);
        let c = Geometry::new(Space::Circle, 0.1).unwrap();
        let mut hit = vec![];
        c.for_each_in_ball(&Point::Circle(0.02), 0.08, |i| hit.push(i));
        hit.sort();
        assert_eq!(hit, vec![0, 9]);
        let mut n = 0;
        c.for_each_in_ball(&Point::Circle(0.3), 0.6, |_| n += 1);
        assert_eq!(n, 10);
    }

    #[test]
    fn tails() {
        let orbit: Vec<Point> = (0..10).map(|i| Point::Circle(i as f64 / 10.0 + 0.01)).collect();
        let t = tail_sets(&orbit, &Space::Circle, 0.1, &[0, 3, 10]).unwrap();
        assert_eq!(t[0].count(), 10);
        assert_eq!(t[1].count(), 7);
        assert!(t[2].is_empty());
        assert!(t[1].is_subset(&t[0]).unwrap());
        assert!(tail_sets(&orbit, &Space::Circle, 0.1, &[11]).is_err());
        assert!(tail_sets(&orbit, &Space::Circle, 0.1, &[5, 3]).is_err());
    }
}
