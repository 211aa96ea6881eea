//! Ambient metric spaces and points.

use std::fmt;

use super::CoreError;

/// A point of one of the supported spaces.
///
/// Circle points are stored as their canonical representative in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Point {
    Plane([f64; 2]),
    Circle(f64),
}

impl Point {
    pub fn plane(x: f64, y: f64) -> Self {
        Point::Plane([x, y])
    }

    /// Builds a circle point from any real, reducing it mod 1.
    pub fn circle(t: f64) -> Self {
        Point::Circle(canonical_angle(t))
    }

    pub fn as_plane(&self) -> Option<[f64; 2]> {
        match *self {
            Point::Plane(p) => Some(p),
            Point::Circle(_) => None,
        }
    }

    pub fn as_circle(&self) -> Option<f64> {
        match *self {
            Point::Circle(t) => Some(t),
            Point::Plane(_) => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Plane([x, y]) => write!(f, "({x}, {y})"),
            Point::Circle(t) => write!(f, "{t}"),
        }
    }
}

/// Reduces a real number to its representative in `[0, 1)`.
pub fn canonical_angle(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Arc-length distance on ℝ/ℤ.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    PlanarBox,
    Circle,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::PlanarBox => f.write_str("planar box"),
            SpaceKind::Circle => f.write_str("circle"),
        }
    }
}

/// The ambient space of an IFS. Fixes the metric used by every other module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Space {
    /// Axis-aligned rectangle `[min[0], max[0]] × [min[1], max[1]]` with the Euclidean metric.
    PlanarBox { min: [f64; 2], max: [f64; 2] },
    /// ℝ/ℤ with the arc-length metric.
    Circle,
}

impl Space {
    pub fn planar_box(min: [f64; 2], max: [f64; 2]) -> Result<Self, CoreError> {
        let ok = min.iter().chain(max.iter()).all(|v| v.is_finite())
            && max[0] > min[0]
            && max[1] > min[1];
        if !ok {
            return Err(CoreError::InvalidSpace(format!(
                "box [{}, {}] x [{}, {}] must have finite corners and positive sides",
                min[0], max[0], min[1], max[1]
            )));
        }
        Ok(Space::PlanarBox { min, max })
    }

    pub fn unit_square() -> Self {
        Space::PlanarBox {
            min: [0.0, 0.0],
            max: [1.0, 1.0],
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::PlanarBox { .. } => SpaceKind::PlanarBox,
            Space::Circle => SpaceKind::Circle,
        }
    }

    /// Whether `p` is a point of this space (inside the closed box for planar spaces).
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::PlanarBox { min, max }, Point::Plane([x, y])) => {
                *x >= min[0] && *x <= max[0] && *y >= min[1] && *y <= max[1]
            }
            (Space::Circle, Point::Circle(t)) => (0.0..1.0).contains(t),
            _ => false,
        }
    }

    /// Whether `p` has the right shape for this space, regardless of box bounds.
    pub fn accepts(&self, p: &Point) -> bool {
        matches!(
            (self, p),
            (Space::PlanarBox { .. }, Point::Plane(_)) | (Space::Circle, Point::Circle(_))
        )
    }

    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64, CoreError> {
        match (self, a, b) {
            (Space::PlanarBox { .. }, Point::Plane(p), Point::Plane(q)) => {
                Ok((p[0] - q[0]).hypot(p[1] - q[1]))
            }
            (Space::Circle, Point::Circle(s), Point::Circle(t)) => Ok(circle_distance(*s, *t)),
            _ => Err(CoreError::SpaceMismatch {
                expected: self.kind(),
            }),
        }
    }

    /// Largest distance between two points of the space.
    pub fn diameter(&self) -> f64 {
        match self {
            Space::PlanarBox { min, max } => (max[0] - min[0]).hypot(max[1] - min[1]),
            Space::Circle => 0.5,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::PlanarBox { min, max } => {
                write!(f, "box:{},{},{},{}", min[0], min[1], max[0], max[1])
            }
            Space::Circle => f.write_str("circle"),
        }
    }
}
