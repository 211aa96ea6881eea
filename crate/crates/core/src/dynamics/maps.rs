//! Generator maps: specification, pointwise evaluation, inverses and local
//! expansion bounds.
//!
//! Every circle map is handled through a monotone lift `F: ℝ → ℝ` with
//! `F(x + 1) = F(x) + 1`; results are reduced mod 1.
//!
//! | variant | lift `F(x)` | inverse |
//! |---|---|---|
//! | `Rotation(α)` | `x + α` | closed form |
//! | `Moebius(a, r, λ)` | projective action of `P·diag(1, λ)·P⁻¹` on `(cos πx, sin πx)`, `P = [v(a) v(r)]` | closed form |
//! | `Parabolic(c)` | `x + c·sin²(πx)` | bisection on the lift |
//! | `PLCircleHomeo` | linear interpolation of the breakpoints, extended by periodicity | swapped breakpoints |
//!
//! `Affine2D(M, t)` acts on the plane by `x ↦ M·x + t` and is evaluated everywhere;
//! box bounds only matter when images are stamped into a grid.

use std::f64::consts::PI;

use super::space::{canonical_angle, Point, Space, SpaceKind};
use super::CoreError;

/// Multiplicative margin applied to sampled derivative maxima.
pub const LIPSCHITZ_SAFETY: f64 = 1.05;
/// Derivative samples per unit length when bounding circle maps.
pub const LIPSCHITZ_SAMPLES_PER_UNIT: usize = 4096;
/// Tolerance of the bisection used to invert lifts without a closed form.
pub const BISECTION_TOL: f64 = 1e-12;

/// A continuous self-map of a [`Space`].
#[derive(Clone, Debug, PartialEq)]
pub enum MapSpec {
    Affine2D {
        matrix: [[f64; 2]; 2],
        translation: [f64; 2],
    },
    Rotation {
        angle: f64,
    },
    /// Circle map with one attracting fixed point (derivative `multiplier`)
    /// and one repelling fixed point (derivative `1 / multiplier`).
    Moebius {
        attracting: f64,
        repelling: f64,
        multiplier: f64,
    },
    /// Lift `x + strength·sin²(πx)`: a single parabolic fixed point at 0.
    Parabolic {
        strength: f64,
    },
    /// Orientation-preserving piecewise-linear homeomorphism given by
    /// `(x, F(x))` pairs over one period of the lift.
    PLCircleHomeo {
        breakpoints: Vec<(f64, f64)>,
    },
}

impl MapSpec {
    pub fn affine(matrix: [[f64; 2]; 2], translation: [f64; 2]) -> Self {
        MapSpec::Affine2D {
            matrix,
            translation,
        }
    }

    pub fn rotation(angle: f64) -> Self {
        MapSpec::Rotation { angle }
    }

    pub fn moebius(attracting: f64, repelling: f64, multiplier: f64) -> Self {
        MapSpec::Moebius {
            attracting,
            repelling,
            multiplier,
        }
    }

    pub fn parabolic(strength: f64) -> Self {
        MapSpec::Parabolic { strength }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MapSpec::Affine2D { .. } => "affine",
            MapSpec::Rotation { .. } => "rotation",
            MapSpec::Moebius { .. } => "moebius",
            MapSpec::Parabolic { .. } => "parabolic",
            MapSpec::PLCircleHomeo { .. } => "pl_circle",
        }
    }

    pub fn space_kind(&self) -> SpaceKind {
        match self {
            MapSpec::Affine2D { .. } => SpaceKind::PlanarBox,
            _ => SpaceKind::Circle,
        }
    }

    /// The inverse map as a specification, when it belongs to the same family.
    ///
    /// `Parabolic` has no closed-form inverse in the family and returns `None`,
    /// as does a singular affine map.
    pub fn inverse_spec(&self) -> Option<MapSpec> {
        match self {
            MapSpec::Affine2D {
                matrix,
                translation,
            } => {
                let inv = invert2(matrix)?;
                let t = mul2(&inv, translation);
                Some(MapSpec::Affine2D {
                    matrix: inv,
                    translation: [-t[0], -t[1]],
                })
            }
            MapSpec::Rotation { angle } => Some(MapSpec::Rotation {
                angle: canonical_angle(-angle),
            }),
            MapSpec::Moebius {
                attracting,
                repelling,
                multiplier,
            } => Some(MapSpec::Moebius {
                attracting: *repelling,
                repelling: *attracting,
                multiplier: *multiplier,
            }),
            MapSpec::Parabolic { .. } => None,
            MapSpec::PLCircleHomeo { breakpoints } => {
                // normalise so the first x lies in [0, 1)
                let mut pairs: Vec<(f64, f64)> = breakpoints.iter().map(|&(x, y)| (y, x)).collect();
                let shift = pairs[0].0.floor();
                for p in &mut pairs {
                    p.0 -= shift;
                    p.1 -= shift;
                }
                Some(MapSpec::PLCircleHomeo { breakpoints: pairs })
            }
        }
    }
}

/// A validated generator with precomputed evaluation data.
#[derive(Clone, Debug)]
pub struct Map {
    spec: MapSpec,
    kernel: Kernel,
}

#[derive(Clone, Debug)]
enum Kernel {
    Affine {
        m: [[f64; 2]; 2],
        t: [f64; 2],
        inv: Option<[[f64; 2]; 2]>,
    },
    Rotation(f64),
    Moebius {
        attracting: f64,
        repelling: f64,
        fwd: [[f64; 2]; 2],
        inv: [[f64; 2]; 2],
        det: f64,
    },
    Parabolic(f64),
    Pl {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

/// Region over which a local expansion bound is requested.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Whole,
    /// Lift interval `[start, start + len]` on the circle.
    Arc { start: f64, len: f64 },
    /// Axis-aligned rectangle in the plane.
    Rect { min: [f64; 2], max: [f64; 2] },
}

impl Map {
    pub fn new(spec: MapSpec) -> Result<Self, CoreError> {
        let invalid = |msg: String| Err(CoreError::InvalidMap(msg));
        let kernel = match &spec {
            MapSpec::Affine2D {
                matrix,
                translation,
            } => {
                if !matrix.iter().flatten().chain(translation).all(|v| v.is_finite()) {
                    return invalid("affine entries must be finite".into());
                }
                Kernel::Affine {
                    m: *matrix,
                    t: *translation,
                    inv: invert2(matrix),
                }
            }
            MapSpec::Rotation { angle } => {
                if !(0.0..1.0).contains(angle) {
                    return invalid(format!("rotation angle {angle} must lie in [0, 1)"));
                }
                Kernel::Rotation(*angle)
            }
            MapSpec::Moebius {
                attracting,
                repelling,
                multiplier,
            } => {
                let (a, r, l) = (*attracting, *repelling, *multiplier);
                if !(0.0..1.0).contains(&a) || !(0.0..1.0).contains(&r) {
                    return invalid(format!("moebius fixed points {a}, {r} must lie in [0, 1)"));
                }
                if a == r {
                    return invalid("moebius fixed points must differ".into());
                }
                if !(l > 0.0 && l < 1.0) {
                    return invalid(format!("moebius multiplier {l} must lie in (0, 1)"));
                }
                let p = [
                    [(PI * a).cos(), (PI * r).cos()],
                    [(PI * a).sin(), (PI * r).sin()],
                ];
                let p_inv = invert2(&p).expect("distinct projective points");
                let d = [[1.0, 0.0], [0.0, l]];
                let fwd = matmul(&matmul(&p, &d), &p_inv);
                let d_inv = [[1.0, 0.0], [0.0, 1.0 / l]];
                let inv = matmul(&matmul(&p, &d_inv), &p_inv);
                Kernel::Moebius {
                    attracting: a,
                    repelling: r,
                    fwd,
                    inv,
                    det: l,
                }
            }
            MapSpec::Parabolic { strength } => {
                if !(*strength > 0.0 && *strength < 1.0 / PI) {
                    return invalid(format!("parabolic strength {strength} must lie in (0, 1/pi)"));
                }
                Kernel::Parabolic(*strength)
            }
            MapSpec::PLCircleHomeo { breakpoints } => {
                if breakpoints.is_empty() {
                    return invalid("piecewise-linear map needs at least one breakpoint".into());
                }
                let xs: Vec<f64> = breakpoints.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = breakpoints.iter().map(|p| p.1).collect();
                if !xs.iter().chain(&ys).all(|v| v.is_finite()) {
                    return invalid("breakpoints must be finite".into());
                }
                let increasing = |v: &[f64]| {
                    v.windows(2).all(|w| w[0] < w[1]) && v[v.len() - 1] < v[0] + 1.0
                };
                if !increasing(&xs) || !increasing(&ys) {
                    return invalid(
                        "breakpoints must increase strictly in both coordinates within one period"
                            .into(),
                    );
                }
                Kernel::Pl { xs, ys }
            }
        };
        Ok(Map { spec, kernel })
    }

    pub fn spec(&self) -> &MapSpec {
        &self.spec
    }

    pub fn space_kind(&self) -> SpaceKind {
        self.spec.space_kind()
    }

    pub fn is_invertible(&self) -> bool {
        !matches!(self.kernel, Kernel::Affine { inv: None, .. })
    }

    pub fn apply(&self, p: Point) -> Result<Point, CoreError> {
        match p {
            Point::Plane(q) => self.apply_plane(q).map(Point::Plane),
            Point::Circle(t) => self.apply_circle(t).map(Point::Circle),
        }
    }

    pub fn apply_plane(&self, p: [f64; 2]) -> Result<[f64; 2], CoreError> {
        match &self.kernel {
            Kernel::Affine { m, t, .. } => {
                let q = mul2(m, &p);
                Ok([q[0] + t[0], q[1] + t[1]])
            }
            _ => Err(CoreError::SpaceMismatch {
                expected: SpaceKind::Circle,
            }),
        }
    }

    pub fn apply_circle(&self, t: f64) -> Result<f64, CoreError> {
        match &self.kernel {
            Kernel::Affine { .. } => Err(CoreError::SpaceMismatch {
                expected: SpaceKind::PlanarBox,
            }),
            Kernel::Moebius { fwd, .. } => Ok(projective(fwd, t)),
            _ => Ok(canonical_angle(self.lift(t))),
        }
    }

    pub fn inverse(&self, p: Point) -> Result<Point, CoreError> {
        match p {
            Point::Plane(q) => self.inverse_plane(q).map(Point::Plane),
            Point::Circle(t) => self.inverse_circle(t).map(Point::Circle),
        }
    }

    pub fn inverse_plane(&self, p: [f64; 2]) -> Result<[f64; 2], CoreError> {
        match &self.kernel {
            Kernel::Affine { inv: Some(inv), t, .. } => {
                Ok(mul2(inv, &[p[0] - t[0], p[1] - t[1]]))
            }
            Kernel::Affine { inv: None, .. } => Err(CoreError::NotInvertible),
            _ => Err(CoreError::SpaceMismatch {
                expected: SpaceKind::Circle,
            }),
        }
    }

    pub fn inverse_circle(&self, y: f64) -> Result<f64, CoreError> {
        match &self.kernel {
            Kernel::Affine { .. } => Err(CoreError::SpaceMismatch {
                expected: SpaceKind::PlanarBox,
            }),
            Kernel::Rotation(a) => Ok(canonical_angle(y - a)),
            Kernel::Moebius { inv, .. } => Ok(projective(inv, y)),
            Kernel::Parabolic(c) => {
                let c = *c;
                // F(x) - x lies in [0, c], so the preimage of y is in [y - c, y]
                let x = bisect_lift(|x| x + c * (PI * x).sin().powi(2), y, y - c, y)?;
                Ok(canonical_angle(x))
            }
            Kernel::Pl { xs, ys } => Ok(canonical_angle(pl_lift(ys, xs, y))),
        }
    }

    /// The real-line lift of a circle map. Panics for affine maps.
    pub fn lift(&self, x: f64) -> f64 {
        match &self.kernel {
            Kernel::Rotation(a) => x + a,
            Kernel::Parabolic(c) => x + c * (PI * x).sin().powi(2),
            Kernel::Pl { xs, ys } => pl_lift(xs, ys, x),
            Kernel::Moebius {
                attracting,
                repelling,
                fwd,
                ..
            } => {
                // forward displacements lie in [0, arc) and backward ones in
                // (arc - 1, 0], where arc runs from the repeller to the attractor
                let raw = canonical_angle(projective(fwd, x) - x);
                let arc = canonical_angle(attracting - repelling);
                if raw <= arc {
                    x + raw
                } else {
                    x + raw - 1.0
                }
            }
            Kernel::Affine { .. } => panic!("affine maps have no circle lift"),
        }
    }

    /// Derivative of the circle lift at `x` (right derivative for PL maps).
    pub fn lift_derivative(&self, x: f64) -> f64 {
        match &self.kernel {
            Kernel::Rotation(_) => 1.0,
            Kernel::Parabolic(c) => 1.0 + c * PI * (2.0 * PI * x).sin(),
            Kernel::Moebius { fwd, det, .. } => {
                let (s, c) = (PI * x).sin_cos();
                let w0 = fwd[0][0] * c + fwd[0][1] * s;
                let w1 = fwd[1][0] * c + fwd[1][1] * s;
                det / (w0 * w0 + w1 * w1)
            }
            Kernel::Pl { xs, ys } => {
                let (j, _, _) = pl_segment(xs, x);
                let (x0, x1, y0, y1) = pl_knots(xs, ys, j);
                (y1 - y0) / (x1 - x0)
            }
            Kernel::Affine { .. } => panic!("affine maps have no circle lift"),
        }
    }

    /// Upper bound on the local expansion of the map over `region`.
    ///
    /// Affine maps return the exact operator norm of the matrix. Circle maps
    /// return the sampled maximum of `|F'|` times [`LIPSCHITZ_SAFETY`], sampling
    /// [`LIPSCHITZ_SAMPLES_PER_UNIT`] points per unit length (at least nine
    /// per region, endpoints included).
    pub fn lipschitz(&self, region: &Region) -> f64 {
        match &self.kernel {
            Kernel::Affine { m, .. } => operator_norm(m),
            Kernel::Pl { xs, ys } => LIPSCHITZ_SAFETY * pl_max_slope(xs, ys, region),
            _ => LIPSCHITZ_SAFETY * sample_max(region, |x| self.lift_derivative(x).abs()),
        }
    }

    /// Upper bound on the local expansion of the inverse map over `region`
    /// (a region of the target space).
    pub fn inverse_lipschitz(&self, region: &Region) -> Result<f64, CoreError> {
        match &self.kernel {
            Kernel::Affine { inv: Some(inv), .. } => Ok(operator_norm(inv)),
            Kernel::Affine { inv: None, .. } => Err(CoreError::NotInvertible),
            Kernel::Pl { xs, ys } => Ok(LIPSCHITZ_SAFETY * pl_max_slope(ys, xs, region)),
            _ => {
                let mut err = None;
                let v = sample_max(region, |y| match self.inverse_circle(y) {
                    Ok(x) => 1.0 / self.lift_derivative(x).abs(),
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                });
                match err {
                    Some(e) => Err(e),
                    None => Ok(LIPSCHITZ_SAFETY * v),
                }
            }
        }
    }
}

/// Evaluates `m` at `x`, canonicalising circle results into `[0, 1)`.
pub fn eval_map(m: &MapSpec, s: &Space, x: Point) -> Result<Point, CoreError> {
    check_kind(m, s, &x)?;
    Map::new(m.clone())?.apply(x)
}

/// Evaluates the inverse of `m` at `y`.
pub fn eval_inverse(m: &MapSpec, s: &Space, y: Point) -> Result<Point, CoreError> {
    check_kind(m, s, &y)?;
    Map::new(m.clone())?.inverse(y)
}

/// Local expansion bound of `m` over `region`; see [`Map::lipschitz`].
pub fn lipschitz_bound(m: &MapSpec, s: &Space, region: &Region) -> Result<f64, CoreError> {
    if m.space_kind() != s.kind() {
        return Err(CoreError::SpaceMismatch { expected: s.kind() });
    }
    Ok(Map::new(m.clone())?.lipschitz(region))
}

fn check_kind(m: &MapSpec, s: &Space, p: &Point) -> Result<(), CoreError> {
    if m.space_kind() != s.kind() || !s.accepts(p) {
        return Err(CoreError::SpaceMismatch { expected: s.kind() });
    }
    Ok(())
}

fn sample_max(region: &Region, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (start, len) = match *region {
        Region::Arc { start, len } => (start, len.clamp(0.0, 1.0)),
        _ => (0.0, 1.0),
    };
    let n = ((len * LIPSCHITZ_SAMPLES_PER_UNIT as f64).ceil() as usize).max(8);
    (0..=n)
        .map(|i| f(start + len * i as f64 / n as f64))
        .fold(0.0, f64::max)
}

fn projective(m: &[[f64; 2]; 2], t: f64) -> f64 {
    let (s, c) = (PI * t).sin_cos();
    let w0 = m[0][0] * c + m[0][1] * s;
    let w1 = m[1][0] * c + m[1][1] * s;
    canonical_angle(w1.atan2(w0) / PI)
}

/// Index `j` of the segment `[x_j, x_{j+1})` containing the reduced `x`, the
/// reduced value and the number of whole periods removed.
fn pl_segment(xs: &[f64], x: f64) -> (usize, f64, f64) {
    let periods = (x - xs[0]).floor();
    let s = x - periods;
    let j = xs.partition_point(|&v| v <= s).saturating_sub(1);
    (j, s, periods)
}

fn pl_knots(xs: &[f64], ys: &[f64], j: usize) -> (f64, f64, f64, f64) {
    let m = xs.len();
    if j + 1 < m {
        (xs[j], xs[j + 1], ys[j], ys[j + 1])
    } else {
        (xs[j], xs[0] + 1.0, ys[j], ys[0] + 1.0)
    }
}

fn pl_lift(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let (j, s, periods) = pl_segment(xs, x);
    let (x0, x1, y0, y1) = pl_knots(xs, ys, j);
    y0 + (s - x0) * (y1 - y0) / (x1 - x0) + periods
}

fn pl_max_slope(xs: &[f64], ys: &[f64], region: &Region) -> f64 {
    let slopes = (0..xs.len()).map(|j| {
        let (x0, x1, y0, y1) = pl_knots(xs, ys, j);
        ((y1 - y0) / (x1 - x0), x0, x1)
    });
    match *region {
        Region::Arc { start, len } if len < 1.0 => slopes
            .filter(|&(_, x0, x1)| {
                // segment [x0, x1) meets [start, start + len] modulo 1
                let a = (start - x0).rem_euclid(1.0);
                a < x1 - x0 || a + len >= 1.0
            })
            .map(|s| s.0)
            .fold(0.0, f64::max),
        _ => slopes.map(|s| s.0).fold(0.0, f64::max),
    }
}

fn bisect_lift(f: impl Fn(f64) -> f64, y: f64, mut lo: f64, mut hi: f64) -> Result<f64, CoreError> {
    for _ in 0..200 {
        if hi - lo <= BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let residual = (f(x) - y).abs();
    if hi - lo > BISECTION_TOL || residual > 1e-9 {
        return Err(CoreError::Convergence { residual });
    }
    Ok(x)
}

pub(crate) fn mul2(m: &[[f64; 2]; 2], v: &[f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn invert2(m: &[[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Largest singular value of a 2×2 matrix.
fn operator_norm(m: &[[f64; 2]; 2]) -> f64 {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
    ((s + disc) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> MapSpec {
        MapSpec::affine([[0.5, 0.0], [0.0, 0.5]], [0.0, 0.0])
    }

    #[test]
    fn affine_scaling_and_inverse() {
        let s = Space::unit_square();
        assert_eq!(
            eval_map(&half(), &s, Point::plane(1.0, 1.0)).unwrap(),
            Point::plane(0.5, 0.5)
        );
        assert_eq!(
            eval_inverse(&half(), &s, Point::plane(0.5, 0.5)).unwrap(),
            Point::plane(1.0, 1.0)
        );
    }

    #[test]
    fn rotation_mod_one() {
        let r = MapSpec::rotation(0.25);
        let y = eval_map(&r, &Space::Circle, Point::Circle(0.9)).unwrap();
        assert!((y.as_circle().unwrap() - 0.15).abs() < 1e-12);
        let x = eval_inverse(&r, &Space::Circle, Point::Circle(0.15)).unwrap();
        assert!((x.as_circle().unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn parabolic_fixes_zero_and_inverts() {
        let p = MapSpec::parabolic(0.2);
        assert_eq!(eval_map(&p, &Space::Circle, Point::Circle(0.0)).unwrap(), Point::Circle(0.0));
        let y = eval_map(&p, &Space::Circle, Point::Circle(0.3)).unwrap();
        let x = eval_inverse(&p, &Space::Circle, y).unwrap().as_circle().unwrap();
        assert!((x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn singular_affine_is_not_invertible() {
        let m = MapSpec::affine([[0.0, 0.0], [0.0, 0.16]], [0.0, 0.0]);
        assert!(matches!(
            eval_inverse(&m, &Space::unit_square(), Point::plane(0.0, 0.1)),
            Err(CoreError::NotInvertible)
        ));
        assert!(m.inverse_spec().is_none());
    }

    #[test]
    fn invalid_parameters_rejected() {
        for spec in [
            MapSpec::parabolic(0.4),
            MapSpec::moebius(0.2, 0.2, 0.5),
            MapSpec::moebius(0.0, 0.5, 1.0),
            MapSpec::rotation(1.0),
            MapSpec::PLCircleHomeo {
                breakpoints: vec![(0.0, 0.0), (0.5, 0.4), (0.4, 0.6)],
            },
            MapSpec::PLCircleHomeo { breakpoints: vec![] },
            MapSpec::affine([[f64::INFINITY, 0.0], [0.0, 1.0]], [0.0, 0.0]),
        ] {
            assert!(Map::new(spec.clone()).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn kind_mismatch_is_reported() {
        assert!(matches!(
            eval_map(&MapSpec::rotation(0.1), &Space::unit_square(), Point::plane(0.0, 0.0)),
            Err(CoreError::SpaceMismatch { .. })
        ));
        assert!(eval_map(&half(), &Space::Circle, Point::Circle(0.2)).is_err());
    }

    #[test]
    fn moebius_fixed_points_and_multipliers() {
        for (a, r, l) in [(0.0, 0.5, 0.5), (0.1, 0.7, 0.25), (0.9, 0.3, 0.8)] {
            let m = Map::new(MapSpec::moebius(a, r, l)).unwrap();
            assert!(crate::dynamics::circle_distance(m.apply_circle(a).unwrap(), a) < 1e-12);
            assert!(crate::dynamics::circle_distance(m.apply_circle(r).unwrap(), r) < 1e-12);
            let fd = |x: f64| {
                let e = 1e-6;
                (m.lift(x + e) - m.lift(x - e)) / (2.0 * e)
            };
            assert!((fd(a) - l).abs() < 1e-4, "{a} {r} {l}: {}", fd(a));
            assert!((fd(r) - 1.0 / l).abs() < 1e-4);
            assert!((m.lift_derivative(a) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn moebius_lift_is_monotone_and_periodic() {
        let m = Map::new(MapSpec::moebius(0.1, 0.7, 0.25)).unwrap();
        let mut prev = m.lift(-0.5);
        for i in 1..=4000 {
            let x = -0.5 + i as f64 / 2000.0;
            let v = m.lift(x);
            assert!(v > prev, "not increasing at {x}");
            assert!((m.lift(x + 1.0) - v - 1.0).abs() < 1e-9);
            prev = v;
        }
    }

    #[test]
    fn pl_map_evaluation_and_inverse() {
        let spec = MapSpec::PLCircleHomeo {
            breakpoints: vec![(0.1, 0.2), (0.5, 0.3), (0.8, 0.9)],
        };
        let m = Map::new(spec.clone()).unwrap();
        assert!((m.lift(0.1) - 0.2).abs() < 1e-15);
        assert!((m.lift(0.3) - 0.25).abs() < 1e-15);
        // wrap segment [0.8, 1.1) -> [0.9, 1.2)
        assert!((m.lift(0.95) - 1.05).abs() < 1e-12);
        assert!((m.lift(1.3) - 1.25).abs() < 1e-12);
        for i in 0..100 {
            let x = i as f64 / 100.0;
            let y = m.apply_circle(x).unwrap();
            let back = m.inverse_circle(y).unwrap();
            assert!(crate::dynamics::circle_distance(back, x) < 1e-12);
        }
        let inv = Map::new(spec.inverse_spec().unwrap()).unwrap();
        assert!((inv.apply_circle(0.25).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_examples() {
        let s = Space::unit_square();
        let aff = MapSpec::affine([[0.5, 0.0], [0.0, 0.5]], [0.3, 0.1]);
        assert_eq!(lipschitz_bound(&aff, &s, &Region::Whole).unwrap(), 0.5);
        let rot = lipschitz_bound(&MapSpec::rotation(0.3), &Space::Circle, &Region::Whole).unwrap();
        assert!((rot - LIPSCHITZ_SAFETY).abs() < 1e-12);

        // oracle: dense sampling of 1 + c·π·sin(2πx)
        let c = 0.2;
        let oracle = (0..100_000)
            .map(|i| 1.0 + c * PI * (2.0 * PI * i as f64 / 100_000.0).sin())
            .fold(0.0, f64::max);
        assert!((oracle - 1.628_318).abs() < 1e-5);
        let par = lipschitz_bound(&MapSpec::parabolic(c), &Space::Circle, &Region::Whole).unwrap();
        assert!(par >= oracle && par <= oracle * 1.05 + 1e-12, "{par}");
    }

    #[test]
    fn local_bounds_are_tighter_than_global() {
        let m = Map::new(MapSpec::moebius(0.0, 0.5, 0.5)).unwrap();
        let near_a = m.lipschitz(&Region::Arc { start: -0.01, len: 0.02 });
        let whole = m.lipschitz(&Region::Whole);
        assert!(near_a < 0.6 && near_a >= 0.5);
        assert!((whole - 2.0 * LIPSCHITZ_SAFETY).abs() < 1e-9);
        let inv_near_r = m.inverse_lipschitz(&Region::Arc { start: 0.49, len: 0.02 }).unwrap();
        assert!(inv_near_r < 0.6);
    }

    #[test]
    fn pl_slope_bound_restricts_to_region() {
        let m = Map::new(MapSpec::PLCircleHomeo {
            breakpoints: vec![(0.0, 0.0), (0.5, 0.1)],
        })
        .unwrap();
        // slopes 0.2 on [0, 0.5) and 1.8 on [0.5, 1)
        let lo = m.lipschitz(&Region::Arc { start: 0.1, len: 0.2 });
        assert!((lo - 0.2 * LIPSCHITZ_SAFETY).abs() < 1e-12);
        let hi = m.lipschitz(&Region::Arc { start: 0.95, len: 0.1 });
        assert!((hi - 1.8 * LIPSCHITZ_SAFETY).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_rotation_matrix() {
        let t: f64 = 0.7;
        let m = [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
        assert!((operator_norm(&m) - 1.0).abs() < 1e-12);
        assert!((operator_norm(&[[2.0, 0.0], [0.0, 0.3]]) - 2.0).abs() < 1e-12);
    }
}
