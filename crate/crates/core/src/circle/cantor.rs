use super::CircleError;
use crate::dynamics::{Map, MapSpec};

/// Tolerance for comparing arc endpoints after PL evaluation.
pub const ARC_TOL: f64 = 1e-12;

/// Deepest supported construction level.
pub const MAX_LEVEL: usize = 20;

/// Finite-level approximation of a Cantor set: disjoint closed arcs `[s, e]`
/// with `0 ≤ s < e < 1`, sorted by start.
#[derive(Clone, Debug, PartialEq)]
pub struct CantorApprox {
    pub level: usize,
    pub arcs: Vec<(f64, f64)>,
    pub ratio: f64,
    pub base: (f64, f64),
}

fn split(arcs: &[(f64, f64)], ratio: f64) -> Vec<(f64, f64)> {
    arcs.iter()
        .flat_map(|&(s, e)| {
            let l = (e - s) * ratio;
            [(s, s + l), (e - l, e)]
        })
        .collect()
}

/// Keeps the outer fraction `ratio` at both ends of every arc, `level` times
/// (the middle-thirds set for `ratio = 1/3`).
pub fn cantor_set(base: (f64, f64), ratio: f64, level: usize) -> Result<CantorApprox, CircleError> {
    if level > MAX_LEVEL {
        return Err(CircleError::Budget(format!("level {level} exceeds {MAX_LEVEL}")));
    }
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(CircleError::InvalidArc(format!("ratio {ratio} must lie in (0, 1/2)")));
    }
    if !(base.0 >= 0.0 && base.0 < base.1 && base.1 < 1.0) {
        return Err(CircleError::InvalidArc(format!(
            "base arc [{}, {}] must satisfy 0 <= start < end < 1",
            base.0, base.1
        )));
    }
    let mut arcs = vec![base];
    for _ in 0..level {
        arcs = split(&arcs, ratio);
    }
    Ok(CantorApprox {
        level,
        arcs,
        ratio,
        base,
    })
}

impl CantorApprox {
    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|(s, e)| e - s).sum()
    }

    /// The next construction level.
    pub fn refine(&self) -> CantorApprox {
        CantorApprox {
            level: self.level + 1,
            arcs: split(&self.arcs, self.ratio),
            ratio: self.ratio,
            base: self.base,
        }
    }

    /// Rotated copy; the translated arcs must not straddle 0.
    pub fn translate(&self, d: f64) -> Result<CantorApprox, CircleError> {
        let arcs: Vec<(f64, f64)> = self.arcs.iter().map(|&(s, e)| (s + d, e + d)).collect();
        if arcs.iter().any(|&(s, e)| s < 0.0 || e >= 1.0) {
            return Err(CircleError::InvalidArc(format!("translation by {d} wraps an arc around 0")));
        }
        Ok(CantorApprox {
            level: self.level,
            arcs,
            ratio: self.ratio,
            base: (self.base.0 + d, self.base.1 + d),
        })
    }

    /// Union with a disjoint approximation at the same level.
    pub fn union(&self, other: &CantorApprox) -> Result<CantorApprox, CircleError> {
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
        if arcs.windows(2).any(|w| w[1].0 <= w[0].1) {
            return Err(CircleError::InvalidArc("arcs of a union must be disjoint".into()));
        }
        Ok(CantorApprox {
            level: self.level.max(other.level),
            arcs,
            ratio: self.ratio,
            base: (self.base.0.min(other.base.0), self.base.1.max(other.base.1)),
        })
    }

    pub fn contains(&self, t: f64) -> bool {
        self.arcs.iter().any(|&(s, e)| s - ARC_TOL <= t && t <= e + ARC_TOL)
    }

    fn is_valid(&self) -> bool {
        self.arcs.iter().all(|&(s, e)| 0.0 <= s && s < e && e < 1.0)
            && self.arcs.windows(2).all(|w| w[0].1 < w[1].0)
    }
}

/// PL circle homeomorphism sending the arc endpoints of `k` onto those of
/// `k_big` in order, first arc to first arc, affine on the gaps between.
///
/// When `k_big` has twice as many arcs, `k` is refined one level first, so
/// that `h` maps the refined arcs of `k` onto the arcs of `k_big` and
/// `h(k) ⊇ k_big`.
pub fn cantor_expanding_homeo(k: &CantorApprox, k_big: &CantorApprox) -> Result<MapSpec, CircleError> {
    if !k.is_valid() || !k_big.is_valid() {
        return Err(CircleError::IncompatibleStructure(
            "arcs must be disjoint, ordered and inside [0, 1)".into(),
        ));
    }
    let source = if k.arcs.len() == k_big.arcs.len() {
        k.clone()
    } else {
        k.refine()
    };
    if source.arcs.len() != k_big.arcs.len() {
        return Err(CircleError::IncompatibleStructure(format!(
            "{} arcs cannot be matched with {} arcs",
            k.arcs.len(),
            k_big.arcs.len()
        )));
    }
    let breakpoints: Vec<(f64, f64)> = source
        .arcs
        .iter()
        .zip(&k_big.arcs)
        .flat_map(|(a, b)| [(a.0, b.0), (a.1, b.1)])
        .collect();
    let spec = MapSpec::PLCircleHomeo { breakpoints };
    Map::new(spec.clone())
        .map_err(|e| CircleError::IncompatibleStructure(format!("endpoint matching is not a homeomorphism: {e}")))?;
    Ok(spec)
}

/// Arc-by-arc comparison of `h(K)` with `K` at the level of `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionCheck {
    /// Every arc of `K` lies inside some image arc `h([s, e])`.
    pub contained: bool,
    /// Some image arc meets the complement of `K`.
    pub strict: bool,
    pub uncovered_arcs: usize,
    pub image_arcs: Vec<(f64, f64)>,
}

/// Image arc `h([s, e])` as a lift interval; `h` is increasing, so the image
/// of an arc is the arc between the endpoint images.
fn image_arc(h: &Map, (s, e): (f64, f64)) -> (f64, f64) {
    let a = h.lift(s);
    let b = h.lift(e);
    let shift = a.floor();
    (a - shift, b - shift)
}

fn arc_inside(inner: (f64, f64), outer: (f64, f64)) -> bool {
    // compare on lifts, allowing for an outer arc running past 1
    [0.0, 1.0].iter().any(|&k| outer.0 - ARC_TOL <= inner.0 + k && inner.1 + k <= outer.1 + ARC_TOL)
}

pub fn verify_expansion(h: &MapSpec, k: &CantorApprox) -> Result<ExpansionCheck, CircleError> {
    let map = Map::new(h.clone())?;
    let image_arcs: Vec<(f64, f64)> = k.arcs.iter().map(|&a| image_arc(&map, a)).collect();
    let uncovered_arcs = k
        .arcs
        .iter()
        .filter(|&&a| !image_arcs.iter().any(|&img| arc_inside(a, img)))
        .count();
    // an image arc meets Kᶜ unless it sits inside a single arc of K
    let strict = image_arcs
        .iter()
        .any(|&img| !k.arcs.iter().any(|&a| arc_inside(img, a)));
    Ok(ExpansionCheck {
        contained: uncovered_arcs == 0,
        strict,
        uncovered_arcs,
        image_arcs,
    })
}

/// The standard pair: `K` is the middle-thirds set on `[0, 1/3]` at `level`,
/// `K_big` is `K` together with its rotation by 1/2.
pub fn standard_pair(level: usize) -> Result<(CantorApprox, CantorApprox), CircleError> {
    let k = cantor_set((0.0, 1.0 / 3.0), 1.0 / 3.0, level)?;
    let big = k.union(&k.translate(0.5)?)?;
    Ok((k, big))
}
