//! Named IFS presets. Every constant the presets use lives in this file.

use super::{cantor_expanding_homeo, standard_pair, CircleError};
use crate::dynamics::{Ifs, MapSpec, Space};

/// Golden-ratio conjugate, the pinned irrational rotation angle.
pub const GOLDEN_ROTATION: f64 = 0.618_033_988_7;
/// Strength `c` of the parabolic map `t + c·sin²(πt)`.
pub const PARABOLIC_STRENGTH: f64 = 0.2;
/// Attracting and repelling fixed points of the North-South maps.
pub const NS_ATTRACTING: f64 = 0.0;
pub const NS_REPELLING: f64 = 0.5;
/// Multipliers at the attracting point.
pub const MOEBIUS_MULTIPLIER: f64 = 0.5;
pub const MOEBIUS_MULTIPLIER_SQUARED: f64 = 0.25;
/// Construction level for the Cantor-expanding homeomorphism.
pub const CANTOR_LEVEL: usize = 8;

pub const SIERPINSKI_RATIO: f64 = 0.5;
pub const SIERPINSKI_VERTICES: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Classical fern coefficients, `(matrix, translation)`.
pub const FERN_MAPS: [([[f64; 2]; 2], [f64; 2]); 4] = [
    ([[0.0, 0.0], [0.0, 0.16]], [0.0, 0.0]),
    ([[0.85, 0.04], [-0.04, 0.85]], [0.0, 1.6]),
    ([[0.2, -0.26], [0.23, 0.22]], [0.0, 1.6]),
    ([[-0.15, 0.28], [0.26, 0.24]], [0.0, 0.44]),
];
/// Box mapped into itself by all four fern maps.
pub const FERN_BOX: ([f64; 2], [f64; 2]) = ([-6.0, -2.0], [6.0, 13.0]);

const NAMES: [&str; 6] = [
    "sierpinski",
    "fern",
    "circle_minimal",
    "circle_example_44",
    "ns_pair",
    "cantor_candidate",
];

/// Parameters an experiment on the preset should start from.
#[derive(Clone, Debug, PartialEq)]
pub struct RecommendedParams {
    pub h: f64,
    pub n: u64,
    pub burn_in: u64,
    pub eps: f64,
    pub stream: &'static str,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub ifs: Ifs,
    pub provenance: &'static str,
    pub params: RecommendedParams,
}

pub fn preset_names() -> &'static [&'static str] {
    &NAMES
}

fn circle_params(h: f64) -> RecommendedParams {
    RecommendedParams {
        h,
        n: 1_000_000,
        burn_in: 100,
        eps: 0.01,
        stream: "champernowne",
    }
}

pub fn make_preset(name: &str) -> Result<Preset, CircleError> {
    let preset = match name {
        "sierpinski" => {
            let m = [[SIERPINSKI_RATIO, 0.0], [0.0, SIERPINSKI_RATIO]];
            let maps = SIERPINSKI_VERTICES
                .iter()
                .map(|v| MapSpec::affine(m, [v[0] * (1.0 - SIERPINSKI_RATIO), v[1] * (1.0 - SIERPINSKI_RATIO)]))
                .collect();
            Preset {
                name: "sierpinski",
                ifs: Ifs::new(Space::unit_square(), maps)?,
                provenance: "Sierpinski triangle: three half-scale contractions toward (0,0), (1,0), (0,1)",
                params: RecommendedParams {
                    h: 1.0 / 256.0,
                    n: 1_000_000,
                    burn_in: 100,
                    eps: 1.0 / 64.0,
                    stream: "bernoulli:uniform:1",
                },
            }
        }
        "fern" => {
            let maps = FERN_MAPS.iter().map(|&(m, t)| MapSpec::affine(m, t)).collect();
            Preset {
                name: "fern",
                ifs: Ifs::new(Space::planar_box(FERN_BOX.0, FERN_BOX.1)?, maps)?,
                provenance: "Barnsley fern with the classical four affine maps",
                params: RecommendedParams {
                    h: 1.0 / 64.0,
                    n: 1_000_000,
                    burn_in: 100,
                    eps: 1.0 / 16.0,
                    stream: "bernoulli:0.01,0.85,0.07,0.07:1",
                },
            }
        }
        "circle_minimal" => Preset {
            name: "circle_minimal",
            ifs: Ifs::new(
                Space::Circle,
                vec![
                    MapSpec::rotation(GOLDEN_ROTATION),
                    MapSpec::moebius(NS_ATTRACTING, NS_REPELLING, MOEBIUS_MULTIPLIER),
                ],
            )?,
            provenance: "irrational rotation with a North-South map: forward and backward minimal, \
                         so every disjunctive chaos game draws the circle",
            params: circle_params(1e-3),
        },
        "circle_example_44" => Preset {
            name: "circle_example_44",
            ifs: Ifs::new(
                Space::Circle,
                vec![MapSpec::rotation(GOLDEN_ROTATION), MapSpec::parabolic(PARABOLIC_STRENGTH)],
            )?,
            provenance: "irrational rotation with a parabolic map fixing 0: contractible but not strongly fibred",
            params: circle_params(1e-3),
        },
        "ns_pair" => Preset {
            name: "ns_pair",
            ifs: Ifs::new(
                Space::Circle,
                vec![
                    MapSpec::moebius(NS_ATTRACTING, NS_REPELLING, MOEBIUS_MULTIPLIER),
                    MapSpec::moebius(NS_ATTRACTING, NS_REPELLING, MOEBIUS_MULTIPLIER_SQUARED),
                ],
            )?,
            provenance: "two North-South maps sharing fixed points: forward orbits collapse to 0, \
                         so the system is not backward minimal",
            params: circle_params(1e-3),
        },
        "cantor_candidate" => cantor_candidate(Vec::new(), CANTOR_LEVEL)?,
        other => return Err(CircleError::UnknownPreset(other.to_string())),
    };
    Ok(preset)
}

/// User-supplied circle generators followed by the Cantor-expanding
/// homeomorphism of the middle-thirds set on `[0, 1/3]` at `level`.
pub fn cantor_candidate(generators: Vec<MapSpec>, level: usize) -> Result<Preset, CircleError> {
    let (k, big) = standard_pair(level)?;
    let mut maps = generators;
    maps.push(cantor_expanding_homeo(&k, &big)?);
    Ok(Preset {
        name: "cantor_candidate",
        ifs: Ifs::new(Space::Circle, maps)?,
        provenance: "candidate with an exceptional Cantor set K: user generators plus a homeomorphism h \
                     with h(K) strictly containing K",
        params: circle_params(1e-3),
    })
}
