//! Experiment configuration: a `key = value` file overlaid with flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ifslab::circle::presets::CANTOR_LEVEL;
use ifslab::circle::{cantor_candidate, make_preset};
use ifslab::dynamics::schema::{parse_ifs, parse_map_file, parse_real};
use ifslab::dynamics::{Ifs, Point, Space};

/// Keys accepted in config files and, with dashes, as flags.
pub const KEYS: &[&str] = &[
    "preset",
    "ifs",
    "generators",
    "stream",
    "n",
    "burn_in",
    "h",
    "eps",
    "seeds",
    "seed",
    "start",
    "max_iter",
    "max_steps",
    "beam",
    "max_len",
    "depth",
    "target",
    "words",
    "word_len",
    "witness_steps",
    "threshold",
    "direction",
    "diag",
    "drivers",
    "stamping",
    "age",
    "out",
];

/// A configuration problem; the CLI exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Debug)]
enum Origin {
    File { path: PathBuf, line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::File { path, line } => write!(f, "{}:{line}", path.display()),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

/// Raw settings before typing; later sources override earlier ones.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, (String, Origin)>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = Origin::File {
                path: path.to_path_buf(),
                line: i + 1,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("{origin}: expected `key = value`")))?;
            let key = k.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(bad(format!("{origin}: unknown key `{key}`")));
            }
            s.values.insert(key, (v.trim().to_string(), origin));
        }
        Ok(s)
    }

    pub fn set_flag(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), (v, Origin::Flag));
        }
    }

    fn raw(&self, key: &str) -> Option<&(String, Origin)> {
        self.values.get(key)
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, origin)) => parse(v)
                .map(Some)
                .ok_or_else(|| bad(format!("{origin}: field `{key}`: expected {what}, got `{v}`"))),
        }
    }

    fn positive_real(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key, |s| parse_real(s).filter(|v| *v > 0.0), "a positive real such as 1/512")
    }

    fn count(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(key, |s| s.replace('_', "").parse().ok(), "a nonnegative integer")
    }

    fn positive_count(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(key, |s| s.replace('_', "").parse().ok().filter(|v| *v > 0), "a positive integer")
    }

    fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v.clone())
    }
}

fn parse_point(s: &str, space: &Space) -> Option<Point> {
    let v: Vec<f64> = s.split(',').map(parse_real).collect::<Option<_>>()?;
    let p = match (space, v.as_slice()) {
        (Space::Circle, [t]) => Point::circle(*t),
        (Space::PlanarBox { .. }, [x, y]) => Point::plane(*x, *y),
        _ => return None,
    };
    space.accepts(&p).then_some(p)
}

fn parse_arc(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once(',')?;
    let (a, b) = (parse_real(a)?, parse_real(b)?);
    (0.0 <= a && a < b && b <= 1.0).then_some((a, b))
}

/// Fully resolved experiment configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub source: String,
    pub ifs: Ifs,
    pub stream: String,
    pub n: u64,
    pub burn_in: u64,
    pub h: f64,
    pub eps: f64,
    pub seeds: u64,
    pub seed: u64,
    pub start: Point,
    pub max_iter: usize,
    pub max_steps: usize,
    pub beam: usize,
    pub max_len: usize,
    pub depth: usize,
    pub target: (f64, f64),
    pub words: usize,
    pub word_len: usize,
    pub witness_steps: usize,
    pub threshold: f64,
    pub direction: String,
    pub diag: Vec<String>,
    pub drivers: Vec<String>,
    pub stamping: String,
    pub age: bool,
    pub out: PathBuf,
}

fn one_of(key: &str, v: String, allowed: &[&str]) -> Result<String, ConfigError> {
    if allowed.contains(&v.as_str()) {
        Ok(v)
    } else {
        Err(bad(format!("field `{key}`: `{v}` is not one of {}", allowed.join(", "))))
    }
}

fn list(key: &str, v: String, allowed: &[&str]) -> Result<Vec<String>, ConfigError> {
    v.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| one_of(key, s.to_string(), allowed))
        .collect()
}

pub const DIRECTIONS: &[&str] = &["forward", "backward", "both", "none"];
pub const DIAGNOSTICS: &[&str] = &["contractible", "fibre", "skew", "witness", "none"];
pub const DRIVERS: &[&str] = &["bernoulli", "biased", "champernowne", "shuffled"];

impl ExperimentConfig {
    pub fn resolve(s: &Settings) -> anyhow::Result<Self> {
        let preset = match (s.text("preset"), s.text("ifs")) {
            (Some(_), Some(_)) => return Err(bad("give either `preset` or `ifs`, not both").into()),
            (None, None) => return Err(bad("no preset or IFS file given").into()),
            (Some(name), None) if name == "cantor_candidate" => {
                let gens = match s.text("generators") {
                    Some(path) => {
                        let text = std::fs::read_to_string(&path)
                            .map_err(|e| bad(format!("cannot read generators {path}: {e}")))?;
                        parse_map_file(&text).map_err(|e| bad(format!("{path}: {e}")))?.maps
                    }
                    None => Vec::new(),
                };
                Some(cantor_candidate(gens, CANTOR_LEVEL).map_err(|e| bad(e.to_string()))?)
            }
            (Some(name), None) => Some(make_preset(&name).map_err(|e| bad(e.to_string()))?),
            (None, Some(_)) => None,
        };
        let (source, ifs) = match &preset {
            Some(p) => (format!("preset:{}", p.name), p.ifs.clone()),
            None => {
                let path = s.text("ifs").expect("checked above");
                let text =
                    std::fs::read_to_string(&path).map_err(|e| bad(format!("cannot read IFS {path}: {e}")))?;
                let ifs = parse_ifs(&text).map_err(|e| bad(format!("{path}: {e}")))?;
                (format!("ifs:{path}"), ifs)
            }
        };
        let circle = matches!(ifs.space(), Space::Circle);
        let params = preset.as_ref().map(|p| p.params.clone());
        let default_h = params.as_ref().map_or(if circle { 1e-3 } else { 1.0 / 256.0 }, |p| p.h);
        let default_eps = params.as_ref().map_or(if circle { 0.01 } else { 1.0 / 64.0 }, |p| p.eps);
        let default_stream = params
            .as_ref()
            .map_or("champernowne".to_string(), |p| p.stream.to_string());

        let space = ifs.space().clone();
        let start = match s.raw("start") {
            Some((v, origin)) => parse_point(v, &space)
                .ok_or_else(|| bad(format!("{origin}: field `start`: `{v}` is not a point of {space}")))?,
            None => match &space {
                Space::Circle => Point::circle(0.25),
                Space::PlanarBox { min, max } => Point::plane((min[0] + max[0]) / 2.0, (min[1] + max[1]) / 2.0),
            },
        };

        let cfg = ExperimentConfig {
            source,
            stream: s.text("stream").unwrap_or(default_stream),
            n: s.positive_count("n")?.unwrap_or(params.as_ref().map_or(1_000_000, |p| p.n)),
            burn_in: s.count("burn_in")?.unwrap_or(params.as_ref().map_or(100, |p| p.burn_in)),
            h: s.positive_real("h")?.unwrap_or(default_h),
            eps: s.positive_real("eps")?.unwrap_or(default_eps),
            seeds: s.count("seeds")?.unwrap_or(5),
            seed: s.count("seed")?.unwrap_or(1),
            start,
            max_iter: s.positive_count("max_iter")?.unwrap_or(200) as usize,
            max_steps: s.positive_count("max_steps")?.unwrap_or(100_000) as usize,
            beam: s.positive_count("beam")?.unwrap_or(ifslab::tolerances::DEFAULT_BEAM as u64) as usize,
            max_len: s.positive_count("max_len")?.unwrap_or(200) as usize,
            depth: s.positive_count("depth")?.unwrap_or(3) as usize,
            target: s.get("target", parse_arc, "an arc `a,b` with 0 <= a < b <= 1")?.unwrap_or((0.1, 0.9)),
            words: s.positive_count("words")?.unwrap_or(50) as usize,
            word_len: s.positive_count("word_len")?.unwrap_or(20) as usize,
            witness_steps: s.count("witness_steps")?.unwrap_or(1000) as usize,
            threshold: s
                .get("threshold", |v| parse_real(v).filter(|t| (0.0..=1.0).contains(t)), "a real in [0, 1]")?
                .unwrap_or(if circle {
                    ifslab::tolerances::CIRCLE_COVERAGE_THRESHOLD
                } else {
                    ifslab::tolerances::COVERAGE_THRESHOLD
                }),
            direction: one_of("direction", s.text("direction").unwrap_or("both".into()), DIRECTIONS)?,
            diag: list("diag", s.text("diag").unwrap_or("none".into()), DIAGNOSTICS)?,
            drivers: list(
                "drivers",
                s.text("drivers").unwrap_or("bernoulli,champernowne".into()),
                DRIVERS,
            )?,
            stamping: one_of("stamping", s.text("stamping").unwrap_or("nominal".into()), &["nominal", "outer"])?,
            age: s
                .get("age", |v| v.parse::<bool>().ok(), "true or false")?
                .unwrap_or(false),
            out: PathBuf::from(s.text("out").unwrap_or(".".into())),
            ifs,
        };
        if cfg.burn_in >= cfg.n {
            return Err(bad(format!("burn_in {} must be below n {}", cfg.burn_in, cfg.n)).into());
        }
        Ok(cfg)
    }

    /// Comment lines echoing the resolved configuration.
    pub fn header(&self, command: &str) -> Vec<String> {
        let (a, b) = self.target;
        vec![
            format!("ifslab {} {command}", env!("CARGO_PKG_VERSION")),
            format!("source = {}", self.source),
            format!("space = {}", self.ifs.space()),
            format!("maps = {}", self.ifs.specs().map(|m| m.name()).collect::<Vec<_>>().join(",")),
            format!("stream = {}", self.stream),
            format!("n = {}", self.n),
            format!("burn_in = {}", self.burn_in),
            format!("h = {}", self.h),
            format!("eps = {}", self.eps),
            format!("seeds = {}", self.seeds),
            format!("seed = {}", self.seed),
            format!("start = {}", self.start),
            format!("max_iter = {}", self.max_iter),
            format!("max_steps = {}", self.max_steps),
            format!("beam = {}", self.beam),
            format!("max_len = {}", self.max_len),
            format!("depth = {}", self.depth),
            format!("target = {a},{b}"),
            format!("words = {}", self.words),
            format!("word_len = {}", self.word_len),
            format!("witness_steps = {}", self.witness_steps),
            format!("threshold = {}", self.threshold),
            format!("direction = {}", self.direction),
            format!("diag = {}", self.diag.join(",")),
            format!("drivers = {}", self.drivers.join(",")),
            format!("stamping = {}", self.stamping),
        ]
    }
}
