use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn ifslab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifslab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
}

#[test]
fn render_writes_images_and_trace_reproducibly() {
    let dir = TempDir::new().unwrap();
    let args = ["render", "--preset", "sierpinski", "--h", "1/512", "--n", "1000000"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = ifslab(&args, &a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    ifslab(&args, &b);
    for name in ["attractor.pgm", "orbit.pgm", "trace.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap(), "{name} differs between runs");
    }
    let pgm = std::fs::read(a.join("attractor.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n# ifslab"));
    let text = String::from_utf8_lossy(&pgm);
    assert!(text.contains("# h = 0.001953125"));
    assert!(text.contains("\n512 512\n255\n"));
    let trace = std::fs::read_to_string(a.join("trace.csv")).unwrap();
    assert!(trace.starts_with("# ifslab"));
    assert!(trace.lines().any(|l| l == "n,dh,cells"));
    let rec = stdout(&o);
    let cov: f64 = rec.lines().find_map(|l| field(l, "coverage")).unwrap().parse().unwrap();
    assert!(cov >= 0.99, "{rec}");
}

#[test]
fn unknown_preset_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(&["render", "--preset", "no_such_thing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown preset"));
}

#[test]
fn oversized_grid_is_a_budget_error() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(&["render", "--preset", "sierpinski", "--h", "1/100000"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_field_reports_the_config_line() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "preset = ns_pair\neps = zero\n").unwrap();
    let o = ifslab(&["check", "--config", conf.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("run.conf:2") && err.contains("field `eps`"), "{err}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "preset = ns_pair\neps = zero\ndirection = backward\n").unwrap();
    let o = ifslab(&["check", "--config", conf.to_str().unwrap(), "--eps", "1/50"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(stdout(&o).trim(), "eps"), Some("0.02"));
}

#[test]
fn north_south_pair_is_not_backward_minimal() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(&["check", "--preset", "ns_pair", "--direction", "backward"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rec = stdout(&o);
    assert_eq!(field(&rec, "verdict"), Some("not_minimal"), "{rec}");
    let witness = std::fs::read_to_string(dir.path().join("witness_backward.rle")).unwrap();
    assert!(witness.starts_with("# ifslab") && witness.contains("space = circle"));
    let verdicts = std::fs::read_to_string(dir.path().join("verdicts.txt")).unwrap();
    assert!(verdicts.contains("record=minimality"));
}

#[test]
fn circle_minimal_is_minimal_both_ways() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(&["check", "--preset", "circle_minimal", "--direction", "both"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rec = stdout(&o);
    let verdicts: Vec<_> = rec.lines().filter_map(|l| field(l, "verdict")).collect();
    assert_eq!(verdicts, ["minimal_at_resolution", "minimal_at_resolution"], "{rec}");
}

#[test]
fn example_44_contracts() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(
        &["check", "--preset", "circle_example_44", "--direction", "none", "--diag", "contractible"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let rec = stdout(&o);
    let best: f64 = field(&rec, "best_diameter").unwrap().parse().unwrap();
    assert!(best < 0.01, "{rec}");
}

#[test]
fn compare_writes_one_curve_per_driver_and_seed() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(
        &[
            "compare", "--preset", "sierpinski", "--drivers", "bernoulli,champernowne", "--seeds", "5", "--n", "100000",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let mut rows = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next(), Some("step,coverage,driver,seed"));
    let mut curves: Vec<(String, Vec<u64>)> = Vec::new();
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let key = format!("{},{}", f[2], f[3]);
        let step: u64 = f[0].parse().unwrap();
        match curves.iter_mut().find(|c| c.0 == key) {
            Some(c) => c.1.push(step),
            None => curves.push((key, vec![step])),
        }
    }
    assert_eq!(curves.len(), 6);
    assert!(curves.iter().all(|c| c.1 == curves[0].1), "step grids differ");
}

#[test]
fn compare_without_seeds_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = ifslab(&["compare", "--preset", "sierpinski", "--seeds", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cantor_candidate_takes_a_generator_file() {
    let dir = TempDir::new().unwrap();
    let gens = dir.path().join("gens.txt");
    std::fs::write(&gens, "[map]\nkind = rotation\nangle = 0.6180339887\n").unwrap();
    let o = ifslab(
        &[
            "check",
            "--preset",
            "cantor_candidate",
            "--generators",
            gens.to_str().unwrap(),
            "--direction",
            "forward",
            "--max-steps",
            "50",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let verdicts = std::fs::read_to_string(dir.path().join("verdicts.txt")).unwrap();
    assert!(verdicts.contains("# maps = rotation,pl_circle"), "{verdicts}");
}
