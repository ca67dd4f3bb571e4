//! End-to-end runs of the `accelerograph` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_accelerograph"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// A 26×20 corpus and the training set built from it, shared by the tests.
struct Fixture {
    dir: TempDir,
    train_stderr: String,
}

impl Fixture {
    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn set(&self) -> PathBuf {
        self.path().join("set.json")
    }
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        ok(dir.path(), &["synth", "--corpus", "20", "--out", "corpus"]);
        let out = ok(dir.path(), &["train", "corpus", "--out", "set.json", "-v"]);
        Fixture {
            train_stderr: stderr(&out),
            dir,
        }
    })
}

fn write_flat(path: &Path) {
    let mut text = String::from("time,x,y,z\n");
    for i in 0..200 {
        text.push_str(&format!("{},0,0,9.81\n", i * 10));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn segment_lists_one_range_per_letter() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "3", "--out", "cab.csv"]);
    assert_eq!(fs::read_to_string(dir.path().join("cab.truth.csv")).unwrap(), "cab.csv,CAB\n");
    let out = ok(dir.path(), &["segment", "cab.csv"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["format_version"], 1);
    assert_eq!(doc["window"], 10);
    let segs = doc["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 3);
    for s in segs {
        assert!(s["start"].as_u64() < s["end"].as_u64());
        assert_eq!(s["curve"]["points"].as_array().unwrap().len(), 100);
    }
    let c = &doc["cutoffs"];
    let (k, g, b) = (c["kmeans_cut"].as_f64().unwrap(), c["gmm_cut"].as_f64().unwrap(), c["bagged_cut"].as_f64().unwrap());
    assert!(k.min(g) <= b && b <= k.max(g));
}

#[test]
fn synth_then_segment_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let s = seed.to_string();
        ok(dir.path(), &["synth", "--random", "6", "--seed", &s, "--out", "r.csv"]);
        let truth = fs::read_to_string(dir.path().join("r.truth.csv")).unwrap();
        let letters = truth.trim().split_once(',').unwrap().1.len();
        ok(dir.path(), &["segment", "r.csv", "--out", "r.json"]);
        assert_eq!(json(&dir.path().join("r.json"))["segments"].as_array().unwrap().len(), letters, "seed {seed}");
    }
}

#[test]
fn flat_trace_has_no_jerks() {
    let dir = tempfile::tempdir().unwrap();
    write_flat(&dir.path().join("flat.csv"));
    let out = run(dir.path(), &["segment", "flat.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("no jerks detected"));
}

#[test]
fn variance_plot_has_three_cutoffs() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "GRAVITY", "--seed", "2", "--out", "g.csv"]);
    ok(dir.path(), &["segment", "g.csv", "--plot", "--out", "g.json"]);
    let svg = fs::read_to_string(dir.path().join("g.variance.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"<line class="cutoff""#).count(), 3);
    for name in ["kmeans", "gmm", "bagged"] {
        assert!(svg.contains(&format!(">{name} ")), "{name}");
    }
    assert_eq!(svg.matches(r#"<path class="variance""#).count(), 1);

    // the same chart from the saved segments file
    ok(dir.path(), &["plot", "g.json", "--kind", "variance", "--out", "v.svg"]);
    assert_eq!(fs::read_to_string(dir.path().join("v.svg")).unwrap(), svg);
}

#[test]
fn training_corpus_builds_nominal_families() {
    let f = fixture();
    let set = json(&f.set());
    let templates = set["templates"].as_array().unwrap();
    let dropped = f.train_stderr.matches("dropped ").count();
    let skipped = f.train_stderr.matches("skipped ").count();
    assert_eq!(templates.len() + dropped + skipped, 520, "{}", f.train_stderr);
    assert!(skipped <= 5 && dropped <= 26, "{}", f.train_stderr);
    assert_eq!(set["meta"]["format_version"], 1);
    for t in templates {
        let letter = t["letter"].as_str().unwrap().chars().next().unwrap();
        let nominal = accelerograph::Letter::new(letter).unwrap().entry().nominal_axis_class();
        assert_eq!(t["axis_class"], nominal.as_str());
    }
}

#[test]
fn training_skips_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "AA", "--seed", "2", "--out", "c/A_1.csv"]);
    fs::remove_file(dir.path().join("c/A_1.truth.csv")).unwrap();
    ok(dir.path(), &["synth", "B", "--seed", "4", "--out", "c/B_1.csv"]);
    fs::remove_file(dir.path().join("c/B_1.truth.csv")).unwrap();
    let out = ok(dir.path(), &["train", "c", "--out", "s.json"]);
    let err = stderr(&out);
    assert!(err.contains("A_1.csv") && err.contains("segmentation mismatch"), "{err}");
    let set = json(&dir.path().join("s.json"));
    assert_eq!(set["templates"].as_array().unwrap().len(), 1);
    assert_eq!(set["templates"][0]["letter"], "B");

    let empty = tempfile::tempdir().unwrap();
    let out = run(empty.path(), &["train", "."]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn classify_reads_cab() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "1", "--out", "cab.csv"]);
    let set = f.set();
    let out = ok(dir.path(), &["classify", "cab.csv", set.to_str().unwrap(), "--verbose"]);
    assert_eq!(stdout(&out), "CAB\n");
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 3);
    for key in ["pve", "axis", "distance", "runner-up"] {
        assert!(err.contains(key), "{key}: {err}");
    }
}

#[test]
fn classify_rejects_empty_or_mismatched_sets() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "1", "--out", "cab.csv"]);
    let mut set = json(&f.set());
    set["templates"] = Value::Array(Vec::new());
    fs::write(dir.path().join("empty.json"), set.to_string()).unwrap();
    assert_eq!(run(dir.path(), &["classify", "cab.csv", "empty.json"]).status.code(), Some(4));

    let set = f.set();
    let out = run(dir.path(), &["classify", "cab.csv", set.to_str().unwrap(), "--spar", "0.7"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_letters_exit_five() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "1", "--out", "cab.csv"]);
    // keep only the x-axis templates, so 'A' has nothing to match
    let mut set = json(&f.set());
    let kept: Vec<Value> = set["templates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["axis_class"] == "x_axis")
        .cloned()
        .collect();
    set["templates"] = Value::Array(kept);
    fs::write(dir.path().join("x.json"), set.to_string()).unwrap();
    let out = run(dir.path(), &["classify", "cab.csv", "x.json"]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(stdout(&out), "C?B\n");
}

#[test]
fn evaluate_counts_echo_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["evaluate", "--counts", "4,5,30"]);
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((r["p_hat"].as_f64().unwrap() - 0.02667).abs() < 5e-4);
    assert!((r["ci"][0].as_f64().unwrap() - 0.0009).abs() < 5e-4);
    assert!((r["ci"][1].as_f64().unwrap() - 0.0524).abs() < 5e-4);
    assert_eq!(r["degenerate"], false);
    for key in ["format_version", "gamma", "n", "k", "confusion"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    assert_eq!(run(dir.path(), &["evaluate", "--counts", "4,5"]).status.code(), Some(2));
}

#[test]
fn evaluate_excludes_segmentation_failures() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "1", "--out", "t/cab.csv"]);
    ok(dir.path(), &["synth", "INK", "--seed", "3", "--out", "t/ink.csv"]);
    fs::write(dir.path().join("truth.csv"), "file,letters\ncab.csv,CAB\nink.csv,INKS\n").unwrap();
    let set = f.set();
    let out = ok(
        dir.path(),
        &["evaluate", "t", "--truth", "truth.csv", "--training-set", set.to_str().unwrap()],
    );
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(r["gamma"], 0);
    assert_eq!(r["p_hat"], 0.0);
    assert_eq!(r["degenerate"], true);
    assert_eq!(r["n"], 3);
    assert_eq!(r["confusion"]["C"]["C"], 1);
    let failures = r["segmentation_failures"].as_array().unwrap();
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0]["file"], "ink.csv");
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--random", "30", "--seed", "7", "--out", "a.csv"]);
    ok(dir.path(), &["synth", "--random", "30", "--seed", "7", "--out", "b.csv"]);
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    let truth = |n: &str| String::from_utf8(read(n)).unwrap().split_once(',').unwrap().1.to_string();
    assert_eq!(truth("a.truth.csv"), truth("b.truth.csv"));
    assert_eq!(truth("a.truth.csv").trim().len(), 30);
    ok(dir.path(), &["synth", "--random", "30", "--seed", "8", "--out", "c.csv"]);
    assert_ne!(read("a.csv"), read("c.csv"));
}

#[test]
fn heatmaps_one_per_family() {
    let f = fixture();
    let dir = tempfile::tempdir().unwrap();
    let set = f.set();
    let out = ok(dir.path(), &["plot", set.to_str().unwrap(), "--kind", "heatmap", "--out", "h.svg"]);
    let text = stdout(&out);
    let files: Vec<&str> = text.lines().map(|l| Path::new(l).file_name().unwrap().to_str().unwrap()).collect();
    assert_eq!(files, ["h.heatmap-x_axis.svg", "h.heatmap-y_axis.svg", "h.heatmap-both_axes.svg"]);
    let set = json(&f.set());
    let count = |axis: &str| set["templates"].as_array().unwrap().iter().filter(|t| t["axis_class"] == axis).count();
    for axis in ["x_axis", "y_axis", "both_axes"] {
        let svg = fs::read_to_string(dir.path().join(format!("h.heatmap-{axis}.svg"))).unwrap();
        assert_eq!(svg.matches(r#"class="cell""#).count(), count(axis).pow(2), "{axis}");
        // zero diagonal is pure blue
        assert!(svg.contains("fill=\"#0000ff\""));
    }
}

/// Bounding box of the first `trajectory` path, in SVG coordinates.
fn path_bbox(svg: &str) -> (f64, f64) {
    let start = svg.find(r#"class="trajectory" d=""#).unwrap() + r#"class="trajectory" d=""#.len();
    let d = &svg[start..start + svg[start..].find('"').unwrap()];
    let nums: Vec<f64> = d
        .split(|c: char| c == 'M' || c == 'L' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().unwrap())
        .collect();
    let span = |k: usize| {
        let vals = nums.iter().skip(k).step_by(2);
        let lo = vals.clone().fold(f64::INFINITY, |a, &b| a.min(b));
        let hi = vals.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        hi - lo
    };
    (span(0), span(1))
}

#[test]
fn xy_plot_of_b_runs_along_x() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "B", "--seed", "5", "--out", "b.csv"]);
    ok(dir.path(), &["segment", "b.csv", "--out", "b.json"]);
    ok(dir.path(), &["plot", "b.json", "--kind", "xy", "--out", "b.svg"]);
    let (w, h) = path_bbox(&fs::read_to_string(dir.path().join("b.svg")).unwrap());
    assert!(w > 250.0 && h < 0.1 * w, "{w} x {h}");

    ok(dir.path(), &["plot", "b.json", "--kind", "axes", "--out", "a.svg"]);
    let axes = fs::read_to_string(dir.path().join("a.svg")).unwrap();
    assert!(axes.contains(r#"class="axis-x""#) && axes.contains(r#"class="axis-y""#));
}

#[test]
fn plot_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "B", "--seed", "5", "--out", "b.csv"]);
    ok(dir.path(), &["segment", "b.csv", "--out", "b.json"]);
    assert_eq!(run(dir.path(), &["plot", "b.json", "--kind", "contour"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["plot", "b.json", "--kind", "heatmap"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["synth"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "3", "--out", "cab.csv"]);
    fs::write(dir.path().join("cfg.json"), r#"{"window": 12, "synth": {"seed": 3}}"#).unwrap();
    let window = |args: &[&str]| {
        let out = ok(dir.path(), args);
        serde_json::from_str::<Value>(&stdout(&out)).unwrap()["window"].as_u64().unwrap()
    };
    assert_eq!(window(&["segment", "cab.csv"]), 10);
    assert_eq!(window(&["segment", "cab.csv", "--config", "cfg.json"]), 12);
    assert_eq!(window(&["segment", "cab.csv", "--config", "cfg.json", "--window", "11"]), 11);

    // the config seed drives synth like --seed does
    ok(dir.path(), &["synth", "CAB", "--config", "cfg.json", "--out", "again.csv"]);
    assert_eq!(fs::read(dir.path().join("cab.csv")).unwrap(), fs::read(dir.path().join("again.csv")).unwrap());

    fs::write(dir.path().join("bad.json"), r#"{"window": 1}"#).unwrap();
    assert_eq!(run(dir.path(), &["segment", "cab.csv", "--config", "bad.json"]).status.code(), Some(2));
}

#[test]
fn columns_by_name_and_index() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "CAB", "--seed", "3", "--out", "cab.csv"]);
    let text = fs::read_to_string(dir.path().join("cab.csv")).unwrap();
    let mut shuffled = String::from("az,stamp,ay,ax\n");
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        shuffled.push_str(&format!("{},{},{},{}\n", f[3], f[0], f[2], f[1]));
    }
    fs::write(dir.path().join("s.csv"), shuffled).unwrap();
    let base = stdout(&ok(dir.path(), &["segment", "cab.csv"]));
    let named = stdout(&ok(
        dir.path(),
        &["segment", "s.csv", "--time-col", "stamp", "--x-col", "ax", "--y-col", "ay", "--z-col", "az"],
    ));
    let indexed = stdout(&ok(
        dir.path(),
        &["segment", "s.csv", "--time-col", "1", "--x-col", "3", "--y-col", "2", "--z-col", "0"],
    ));
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v["source"] = Value::Null;
        v
    };
    assert_eq!(strip(&named), strip(&base));
    assert_eq!(strip(&indexed), strip(&base));
}
