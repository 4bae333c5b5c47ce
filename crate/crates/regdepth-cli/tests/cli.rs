//! End-to-end tests for the `regdepth` binary: documented example values,
//! the exit-code contract, and the contour grid's relation to the deepest
//! fit. Everything runs the real executable against the shipped fixtures.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_regdepth")
}

fn fixture(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], envs: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(bin());
    // a seed in the ambient environment must not leak into the tests
    cmd.args(args).env_remove("REGDEPTH_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("failed to spawn regdepth");
    Run {
        code: out.status.code().expect("process terminated by signal"),
        stdout: String::from_utf8(out.stdout).expect("stdout is not utf-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is not utf-8"),
    }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

fn json(r: &Run) -> serde_json::Value {
    serde_json::from_str(r.stdout.trim()).expect("stdout is not a single JSON object")
}

fn f(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing numeric field {key}"))
}

#[test]
fn rd_exact_is_one_on_a_collinear_fit() {
    let r = run(&[
        "depth",
        &fixture("collinear.csv"),
        "--depth",
        "rd",
        "--method",
        "exact",
        "--beta",
        "1,2",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    assert_eq!(f(&v, "value"), 1.0);
    assert_eq!(v["counts"][0], 5);
    assert_eq!(v["counts"][1], 5);
    assert_eq!(v["depth_family"], "rd");
    assert_eq!(v["method"], "exact");
}

#[test]
fn dc_exact_is_half_at_the_origin_of_the_split_fixture() {
    let r = run(&[
        "depth",
        &fixture("dc_p3.csv"),
        "--depth",
        "dc",
        "--beta",
        "0,0",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    assert_eq!(f(&v, "value"), 0.5);
    assert_eq!(v["counts"][0], 2);
    assert_eq!(v["counts"][1], 4);
}

#[test]
fn strict_two_sided_form_drops_zero_residual_points() {
    let r = run(&[
        "depth",
        &fixture("lad_outlier.csv"),
        "--depth",
        "rd",
        "--method",
        "baihe",
        "--beta",
        "0,1",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    // three residuals are exactly zero, so every direction has at most
    // one strict sign and min(pos, neg) collapses to 0
    assert_eq!(f(&json(&r), "value"), 0.0);
}

#[test]
fn least_squares_matches_the_hand_derived_slope() {
    let r = run(&[
        "fit",
        &fixture("simple3.csv"),
        "--method",
        "ls",
        "--no-intercept",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    let coef = v["coef"][0].as_f64().unwrap();
    assert!(
        (coef - 16.0 / 7.0).abs() < 1e-10,
        "ls slope {coef} is not 16/7"
    );
}

#[test]
fn lad_fit_ignores_the_outlier() {
    let r = run(&[
        "fit",
        &fixture("lad_outlier.csv"),
        "--method",
        "lad",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    assert_eq!(v["coef"][0].as_f64().unwrap(), 0.0);
    assert_eq!(v["coef"][1].as_f64().unwrap(), 1.0);
}

#[test]
fn axiom_suite_with_an_expected_violation_exits_zero() {
    let r = run(&[
        "axioms",
        "--depth",
        "dc",
        "--suite",
        "p3",
        "--trials",
        "25",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    assert_eq!(v["passed"], true);
    let rep = &v["reports"][0];
    assert!(rep["n_violations"].as_u64().unwrap() >= 1);
    assert_eq!(rep["expects_violation"], true);
}

#[test]
fn axiom_suite_with_unexpected_violations_exits_one() {
    // the count depth is not quasi-concave; this seed finds witnesses
    let r = run(&[
        "axioms",
        "--depth",
        "rd",
        "--suite",
        "qc",
        "--trials",
        "1000",
        "--seed",
        "630",
    ]);
    assert_eq!(r.code, 1, "stderr: {}", r.stderr);
    let v = json(&r);
    assert_eq!(v["passed"], false);
    assert!(v["reports"][0]["n_violations"].as_u64().unwrap() >= 1);
}

#[test]
fn location_depth_of_the_square_center_is_three_fifths() {
    let r = run(&[
        "location-hd",
        &fixture("square5.csv"),
        "--point",
        "0.5,0.5",
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    assert!((f(&v, "hd") - 0.6).abs() < 1e-15);
    let nd = f(&v, "nd");
    let hd = f(&v, "hd");
    assert!(nd >= hd && nd <= hd + 0.2 + 1e-15);
}

#[test]
fn malformed_csv_exits_two_with_no_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,notanumber\n").unwrap();
    let r = run(&[
        "depth",
        bad.to_str().unwrap(),
        "--depth",
        "rd",
        "--beta",
        "0,0",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty(), "partial output: {}", r.stdout);
    assert!(r.stderr.contains("row 2"), "stderr: {}", r.stderr);
}

#[test]
fn missing_input_file_exits_two() {
    let r = run(&[
        "depth",
        "/nonexistent/input.csv",
        "--depth",
        "rd",
        "--beta",
        "0,0",
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
}

#[test]
fn wrong_coefficient_arity_exits_three_with_no_partial_output() {
    let r = run(&[
        "depth",
        &fixture("collinear.csv"),
        "--depth",
        "rd",
        "--beta",
        "0,0,0",
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.is_empty(), "partial output: {}", r.stdout);
    assert!(
        r.stderr.contains("dimension mismatch"),
        "stderr does not name the precondition: {}",
        r.stderr
    );
}

#[test]
fn unknown_method_value_exits_two_with_usage_text() {
    let r = run(&[
        "fit",
        &fixture("simple3.csv"),
        "--method",
        "banana",
    ]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("possible values") || r.stderr.contains("Usage"),
        "stderr: {}",
        r.stderr
    );
}

#[test]
fn seed_env_var_is_a_fallback_and_the_flag_wins() {
    let from_env = run_env(
        &[
            "depth",
            &fixture("lad_outlier.csv"),
            "--depth",
            "rd",
            "--method",
            "sampled",
            "--beta",
            "0,1",
        ],
        &[("REGDEPTH_SEED", "9")],
    );
    assert_eq!(json(&from_env)["seed"], 9);

    let flag_wins = run_env(
        &[
            "depth",
            &fixture("lad_outlier.csv"),
            "--depth",
            "rd",
            "--method",
            "sampled",
            "--beta",
            "0,1",
            "--seed",
            "4",
        ],
        &[("REGDEPTH_SEED", "9")],
    );
    assert_eq!(json(&flag_wins)["seed"], 4);
}

#[test]
fn contour_refuses_non_planar_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let r = run(&[
        "contour",
        &fixture("simple3.csv"),
        "--no-intercept",
        "--depth",
        "rd",
        "--steps",
        "5",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 3);
    assert!(!out.exists(), "grid file written despite the error");
}

#[test]
fn contour_refuses_an_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let r = run(&[
        "contour",
        &fixture("dc_p3.csv"),
        "--depth",
        "rd",
        "--steps",
        "0",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 3);
    assert!(!out.exists());
}

#[test]
fn contour_refuses_inverted_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let r = run(&[
        "contour",
        &fixture("dc_p3.csv"),
        "--depth",
        "rd",
        "--steps",
        "3",
        "--b1-min",
        "2",
        "--b1-max",
        "-2",
        "--b2-min",
        "0",
        "--b2-max",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("min < max"), "stderr: {}", r.stderr);
    assert!(!out.exists());
}

fn read_grid(path: &Path) -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(path).expect("grid file readable");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("beta1,beta2,depth"));
    lines
        .map(|line| {
            let mut it = line.split(',').map(|s| s.parse::<f64>().expect("grid cell"));
            (
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            )
        })
        .collect()
}

/// Contour grid over the four-point outlier fixture, 21 x 21 cells on a
/// box that puts the deepest fit (0, 1) exactly on a grid node.
fn outlier_grid(dir: &tempfile::TempDir) -> (Vec<(f64, f64, f64)>, usize) {
    let out = dir.path().join("grid.csv");
    let steps = 21usize;
    let r = run(&[
        "contour",
        &fixture("lad_outlier.csv"),
        "--depth",
        "rd",
        "--steps",
        "21",
        "--b1-min",
        "-2",
        "--b1-max",
        "2",
        "--b2-min",
        "-1",
        "--b2-max",
        "3",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = json(&r);
    assert_eq!(v["cells"].as_u64().unwrap() as usize, steps * steps);
    let grid = read_grid(&out);
    assert_eq!(grid.len(), steps * steps);
    (grid, steps)
}

#[test]
fn contour_grid_peaks_at_the_deepest_fit() {
    let fit = run(&[
        "fit",
        &fixture("lad_outlier.csv"),
        "--method",
        "deepest-rd",
    ]);
    let fv = json(&fit);
    let (b1, b2) = (
        fv["coef"][0].as_f64().unwrap(),
        fv["coef"][1].as_f64().unwrap(),
    );
    let achieved = f(&fv, "achieved");

    let dir = tempfile::tempdir().unwrap();
    let (grid, steps) = outlier_grid(&dir);
    let grid_max = grid.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);

    // nearest cell to the fitted coefficient, plus its 8 neighbors
    let (lo1, hi1, lo2, hi2) = (-2.0f64, 2.0f64, -1.0f64, 3.0f64);
    let step1 = (hi1 - lo1) / (steps - 1) as f64;
    let step2 = (hi2 - lo2) / (steps - 1) as f64;
    let i = ((b1 - lo1) / step1).round() as i64;
    let j = ((b2 - lo2) / step2).round() as i64;
    let near_max = grid
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            let (gi, gj) = ((idx / steps) as i64, (idx % steps) as i64);
            (gi - i).abs() <= 1 && (gj - j).abs() <= 1
        })
        .map(|(_, c)| c.2)
        .fold(f64::NEG_INFINITY, f64::max);

    assert!(
        near_max >= grid_max,
        "grid max {grid_max} not attained at or next to the deepest fit ({b1}, {b2})"
    );
    assert!(
        (near_max - achieved).abs() < 1e-15,
        "grid value {near_max} disagrees with the fit's achieved depth {achieved}"
    );
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise convex hull of integer-indexed cells (monotone chain).
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn in_hull(hull: &[(f64, f64)], p: (f64, f64)) -> bool {
    if hull.len() < 3 {
        return hull.iter().any(|&h| h == p);
    }
    (0..hull.len()).all(|k| cross(hull[k], hull[(k + 1) % hull.len()], p) >= -1e-9)
}

#[test]
fn contour_level_sets_are_convex_up_to_one_count() {
    let dir = tempfile::tempdir().unwrap();
    let (grid, steps) = outlier_grid(&dir);
    let n = 4.0; // rows in the fixture, so depth is quantized in 1/4 steps

    let mut levels: Vec<f64> = grid.iter().map(|c| c.2).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();

    for &t in levels.iter().filter(|&&t| t > 0.0) {
        let high: Vec<(f64, f64)> = grid
            .iter()
            .enumerate()
            .filter(|(_, c)| c.2 >= t)
            .map(|(idx, _)| ((idx / steps) as f64, (idx % steps) as f64))
            .collect();
        let hull = convex_hull(high);
        for (idx, cell) in grid.iter().enumerate() {
            let p = ((idx / steps) as f64, (idx % steps) as f64);
            if in_hull(&hull, p) {
                assert!(
                    cell.2 >= t - 1.0 / n - 1e-12,
                    "cell {p:?} at depth {} sits inside the hull of the level set at {t}",
                    cell.2
                );
            }
        }
    }
}

#[test]
fn elapsed_time_goes_to_stderr_not_stdout() {
    let r = run(&[
        "depth",
        &fixture("collinear.csv"),
        "--depth",
        "rd",
        "--beta",
        "1,2",
    ]);
    assert!(!r.stdout.contains("elapsed_ms"));
    assert!(r.stderr.contains("elapsed_ms"));
}

#[test]
fn every_success_record_embeds_the_reproducibility_fields() {
    let runs = [
        run(&["depth", &fixture("collinear.csv"), "--depth", "rd", "--beta", "1,2"]),
        run(&["fit", &fixture("simple3.csv"), "--method", "ls", "--no-intercept"]),
        run(&["axioms", "--depth", "dc", "--suite", "p3", "--trials", "5"]),
        run(&["location-hd", &fixture("square5.csv"), "--point", "0,0"]),
    ];
    for r in &runs {
        assert_eq!(r.code, 0, "stderr: {}", r.stderr);
        let v = json(r);
        assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
        assert!(v["seed"].is_u64());
        let h = v["config_hash"].as_str().unwrap();
        assert_eq!(h.len(), 64);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
    }
}
