//! End-to-end tests of the `irrtoric` binary: documented examples checked
//! against independent computations, golden files pinning the output byte
//! for byte, exit codes and output files.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn run_with(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_irrtoric"));
    cmd.args(args).env_remove("TORIC_DEGEN_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with(args, &[])
}

/// Runs a command expected to succeed and parses its JSON.
fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect()
}

fn sets(v: &Value) -> BTreeSet<Vec<u64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|f| {
            f.as_array()
                .unwrap()
                .iter()
                .map(|i| i.as_u64().unwrap())
                .collect()
        })
        .collect()
}

fn check_golden(name: &str, actual: &[u8]) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected =
        std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(
        expected == actual,
        "{name} differs from its golden file:\n{}",
        String::from_utf8_lossy(actual)
    );
}

/// Lower facets of a planar lifted point set by brute force: triangles whose
/// plane has every other lifted point strictly above it.
fn lower_triangles(pts: &[[f64; 2]], lift: &[f64]) -> BTreeSet<Vec<u64>> {
    let n = pts.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let p = |a: usize| [pts[a][0], pts[a][1], lift[a]];
                let (a, b, c) = (p(i), p(j), p(k));
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let mut nrm = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                if nrm[2].abs() < 1e-12 {
                    continue;
                }
                if nrm[2] < 0.0 {
                    nrm = [-nrm[0], -nrm[1], -nrm[2]];
                }
                let above = (0..n).filter(|&m| m != i && m != j && m != k).all(|m| {
                    let q = p(m);
                    nrm[0] * (q[0] - a[0]) + nrm[1] * (q[1] - a[1]) + nrm[2] * (q[2] - a[2]) > 1e-9
                });
                if above {
                    out.insert(vec![i as u64, j as u64, k as u64]);
                }
            }
        }
    }
    out
}

#[test]
fn subdivide_line_with_a_dip() {
    let out = json(&[
        "subdivide",
        "--config",
        &fixture("line.json"),
        "--lift",
        &fixture("line_lift.json"),
    ]);
    // Lower hull of (0,0), (1,−1), (2,0): the middle point is below the chord.
    assert_eq!(
        sets(&out["facets"]),
        BTreeSet::from([vec![0, 1], vec![1, 2]])
    );
    assert_eq!(out["triangulation"], true);
    let raw = run(&[
        "subdivide",
        "--config",
        &fixture("line.json"),
        "--lift",
        &fixture("line_lift.json"),
    ]);
    check_golden("subdivide_line.json", &raw.stdout);
}

#[test]
fn subdivide_flat_lift_is_trivial() {
    let out = json(&[
        "subdivide",
        "--config",
        &fixture("line.json"),
        "--lift",
        "0,0,0",
    ]);
    assert_eq!(sets(&out["facets"]), BTreeSet::from([vec![0, 1, 2]]));
    assert_eq!(out["triangulation"], false);
}

#[test]
fn subdivide_five_points_svg() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let lift = "0.3,0.1,-1,0,0.2";
    let out = json(&[
        "subdivide",
        "--config",
        &fixture("five_points.json"),
        "--lift",
        lift,
        "--svg",
        "--out",
        d,
    ]);
    let pts = [[0.0, 1.0], [1.0, 2.0], [1.2, 1.0], [1.0, 0.0], [2.0, 1.0]];
    let oracle = lower_triangles(&pts, &[0.3, 0.1, -1.0, 0.0, 0.2]);
    assert_eq!(sets(&out["facets"]), oracle);
    let edges: BTreeSet<(u64, u64)> = oracle
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])])
        .collect();
    let svg = std::fs::read(dir.path().join("subdivision.svg")).unwrap();
    let text = String::from_utf8(svg.clone()).unwrap();
    assert_eq!(text.matches("<line").count(), edges.len());
    check_golden("subdivide_five_points.svg", &svg);
    let written = std::fs::read(dir.path().join("subdivide.json")).unwrap();
    assert_eq!(serde_json::from_slice::<Value>(&written).unwrap(), out);
}

#[test]
fn subdivide_skips_svg_off_the_plane() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "subdivide",
        "--config",
        &fixture("line.json"),
        "--lift",
        "0,0,0",
        "--svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("SVG skipped"));
    assert!(!dir.path().join("subdivision.svg").exists());
}

#[test]
fn secondary_line() {
    let out = json(&["secondary", "--config", &fixture("line.json")]);
    let mut verts: Vec<Vec<f64>> = out["triangulations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| floats(&t["gkz"]))
        .collect();
    verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(verts, vec![vec![1.0, 2.0, 1.0], vec![2.0, 0.0, 2.0]]);
    assert_eq!(out["complete"], true);
    check_golden(
        "secondary_line.json",
        &run(&["secondary", "--config", &fixture("line.json")]).stdout,
    );
}

#[test]
fn secondary_triangle_and_five_points() {
    let out = json(&["secondary", "--config", &fixture("triangle.json")]);
    assert_eq!(out["count"], 1);
    let out = json(&["secondary", "--config", &fixture("five_points.json")]);
    // The interior point lies on the diagonal a–e: the triangulations are the
    // fan around c, the other diagonal with and without c, and the diagonal
    // a–e without c.
    assert_eq!(out["count"], 4);
    let oracle =
        irrtoric::secondary::exhaustive_regular_triangulations(&irrtoric::fixtures::five_points())
            .unwrap();
    assert_eq!(oracle.len(), 4);
    assert_eq!(out["complete"], true);
}

#[test]
fn birch_line_closed_form() {
    let out = json(&[
        "birch",
        "--config",
        &fixture("line.json"),
        "--target",
        "1.5",
    ]);
    // z ∝ (1, t, t²) with (t + 2t²)/(1 + t + t²) = 3/2, i.e. t² − t − 3 = 0.
    let t = (1.0 + 13f64.sqrt()) / 2.0;
    let s = 1.0 + t + t * t;
    let expected = [1.0 / s, t / s, t * t / s];
    for (z, e) in floats(&out["z"]).iter().zip(expected) {
        assert!((z - e).abs() < 1e-9, "{z} vs {e}");
    }
    assert!((expected[0] - 0.11620).abs() < 1e-5 && (expected[1] - 0.26759).abs() < 1e-5);
    assert_eq!(out["pass"], true);
    check_golden(
        "birch_line.json",
        &run(&[
            "birch",
            "--config",
            &fixture("line.json"),
            "--target",
            "1.5",
        ])
        .stdout,
    );
}

#[test]
fn birch_vertex_and_barycentric_targets() {
    let out = json(&["birch", "--config", &fixture("line.json"), "--target", "2"]);
    assert_eq!(floats(&out["z"]), vec![0.0, 0.0, 1.0]);
    let out = json(&[
        "birch",
        "--config",
        &fixture("simplex.json"),
        "--target",
        "0.2,0.3,0.5",
    ]);
    for (z, e) in floats(&out["z"]).iter().zip([0.2, 0.3, 0.5]) {
        assert!((z - e).abs() < 1e-9);
    }
    let out = json(&[
        "birch",
        "--config",
        &fixture("simplex.json"),
        "--weights",
        "1,2,3",
        "--target",
        "0.2,0.3,0.5",
    ]);
    for (z, e) in floats(&out["z"]).iter().zip([0.2, 0.3, 0.5]) {
        assert!((z - e).abs() < 1e-9);
    }
}

#[test]
fn birch_outside_hull_is_an_input_error() {
    let out = run(&["birch", "--config", &fixture("line.json"), "--target", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the convex hull"));
}

#[test]
fn limit_examples() {
    let out = json(&["limit", "--fan", &fixture("p2.json"), "--direction", "1,0"]);
    assert_eq!(out["exists"], true);
    let ray = floats(&out["cone"]["rays"][0]);
    assert!(
        (ray[0] - 1.0).abs() < 1e-12 && ray[1].abs() < 1e-12,
        "{ray:?}"
    );
    assert_eq!(out["cone"]["dim"], 1);
    check_golden(
        "limit_p2.json",
        &run(&["limit", "--fan", &fixture("p2.json"), "--direction", "1,0"]).stdout,
    );

    let out = json(&[
        "limit",
        "--fan",
        &fixture("p2.json"),
        "--direction",
        "0,0",
        "--point",
        "0.5,-2",
    ]);
    assert_eq!(out["exists"], true);
    assert_eq!(out["cone"]["dim"], 0);
    assert_eq!(floats(&out["orbit_coord"]), vec![0.5, -2.0]);

    let out = json(&[
        "limit",
        "--fan",
        &fixture("quadrant.json"),
        "--direction",
        "1,-1",
    ]);
    assert_eq!(out["exists"], false);
    let out = json(&[
        "limit",
        "--fan",
        &fixture("quadrant.json"),
        "--direction",
        "1,2",
    ]);
    assert_eq!(out["exists"], true);
    assert_eq!(out["cone"]["dim"], 2);
}

#[test]
fn limit_from_a_boundary_orbit() {
    // Start in the orbit of the ray e₀ of the plane fan; moving along e₁
    // reaches the orbit of the cone spanned by e₀ and e₁.
    let base = json(&["limit", "--fan", &fixture("p2.json"), "--direction", "1,0"]);
    let ray = base["cone"]["id"].as_u64().unwrap().to_string();
    let out = json(&[
        "limit",
        "--fan",
        &fixture("p2.json"),
        "--cone",
        &ray,
        "--direction",
        "0,1",
    ]);
    assert_eq!(out["exists"], true);
    assert_eq!(out["cone"]["dim"], 2);
    let bad = run(&[
        "limit",
        "--fan",
        &fixture("p2.json"),
        "--cone",
        "99",
        "--direction",
        "0,1",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn degenerate_examples() {
    let line = fixture("line.json");
    let out = json(&["degenerate", "--config", &line, "--direction", "0,-1,0"]);
    assert_eq!(out["pass"], true);
    assert_eq!(
        sets(&out["predicted_subdivision"]["facets"]),
        BTreeSet::from([vec![0, 1], vec![1, 2]])
    );
    assert_eq!(out["distances"].as_array().unwrap().len(), 40);

    let out = json(&["degenerate", "--config", &line, "--direction", "1,1,1"]);
    assert_eq!(out["pass"], true);
    let d = floats(&out["distances"]);
    assert!(d.iter().all(|x| *x < 1e-9), "{d:?}");

    let out = json(&["degenerate", "--config", &line, "--direction", "0,1,0"]);
    assert_eq!(out["pass"], true);
    assert_eq!(
        sets(&out["predicted_subdivision"]["facets"]),
        BTreeSet::from([vec![0, 2]])
    );
}

#[test]
fn degenerate_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = run(&[
        "degenerate",
        "--config",
        &fixture("line.json"),
        "--direction",
        "0,-1,0",
        "--schedule",
        "1:10:3",
        "--density",
        "50",
        "--svg",
        "--out",
        d,
    ]);
    assert!(out.status.success());
    for f in [
        "degenerate.json",
        "distances.svg",
        "source.csv",
        "target.csv",
    ] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("target.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("0,1,2"));
    assert!(lines.count() > 0);
    assert_eq!(
        std::fs::read(dir.path().join("degenerate.json")).unwrap(),
        out.stdout
    );
}

#[test]
fn degenerate_is_thread_independent() {
    let args = [
        "degenerate",
        "--config",
        &fixture("five_points.json"),
        "--direction",
        "0,1,-1,0.5,0",
        "--schedule",
        "1:12:1",
        "--seed",
        "7",
    ];
    let one = run_with(&args, &[("TORIC_DEGEN_THREADS", "1")]);
    let four = run_with(&args, &[("TORIC_DEGEN_THREADS", "4")]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn verify_suites() {
    let out = json(&["verify", "--suite", "cones"]);
    assert_eq!(out["pass"], true);
    assert_eq!(out["suite"], "cones");
    let out = json(&["verify", "--suite", "birch", "--seed", "3"]);
    assert_eq!(out["pass"], true);
    for c in out["checks"].as_array().unwrap() {
        assert_eq!(c["failures"], 0, "{c}");
    }
    let bad = run(&["verify", "--suite", "nope"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let malformed = write("bad.json", "{\"points\": {\n  \"a\": [0,]\n}}");
    let out = run(&["subdivide", "--config", &malformed, "--lift", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let off_plane = write(
        "plane.json",
        r#"{"points": {"a": [1, 0], "b": [0, 1], "c": [1, 1]}, "affine": true}"#,
    );
    let out = run(&["subdivide", "--config", &off_plane, "--lift", "0,0,0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "subdivide",
        "--config",
        &fixture("line.json"),
        "--lift",
        "0,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 3 values"));

    let out = run(&[
        "birch",
        "--config",
        &fixture("line.json"),
        "--weights",
        "1,0,1",
        "--target",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "degenerate",
        "--config",
        &fixture("line.json"),
        "--direction",
        "0,1,0",
        "--schedule",
        "5:1:1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "birch",
        "--config",
        &fixture("line.json"),
        "--target",
        "1",
        "--tol-geom",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["subdivide", "--lift", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
