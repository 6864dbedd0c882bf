//! Small named configurations used throughout tests, benchmarks and the
//! verification suites.

use crate::config::PointConfig;
use crate::linalg::vector;

fn named(labels: &[&str], points: &[&[f64]]) -> PointConfig {
    PointConfig::new(
        labels.iter().map(|s| s.to_string()).collect(),
        points.iter().map(|p| vector(p)).collect(),
        false,
    )
    .expect("fixture is valid")
}

/// `A = {0, 1, 2} ⊂ R`.
pub fn line() -> PointConfig {
    named(&["0", "1", "2"], &[&[0.0], &[1.0], &[2.0]])
}

/// Five planar points: a quadrilateral `a b e d` with an interior point `c`
/// on the diagonal `a e`, so it has four triangulations, all regular.
pub fn five_points() -> PointConfig {
    named(
        &["a", "b", "c", "d", "e"],
        &[
            &[0.0, 1.0],
            &[1.0, 2.0],
            &[1.2, 1.0],
            &[1.0, 0.0],
            &[2.0, 1.0],
        ],
    )
}

/// Three generators of `R²` with the irrational relation
/// `z_c = z_a · z_b^{1+√2}`.
pub fn irrational_cone() -> PointConfig {
    let s2 = 2f64.sqrt();
    named(&["a", "b", "c"], &[&[-s2, 1.0], &[1.0, 0.0], &[1.0, 1.0]])
}

/// Two nested triangles, which admit non-regular triangulations.
pub fn nested_triangles() -> PointConfig {
    named(
        &["1", "2", "3", "4", "5", "6"],
        &[
            &[0.0, 0.0],
            &[4.0, 0.0],
            &[2.0, 4.0],
            &[1.0, 1.0],
            &[3.0, 1.0],
            &[2.0, 3.0],
        ],
    )
}

/// The unit square.
pub fn square() -> PointConfig {
    named(
        &["00", "10", "01", "11"],
        &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]],
    )
}
