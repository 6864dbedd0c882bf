//! Benchmarks of the hot paths: cone duality, regular subdivisions, the
//! moment-map inverse, Hausdorff distances and a short degeneration.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use irrtoric::rng::stream;
use irrtoric::verify::{random_cone, random_config};
use irrtoric::{
    birch_inverse, degenerate, fixtures, hausdorff_distance, regular_subdivision, vector,
    PointCloud, Vector,
};

fn cones(c: &mut Criterion) {
    let mut r = stream(1, 0);
    let cones: Vec<_> = (0..20).map(|_| random_cone(&mut r).unwrap()).collect();
    c.bench_function("cone_dual_x20", |b| {
        b.iter(|| {
            for k in &cones {
                black_box(k.dual());
            }
        })
    });
}

fn subdivisions(c: &mut Criterion) {
    let a = fixtures::nested_triangles();
    let lam = vector(&[0.3, -0.2, 0.5, -1.0, 0.1, -0.7]);
    c.bench_function("regular_subdivision_6pts", |b| {
        b.iter(|| regular_subdivision(black_box(&a), black_box(&lam)).unwrap())
    });
}

fn birch(c: &mut Criterion) {
    let mut r = stream(2, 0);
    let a = random_config(&mut r, 3, 8).unwrap();
    let w = Vector::from_element(a.len(), 1.0);
    let u = a.points().iter().fold(Vector::zeros(3), |acc, p| acc + p) / a.len() as f64;
    c.bench_function("birch_inverse_3d_8pts", |b| {
        b.iter(|| birch_inverse(black_box(&a), &w, black_box(&u)).unwrap())
    });
}

fn hausdorff(c: &mut Criterion) {
    let mut r = stream(3, 0);
    let mut cloud = |n: usize| {
        PointCloud::from_points(
            (0..n)
                .map(|_| irrtoric::rng::gaussian_vector(&mut r, 5))
                .collect(),
        )
        .unwrap()
    };
    let (p, q) = (cloud(400), cloud(400));
    c.bench_function("hausdorff_400x400_dim5", |b| {
        b.iter(|| hausdorff_distance(black_box(&p), black_box(&q)).unwrap())
    });
}

fn degeneration(c: &mut Criterion) {
    let a = fixtures::line();
    let w = Vector::from_element(3, 1.0);
    let v = vector(&[0.0, -1.0, 0.0]);
    let schedule: Vec<f64> = (1..=10).map(f64::from).collect();
    let mut g = c.benchmark_group("degenerate");
    g.sample_size(10);
    g.bench_function("line_10_steps_density_100", |b| {
        b.iter(|| degenerate(&a, &w, &v, &schedule, 100, 0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, cones, subdivisions, birch, hausdorff, degeneration);
criterion_main!(benches);
