use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use corridor_theta::io::corpus::SuiteKind;
use corridor_theta::oracle::brute_force_plan;
use corridor_theta::planner::{constrained_theta_star, theta_star, PlanOutcome};
use corridor_theta::validate_path;
use corridor_theta_bench::{corridor, medium, suite, Fixture};

fn planners(c: &mut Criterion, group: &str, fixtures: &[Fixture]) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    for f in fixtures {
        let (s, w, h) = (&f.scenario, &f.world, &f.holes);
        g.bench_with_input(BenchmarkId::new("theta", &f.name), f, |b, _| {
            b.iter(|| black_box(theta_star(w, s.start, s.goal)))
        });
        g.bench_with_input(BenchmarkId::new("constrained", &f.name), f, |b, _| {
            b.iter(|| black_box(constrained_theta_star(w, h, &s.constraints, s.start, s.goal)))
        });
    }
    g.finish();
}

fn bench_medium(c: &mut Criterion) {
    planners(c, "medium", &medium(4));
}

fn bench_corridor(c: &mut Criterion) {
    planners(c, "corridor", &corridor(2));
}

fn bench_brute(c: &mut Criterion) {
    let mut g = c.benchmark_group("brute");
    g.sample_size(10);
    for f in suite(SuiteKind::Obstacles, 3).iter().chain(&suite(SuiteKind::Holes, 2)) {
        let s = &f.scenario;
        g.bench_function(&f.name, |b| {
            b.iter(|| black_box(brute_force_plan(&f.world, &f.holes, &s.constraints, s.start, s.goal)))
        });
    }
    g.finish();
}

fn bench_validate(c: &mut Criterion) {
    let mut g = c.benchmark_group("validate");
    for f in corridor(1) {
        let s = &f.scenario;
        let PlanOutcome::Found(p) = theta_star(&f.world, s.start, s.goal) else { continue };
        g.bench_function(&f.name, |b| {
            b.iter(|| black_box(validate_path(&p.turning_points, &f.world, &f.holes, &s.constraints)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_medium, bench_corridor, bench_brute, bench_validate);
criterion_main!(benches);
