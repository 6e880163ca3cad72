//! Benchmark fixtures: prebuilt worlds for the planner benches.

use corridor_theta::io::corpus::{comparison_suite, generate_corpus, random_scenarios, CorpusParams, RandomParams, SuiteKind};
use corridor_theta::{build_world, find_holes, GridWorld, HoleIndex, ScenarioConfig};

pub struct Fixture {
    pub name: String,
    pub scenario: ScenarioConfig,
    pub world: GridWorld,
    pub holes: HoleIndex,
}

impl Fixture {
    pub fn new(name: impl Into<String>, scenario: ScenarioConfig) -> Self {
        let world = build_world(&scenario).expect("generated scenarios build");
        let holes = find_holes(&world);
        Fixture { name: name.into(), scenario, world, holes }
    }
}

/// First `n` fragments of the default corridor corpus.
pub fn corridor(n: usize) -> Vec<Fixture> {
    let params = CorpusParams { count: n, ..CorpusParams::default() };
    generate_corpus(&params, 1).into_iter().enumerate().map(|(i, s)| Fixture::new(format!("corridor/{i}"), s)).collect()
}

/// Random 16x16 to 64x64 instances.
pub fn medium(n: usize) -> Vec<Fixture> {
    random_scenarios(&RandomParams::medium(), 1, n)
        .into_iter()
        .enumerate()
        .map(|(i, s)| Fixture::new(format!("medium/{i}"), s))
        .collect()
}

/// 40x40 instances from the brute-force comparison suites.
pub fn suite(kind: SuiteKind, n: usize) -> Vec<Fixture> {
    let tag = if kind == SuiteKind::Holes { "holes" } else { "obstacles" };
    comparison_suite(kind, 1, n).into_iter().enumerate().map(|(i, s)| Fixture::new(format!("{tag}/{i}"), s)).collect()
}
