use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use corridor_theta::io::corpus::{random_scenario, RandomParams};

fn cli(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_corridor-theta")).args(args).output().unwrap().status.code()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 1000,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn plan_output_validates(seed in any::<u64>()) {
        let Some(s) = random_scenario(&RandomParams::small(), seed) else { return Ok(()) };
        let dir = tempfile::tempdir().unwrap();
        let scenario = dir.path().join("s.json");
        let result = dir.path().join("r.json");
        std::fs::write(&scenario, s.to_json().unwrap()).unwrap();
        let (sp, rp) = (scenario.to_str().unwrap(), result.to_str().unwrap());
        let code = cli(&["plan", "--scenario", sp, "--out", rp]);
        prop_assert!(code == Some(0) || code == Some(2), "plan exit {:?}", code);
        if code == Some(0) {
            prop_assert_eq!(cli(&["validate", "--scenario", sp, "--path", rp]), Some(0));
        }
    }
}
