mod laws;

use laws::{check, CASES};

fn law(name: &str) {
    if let Err(e) = check(name, CASES) {
        panic!("{name}: {e}");
    }
}

#[test]
fn line_of_sight_symmetry() {
    law("line_of_sight_symmetry");
}

#[test]
fn clipping_additivity() {
    law("clipping_additivity");
}

#[test]
fn monotone_relaxation() {
    law("monotone_relaxation");
}

#[test]
fn determinism() {
    law("determinism");
}

#[test]
fn scenario_round_trip() {
    law("scenario_round_trip");
}

#[test]
fn plan_then_validate() {
    law("plan_then_validate");
}
