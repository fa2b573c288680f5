//! Opting out of a noisy-count study can dominate every answer.

use dp_participation::mechanism::{Direction, ThresholdLaplaceMechanism};
use dp_participation::participation::check_participation;
use dp_participation::rational::int;
use dp_participation::scenarios::run_laplace_optout;
use dp_participation::{Epsilon, InputSpace, UtilityFunction, OPT_OUT};

fn main() {
    let space = InputSpace::uniform(3, &[OPT_OUT, "1", "2"]).unwrap();
    let m = ThresholdLaplaceMechanism::counting(space, int(2), Epsilon::Value(int(1)), int(2), Direction::AtMost).unwrap();
    let u = UtilityFunction::parse(&[("0", "0"), ("1", "1")]).unwrap();
    let report = check_participation(&m, &u, 0).unwrap();
    println!("participation satisfied: {}", report.satisfied);
    for c in &report.candidates {
        println!("  answer {}: opting out wins by {} when the others report {:?}", c.response, c.gap, c.worst_environment);
    }

    let verdict = run_laplace_optout(3, &Epsilon::Value(int(1))).unwrap();
    println!("{}", serde_json::to_string_pretty(&verdict).unwrap());
}
