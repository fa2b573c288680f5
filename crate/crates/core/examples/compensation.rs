//! Least reward that restores participation, next to the closed-form bound.
//! An unlimited loss makes every real reward insufficient.

use dp_participation::mechanism::{Direction, ThresholdLaplaceMechanism};
use dp_participation::participation::exact_min_compensation;
use dp_participation::rational::int;
use dp_participation::{Epsilon, InputSpace, Real, UtilityFunction, OPT_OUT};

fn main() {
    let eps = Epsilon::Value(int(1));
    let space = InputSpace::uniform(3, &[OPT_OUT, "1", "2"]).unwrap();
    let m = ThresholdLaplaceMechanism::counting(space, int(2), eps.clone(), int(3), Direction::AtLeast).unwrap();
    for loss in ["-1000000", "-w"] {
        let u = UtilityFunction::parse(&[("0", "0"), ("1", loss)]).unwrap();
        let c = exact_min_compensation(&m, &u, 0, &eps, &Real::zero()).unwrap();
        println!("loss {loss}: {}", serde_json::to_string(&c).unwrap());
    }
}
