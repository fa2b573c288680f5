//! Expected utility is unchanged in ranking by positive affine maps, but a
//! monotone non-affine map can flip a choice between lotteries.

use dp_participation::hyperreal::Hyperreal;
use dp_participation::rational::ratio;
use dp_participation::utility::{affine, expected_utility_at, nonaffine_counterexample, represents};
use dp_participation::Real;

fn main() {
    let cx = nonaffine_counterexample();
    let sure = cx.model.space().parse_tuple(&["sure"]).unwrap();
    let gamble = cx.model.space().parse_tuple(&["gamble"]).unwrap();
    let w = affine(&cx.u, &Real::from(ratio(3, 2)), &Hyperreal::from(-4)).unwrap();
    for (name, u) in [("u", &cx.u), ("3/2 u - 4", &w), ("v", &cx.v)] {
        let s = expected_utility_at(&cx.model, u, &sure).unwrap();
        let g = expected_utility_at(&cx.model, u, &gamble).unwrap();
        println!(
            "{name:>10}: represents {} EU(sure) = {s}, EU(gamble) = {g}, prefers {}",
            represents(u, &cx.preference).unwrap(),
            if s >= g { "sure" } else { "gamble" }
        );
    }
}
