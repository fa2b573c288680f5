//! Which guarantee costs less to compensate: pure epsilon or pure delta.

use dp_participation::participation::{compare_variants, participation_cost};
use dp_participation::rational::ratio;
use dp_participation::{Epsilon, Rational};

fn main() {
    let zero = Rational::from_integer(0.into());
    let delta = ratio(1, 10);
    let c = 2;
    for eps in ["0.1", "ln(6/5)", "0.25"] {
        let e: Epsilon = eps.parse().unwrap();
        let order = compare_variants((&e, &zero), (&Epsilon::zero(), &delta), c).unwrap();
        println!(
            "eps {eps} (cost {:.4}) vs delta {delta} (cost {:.4}) with |C| = {c}: {order:?}",
            participation_cost(&e, &zero, c).to_f64(),
            participation_cost(&Epsilon::zero(), &delta, c).to_f64()
        );
    }
}
