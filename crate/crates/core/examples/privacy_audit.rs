//! Tightest pure epsilon and the delta curve of two table mechanisms.

use dp_participation::audit::{privacy_profile, tight_delta, verify};
use dp_participation::mechanism::{example1_mechanism, randomized_response};
use dp_participation::rational::ratio;
use dp_participation::Epsilon;

fn main() {
    let m = example1_mechanism(&"ln(2)".parse().unwrap()).unwrap();
    let profile = privacy_profile(&m);
    println!("noisy count: tightest epsilon {}", profile.tightest_epsilon);
    for p in &profile.delta_curve {
        println!("  delta({}) = {}", p.epsilon, p.delta);
    }

    let rr = randomized_response(ratio(1, 4)).unwrap();
    println!("randomized response: tightest epsilon {}", privacy_profile(&rr).tightest_epsilon);
    println!("  delta(0) = {}", tight_delta(&rr, &Epsilon::zero()));
    let claim = verify(&rr, &"ln(2)".parse().unwrap(), &ratio(1, 10));
    println!("  (ln 2, 1/10) claim satisfied: {}", claim.is_satisfied());
}
