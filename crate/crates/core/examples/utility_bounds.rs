//! The ratio bound breaks for a sign-changing utility; the difference bound
//! does not.

use dp_participation::bounds::{euclidean_bound_check, hcua_model, ratio_bound_scan, ratio_violation_demo};
use dp_participation::utility::UtilityFunction;
use dp_participation::{Epsilon, Real};

fn main() {
    let eps: Epsilon = "ln(2)".parse().unwrap();
    let demo = ratio_violation_demo();
    println!("u = {{n: 1, g: -1}}: EU(1,1) = {} <= e^eps EU(1,0) = {}? {}", demo.lhs, demo.rhs, demo.holds);

    let model = hcua_model(&eps).unwrap();
    let v = UtilityFunction::parse(&[("n", "2"), ("g", "0")]).unwrap();
    let r = ratio_bound_scan(&model, &v, 1, &eps).unwrap();
    println!("v = {{n: 2, g: 0}}: worst ratio check {} <= {}: {}", r.lhs, r.rhs, r.holds);

    let u = UtilityFunction::parse(&[("n", "1"), ("g", "-1")]).unwrap();
    let d = euclidean_bound_check(&model, &u, 1, &eps, &Real::zero()).unwrap();
    println!("difference bound for u: {} <= {}: {}", d.lhs, d.rhs, d.holds);
}
