//! A judge who convicts only at certainty: harmless under pure epsilon, fatal
//! under a mechanism that sometimes reveals the answers outright.

use dp_participation::rational::ratio;
use dp_participation::scenarios::run_maimonides;

fn main() {
    let v = run_maimonides(&"ln(2)".parse().unwrap(), &ratio(1, 20)).unwrap();
    if let Some(f) = &v.formalization {
        println!("{f}\n");
    }
    for c in &v.claims {
        println!("[{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.description, c.computed);
    }
}
