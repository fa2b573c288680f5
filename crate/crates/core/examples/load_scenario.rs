//! Load a scenario file and run the participation analysis on it.
//!
//! `cargo run --example load_scenario -- fixtures/laplace_optout.json`

use dp_participation::io::parse_scenario;
use dp_participation::participation::exact_min_compensation;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/laplace_optout.json").into());
    let s = parse_scenario(&path).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    let model = s.model();
    let (eps, delta) = s.privacy_parameters().unwrap();
    println!("agent {} at epsilon {eps}, delta {delta}", s.agent);
    let c = exact_min_compensation(&model, s.utility(), s.agent, &eps, &delta).unwrap();
    println!("{}", serde_json::to_string_pretty(&c).unwrap());
}
