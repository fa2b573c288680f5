//! Unlimited and infinitesimal utilities: arithmetic, ordering and standard parts.

use dp_participation::{Class, Hyperreal};

fn main() {
    let w = Hyperreal::omega();
    let death: Hyperreal = "-w".parse().unwrap();
    let fine: Hyperreal = "-1000000".parse().unwrap();
    println!("death < fine: {}", death < fine);

    let tiny = Hyperreal::one().div_monomial(&w).unwrap();
    println!("1/w = {tiny} is {:?}", tiny.classify());
    println!("w * 1/w = {}", &w * &tiny);

    let mixed: Hyperreal = "3*w^1 + 1/2 - e^(-1)".parse().unwrap();
    println!("{mixed} is {:?}", mixed.classify());
    assert_eq!(mixed.classify(), Class::PositiveUnlimited);

    let limited: Hyperreal = "2 + 5*w^-1".parse().unwrap();
    println!("standard part of {limited} = {}", limited.standard_part().unwrap());
}
