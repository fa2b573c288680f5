//! Seeded random instances and brute-force oracles shared by the integration
//! tests. The oracles deliberately avoid the library's own scanning code.

#![allow(dead_code)]

use dp_participation::mechanism::{PostProcessed, PostProcessor};
use dp_participation::rational::{int, ratio};
use dp_participation::{Epsilon, Hyperreal, InputSpace, Rational, Real, TableMechanism, UtilityFunction, OPT_OUT};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Alphabets of size 2 or 3; with `opt_out` the first symbol is `⊥`.
pub fn random_space(rng: &mut impl Rng, max_agents: usize, opt_out: bool) -> InputSpace {
    let n = rng.gen_range(1..=max_agents);
    let alphabets = (0..n)
        .map(|_| {
            let k = rng.gen_range(2..=3);
            let first = if opt_out { OPT_OUT } else { "0" };
            [first, "1", "2"][..k].iter().map(|s| s.to_string()).collect()
        })
        .collect();
    InputSpace::new(alphabets).unwrap()
}

/// Exact distribution over `k` outcomes with small integer weights; zeros
/// appear with probability about `zero_rate`.
pub fn random_distribution(rng: &mut impl Rng, k: usize, zero_rate: f64) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..k)
            .map(|_| if rng.gen_bool(zero_rate) { 0 } else { rng.gen_range(1..=9) })
            .collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| ratio(x, total)).collect();
        }
    }
}

pub fn outputs(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("o{i}")).collect()
}

pub fn random_table(rng: &mut impl Rng, max_agents: usize, max_outputs: usize, opt_out: bool, zero_rate: f64) -> TableMechanism {
    let space = random_space(rng, max_agents, opt_out);
    let k = rng.gen_range(2..=max_outputs);
    let rows = (0..space.size()).map(|_| random_distribution(rng, k, zero_rate)).collect();
    TableMechanism::new(space, outputs(k), rows).unwrap()
}

pub fn random_post_processor(rng: &mut impl Rng, outs: &[String], max_consequences: usize) -> PostProcessor {
    let k = rng.gen_range(2..=max_consequences);
    let cs: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let rows = outs.iter().map(|_| random_distribution(rng, k, 0.5)).collect();
    PostProcessor::new(outs.to_vec(), cs, rows).unwrap()
}

pub fn random_rational(rng: &mut impl Rng, max_abs: i64) -> Rational {
    let d = rng.gen_range(1..=4);
    ratio(rng.gen_range(-max_abs * d..=max_abs * d), d)
}

pub fn random_real_utility(rng: &mut impl Rng, cs: &[String]) -> UtilityFunction {
    UtilityFunction::new(cs.iter().map(|c| (c.clone(), Hyperreal::from_rational(random_rational(rng, 5)))).collect()).unwrap()
}

/// `ε = ln r` with `r ∈ [1, 4]` rational, so `e^ε` is exact.
pub fn random_ln_epsilon(rng: &mut impl Rng) -> Epsilon {
    Epsilon::Ln(ratio(rng.gen_range(4..=16), 4))
}

/// A random post-processed mechanism over `⊥`-alphabets with a real utility:
/// at most 3 agents, 4 outputs and 4 consequences.
pub struct Instance {
    pub model: PostProcessed,
    pub u: UtilityFunction,
}

pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let m = random_table(rng, 3, 4, true, 0.2);
    let f = random_post_processor(rng, m.outputs(), 4);
    let u = random_real_utility(rng, f.consequences());
    Instance { model: PostProcessed::new(m, f).unwrap(), u }
}

/// Ordered pairs of tuples that differ in exactly one coordinate, found by
/// comparing every pair of tuples.
pub fn neighbor_pairs(space: &InputSpace) -> Vec<(Vec<usize>, Vec<usize>)> {
    let all: Vec<Vec<usize>> = space.tuples().collect();
    let mut out = Vec::new();
    for x in &all {
        for y in &all {
            if x.iter().zip(y).filter(|(a, b)| a != b).count() == 1 {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// `max_{x~x′, S ⊆ O} P(x ∈ S) − e^ε P(x′ ∈ S)`, floored at zero, over every
/// subset of outputs.
pub fn brute_force_delta(m: &TableMechanism, eps: &Epsilon) -> Real {
    let k = m.outputs().len();
    let e = eps.exp();
    let mut best = Real::zero();
    for (x, y) in neighbor_pairs(m.space()) {
        let (p, q) = (m.row(&x), m.row(&y));
        for mask in 1u32..(1 << k) {
            let mut ps = Rational::zero();
            let mut qs = Rational::zero();
            for o in 0..k {
                if mask & (1 << o) != 0 {
                    ps += &p[o];
                    qs += &q[o];
                }
            }
            // e^ε ≥ 1, so these subsets cannot beat zero
            if ps <= qs {
                continue;
            }
            let d = &Real::from(ps) - &e.scale(&qs);
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Largest likelihood ratio over neighbors and single outputs; `None` when a
/// neighbor gives zero probability to an output the other can produce.
pub fn brute_force_ratio(m: &TableMechanism) -> Option<Rational> {
    let mut best = int(1);
    for (x, y) in neighbor_pairs(m.space()) {
        for (p, q) in m.row(&x).iter().zip(m.row(&y)) {
            if p.is_zero() {
                continue;
            }
            if q.is_zero() {
                return None;
            }
            let r = p / q;
            if r > best {
                best = r;
            }
        }
    }
    Some(best)
}

pub mod strategies {
    use super::*;
    use proptest::prelude::*;

    pub fn rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
    }

    /// Mostly rationals, sometimes with an `e^q` term so comparisons go
    /// through certified interval evaluation.
    pub fn real() -> impl Strategy<Value = Real> {
        let exps = prop::sample::select(vec![ratio(-1, 1), ratio(-1, 2), ratio(1, 3), ratio(1, 1)]);
        (rational(), prop::option::weighted(0.3, (rational(), exps))).prop_map(|(q, e)| match e {
            Some((c, x)) => &Real::from(q) + &Real::term(c, x),
            None => Real::from(q),
        })
    }

    pub fn hyperreal() -> impl Strategy<Value = Hyperreal> {
        prop::collection::vec((-2i32..=2, real()), 0..=3)
            .prop_map(|terms| terms.into_iter().map(|(k, c)| Hyperreal::monomial(c, k)).sum())
    }
}
