mod common;

use common::strategies::{hyperreal, rational};
use common::*;
use dp_participation::audit::{privacy_profile, tight_delta, tightest_epsilon, verify, PureEpsilon};
use dp_participation::mechanism::PostProcessed;
use dp_participation::participation::is_minimally_responsive;
use dp_participation::utility::{affine, represents};
use dp_participation::{Class, ConsequenceMechanism, Epsilon, Hyperreal, PreferenceOrdering, Real};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn ratio_of(e: &PureEpsilon) -> Option<dp_participation::Rational> {
    match e {
        PureEpsilon::Finite(r) => Some(r.clone()),
        PureEpsilon::Infinite => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn hyperreal_text_round_trip(h in hyperreal()) {
        let back: Hyperreal = h.to_string().parse().unwrap();
        prop_assert_eq!(back, h);
    }

    #[test]
    fn standard_part_drops_infinitesimals(h in hyperreal()) {
        match h.classify() {
            Class::PositiveUnlimited | Class::NegativeUnlimited => prop_assert!(h.standard_part().is_err()),
            _ => prop_assert_eq!(h.standard_part().unwrap(), h.coefficient(0)),
        }
    }

    #[test]
    fn rational_embedding_is_an_ordered_ring_map(a in rational(), b in rational()) {
        let (ha, hb) = (Hyperreal::from_rational(a.clone()), Hyperreal::from_rational(b.clone()));
        prop_assert_eq!(&ha + &hb, Hyperreal::from_rational(&a + &b));
        prop_assert_eq!(&ha * &hb, Hyperreal::from_rational(&a * &b));
        prop_assert_eq!(ha.cmp(&hb), a.cmp(&b));
    }

    #[test]
    fn audit_matches_single_output_oracle(seed in any::<u64>()) {
        let m = random_table(&mut rng(seed), 3, 4, false, 0.25);
        prop_assert_eq!(ratio_of(&tightest_epsilon(&m).epsilon), brute_force_ratio(&m));
    }

    #[test]
    fn post_processing_never_weakens_privacy(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_table(&mut r, 3, 4, false, 0.25);
        let f = random_post_processor(&mut r, m.outputs(), 4);
        let composed = PostProcessed::new(m.clone(), f).unwrap().composed().clone();
        match (ratio_of(&tightest_epsilon(&m).epsilon), ratio_of(&tightest_epsilon(&composed).epsilon)) {
            (Some(a), Some(b)) => prop_assert!(b <= a),
            (Some(_), None) => prop_assert!(false, "post-processing made the ratio unbounded"),
            _ => {}
        }
        let eps = random_ln_epsilon(&mut r);
        prop_assert!(tight_delta(&composed, &eps) <= tight_delta(&m, &eps));
    }

    #[test]
    fn tight_delta_is_the_smallest_valid_delta(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_table(&mut r, 3, 4, false, 0.25);
        let eps = random_ln_epsilon(&mut r);
        let d = tight_delta(&m, &eps).as_rational().unwrap();
        prop_assert!(verify(&m, &eps, &d).is_satisfied());
        if d > num_rational::BigRational::zero() {
            let below = &d - &d / dp_participation::rational::int(1000);
            prop_assert!(!verify(&m, &eps, &below).is_satisfied());
        }
    }

    #[test]
    fn pure_binary_responsive_mechanisms_never_reach_certainty(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_table(&mut r, 3, 2, false, 0.3);
        let pure = tightest_epsilon(&m).epsilon.is_finite();
        if pure && is_minimally_responsive(&m).unwrap() {
            for row in m.rows() {
                for p in row {
                    prop_assert!(!p.is_zero() && !p.is_one());
                }
            }
        }
    }

    #[test]
    fn affine_rescaling_keeps_representation(seed in any::<u64>(), a in 1i64..=20, b in rational()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let classes: Vec<Vec<String>> = {
            let mut cs: Vec<(Hyperreal, String)> = inst.u.values().iter().map(|(c, h)| (h.clone(), c.clone())).collect();
            cs.sort_by(|x, y| y.0.cmp(&x.0));
            let mut out: Vec<(Hyperreal, Vec<String>)> = Vec::new();
            for (h, c) in cs {
                match out.last_mut() {
                    Some((v, class)) if *v == h => class.push(c),
                    _ => out.push((h, vec![c])),
                }
            }
            out.into_iter().map(|(_, c)| c).collect()
        };
        let p = PreferenceOrdering::new(classes).unwrap();
        prop_assert!(represents(&inst.u, &p).unwrap());
        let v = affine(&inst.u, &Real::from(dp_participation::rational::ratio(a, 4)), &Hyperreal::from_rational(b)).unwrap();
        prop_assert!(represents(&v, &p).unwrap());
        prop_assert!(represents(&p.canonical_utility(), &p).unwrap());
    }

    #[test]
    fn epsilon_text_round_trip(n in 1i64..=50, d in 1i64..=50, ln in any::<bool>()) {
        let q = dp_participation::rational::ratio(n + d, d);
        let e = if ln { Epsilon::Ln(q) } else { Epsilon::Value(q) };
        let back: Epsilon = e.to_string().parse().unwrap();
        prop_assert_eq!(back.exp(), e.exp());
    }
}

proptest! {
    // each case audits up to 64 curve points
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn delta_curve_is_nonincreasing(seed in any::<u64>()) {
        let m = random_table(&mut rng(seed), 3, 4, false, 0.25);
        let curve = privacy_profile(&m).delta_curve;
        for w in curve.windows(2) {
            prop_assert!(w[0].epsilon.exp() < w[1].epsilon.exp());
            prop_assert!(w[1].delta <= w[0].delta);
        }
    }
}

#[test]
fn random_instances_are_well_formed() {
    let mut r = rng(7);
    for _ in 0..50 {
        let inst = random_instance(&mut r);
        let space = inst.model.input_space();
        for x in space.tuples() {
            let total: Real = inst.model.consequence_distribution(&x).unwrap().into_iter().sum();
            assert_eq!(total, Real::one());
        }
    }
}
