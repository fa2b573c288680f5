//! Exact privacy parameters of finite mechanisms.
//!
//! Both searches run over every ordered pair of bounded neighbors. For pure ε
//! the worst event is always a single output (a ratio of sums never exceeds
//! the largest ratio of its terms). For δ at a fixed ε the worst event is the
//! set of outputs with positive surplus `P(x)(o) − e^ε·P(x′)(o)`, so the
//! hockey-stick sum is the tight δ.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::mechanism::{neighbors, TableMechanism};
use crate::params::Epsilon;
use crate::rational::{self, Rational};
use crate::real::Real;

/// Neighboring pair together with the output event that realizes a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x: Vec<String>,
    pub x_prime: Vec<String>,
    pub outputs: Vec<String>,
}

impl Witness {
    fn new(m: &TableMechanism, x: &[usize], y: &[usize], outputs: &[usize]) -> Self {
        Witness {
            x: m.space().symbols(x),
            x_prime: m.space().symbols(y),
            outputs: outputs.iter().map(|&o| m.outputs()[o].clone()).collect(),
        }
    }
}

/// Tightest pure ε, carried as the exact likelihood ratio `e^ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PureEpsilon {
    Finite(Rational),
    Infinite,
}

impl PureEpsilon {
    pub fn is_finite(&self) -> bool {
        matches!(self, PureEpsilon::Finite(_))
    }

    /// `ε = ln(ratio)`, or `None` when unbounded.
    pub fn epsilon(&self) -> Option<Epsilon> {
        match self {
            PureEpsilon::Finite(r) => Some(Epsilon::Ln(r.clone())),
            PureEpsilon::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            PureEpsilon::Finite(r) => rational::to_f64(r).ln(),
            PureEpsilon::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for PureEpsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PureEpsilon::Finite(r) if r.is_one() => f.write_str("0"),
            PureEpsilon::Finite(r) => write!(f, "ln({r})"),
            PureEpsilon::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for PureEpsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PureEpsilon", 3)?;
        match self {
            PureEpsilon::Finite(r) => {
                st.serialize_field("exp_epsilon", &rational::format_rational(r))?;
                st.serialize_field("epsilon", &self.to_string())?;
                st.serialize_field("decimal", &self.to_f64())?;
            }
            PureEpsilon::Infinite => {
                st.serialize_field("exp_epsilon", "inf")?;
                st.serialize_field("epsilon", "inf")?;
                st.serialize_field("decimal", "inf")?;
            }
        }
        st.end()
    }
}

#[derive(Debug, Clone)]
pub struct EpsilonAudit {
    pub epsilon: PureEpsilon,
    /// `None` for mechanisms whose rows are all identical.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct DeltaAudit {
    pub delta: Real,
    pub witness: Option<Witness>,
}

enum PairEps {
    Ratio(Rational, usize),
    Infinite(usize),
}

fn pair_epsilon(px: &[Rational], py: &[Rational]) -> Option<PairEps> {
    let mut best: Option<(Rational, usize)> = None;
    for (o, (p, q)) in px.iter().zip(py).enumerate() {
        if p.is_zero() {
            continue;
        }
        if q.is_zero() {
            return Some(PairEps::Infinite(o));
        }
        let r = p / q;
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, o));
        }
    }
    best.map(|(r, o)| PairEps::Ratio(r, o))
}

/// For every input index: its worst neighbor and that pair's outcome.
/// A neighbor pair and the value it attains.
type PairHit<T> = (Vec<usize>, Vec<usize>, T);

fn scan_pairs<T: Send>(
    m: &TableMechanism,
    per_pair: impl Fn(&[usize], &[usize]) -> Option<T> + Sync,
    better: impl Fn(&T, &T) -> bool + Sync,
) -> Option<PairHit<T>> {
    let space = m.space();
    let found: Vec<Option<PairHit<T>>> = (0..space.size())
        .into_par_iter()
        .map(|i| {
            let x = space.tuple(i);
            let mut best: Option<PairHit<T>> = None;
            for y in neighbors(space, &x).expect("tuple from the space") {
                if let Some(v) = per_pair(&x, &y) {
                    if best.as_ref().is_none_or(|(_, _, b)| better(&v, b)) {
                        best = Some((x.clone(), y, v));
                    }
                }
            }
            best
        })
        .collect();
    found.into_iter().flatten().fold(None, |acc, cand| match acc {
        Some(a) if !better(&cand.2, &a.2) => Some(a),
        _ => Some(cand),
    })
}

/// `max ln(P(M(x)=o) / P(M(x′)=o))` over neighbors and outputs, exactly.
pub fn tightest_epsilon(m: &TableMechanism) -> EpsilonAudit {
    let best = scan_pairs(
        m,
        |x, y| pair_epsilon(m.row(x), m.row(y)),
        |a, b| match (a, b) {
            (PairEps::Infinite(_), PairEps::Infinite(_)) => false,
            (PairEps::Infinite(_), _) => true,
            (_, PairEps::Infinite(_)) => false,
            (PairEps::Ratio(ra, _), PairEps::Ratio(rb, _)) => ra > rb,
        },
    );
    match best {
        None => EpsilonAudit {
            epsilon: PureEpsilon::Finite(Rational::one()),
            witness: None,
        },
        Some((x, y, PairEps::Infinite(o))) => EpsilonAudit {
            epsilon: PureEpsilon::Infinite,
            witness: Some(Witness::new(m, &x, &y, &[o])),
        },
        Some((x, y, PairEps::Ratio(r, o))) => {
            let witness = (!r.is_one()).then(|| Witness::new(m, &x, &y, &[o]));
            EpsilonAudit {
                epsilon: PureEpsilon::Finite(r),
                witness,
            }
        }
    }
}

/// Positive-surplus set and its total for one ordered pair.
fn pair_delta(px: &[Rational], py: &[Rational], exp_eps: &Real) -> (Real, Vec<usize>) {
    let mut set = Vec::new();
    if let Some(r) = exp_eps.as_rational() {
        let mut total = Rational::zero();
        for (o, (p, q)) in px.iter().zip(py).enumerate() {
            let s = p - &r * q;
            if s.is_positive() {
                total += s;
                set.push(o);
            }
        }
        return (Real::from(total), set);
    }
    let mut total = Real::zero();
    for (o, (p, q)) in px.iter().zip(py).enumerate() {
        let s = &Real::from(p.clone()) - &exp_eps.scale(q);
        if s.is_positive() {
            total += &s;
            set.push(o);
        }
    }
    (total, set)
}

/// Smallest δ for which `m` is `(ε, δ)`-DP, with the realizing pair and event.
pub fn tight_delta_with_witness(m: &TableMechanism, eps: &Epsilon) -> DeltaAudit {
    let exp_eps = eps.exp();
    let best = scan_pairs(
        m,
        |x, y| {
            let (d, set) = pair_delta(m.row(x), m.row(y), &exp_eps);
            (!d.is_zero()).then_some((d, set))
        },
        |a, b| a.0 > b.0,
    );
    match best {
        None => DeltaAudit {
            delta: Real::zero(),
            witness: None,
        },
        Some((x, y, (d, set))) => DeltaAudit {
            delta: d,
            witness: Some(Witness::new(m, &x, &y, &set)),
        },
    }
}

pub fn tight_delta(m: &TableMechanism, eps: &Epsilon) -> Real {
    tight_delta_with_witness(m, eps).delta
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated { tight_delta: Real, witness: Witness },
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verdict::Satisfied)
    }
}

/// Does `m` satisfy `(ε, δ)`-DP?
pub fn verify(m: &TableMechanism, eps: &Epsilon, delta: &Rational) -> Verdict {
    let audit = tight_delta_with_witness(m, eps);
    if audit.delta <= Real::from(delta.clone()) {
        Verdict::Satisfied
    } else {
        Verdict::Violated {
            tight_delta: audit.delta,
            witness: audit.witness.expect("positive delta has a witness"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaPoint {
    pub epsilon: Epsilon,
    pub epsilon_decimal: f64,
    pub delta: Real,
    pub delta_decimal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrivacyProfile {
    pub tightest_epsilon: PureEpsilon,
    pub delta_curve: Vec<DeltaPoint>,
    pub witness: Option<Witness>,
}

const MAX_CURVE_POINTS: usize = 64;

/// Likelihood ratios `≥ 1` across neighbors: the kinks of `δ(e^ε)`.
fn breakpoints(m: &TableMechanism) -> Vec<Rational> {
    let space = m.space();
    let mut ratios = vec![Rational::one()];
    for x in space.tuples() {
        for y in neighbors(space, &x).expect("tuple from the space") {
            for (p, q) in m.row(&x).iter().zip(m.row(&y)) {
                if !p.is_zero() && !q.is_zero() && p >= q {
                    ratios.push(p / q);
                }
            }
        }
    }
    ratios.sort();
    ratios.dedup();
    if ratios.len() > MAX_CURVE_POINTS {
        let last = ratios.len() - 1;
        ratios = (0..MAX_CURVE_POINTS)
            .map(|i| ratios[i * last / (MAX_CURVE_POINTS - 1)].clone())
            .collect();
    }
    ratios
}

/// Tightest ε plus the δ(ε) curve sampled at every kink (`ε = ln` of each
/// neighbor likelihood ratio).
pub fn privacy_profile(m: &TableMechanism) -> PrivacyProfile {
    let eps = tightest_epsilon(m);
    let delta_curve = breakpoints(m)
        .into_iter()
        .map(|r| {
            let epsilon = Epsilon::Ln(r);
            let delta = tight_delta(m, &epsilon);
            DeltaPoint {
                epsilon_decimal: epsilon.to_f64(),
                delta_decimal: delta.to_f64(),
                epsilon,
                delta,
            }
        })
        .collect();
    PrivacyProfile {
        tightest_epsilon: eps.epsilon,
        delta_curve,
        witness: eps.witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::{example1_mechanism, randomized_response, InputSpace};
    use crate::rational::{int, ratio};

    fn ln(n: i64) -> Epsilon {
        Epsilon::Ln(int(n))
    }

    fn constant() -> TableMechanism {
        let space = InputSpace::uniform(2, &["0", "1"]).unwrap();
        TableMechanism::from_fn(space, vec!["a".into(), "b".into()], |_| vec![ratio(1, 3), ratio(2, 3)]).unwrap()
    }

    fn identity() -> TableMechanism {
        let space = InputSpace::uniform(1, &["0", "1", "2"]).unwrap();
        let outs = vec!["0".into(), "1".into(), "2".into()];
        TableMechanism::from_fn(space, outs, |x| (0..3).map(|o| if o == x[0] { int(1) } else { int(0) }).collect()).unwrap()
    }

    #[test]
    fn example1_is_exactly_ln2() {
        let audit = tightest_epsilon(&example1_mechanism(&ln(2)).unwrap());
        assert_eq!(audit.epsilon, PureEpsilon::Finite(int(2)));
        assert!(audit.witness.is_some());
    }

    #[test]
    fn constant_and_identity_extremes() {
        assert_eq!(tightest_epsilon(&constant()).epsilon, PureEpsilon::Finite(int(1)));
        assert_eq!(tightest_epsilon(&identity()).epsilon, PureEpsilon::Infinite);
    }

    #[test]
    fn randomized_response_delta_at_zero() {
        let m = randomized_response(ratio(1, 4)).unwrap();
        assert_eq!(tight_delta(&m, &Epsilon::zero()), Real::from(ratio(1, 2)));
        assert_eq!(tight_delta(&m, &ln(3)), Real::zero());
    }

    #[test]
    fn example1_delta_at_zero() {
        // brute force over neighbor pairs: counts differ by exactly one, so the
        // largest total variation is between counts 0 and 1: (0+2+2)/7 / 2
        let m = example1_mechanism(&ln(2)).unwrap();
        let audit = tight_delta_with_witness(&m, &Epsilon::zero());
        assert_eq!(audit.delta, Real::from(ratio(2, 7)));
        assert_eq!(tight_delta(&m, &ln(2)), Real::zero());
    }

    #[test]
    fn irrational_exp_epsilon_path() {
        let m = randomized_response(ratio(1, 4)).unwrap();
        // e^1 < 3: surplus 3/4 - e/4
        let d = tight_delta(&m, &Epsilon::Value(int(1)));
        let expected = &Real::from(ratio(3, 4)) - &Real::term(ratio(1, 4), int(1));
        assert_eq!(d, expected);
    }

    #[test]
    fn verify_examples() {
        let m = example1_mechanism(&ln(2)).unwrap();
        assert!(verify(&m, &ln(2), &int(0)).is_satisfied());
        let half = Epsilon::Value(ratio(693_147, 2_000_000)); // ≈ ln2 / 2
        match verify(&m, &half, &int(0)) {
            Verdict::Violated { tight_delta, witness } => {
                assert!(tight_delta.is_positive());
                assert!(!witness.outputs.is_empty());
            }
            Verdict::Satisfied => panic!("ln2/2 must be violated"),
        }
        assert!(verify(&identity(), &Epsilon::Value(int(1000)), &int(1)).is_satisfied());
    }

    #[test]
    fn profile_curve_is_nonincreasing_and_hits_zero() {
        let m = example1_mechanism(&ln(3)).unwrap();
        let p = privacy_profile(&m);
        assert_eq!(p.tightest_epsilon, PureEpsilon::Finite(int(3)));
        for w in p.delta_curve.windows(2) {
            assert!(w[0].delta >= w[1].delta);
        }
        assert_eq!(p.delta_curve.last().unwrap().delta, Real::zero());
        assert!(p.delta_curve[0].delta <= Real::one());
    }
}
