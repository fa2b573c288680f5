//! Voluntary participation, compensation, and the participation-cost
//! comparison of privacy variants.
//!
//! Agent `j` participates voluntarily when some response `a ≠ ⊥` weakly beats
//! opting out in every environment. The shortfall of a response is
//! `max_env EU(⊥, env) − EU(a, env)`; the smallest shortfall over responses is
//! the least additive reward that buys participation.

use serde::Serialize;

use crate::bounds::euclidean_bound;
use crate::error::{Error, Result};
use crate::hyperreal::{Class, Hyperreal};
use crate::mechanism::{ConsequenceMechanism, OPT_OUT};
use crate::params::Epsilon;
use crate::rational::{self, Rational};
use crate::real::Real;
use crate::utility::{response_table, ResponseTable, UtilityFunction};

#[derive(Debug, Clone, Serialize)]
pub struct ResponseShortfall {
    pub response: String,
    /// Environment where opting out beats this response by the most.
    pub worst_environment: Vec<String>,
    pub gap: Hyperreal,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParticipationReport {
    pub agent: usize,
    pub satisfied: bool,
    /// Response with the smallest shortfall; first in symbol order on ties.
    pub best_response: Option<String>,
    pub worst_environment: Vec<String>,
    pub gap: Hyperreal,
    pub candidates: Vec<ResponseShortfall>,
}

fn opt_out_index(model: &(impl ConsequenceMechanism + ?Sized), agent: usize) -> Result<usize> {
    let space = model.input_space();
    if agent >= space.agents() {
        return Err(Error::invalid(format!("agent {agent} out of range")));
    }
    space
        .opt_out(agent)
        .ok_or_else(|| Error::invalid(format!("agent {agent} has no opt-out symbol {OPT_OUT}")))
}

fn shortfalls(
    model: &(impl ConsequenceMechanism + ?Sized),
    table: &ResponseTable,
    agent: usize,
    opt: usize,
) -> Vec<ResponseShortfall> {
    let space = model.input_space();
    (0..space.alphabet(agent).len())
        .filter(|&a| a != opt)
        .map(|a| {
            let mut worst: Option<(Hyperreal, usize)> = None;
            for (e, row) in table.eu.iter().enumerate() {
                let gap = &row[opt] - &row[a];
                if worst.as_ref().is_none_or(|(g, _)| gap > *g) {
                    worst = Some((gap, e));
                }
            }
            let (gap, e) = worst.expect("at least one environment");
            ResponseShortfall {
                response: space.alphabet(agent)[a].clone(),
                worst_environment: space.environment_symbols(&table.environments[e], agent),
                gap,
            }
        })
        .collect()
}

/// Evaluates `∃a ≠ ⊥ ∀env: EU(a, env) ≥ EU(⊥, env)` by exhaustive scan.
pub fn check_participation(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
) -> Result<ParticipationReport> {
    let opt = opt_out_index(model, agent)?;
    let table = response_table(model, u, agent)?;
    let candidates = shortfalls(model, &table, agent, opt);
    let best = candidates
        .iter()
        .min_by(|a, b| a.gap.cmp(&b.gap).then_with(|| a.response.cmp(&b.response)))
        .ok_or_else(|| Error::invalid(format!("agent {agent} can only opt out")))?;
    Ok(ParticipationReport {
        agent,
        satisfied: best.gap.signum() <= 0,
        best_response: Some(best.response.clone()),
        worst_environment: best.worst_environment.clone(),
        gap: best.gap.clone(),
        candidates: candidates.clone(),
    })
}

/// Does a reward `r` make *every* response at least as good as opting out in
/// every environment?
pub fn holds_with_compensation(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
    reward: &Hyperreal,
) -> Result<bool> {
    let opt = opt_out_index(model, agent)?;
    let table = response_table(model, u, agent)?;
    Ok(table.eu.iter().all(|row| {
        row.iter()
            .enumerate()
            .filter(|(a, _)| *a != opt)
            .all(|(_, eu)| eu + reward >= row[opt])
    }))
}

/// `(e^ε − 1 + δ|C|)(max u − min u)`: a reward that always suffices for
/// bounded utilities.
pub fn prop3_compensation(eps: &Epsilon, delta: &Real, consequences: usize, u: &UtilityFunction) -> Hyperreal {
    euclidean_bound(eps, delta, consequences, u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Compensation {
    NoneNeeded,
    Finite { amount: Hyperreal, decimal: f64 },
    /// The shortfall is unlimited: no real reward suffices.
    Infeasible { gap: Hyperreal },
}

#[derive(Debug, Clone, Serialize)]
pub struct CompensationResult {
    #[serde(flatten)]
    pub kind: Compensation,
    pub best_response: Option<String>,
    pub prop3_bound: Hyperreal,
    pub prop3_decimal: Option<f64>,
}

fn decimal(h: &Hyperreal) -> Option<f64> {
    h.as_real().map(|r| r.to_f64())
}

/// Smallest reward `r* = max(0, min_a max_env EU(⊥) − EU(a))`, reported next to
/// the closed-form bound at `(ε, δ)`.
pub fn exact_min_compensation(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
    eps: &Epsilon,
    delta: &Real,
) -> Result<CompensationResult> {
    let report = check_participation(model, u, agent)?;
    let kind = if report.gap.signum() <= 0 {
        Compensation::NoneNeeded
    } else if report.gap.classify() == Class::PositiveUnlimited {
        Compensation::Infeasible { gap: report.gap.clone() }
    } else {
        Compensation::Finite {
            decimal: decimal(&report.gap).unwrap_or(f64::NAN),
            amount: report.gap.clone(),
        }
    };
    let prop3_bound = prop3_compensation(eps, delta, model.consequences().len(), u);
    Ok(CompensationResult {
        kind,
        best_response: report.best_response,
        prop3_decimal: decimal(&prop3_bound),
        prop3_bound,
    })
}

/// Participation cost factor `e^ε − 1 + δ|C|` of an `(ε, δ)` guarantee.
pub fn participation_cost(eps: &Epsilon, delta: &Rational, consequences: usize) -> Real {
    &(&eps.exp() - &Real::one()) + &Real::from(delta * rational::int(consequences as i64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantOrder {
    FirstCheaper,
    SecondCheaper,
    Equal,
}

/// Which guarantee is cheaper to compensate: `FirstCheaper` iff
/// `e^ε − e^ε′ < |C|(δ′ − δ)`.
pub fn compare_variants(
    first: (&Epsilon, &Rational),
    second: (&Epsilon, &Rational),
    consequences: usize,
) -> Result<VariantOrder> {
    if consequences == 0 {
        return Err(Error::domain("need at least one consequence"));
    }
    for d in [first.1, second.1] {
        if d < &Rational::from_integer(0.into()) || d > &rational::int(1) {
            return Err(Error::domain(format!("delta {d} outside [0,1]")));
        }
    }
    let lhs = &first.0.exp() - &second.0.exp();
    let rhs = Real::from((second.1 - first.1) * rational::int(consequences as i64));
    Ok(match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => VariantOrder::FirstCheaper,
        std::cmp::Ordering::Greater => VariantOrder::SecondCheaper,
        std::cmp::Ordering::Equal => VariantOrder::Equal,
    })
}

/// Responses `a, b` of one agent and a consequence `c` whose probability
/// differs between them in every environment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResponsivenessWitness {
    pub agent: usize,
    pub a: String,
    pub b: String,
    pub consequence: String,
}

/// Per agent, the first witness of responsiveness found, if any.
pub fn responsiveness(model: &(impl ConsequenceMechanism + ?Sized)) -> Result<Vec<Option<ResponsivenessWitness>>> {
    let space = model.input_space();
    let cs = model.consequences();
    (0..space.agents())
        .map(|j| {
            let envs = space.environments(j);
            let k = space.alphabet(j).len();
            let dists = envs
                .iter()
                .map(|env| {
                    (0..k)
                        .map(|a| {
                            let mut x = env.clone();
                            x[j] = a;
                            model.consequence_distribution(&x)
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            for a in 0..k {
                for b in a + 1..k {
                    for c in 0..cs.len() {
                        if dists.iter().all(|d| d[a][c] != d[b][c]) {
                            return Ok(Some(ResponsivenessWitness {
                                agent: j,
                                a: space.alphabet(j)[a].clone(),
                                b: space.alphabet(j)[b].clone(),
                                consequence: cs[c].clone(),
                            }));
                        }
                    }
                }
            }
            Ok(None)
        })
        .collect()
}

/// For every agent there exist responses `a, b` and a consequence `c` such
/// that `P(c | a, env) ≠ P(c | b, env)` for every environment.
pub fn is_minimally_responsive(model: &(impl ConsequenceMechanism + ?Sized)) -> Result<bool> {
    Ok(responsiveness(model)?.iter().all(Option::is_some))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::{example1_mechanism, Direction, InputSpace, PostProcessor, TableMechanism, ThresholdLaplaceMechanism};
    use crate::rational::{int, ratio};

    fn example2(n: usize, eps: i64, direction: Direction) -> ThresholdLaplaceMechanism {
        let space = InputSpace::uniform(n, &[OPT_OUT, "1", "2"]).unwrap();
        let t = match direction {
            Direction::AtMost => n as i64 - 1,
            Direction::AtLeast => n as i64,
        };
        ThresholdLaplaceMechanism::counting(space, int(2), Epsilon::Value(int(eps)), int(t), direction).unwrap()
    }

    fn indicator() -> UtilityFunction {
        UtilityFunction::parse(&[("0", "0"), ("1", "1")]).unwrap()
    }

    #[test]
    fn laplace_threshold_discourages_joining() {
        let m = example2(3, 1, Direction::AtMost);
        let r = check_participation(&m, &indicator(), 0).unwrap();
        assert!(!r.satisfied);
        assert!(r.gap.signum() > 0);
        assert_eq!(r.candidates.len(), 2);
    }

    #[test]
    fn flipped_threshold_encourages_joining() {
        let m = example2(3, 1, Direction::AtLeast);
        let r = check_participation(&m, &indicator(), 0).unwrap();
        assert!(r.satisfied);
        // response 2 raises the count most, but ties are impossible here
        assert_eq!(r.best_response.as_deref(), Some("2"));
    }

    #[test]
    fn constant_mechanism_has_zero_gap() {
        let space = InputSpace::uniform(2, &[OPT_OUT, "1"]).unwrap();
        let m = TableMechanism::from_fn(space, vec!["0".into(), "1".into()], |_| vec![ratio(1, 4), ratio(3, 4)]).unwrap();
        let r = check_participation(&m, &indicator(), 1).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.gap, Hyperreal::zero());
        let c = exact_min_compensation(&m, &indicator(), 1, &Epsilon::zero(), &Real::zero()).unwrap();
        assert_eq!(c.kind, Compensation::NoneNeeded);
        assert!(!is_minimally_responsive(&m).unwrap());
    }

    #[test]
    fn missing_opt_out_is_an_error() {
        let m = example1_mechanism(&Epsilon::Ln(int(2))).unwrap();
        let u = UtilityFunction::parse(&[("0", "0"), ("1", "1"), ("2", "2")]).unwrap();
        assert!(check_participation(&m, &u, 0).is_err());
    }

    #[test]
    fn example2_exact_minimum_compensation() {
        // shortfall of a = 1 peaks where [t − s − 1, t − s] straddles 0:
        // F(1) − F(0) = ½(1 − e^{−1/2})
        let m = example2(3, 1, Direction::AtMost);
        let eps = Epsilon::Value(int(1));
        let c = exact_min_compensation(&m, &indicator(), 0, &eps, &Real::zero()).unwrap();
        let expected = &Real::from(ratio(1, 2)) - &Real::term(ratio(1, 2), ratio(-1, 2));
        match &c.kind {
            Compensation::Finite { amount, .. } => {
                assert_eq!(amount, &Hyperreal::from(expected));
                assert!(amount <= &c.prop3_bound);
            }
            other => panic!("expected finite compensation, got {other:?}"),
        }
        assert_eq!(c.best_response.as_deref(), Some("1"));
        assert_eq!(c.prop3_bound, Hyperreal::from(&Real::exp(int(1)) - &Real::one()));
    }

    #[test]
    fn unlimited_loss_is_infeasible() {
        let m = example2(3, 1, Direction::AtLeast);
        let death = UtilityFunction::parse(&[("0", "0"), ("1", "-w")]).unwrap();
        let c = exact_min_compensation(&m, &death, 0, &Epsilon::Value(int(1)), &Real::zero()).unwrap();
        assert!(matches!(c.kind, Compensation::Infeasible { .. }));
        assert_eq!(c.prop3_bound.classify(), Class::PositiveUnlimited);
    }

    #[test]
    fn prop3_values() {
        let u2 = UtilityFunction::parse(&[("n", "1"), ("g", "-1")]).unwrap();
        assert_eq!(prop3_compensation(&Epsilon::Ln(int(2)), &Real::zero(), 2, &u2), Hyperreal::from(2));
        assert_eq!(prop3_compensation(&Epsilon::zero(), &Real::zero(), 2, &u2), Hyperreal::zero());
    }

    #[test]
    fn prop3_reward_restores_participation() {
        let m = example2(3, 1, Direction::AtMost);
        let eps = Epsilon::Value(int(1));
        let r = prop3_compensation(&eps, &Real::zero(), 2, &indicator());
        assert!(holds_with_compensation(&m, &indicator(), 0, &r).unwrap());
        assert!(!holds_with_compensation(&m, &indicator(), 0, &Hyperreal::zero()).unwrap());
    }

    #[test]
    fn variant_comparison() {
        let pure = |e: &str| e.parse::<Epsilon>().unwrap();
        let zero = int(0);
        let tenth = ratio(1, 10);
        assert_eq!(compare_variants((&pure("0.1"), &zero), (&Epsilon::zero(), &tenth), 2).unwrap(), VariantOrder::FirstCheaper);
        assert_eq!(compare_variants((&pure("0.25"), &zero), (&Epsilon::zero(), &tenth), 2).unwrap(), VariantOrder::SecondCheaper);
        assert_eq!(compare_variants((&pure("ln(6/5)"), &zero), (&Epsilon::zero(), &tenth), 2).unwrap(), VariantOrder::Equal);
        assert_eq!(compare_variants((&pure("1/3"), &tenth), (&pure("1/3"), &tenth), 4).unwrap(), VariantOrder::Equal);
    }

    #[test]
    fn example1_responsiveness() {
        let m = example1_mechanism(&Epsilon::Ln(int(2))).unwrap();
        assert!(is_minimally_responsive(&m).unwrap());
        let w = responsiveness(&m).unwrap();
        assert_eq!(w[1].as_ref().unwrap().consequence, "2");
        // grief unless the count is zero does not separate 0 from 1 when the
        // other member reports 0
        let cs = vec!["g".to_string(), "n".to_string()];
        let f = PostProcessor::deterministic(m.outputs(), &cs, |o| if o == "0" { "n".into() } else { "g".into() }).unwrap();
        let composed = m.compose(&f).unwrap();
        assert!(!is_minimally_responsive(&composed).unwrap());
    }
}
