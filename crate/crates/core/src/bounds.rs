//! Expected-utility bounds under differential privacy.
//!
//! Two yardsticks are checked here. The ratio form
//! `EU(x_j) ≤ e^ε·EU(x′_j)` is only valid for nonnegative utilities; a
//! sign-changing utility that represents the same preference can break it.
//! The difference form `|EU(x_j) − EU(x′_j)| ≤ (e^ε − 1 + δ|C|)(max u − min u)`
//! holds for every bounded real utility and is invariant under positive affine
//! rescaling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperreal::Hyperreal;
use crate::mechanism::{example1_mechanism, ConsequenceMechanism, PostProcessed, PostProcessor};
use crate::params::Epsilon;
use crate::real::Real;
use crate::utility::{expected_utility_at, response_table, UtilityFunction};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundWitness {
    pub agent: usize,
    pub response: String,
    pub alternative: String,
    /// Reports of every other agent, in agent order.
    pub environment: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub lhs: Hyperreal,
    pub rhs: Hyperreal,
    pub holds: bool,
    pub witness: Option<BoundWitness>,
}

impl BoundReport {
    fn new(lhs: Hyperreal, rhs: Hyperreal, witness: Option<BoundWitness>) -> Self {
        let holds = lhs <= rhs;
        BoundReport { lhs, rhs, holds, witness }
    }
}

fn witness(model: &(impl ConsequenceMechanism + ?Sized), agent: usize, a: usize, b: usize, env: &[usize]) -> BoundWitness {
    let space = model.input_space();
    BoundWitness {
        agent,
        response: space.alphabet(agent)[a].clone(),
        alternative: space.alphabet(agent)[b].clone(),
        environment: space.environment_symbols(env, agent),
    }
}

/// Checks `EU(x_j, env) ≤ e^ε·EU(x′_j, env)` for one response pair.
///
/// `env` is a full tuple; its slot for `agent` is ignored.
pub fn ratio_bound_check(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
    response: usize,
    alternative: usize,
    env: &[usize],
    eps: &Epsilon,
) -> Result<BoundReport> {
    if !u.is_nonnegative_real() {
        return Err(Error::domain("ratio bound needs a nonnegative real-valued utility"));
    }
    let mut x = env.to_vec();
    x[agent] = response;
    let lhs = expected_utility_at(model, u, &x)?;
    x[agent] = alternative;
    let rhs = expected_utility_at(model, u, &x)?.scale(&eps.exp());
    Ok(BoundReport::new(lhs, rhs, Some(witness(model, agent, response, alternative, env))))
}

/// Ratio check over every environment and ordered response pair. Reports the
/// pair with the largest `lhs − rhs`.
pub fn ratio_bound_scan(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
    eps: &Epsilon,
) -> Result<BoundReport> {
    if !u.is_nonnegative_real() {
        return Err(Error::domain("ratio bound needs a nonnegative real-valued utility"));
    }
    let table = response_table(model, u, agent)?;
    let exp_eps = eps.exp();
    let mut worst: Option<(Hyperreal, BoundReport)> = None;
    for (env, row) in table.environments.iter().zip(&table.eu) {
        for (a, lhs) in row.iter().enumerate() {
            for (b, eu_b) in row.iter().enumerate() {
                if a == b {
                    continue;
                }
                let rhs = eu_b.scale(&exp_eps);
                let slack = lhs - &rhs;
                if worst.as_ref().is_none_or(|(s, _)| slack > *s) {
                    let report = BoundReport::new(lhs.clone(), rhs, Some(witness(model, agent, a, b, env)));
                    worst = Some((slack, report));
                }
            }
        }
    }
    worst
        .map(|(_, r)| r)
        .ok_or_else(|| Error::invalid("agent has a single response; nothing to compare"))
}

/// The two-member survey with grief unless the noisy count is zero.
pub fn hcua_model(eps: &Epsilon) -> Result<PostProcessed> {
    let m = example1_mechanism(eps)?;
    let cs = vec!["g".to_string(), "n".to_string()];
    let f = PostProcessor::deterministic(m.outputs(), &cs, |o| {
        if o == "0" { "n".into() } else { "g".into() }
    })?;
    PostProcessed::new(m, f)
}

/// Ratio check for the second member with `u = {n: 1, g: −1}` between
/// `(1, 1)` and `(1, 0)`. Fails for every `ε > 0`.
pub fn ratio_violation_demo_at(eps: &Epsilon) -> Result<BoundReport> {
    let model = hcua_model(eps)?;
    let u = UtilityFunction::parse(&[("n", "1"), ("g", "-1")])?;
    let space = model.input_space();
    let lhs = expected_utility_at(&model, &u, &space.parse_tuple(&["1", "1"])?)?;
    let rhs = expected_utility_at(&model, &u, &space.parse_tuple(&["1", "0"])?)?.scale(&eps.exp());
    let env = space.parse_tuple(&["1", "0"])?;
    Ok(BoundReport::new(lhs, rhs, Some(witness(&model, 1, 1, 0, &env))))
}

/// [`ratio_violation_demo_at`] with `ε = ln 2`.
pub fn ratio_violation_demo() -> BoundReport {
    ratio_violation_demo_at(&Epsilon::Ln(crate::rational::int(2))).expect("fixed parameters are valid")
}

/// `(e^ε − 1 + δ|C|)·(max u − min u)`.
pub fn euclidean_bound(eps: &Epsilon, delta: &Real, consequences: usize, u: &UtilityFunction) -> Hyperreal {
    let factor = &(&eps.exp() - &Real::one()) + &delta.scale(&crate::rational::int(consequences as i64));
    u.range().scale(&factor)
}

/// Largest `|EU(x_j, env) − EU(x′_j, env)|` over every environment and response
/// pair of `agent`, against [`euclidean_bound`].
pub fn euclidean_bound_check(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
    eps: &Epsilon,
    delta: &Real,
) -> Result<BoundReport> {
    if !u.is_real() {
        return Err(Error::domain("difference bound needs a real-valued utility"));
    }
    let table = response_table(model, u, agent)?;
    let mut worst = Hyperreal::zero();
    let mut at = None;
    for (env, row) in table.environments.iter().zip(&table.eu) {
        for (a, ea) in row.iter().enumerate() {
            for (b, eb) in row.iter().enumerate().skip(a + 1) {
                let gap = (ea - eb).abs();
                if at.is_none() || gap > worst {
                    worst = gap;
                    at = Some(witness(model, agent, a, b, env));
                }
            }
        }
    }
    let rhs = euclidean_bound(eps, delta, model.consequences().len(), u);
    Ok(BoundReport::new(worst, rhs, at))
}
