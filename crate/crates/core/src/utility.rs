//! Preferences over consequences, their utility representations and expected
//! utility under a consequence mechanism.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperreal::Hyperreal;
use crate::mechanism::{ConsequenceMechanism, InputSpace, TableMechanism};
use crate::rational::ratio;
use crate::real::Real;

/// A total preorder stored as equivalence classes, best first. Completeness and
/// transitivity hold by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<String>>", into = "Vec<Vec<String>>")]
pub struct PreferenceOrdering {
    classes: Vec<Vec<String>>,
}

impl PreferenceOrdering {
    pub fn new(classes: Vec<Vec<String>>) -> Result<Self> {
        let mut seen: Vec<&String> = Vec::new();
        for class in &classes {
            if class.is_empty() {
                return Err(Error::invalid("preference classes must be nonempty"));
            }
            for c in class {
                if seen.contains(&c) {
                    return Err(Error::invalid(format!("consequence {c:?} ranked twice")));
                }
                seen.push(c);
            }
        }
        if seen.is_empty() {
            return Err(Error::invalid("preference over no consequences"));
        }
        Ok(PreferenceOrdering { classes })
    }

    /// Strict chain `c₁ ≻ c₂ ≻ …`.
    pub fn strict(order: &[&str]) -> Result<Self> {
        PreferenceOrdering::new(order.iter().map(|c| vec![c.to_string()]).collect())
    }

    pub fn classes(&self) -> &[Vec<String>] {
        &self.classes
    }

    pub fn consequences(&self) -> impl Iterator<Item = &String> {
        self.classes.iter().flatten()
    }

    /// Class index, 0 for the most preferred.
    pub fn rank(&self, c: &str) -> Option<usize> {
        self.classes.iter().position(|class| class.iter().any(|x| x == c))
    }

    /// `a ⪰ b`.
    pub fn weakly_prefers(&self, a: &str, b: &str) -> Option<bool> {
        Some(self.rank(a)? <= self.rank(b)?)
    }

    /// Worst class gets 0, each better class one more.
    pub fn canonical_utility(&self) -> UtilityFunction {
        let top = self.classes.len() as i64 - 1;
        let values = self
            .classes
            .iter()
            .enumerate()
            .flat_map(|(i, class)| class.iter().map(move |c| (c.clone(), Hyperreal::from(top - i as i64))))
            .collect();
        UtilityFunction { values }
    }
}

impl TryFrom<Vec<Vec<String>>> for PreferenceOrdering {
    type Error = Error;
    fn try_from(classes: Vec<Vec<String>>) -> Result<Self> {
        PreferenceOrdering::new(classes)
    }
}

impl From<PreferenceOrdering> for Vec<Vec<String>> {
    fn from(p: PreferenceOrdering) -> Self {
        p.classes
    }
}

/// Utility of each consequence. Real-valued utilities are the degree-0 case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityFunction {
    values: Vec<(String, Hyperreal)>,
}

impl UtilityFunction {
    pub fn new(values: Vec<(String, Hyperreal)>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("utility over no consequences"));
        }
        for (i, (c, _)) in values.iter().enumerate() {
            if values[..i].iter().any(|(d, _)| d == c) {
                return Err(Error::invalid(format!("utility lists {c:?} twice")));
            }
        }
        Ok(UtilityFunction { values })
    }

    /// From `(consequence, text)` pairs in hyperreal term syntax.
    pub fn parse(values: &[(&str, &str)]) -> Result<Self> {
        let parsed = values
            .iter()
            .map(|(c, v)| Ok((c.to_string(), v.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        UtilityFunction::new(parsed)
    }

    pub fn values(&self) -> &[(String, Hyperreal)] {
        &self.values
    }

    pub fn get(&self, c: &str) -> Option<&Hyperreal> {
        self.values.iter().find(|(d, _)| d == c).map(|(_, v)| v)
    }

    pub fn consequences(&self) -> impl Iterator<Item = &String> {
        self.values.iter().map(|(c, _)| c)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|(_, v)| v.as_real().is_some())
    }

    pub fn is_nonnegative_real(&self) -> bool {
        self.values
            .iter()
            .all(|(_, v)| v.as_real().is_some_and(|r| !r.is_negative()))
    }

    pub fn max(&self) -> &Hyperreal {
        self.values.iter().map(|(_, v)| v).max().expect("nonempty")
    }

    pub fn min(&self) -> &Hyperreal {
        self.values.iter().map(|(_, v)| v).min().expect("nonempty")
    }

    /// `max_c u(c) − min_c u(c)`.
    pub fn range(&self) -> Hyperreal {
        self.max() - self.min()
    }

    /// Utilities listed in the order of `consequences`, which must name the
    /// same set.
    pub fn aligned(&self, consequences: &[String]) -> Result<Vec<&Hyperreal>> {
        if consequences.len() != self.values.len() {
            return Err(Error::invalid(format!(
                "utility is defined on {} consequences, distribution has {}",
                self.values.len(),
                consequences.len()
            )));
        }
        consequences
            .iter()
            .map(|c| {
                self.get(c)
                    .ok_or_else(|| Error::invalid(format!("utility is undefined on consequence {c:?}")))
            })
            .collect()
    }

    /// `c ↦ h(u(c))`.
    pub fn map(&self, h: impl Fn(&Hyperreal) -> Hyperreal) -> UtilityFunction {
        UtilityFunction {
            values: self.values.iter().map(|(c, v)| (c.clone(), h(v))).collect(),
        }
    }
}

/// Checks `c₁ ⪰ c₂ ⟺ u(c₁) ≥ u(c₂)` for all pairs.
pub fn represents(u: &UtilityFunction, p: &PreferenceOrdering) -> Result<bool> {
    let cs: Vec<&String> = p.consequences().collect();
    if cs.len() != u.len() || cs.iter().any(|c| u.get(c).is_none()) {
        return Err(Error::invalid("utility and preference are over different consequences"));
    }
    for a in &cs {
        for b in &cs {
            let prefers = p.weakly_prefers(a, b).expect("checked above");
            if prefers != (u.get(a).unwrap() >= u.get(b).unwrap()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `c ↦ a·u(c) + b` for `a > 0`.
pub fn affine(u: &UtilityFunction, a: &Real, b: &Hyperreal) -> Result<UtilityFunction> {
    if !a.is_positive() {
        return Err(Error::domain(format!("affine scale must be positive, got {a}")));
    }
    Ok(u.map(|v| &v.scale(a) + b))
}

/// `Σ_c u(c)·P(c)` where `dist` is aligned with `consequences`.
pub fn expected_utility(u: &UtilityFunction, consequences: &[String], dist: &[Real]) -> Result<Hyperreal> {
    if dist.len() != consequences.len() {
        return Err(Error::invalid("distribution length does not match consequences"));
    }
    if dist.iter().any(Real::is_negative) {
        return Err(Error::invalid("distribution has a negative probability"));
    }
    let total: Real = dist.iter().cloned().sum();
    if total != Real::one() {
        return Err(Error::invalid(format!("distribution sums to {total}, not 1")));
    }
    let values = u.aligned(consequences)?;
    Ok(values.iter().zip(dist).map(|(v, p)| v.scale(p)).sum())
}

/// Expected utility of `u` under `model` at input `x`.
pub fn expected_utility_at(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    x: &[usize],
) -> Result<Hyperreal> {
    let dist = model.consequence_distribution(x)?;
    expected_utility(u, model.consequences(), &dist)
}

/// Expected utility of every response of `agent` in every environment.
#[derive(Debug, Clone)]
pub struct ResponseTable {
    /// Full tuples with the agent's own slot left at 0.
    pub environments: Vec<Vec<usize>>,
    /// `eu[e][a]`: environment `e`, response index `a`.
    pub eu: Vec<Vec<Hyperreal>>,
}

pub fn response_table(
    model: &(impl ConsequenceMechanism + ?Sized),
    u: &UtilityFunction,
    agent: usize,
) -> Result<ResponseTable> {
    let space = model.input_space();
    if agent >= space.agents() {
        return Err(Error::invalid(format!("agent {agent} out of range")));
    }
    u.aligned(model.consequences())?;
    let environments = space.environments(agent);
    let responses = space.alphabet(agent).len();
    let eu = environments
        .par_iter()
        .map(|env| {
            (0..responses)
                .map(|a| {
                    let mut x = env.clone();
                    x[agent] = a;
                    expected_utility_at(model, u, &x)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResponseTable { environments, eu })
}

/// Two utilities for the strict preference `c ≻ b ≻ a` that rank a sure `b`
/// against the lottery `(2/5 a, 3/5 c)` differently. `v` is `u` pushed through
/// a monotone map that is not affine.
#[derive(Debug, Clone)]
pub struct NonAffineCounterexample {
    pub preference: PreferenceOrdering,
    pub u: UtilityFunction,
    pub v: UtilityFunction,
    /// One agent answering `"sure"` or `"gamble"`; outputs are the consequences.
    pub model: TableMechanism,
}

pub fn nonaffine_counterexample() -> NonAffineCounterexample {
    let space = InputSpace::uniform(1, &["sure", "gamble"]).expect("fixed alphabet");
    let outputs = ["a", "b", "c"].map(String::from).to_vec();
    let model = TableMechanism::new(
        space,
        outputs,
        vec![
            vec![ratio(0, 1), ratio(1, 1), ratio(0, 1)],
            vec![ratio(2, 5), ratio(0, 1), ratio(3, 5)],
        ],
    )
    .expect("rows are distributions");
    NonAffineCounterexample {
        preference: PreferenceOrdering::strict(&["c", "b", "a"]).expect("distinct"),
        u: UtilityFunction::parse(&[("a", "0"), ("b", "1"), ("c", "2")]).expect("literals"),
        v: UtilityFunction::parse(&[("a", "0"), ("b", "1"), ("c", "3/2")]).expect("literals"),
        model,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::{example1_mechanism, PostProcessed, PostProcessor};
    use crate::params::Epsilon;
    use crate::rational::{int, ratio};

    fn u2() -> UtilityFunction {
        UtilityFunction::parse(&[("n", "1"), ("g", "-1")]).unwrap()
    }

    fn hcua() -> PostProcessed {
        let m = example1_mechanism(&Epsilon::Ln(int(2))).unwrap();
        let c = vec!["g".to_string(), "n".to_string()];
        let f = PostProcessor::deterministic(m.outputs(), &c, |o| if o == "0" { "n".into() } else { "g".into() }).unwrap();
        PostProcessed::new(m, f).unwrap()
    }

    #[test]
    fn representation_examples() {
        let pref = PreferenceOrdering::strict(&["n", "g"]).unwrap();
        assert!(represents(&u2(), &pref).unwrap());
        let v2 = UtilityFunction::parse(&[("n", "2"), ("g", "0")]).unwrap();
        assert!(represents(&v2, &pref).unwrap());
        let flat = UtilityFunction::parse(&[("n", "3"), ("g", "3")]).unwrap();
        assert!(!represents(&flat, &pref).unwrap());
        let other = UtilityFunction::parse(&[("n", "1"), ("x", "0")]).unwrap();
        assert!(represents(&other, &pref).is_err());
    }

    #[test]
    fn ties_must_be_ties() {
        let pref = PreferenceOrdering::new(vec![vec!["a".into(), "b".into()], vec!["c".into()]]).unwrap();
        let tied = UtilityFunction::parse(&[("a", "w"), ("b", "w"), ("c", "5")]).unwrap();
        assert!(represents(&tied, &pref).unwrap());
        let split = UtilityFunction::parse(&[("a", "w"), ("b", "w - 1"), ("c", "5")]).unwrap();
        assert!(!represents(&split, &pref).unwrap());
        assert!(represents(&pref.canonical_utility(), &pref).unwrap());
    }

    #[test]
    fn affine_examples() {
        let v2 = UtilityFunction::parse(&[("n", "2"), ("g", "0")]).unwrap();
        assert_eq!(affine(&u2(), &Real::one(), &Hyperreal::one()).unwrap(), v2);
        assert_eq!(affine(&u2(), &Real::one(), &Hyperreal::zero()).unwrap(), u2());
        let u = UtilityFunction::parse(&[("a", "3/4"), ("b", "-w"), ("c", "0")]).unwrap();
        let there = affine(&u, &Real::from(2), &Hyperreal::from(3)).unwrap();
        let back = affine(&there, &Real::from(ratio(1, 2)), &Hyperreal::from_rational(ratio(-3, 2))).unwrap();
        assert_eq!(back, u);
        assert!(affine(&u, &Real::zero(), &Hyperreal::zero()).is_err());
    }

    #[test]
    fn expected_utility_examples() {
        let model = hcua();
        let x = model.input_space().parse_tuple(&["1", "0"]).unwrap();
        assert_eq!(expected_utility_at(&model, &u2(), &x).unwrap(), Hyperreal::from_rational(ratio(-5, 7)));

        let cs = vec!["g".to_string(), "n".to_string()];
        let point = [Real::zero(), Real::one()];
        assert_eq!(expected_utility(&u2(), &cs, &point).unwrap(), Hyperreal::one());

        let death = UtilityFunction::parse(&[("0", "0"), ("1", "-w")]).unwrap();
        let cs = vec!["0".to_string(), "1".to_string()];
        let half = Real::from(ratio(1, 2));
        let eu = expected_utility(&death, &cs, &[half.clone(), half]).unwrap();
        assert_eq!(eu, "-1/2*w".parse().unwrap());
    }

    #[test]
    fn malformed_distributions_are_rejected() {
        let cs = vec!["g".to_string(), "n".to_string()];
        assert!(expected_utility(&u2(), &cs, &[Real::from(ratio(1, 2)), Real::from(ratio(1, 3))]).is_err());
        assert!(expected_utility(&u2(), &cs, &[Real::from(2), Real::from(-1)]).is_err());
        assert!(expected_utility(&u2(), &cs[..1], &[Real::one()]).is_err());
    }

    #[test]
    fn preference_validation() {
        assert!(PreferenceOrdering::new(vec![vec!["a".into()], vec!["a".into()]]).is_err());
        assert!(PreferenceOrdering::new(vec![vec![]]).is_err());
        let json = serde_json::to_string(&PreferenceOrdering::strict(&["n", "g"]).unwrap()).unwrap();
        assert_eq!(json, r#"[["n"],["g"]]"#);
    }

    #[test]
    fn monotone_rescaling_can_flip_a_comparison() {
        let ce = nonaffine_counterexample();
        assert!(represents(&ce.u, &ce.preference).unwrap());
        assert!(represents(&ce.v, &ce.preference).unwrap());
        let eu = |w: &UtilityFunction, x: usize| expected_utility_at(&ce.model, w, &[x]).unwrap();
        assert!(eu(&ce.u, 1) > eu(&ce.u, 0));
        assert!(eu(&ce.v, 1) < eu(&ce.v, 0));
    }
}
