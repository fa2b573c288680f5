//! Input spaces, finite mechanisms, post-processors and the threshold-Laplace
//! family.
//!
//! Input tuples are slices of symbol indices, one per agent, into that agent's
//! alphabet. Tables are stored densely in mixed-radix order with agent 0 as the
//! most significant digit.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::params::Epsilon;
use crate::rational::{self, Rational};
use crate::real::Real;

/// Symbol for opting out of the survey.
pub const OPT_OUT: &str = "⊥";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpace {
    alphabets: Vec<Vec<String>>,
}

impl InputSpace {
    pub fn new(alphabets: Vec<Vec<String>>) -> Result<Self> {
        if alphabets.is_empty() {
            return Err(Error::invalid("input space needs at least one agent"));
        }
        for (j, a) in alphabets.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::invalid(format!("agent {j} has an empty alphabet")));
            }
            for (i, s) in a.iter().enumerate() {
                if a[..i].contains(s) {
                    return Err(Error::invalid(format!("agent {j} lists symbol {s:?} twice")));
                }
            }
        }
        Ok(InputSpace { alphabets })
    }

    /// `n` agents sharing one alphabet.
    pub fn uniform(n: usize, alphabet: &[&str]) -> Result<Self> {
        let a: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        InputSpace::new(vec![a; n])
    }

    pub fn agents(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabet(&self, agent: usize) -> &[String] {
        &self.alphabets[agent]
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    /// Number of full input tuples.
    pub fn size(&self) -> usize {
        self.alphabets.iter().map(Vec::len).product()
    }

    pub fn validate(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.agents() {
            return Err(Error::invalid(format!(
                "tuple has {} entries, expected {}",
                x.len(),
                self.agents()
            )));
        }
        for (j, (&s, a)) in x.iter().zip(&self.alphabets).enumerate() {
            if s >= a.len() {
                return Err(Error::invalid(format!("agent {j}: symbol index {s} out of range")));
            }
        }
        Ok(())
    }

    pub fn index(&self, x: &[usize]) -> usize {
        x.iter()
            .zip(&self.alphabets)
            .fold(0, |acc, (&s, a)| acc * a.len() + s)
    }

    pub fn tuple(&self, mut index: usize) -> Vec<usize> {
        let mut x = vec![0; self.agents()];
        for (j, a) in self.alphabets.iter().enumerate().rev() {
            x[j] = index % a.len();
            index /= a.len();
        }
        x
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size()).map(|i| self.tuple(i))
    }

    /// Tuples ranging over every agent except `agent`, whose slot is left at 0.
    pub fn environments(&self, agent: usize) -> Vec<Vec<usize>> {
        self.tuples().filter(|x| x[agent] == 0).collect()
    }

    pub fn symbol_index(&self, agent: usize, symbol: &str) -> Option<usize> {
        self.alphabets[agent].iter().position(|s| s == symbol)
    }

    pub fn opt_out(&self, agent: usize) -> Option<usize> {
        self.symbol_index(agent, OPT_OUT)
    }

    pub fn parse_tuple<S: AsRef<str>>(&self, symbols: &[S]) -> Result<Vec<usize>> {
        if symbols.len() != self.agents() {
            return Err(Error::invalid(format!(
                "tuple has {} entries, expected {}",
                symbols.len(),
                self.agents()
            )));
        }
        symbols
            .iter()
            .enumerate()
            .map(|(j, s)| {
                self.symbol_index(j, s.as_ref())
                    .ok_or_else(|| Error::invalid(format!("agent {j}: unknown symbol {:?}", s.as_ref())))
            })
            .collect()
    }

    pub fn symbols(&self, x: &[usize]) -> Vec<String> {
        x.iter().enumerate().map(|(j, &s)| self.alphabets[j][s].clone()).collect()
    }

    /// Comma-joined symbols, the row key used in mechanism files.
    pub fn key(&self, x: &[usize]) -> String {
        self.symbols(x).join(",")
    }

    /// Symbols of every agent but `agent`.
    pub fn environment_symbols(&self, env: &[usize], agent: usize) -> Vec<String> {
        let mut s = self.symbols(env);
        s.remove(agent);
        s
    }
}

/// All tuples differing from `x` in exactly one coordinate (bounded neighbors).
pub fn neighbors(space: &InputSpace, x: &[usize]) -> Result<Vec<Vec<usize>>> {
    space.validate(x)?;
    let mut out = Vec::new();
    for j in 0..space.agents() {
        for s in 0..space.alphabet(j).len() {
            if s != x[j] {
                let mut y = x.to_vec();
                y[j] = s;
                out.push(y);
            }
        }
    }
    Ok(out)
}

fn check_distribution(row: &[Rational], what: &dyn fmt::Display) -> Result<()> {
    if row.iter().any(Signed::is_negative) {
        return Err(Error::invalid(format!("{what}: negative probability")));
    }
    let total: Rational = row.iter().sum();
    if !total.is_one() {
        return Err(Error::invalid(format!("{what}: probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// A finite mechanism given as an exact conditional probability table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMechanism {
    space: InputSpace,
    outputs: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl TableMechanism {
    /// `rows` is indexed by [`InputSpace::index`].
    pub fn new(space: InputSpace, outputs: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::invalid("mechanism needs at least one output"));
        }
        if rows.len() != space.size() {
            return Err(Error::invalid(format!(
                "expected {} rows, got {}",
                space.size(),
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != outputs.len() {
                return Err(Error::invalid(format!(
                    "row {} has {} entries, expected {}",
                    space.key(&space.tuple(i)),
                    row.len(),
                    outputs.len()
                )));
            }
            check_distribution(row, &format_args!("row {}", space.key(&space.tuple(i))))?;
        }
        Ok(TableMechanism { space, outputs, rows })
    }

    pub fn from_fn(
        space: InputSpace,
        outputs: Vec<String>,
        mut row: impl FnMut(&[usize]) -> Vec<Rational>,
    ) -> Result<Self> {
        let rows = space.tuples().map(|x| row(&x)).collect();
        TableMechanism::new(space, outputs, rows)
    }

    pub fn space(&self) -> &InputSpace {
        &self.space
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn row(&self, x: &[usize]) -> &[Rational] {
        &self.rows[self.space.index(x)]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// `f ∘ M` as a table over the consequence set.
    pub fn compose(&self, post: &PostProcessor) -> Result<TableMechanism> {
        post.check_outputs(&self.outputs)?;
        let rows = self.rows.iter().map(|r| post.apply(r)).collect();
        TableMechanism::new(self.space.clone(), post.consequences.clone(), rows)
    }
}

/// A (possibly randomized) map from outputs to consequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostProcessor {
    outputs: Vec<String>,
    consequences: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl PostProcessor {
    pub fn new(outputs: Vec<String>, consequences: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if consequences.is_empty() {
            return Err(Error::invalid("post-processor needs at least one consequence"));
        }
        if rows.len() != outputs.len() {
            return Err(Error::invalid("post-processor needs one row per output"));
        }
        for (o, row) in outputs.iter().zip(&rows) {
            if row.len() != consequences.len() {
                return Err(Error::invalid(format!("post-processor row {o:?} has wrong length")));
            }
            check_distribution(row, &format_args!("post-processor row {o:?}"))?;
        }
        Ok(PostProcessor { outputs, consequences, rows })
    }

    /// Deterministic map given as output -> consequence name.
    pub fn deterministic(
        outputs: &[String],
        consequences: &[String],
        map: impl Fn(&str) -> String,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(outputs.len());
        for o in outputs {
            let c = map(o);
            let k = consequences
                .iter()
                .position(|x| *x == c)
                .ok_or_else(|| Error::invalid(format!("output {o:?} maps to unknown consequence {c:?}")))?;
            let mut row = vec![Rational::zero(); consequences.len()];
            row[k] = Rational::one();
            rows.push(row);
        }
        PostProcessor::new(outputs.to_vec(), consequences.to_vec(), rows)
    }

    pub fn identity(outputs: &[String]) -> Self {
        PostProcessor::deterministic(outputs, outputs, str::to_string).expect("identity is well formed")
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn consequences(&self) -> &[String] {
        &self.consequences
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    fn check_outputs(&self, outputs: &[String]) -> Result<()> {
        if self.outputs != outputs {
            return Err(Error::invalid(format!(
                "post-processor expects outputs {:?}, mechanism has {:?}",
                self.outputs, outputs
            )));
        }
        Ok(())
    }

    /// Pushes a distribution over outputs through to consequences.
    pub fn apply(&self, dist: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.consequences.len()];
        for (p, row) in dist.iter().zip(&self.rows) {
            if p.is_zero() {
                continue;
            }
            for (acc, q) in out.iter_mut().zip(row) {
                *acc += p * q;
            }
        }
        out
    }
}

/// Anything that yields a consequence distribution for each input tuple: the
/// object agents actually reason about.
pub trait ConsequenceMechanism: Sync {
    fn input_space(&self) -> &InputSpace;
    fn consequences(&self) -> &[String];
    fn consequence_distribution(&self, x: &[usize]) -> Result<Vec<Real>>;
}

impl ConsequenceMechanism for TableMechanism {
    fn input_space(&self) -> &InputSpace {
        &self.space
    }

    fn consequences(&self) -> &[String] {
        &self.outputs
    }

    fn consequence_distribution(&self, x: &[usize]) -> Result<Vec<Real>> {
        self.space.validate(x)?;
        Ok(self.row(x).iter().cloned().map(Real::from).collect())
    }
}

/// A table mechanism followed by a post-processor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostProcessed {
    mechanism: TableMechanism,
    post: PostProcessor,
    composed: TableMechanism,
}

impl PostProcessed {
    pub fn new(mechanism: TableMechanism, post: PostProcessor) -> Result<Self> {
        let composed = mechanism.compose(&post)?;
        Ok(PostProcessed { mechanism, post, composed })
    }

    pub fn mechanism(&self) -> &TableMechanism {
        &self.mechanism
    }

    pub fn post_processor(&self) -> &PostProcessor {
        &self.post
    }

    /// The composition as a table over consequences.
    pub fn composed(&self) -> &TableMechanism {
        &self.composed
    }
}

impl ConsequenceMechanism for PostProcessed {
    fn input_space(&self) -> &InputSpace {
        self.mechanism.space()
    }

    fn consequences(&self) -> &[String] {
        self.post.consequences()
    }

    fn consequence_distribution(&self, x: &[usize]) -> Result<Vec<Real>> {
        self.composed.consequence_distribution(x)
    }
}

/// Exact consequence distribution of `f ∘ M` at `x`.
pub fn consequence_distribution(m: &TableMechanism, f: &PostProcessor, x: &[usize]) -> Result<Vec<Rational>> {
    m.space.validate(x)?;
    f.check_outputs(&m.outputs)?;
    Ok(f.apply(m.row(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Consequence `1` iff the noisy answer is `≤ threshold`.
    AtMost,
    /// Consequence `1` iff the noisy answer is `≥ threshold`.
    AtLeast,
}

/// `q(x) + Lap(GS/ε)` followed by a threshold indicator, evaluated through the
/// closed-form Laplace CDF. Consequences are `"0"` and `"1"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdLaplaceMechanism {
    space: InputSpace,
    weights: Vec<Vec<Rational>>,
    sensitivity: Rational,
    epsilon: Epsilon,
    threshold: Rational,
    direction: Direction,
    consequences: Vec<String>,
}

impl ThresholdLaplaceMechanism {
    /// Counting query `q(x) = Σ xᵢ·1(xᵢ ≠ ⊥)`: every symbol other than `⊥` must
    /// be a rational literal.
    pub fn counting(
        space: InputSpace,
        sensitivity: Rational,
        epsilon: Epsilon,
        threshold: Rational,
        direction: Direction,
    ) -> Result<Self> {
        let weights = space
            .alphabets()
            .iter()
            .map(|a| {
                a.iter()
                    .map(|s| {
                        if s == OPT_OUT {
                            Ok(Rational::zero())
                        } else {
                            rational::parse_rational(s)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ThresholdLaplaceMechanism::with_weights(space, weights, sensitivity, epsilon, threshold, direction)
    }

    pub fn with_weights(
        space: InputSpace,
        weights: Vec<Vec<Rational>>,
        sensitivity: Rational,
        epsilon: Epsilon,
        threshold: Rational,
        direction: Direction,
    ) -> Result<Self> {
        if !sensitivity.is_positive() {
            return Err(Error::domain(format!("sensitivity must be positive, got {sensitivity}")));
        }
        if epsilon.is_zero() {
            return Err(Error::domain("Laplace mechanism needs epsilon > 0"));
        }
        if weights.len() != space.agents()
            || weights.iter().zip(space.alphabets()).any(|(w, a)| w.len() != a.len())
        {
            return Err(Error::invalid("query weights must match the alphabets"));
        }
        Ok(ThresholdLaplaceMechanism {
            space,
            weights,
            sensitivity,
            epsilon,
            threshold,
            direction,
            consequences: vec!["0".into(), "1".into()],
        })
    }

    pub fn epsilon(&self) -> &Epsilon {
        &self.epsilon
    }

    pub fn sensitivity(&self) -> &Rational {
        &self.sensitivity
    }

    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn query(&self, x: &[usize]) -> Rational {
        x.iter().zip(&self.weights).map(|(&s, w)| &w[s]).sum()
    }

    /// Largest change of the query under one switched coordinate.
    pub fn computed_sensitivity(&self) -> Rational {
        self.weights
            .iter()
            .map(|w| {
                let max = w.iter().max().unwrap();
                let min = w.iter().min().unwrap();
                max - min
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `P(L ≤ d)` for `L ~ Lap(GS/ε)`.
    pub fn laplace_cdf(&self, d: &Rational) -> Result<Real> {
        let k = d / &self.sensitivity;
        let half = Real::from(rational::ratio(1, 2));
        if !d.is_positive() {
            Ok(&half * &self.epsilon.exp_times(&k)?)
        } else {
            Ok(&Real::one() - &(&half * &self.epsilon.exp_times(&-k)?))
        }
    }

    /// Probability of the threshold event at `x`, exactly.
    pub fn threshold_probability(&self, x: &[usize]) -> Result<Real> {
        self.space.validate(x)?;
        let cdf = self.laplace_cdf(&(&self.threshold - self.query(x)))?;
        Ok(match self.direction {
            Direction::AtMost => cdf,
            Direction::AtLeast => &Real::one() - &cdf,
        })
    }
}

impl ConsequenceMechanism for ThresholdLaplaceMechanism {
    fn input_space(&self) -> &InputSpace {
        &self.space
    }

    fn consequences(&self) -> &[String] {
        &self.consequences
    }

    fn consequence_distribution(&self, x: &[usize]) -> Result<Vec<Real>> {
        let p = self.threshold_probability(x)?;
        Ok(vec![&Real::one() - &p, p])
    }
}

fn exp_eps_rational(eps: &Epsilon) -> Result<Rational> {
    eps.exp().as_rational().ok_or_else(|| {
        Error::domain(format!("e^{eps} is irrational; give epsilon as ln of a rational"))
    })
}

/// The two-member noisy count whose rows depend only on how many agents
/// report `"1"`:
///
/// | count | p₀    | p₁     | p₂     |
/// |-------|-------|--------|--------|
/// | 0     | φ     | e^ε φ  | e^2ε φ |
/// | 1     | φ     | e^2ε φ | e^ε φ  |
/// | 2     | e^ε φ | e^2ε φ | φ      |
///
/// with `φ = (1 + e^ε + e^2ε)⁻¹`.
pub fn example1_mechanism(eps: &Epsilon) -> Result<TableMechanism> {
    example1_mechanism_over(InputSpace::uniform(2, &["0", "1"])?, eps)
}

/// The same table over any two-agent space; a symbol counts iff it is `"1"`.
pub fn example1_mechanism_over(space: InputSpace, eps: &Epsilon) -> Result<TableMechanism> {
    if eps.is_zero() {
        return Err(Error::domain("example mechanism needs epsilon > 0"));
    }
    if space.agents() != 2 {
        return Err(Error::invalid("example mechanism has exactly two agents"));
    }
    let r = exp_eps_rational(eps)?;
    let r2 = &r * &r;
    let phi = (Rational::one() + &r + &r2).recip();
    let one = Rational::one();
    let table = [
        [one.clone(), r.clone(), r2.clone()],
        [one.clone(), r2.clone(), r.clone()],
        [r.clone(), r2.clone(), one],
    ];
    let outputs = ["0", "1", "2"].map(String::from).to_vec();
    let sp = space.clone();
    TableMechanism::from_fn(space, outputs, |x| {
        let count = sp.symbols(x).iter().filter(|s| *s == "1").count();
        table[count].iter().map(|w| w * &phi).collect()
    })
}

/// One agent, bit input, output flipped with probability `flip`.
pub fn randomized_response(flip: Rational) -> Result<TableMechanism> {
    if flip.is_negative() || flip > Rational::one() {
        return Err(Error::domain("flip probability must lie in [0,1]"));
    }
    let keep = Rational::one() - &flip;
    let space = InputSpace::uniform(1, &["0", "1"])?;
    let outputs = vec!["0".to_string(), "1".to_string()];
    TableMechanism::from_fn(space, outputs, |x| {
        if x[0] == 0 {
            vec![keep.clone(), flip.clone()]
        } else {
            vec![flip.clone(), keep.clone()]
        }
    })
}

/// With probability `delta` outputs the number of agents reporting `"1"`,
/// otherwise the fixed symbol `"*"`. Satisfies `(0, δ)`-DP and nothing finite
/// in pure ε once `δ > 0`.
pub fn reveal_count_mechanism(space: InputSpace, delta: Rational) -> Result<TableMechanism> {
    if delta.is_negative() || delta > Rational::one() {
        return Err(Error::domain("delta must lie in [0,1]"));
    }
    let n = space.agents();
    let mut outputs: Vec<String> = (0..=n).map(|k| k.to_string()).collect();
    outputs.push("*".into());
    let rest = Rational::one() - &delta;
    let sp = space.clone();
    TableMechanism::from_fn(space, outputs, |x| {
        let count = sp.symbols(x).iter().filter(|s| *s == "1").count();
        let mut row = vec![Rational::zero(); n + 2];
        row[count] += &delta;
        row[n + 1] += &rest;
        row
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ln(n: i64) -> Epsilon {
        Epsilon::Ln(int(n))
    }

    #[test]
    fn example1_rows_at_ln2() {
        let m = example1_mechanism(&ln(2)).unwrap();
        assert_eq!(m.row(&[0, 0]), &[ratio(1, 7), ratio(2, 7), ratio(4, 7)]);
        assert_eq!(m.row(&[1, 0]), &[ratio(1, 7), ratio(4, 7), ratio(2, 7)]);
        for row in m.rows() {
            assert_eq!(row.iter().sum::<Rational>(), int(1));
        }
    }

    #[test]
    fn example1_rows_at_ln3() {
        let m = example1_mechanism(&ln(3)).unwrap();
        assert_eq!(m.row(&[1, 1]), &[ratio(3, 13), ratio(9, 13), ratio(1, 13)]);
        assert!(example1_mechanism(&Epsilon::Value(int(1))).is_err());
    }

    #[test]
    fn identity_post_processing_returns_the_row() {
        let m = example1_mechanism(&ln(2)).unwrap();
        let f = PostProcessor::identity(m.outputs());
        assert_eq!(
            consequence_distribution(&m, &f, &[1, 0]).unwrap(),
            vec![ratio(1, 7), ratio(4, 7), ratio(2, 7)]
        );
    }

    #[test]
    fn grief_unless_zero() {
        let m = example1_mechanism(&ln(2)).unwrap();
        let c = vec!["g".to_string(), "n".to_string()];
        let f = PostProcessor::deterministic(m.outputs(), &c, |o| if o == "0" { "n".into() } else { "g".into() }).unwrap();
        let d = consequence_distribution(&m, &f, &[1, 1]).unwrap();
        assert_eq!(d, vec![ratio(5, 7), ratio(2, 7)]);
    }

    #[test]
    fn constant_post_processor_gives_point_mass() {
        let m = example1_mechanism(&ln(2)).unwrap();
        let c = vec!["only".to_string()];
        let f = PostProcessor::deterministic(m.outputs(), &c, |_| "only".into()).unwrap();
        for x in m.space().tuples() {
            assert_eq!(consequence_distribution(&m, &f, &x).unwrap(), vec![int(1)]);
        }
    }

    #[test]
    fn rejects_bad_rows_and_tuples() {
        let space = InputSpace::uniform(1, &["0", "1"]).unwrap();
        let outputs = vec!["a".to_string(), "b".to_string()];
        let bad = vec![vec![ratio(1, 2), ratio(49, 100)], vec![int(1), int(0)]];
        assert!(TableMechanism::new(space.clone(), outputs.clone(), bad).is_err());
        let neg = vec![vec![int(2), int(-1)], vec![int(1), int(0)]];
        assert!(TableMechanism::new(space, outputs, neg).is_err());
        let m = example1_mechanism(&ln(2)).unwrap();
        let f = PostProcessor::identity(m.outputs());
        assert!(consequence_distribution(&m, &f, &[0, 2]).is_err());
        assert!(consequence_distribution(&m, &f, &[0]).is_err());
    }

    #[test]
    fn neighbor_enumeration() {
        let bits = InputSpace::uniform(2, &["0", "1"]).unwrap();
        let x = bits.parse_tuple(&["1", "0"]).unwrap();
        let ns: Vec<String> = neighbors(&bits, &x).unwrap().iter().map(|y| bits.key(y)).collect();
        assert_eq!(ns, ["0,0", "1,1"]);

        let one = InputSpace::uniform(1, &[OPT_OUT, "1", "2"]).unwrap();
        let ns: Vec<String> = neighbors(&one, &[1]).unwrap().iter().map(|y| one.key(y)).collect();
        assert_eq!(ns, [OPT_OUT, "2"]);

        for (n, k) in [(1, 2), (3, 3), (4, 2), (2, 5)] {
            let alphabet: Vec<String> = (0..k).map(|s| s.to_string()).collect();
            let refs: Vec<&str> = alphabet.iter().map(String::as_str).collect();
            let space = InputSpace::uniform(n, &refs).unwrap();
            for x in space.tuples() {
                assert_eq!(neighbors(&space, &x).unwrap().len(), n * (k - 1));
            }
        }
    }

    #[test]
    fn composition_is_a_table() {
        let m = example1_mechanism(&ln(2)).unwrap();
        let c = vec!["g".to_string(), "n".to_string()];
        let f = PostProcessor::new(
            m.outputs().to_vec(),
            c,
            vec![vec![ratio(1, 3), ratio(2, 3)], vec![int(1), int(0)], vec![ratio(1, 2), ratio(1, 2)]],
        )
        .unwrap();
        let composed = m.compose(&f).unwrap();
        assert_eq!(composed.outputs(), f.consequences());
        assert!(m.compose(&PostProcessor::identity(&["x".to_string()])).is_err());
    }

    fn example2(n: usize, eps: i64, direction: Direction) -> ThresholdLaplaceMechanism {
        let space = InputSpace::uniform(n, &[OPT_OUT, "1", "2"]).unwrap();
        ThresholdLaplaceMechanism::counting(
            space,
            int(2),
            Epsilon::Value(int(eps)),
            int(n as i64 - 1),
            direction,
        )
        .unwrap()
    }

    #[test]
    fn laplace_threshold_closed_form() {
        let m = example2(3, 1, Direction::AtMost);
        assert_eq!(m.computed_sensitivity(), int(2));
        let opt_out = m.input_space().parse_tuple(&[OPT_OUT, "1", "1"]).unwrap();
        assert_eq!(m.query(&opt_out), int(2));
        assert_eq!(m.threshold_probability(&opt_out).unwrap(), Real::from(ratio(1, 2)));

        let m = example2(3, 2, Direction::AtMost);
        let all = m.input_space().parse_tuple(&["1", "1", "1"]).unwrap();
        let p = m.threshold_probability(&all).unwrap();
        assert_eq!(p, Real::term(ratio(1, 2), int(-1)));
        assert!((p.to_f64() - 0.18394).abs() < 1e-5);
    }

    #[test]
    fn laplace_cdf_tends_to_one() {
        let m = example2(3, 1, Direction::AtMost);
        let far = m.laplace_cdf(&int(10_000)).unwrap();
        assert!(far < Real::one());
        assert_eq!(far.to_f64(), 1.0);
        assert_eq!(m.laplace_cdf(&int(-10_000)).unwrap().to_f64(), 0.0);
    }

    #[test]
    fn laplace_rejects_degenerate_parameters() {
        let space = InputSpace::uniform(2, &[OPT_OUT, "1"]).unwrap();
        assert!(ThresholdLaplaceMechanism::counting(space.clone(), int(0), Epsilon::Value(int(1)), int(1), Direction::AtMost).is_err());
        assert!(ThresholdLaplaceMechanism::counting(space, int(1), Epsilon::zero(), int(1), Direction::AtMost).is_err());
    }

    #[test]
    fn reveal_mechanism_rows() {
        let space = InputSpace::uniform(2, &[OPT_OUT, "1"]).unwrap();
        let m = reveal_count_mechanism(space, ratio(1, 20)).unwrap();
        assert_eq!(m.outputs(), ["0", "1", "2", "*"]);
        assert_eq!(m.row(&[1, 1]), &[int(0), int(0), ratio(1, 20), ratio(19, 20)]);
    }
}
