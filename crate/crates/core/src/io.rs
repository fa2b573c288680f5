//! JSON mechanism and scenario files.
//!
//! Probabilities are exact rational strings (`"1/7"`); decimals are rejected in
//! mechanism rows. Utilities use hyperreal term syntax (`"-w"`, `"1/2"`).
//! Epsilon is `"ln(p/q)"` or a rational; delta may be an exact decimal.
//!
//! A mechanism is either an inline table
//!
//! ```json
//! {"agents": [["0","1"],["0","1"]], "outputs": ["0","1"],
//!  "rows": {"0,0": ["3/4","1/4"], "0,1": ["1/2","1/2"], ...}}
//! ```
//!
//! or a parametric family, `{"family": "example1", "params": {"epsilon": "ln(2)"}}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::audit::{tight_delta, tightest_epsilon};
use crate::error::{Error, Result};
use crate::hyperreal::Hyperreal;
use crate::mechanism::{
    example1_mechanism_over, randomized_response, reveal_count_mechanism, ConsequenceMechanism, Direction, InputSpace,
    PostProcessor, TableMechanism, ThresholdLaplaceMechanism,
};
use crate::params::{parse_delta, Epsilon};
use crate::rational::{format_rational, parse_decimal, parse_rational, Rational};
use crate::real::Real;
use crate::utility::{PreferenceOrdering, UtilityFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub agents: Vec<Vec<String>>,
    pub outputs: Vec<String>,
    /// Keyed by the comma-joined input tuple.
    pub rows: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    Example1 {
        epsilon: Epsilon,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        agents: Option<Vec<Vec<String>>>,
    },
    RandomizedResponse {
        flip: String,
    },
    RevealCount {
        agents: Vec<Vec<String>>,
        delta: String,
    },
    ThresholdLaplace {
        agents: Vec<Vec<String>>,
        sensitivity: String,
        epsilon: Epsilon,
        threshold: String,
        direction: Direction,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MechanismFile {
    Table(TableSpec),
    Family(FamilySpec),
}

/// A validated mechanism: finite table, or the analytic Laplace family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    Table(TableMechanism),
    Laplace(Box<ThresholdLaplaceMechanism>),
}

impl Mechanism {
    pub fn space(&self) -> &InputSpace {
        match self {
            Mechanism::Table(m) => m.space(),
            Mechanism::Laplace(m) => m.input_space(),
        }
    }

    pub fn outputs(&self) -> &[String] {
        match self {
            Mechanism::Table(m) => m.outputs(),
            Mechanism::Laplace(m) => m.consequences(),
        }
    }

    pub fn as_table(&self) -> Option<&TableMechanism> {
        match self {
            Mechanism::Table(m) => Some(m),
            Mechanism::Laplace(_) => None,
        }
    }

    fn distribution(&self, x: &[usize]) -> Result<Vec<Real>> {
        match self {
            Mechanism::Table(m) => m.consequence_distribution(x),
            Mechanism::Laplace(m) => m.consequence_distribution(x),
        }
    }
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Validation { .. } => e,
        other => Error::validation(path, other.to_string()),
    }
}

fn json_at<T: for<'de> Deserialize<'de>>(v: &Value, path: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::validation(path, e.to_string()))
}

fn space_at(agents: &[Vec<String>], path: &str) -> Result<InputSpace> {
    InputSpace::new(agents.to_vec()).map_err(|e| at(&format!("{path}.agents"), e))
}

fn table_from_spec(spec: &TableSpec, path: &str) -> Result<TableMechanism> {
    let space = space_at(&spec.agents, path)?;
    let mut rows = vec![None; space.size()];
    for (key, row) in &spec.rows {
        let rpath = format!("{path}.rows[{key:?}]");
        let symbols: Vec<&str> = key.split(',').map(str::trim).collect();
        let x = space.parse_tuple(&symbols).map_err(|e| at(&rpath, e))?;
        if row.len() != spec.outputs.len() {
            return Err(Error::validation(
                &rpath,
                format!("expected {} probabilities, found {}", spec.outputs.len(), row.len()),
            ));
        }
        let probs = row
            .iter()
            .enumerate()
            .map(|(i, p)| parse_rational(p).map_err(|e| at(&format!("{rpath}[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        if probs.iter().any(|p| p < &Rational::from_integer(0.into())) {
            return Err(Error::validation(&rpath, "negative probability"));
        }
        let sum: Rational = probs.iter().sum();
        if sum != Rational::from_integer(1.into()) {
            return Err(Error::validation(&rpath, format!("row sums to {sum}, not 1")));
        }
        rows[space.index(&x)] = Some(probs);
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| Error::validation(format!("{path}.rows"), format!("missing row {:?}", space.key(&space.tuple(i))))))
        .collect::<Result<Vec<_>>>()?;
    TableMechanism::new(space, spec.outputs.clone(), rows).map_err(|e| at(path, e))
}

fn family_mechanism(spec: &FamilySpec, path: &str) -> Result<Mechanism> {
    let params = format!("{path}.params");
    let m = match spec {
        FamilySpec::Example1 { epsilon, agents } => {
            let space = match agents {
                Some(a) => space_at(a, &params)?,
                None => InputSpace::uniform(2, &["0", "1"])?,
            };
            Mechanism::Table(example1_mechanism_over(space, epsilon).map_err(|e| at(&format!("{params}.epsilon"), e))?)
        }
        FamilySpec::RandomizedResponse { flip } => {
            let p = format!("{params}.flip");
            let q = parse_decimal(flip).map_err(|e| at(&p, e))?;
            Mechanism::Table(randomized_response(q).map_err(|e| at(&p, e))?)
        }
        FamilySpec::RevealCount { agents, delta } => {
            let p = format!("{params}.delta");
            let d = parse_delta(delta).map_err(|e| at(&p, e))?;
            Mechanism::Table(reveal_count_mechanism(space_at(agents, &params)?, d).map_err(|e| at(&p, e))?)
        }
        FamilySpec::ThresholdLaplace { agents, sensitivity, epsilon, threshold, direction } => {
            let gs = parse_decimal(sensitivity).map_err(|e| at(&format!("{params}.sensitivity"), e))?;
            let t = parse_decimal(threshold).map_err(|e| at(&format!("{params}.threshold"), e))?;
            let m = ThresholdLaplaceMechanism::counting(space_at(agents, &params)?, gs, epsilon.clone(), t, *direction)
                .map_err(|e| at(&params, e))?;
            Mechanism::Laplace(Box::new(m))
        }
    };
    Ok(m)
}

/// Parses and validates a mechanism object found at JSON path `path`.
pub fn mechanism_from_value(v: &Value, path: &str) -> Result<(Mechanism, MechanismFile)> {
    if v.get("family").is_some() {
        let spec: FamilySpec = json_at(v, path)?;
        let m = family_mechanism(&spec, path)?;
        Ok((m, MechanismFile::Family(spec)))
    } else {
        let spec: TableSpec = json_at(v, path)?;
        let m = table_from_spec(&spec, path)?;
        Ok((Mechanism::Table(m.clone()), MechanismFile::Table(table_spec(&m))))
    }
}

/// Canonical file form of a table mechanism.
pub fn table_spec(m: &TableMechanism) -> TableSpec {
    let space = m.space();
    TableSpec {
        agents: space.alphabets().to_vec(),
        outputs: m.outputs().to_vec(),
        rows: space
            .tuples()
            .map(|x| (space.key(&x), m.row(&x).iter().map(format_rational).collect()))
            .collect(),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads a mechanism file, or the mechanism embedded in a scenario file.
pub fn parse_mechanism(path: impl AsRef<Path>) -> Result<Mechanism> {
    let v = read_json(path.as_ref())?;
    match v.get("mechanism") {
        Some(inner) => Ok(mechanism_from_value(inner, "$.mechanism")?.0),
        None => Ok(mechanism_from_value(&v, "$")?.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConsequenceSpec {
    Fixed(String),
    Random(BTreeMap<String, String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    mechanism: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    post_processor: Option<BTreeMap<String, ConsequenceSpec>>,
    consequences: Vec<String>,
    utilities: BTreeMap<String, BTreeMap<String, String>>,
    agent: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preferences: Option<Vec<Vec<String>>>,
}

/// A validated scenario: mechanism, post-processor, utilities and the agent
/// under analysis.
#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub name: Option<String>,
    pub mechanism: Mechanism,
    pub post_processor: PostProcessor,
    pub consequences: Vec<String>,
    pub utilities: BTreeMap<usize, UtilityFunction>,
    pub agent: usize,
    pub epsilon: Option<Epsilon>,
    pub delta: Option<Rational>,
    pub preferences: Option<PreferenceOrdering>,
    canonical: RawScenario,
}

fn post_processor_at(
    raw: &Option<BTreeMap<String, ConsequenceSpec>>,
    outputs: &[String],
    consequences: &[String],
) -> Result<(PostProcessor, Option<BTreeMap<String, ConsequenceSpec>>)> {
    let Some(map) = raw else {
        if outputs != consequences {
            return Err(Error::validation(
                "$.post_processor",
                "required unless the consequences equal the mechanism outputs",
            ));
        }
        return Ok((PostProcessor::identity(outputs), None));
    };
    for key in map.keys() {
        if !outputs.contains(key) {
            return Err(Error::validation(format!("$.post_processor[{key:?}]"), format!("unknown output {key:?}")));
        }
    }
    let position = |c: &str, path: &str| {
        consequences
            .iter()
            .position(|x| x == c)
            .ok_or_else(|| Error::validation(path, format!("unknown consequence {c:?}")))
    };
    let mut rows = Vec::with_capacity(outputs.len());
    let mut canonical = BTreeMap::new();
    for o in outputs {
        let path = format!("$.post_processor[{o:?}]");
        let spec = map.get(o).ok_or_else(|| Error::validation(&path, "missing output"))?;
        let mut row = vec![Rational::from_integer(0.into()); consequences.len()];
        match spec {
            ConsequenceSpec::Fixed(c) => {
                row[position(c, &path)?] = Rational::from_integer(1.into());
                canonical.insert(o.clone(), spec.clone());
            }
            ConsequenceSpec::Random(probs) => {
                let mut canon = BTreeMap::new();
                for (c, p) in probs {
                    let cpath = format!("{path}[{c:?}]");
                    let q = parse_rational(p).map_err(|e| at(&cpath, e))?;
                    row[position(c, &cpath)?] = q.clone();
                    canon.insert(c.clone(), format_rational(&q));
                }
                let sum: Rational = row.iter().sum();
                if sum != Rational::from_integer(1.into()) || row.iter().any(|p| p < &Rational::from_integer(0.into())) {
                    return Err(Error::validation(&path, format!("not a distribution (sums to {sum})")));
                }
                canonical.insert(o.clone(), ConsequenceSpec::Random(canon));
            }
        }
        rows.push(row);
    }
    let f = PostProcessor::new(outputs.to_vec(), consequences.to_vec(), rows).map_err(|e| at("$.post_processor", e))?;
    Ok((f, Some(canonical)))
}

type RawUtilities = BTreeMap<String, BTreeMap<String, String>>;

fn utilities_at(
    raw: &RawUtilities,
    agents: usize,
    consequences: &[String],
) -> Result<(BTreeMap<usize, UtilityFunction>, RawUtilities)> {
    let mut out = BTreeMap::new();
    let mut canonical = BTreeMap::new();
    for (key, values) in raw {
        let path = format!("$.utilities[{key:?}]");
        let j: usize = key
            .parse()
            .ok()
            .filter(|j| *j < agents)
            .ok_or_else(|| Error::validation(&path, format!("not an agent index below {agents}")))?;
        for c in values.keys() {
            if !consequences.contains(c) {
                return Err(Error::validation(format!("{path}[{c:?}]"), format!("unknown consequence {c:?}")));
            }
        }
        let mut parsed = Vec::with_capacity(consequences.len());
        for c in consequences {
            let cpath = format!("{path}[{c:?}]");
            let s = values.get(c).ok_or_else(|| Error::validation(&cpath, "missing utility"))?;
            let h: Hyperreal = s.parse().map_err(|e| at(&cpath, e))?;
            parsed.push((c.clone(), h));
        }
        let u = UtilityFunction::new(parsed).map_err(|e| at(&path, e))?;
        canonical.insert(
            j.to_string(),
            u.values().iter().map(|(c, h)| (c.clone(), h.to_string())).collect(),
        );
        out.insert(j, u);
    }
    Ok((out, canonical))
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let raw: RawScenario = json_at(&v, "$")?;
        let (mechanism, mechanism_file) = mechanism_from_value(&raw.mechanism, "$.mechanism")?;

        let mut seen = std::collections::HashSet::new();
        if raw.consequences.is_empty() {
            return Err(Error::validation("$.consequences", "empty consequence set"));
        }
        if let Some(dup) = raw.consequences.iter().find(|c| !seen.insert(*c)) {
            return Err(Error::validation("$.consequences", format!("duplicate consequence {dup:?}")));
        }
        let (post_processor, post_canon) = post_processor_at(&raw.post_processor, mechanism.outputs(), &raw.consequences)?;

        let agents = mechanism.space().agents();
        if raw.agent >= agents {
            return Err(Error::validation("$.agent", format!("agent {} out of range for {agents} agents", raw.agent)));
        }
        let (utilities, util_canon) = utilities_at(&raw.utilities, agents, &raw.consequences)?;
        if !utilities.contains_key(&raw.agent) {
            return Err(Error::validation("$.utilities", format!("no utility for agent {}", raw.agent)));
        }

        let epsilon = raw
            .epsilon
            .as_deref()
            .map(|s| s.parse::<Epsilon>().map_err(|e| at("$.epsilon", e)))
            .transpose()?;
        let delta = raw
            .delta
            .as_deref()
            .map(|s| parse_delta(s).map_err(|e| at("$.delta", e)))
            .transpose()?;
        let preferences = raw
            .preferences
            .clone()
            .map(|p| {
                for (i, class) in p.iter().enumerate() {
                    for c in class {
                        if !raw.consequences.contains(c) {
                            return Err(Error::validation(format!("$.preferences[{i}]"), format!("unknown consequence {c:?}")));
                        }
                    }
                }
                PreferenceOrdering::new(p).map_err(|e| at("$.preferences", e))
            })
            .transpose()?;

        let canonical = RawScenario {
            name: raw.name.clone(),
            mechanism: serde_json::to_value(&mechanism_file)?,
            post_processor: post_canon,
            consequences: raw.consequences.clone(),
            utilities: util_canon,
            agent: raw.agent,
            epsilon: epsilon.as_ref().map(Epsilon::to_string),
            delta: delta.as_ref().map(format_rational),
            preferences: preferences.clone().map(Into::into),
        };
        Ok(ScenarioFile {
            name: raw.name,
            mechanism,
            post_processor,
            consequences: raw.consequences,
            utilities,
            agent: raw.agent,
            epsilon,
            delta,
            preferences,
            canonical,
        })
    }

    /// Canonical JSON; parsing it back yields the same scenario.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.canonical)?)
    }

    /// Utility of the agent under analysis.
    pub fn utility(&self) -> &UtilityFunction {
        &self.utilities[&self.agent]
    }

    /// The post-processed mechanism the agents reason about.
    pub fn model(&self) -> Model {
        Model {
            mechanism: self.mechanism.clone(),
            post: self.post_processor.clone(),
        }
    }

    /// Nominal `(ε, δ)` from the file; missing values are filled in from an
    /// exact audit of table mechanisms, or the Laplace family's own ε.
    pub fn privacy_parameters(&self) -> Result<(Epsilon, Real)> {
        let audited = || -> Result<(Epsilon, Real)> {
            match &self.mechanism {
                Mechanism::Table(m) => match tightest_epsilon(m).epsilon.epsilon() {
                    Some(eps) => Ok((eps, Real::zero())),
                    None => Ok((Epsilon::zero(), tight_delta(m, &Epsilon::zero()))),
                },
                Mechanism::Laplace(m) => Ok((m.epsilon().clone(), Real::zero())),
            }
        };
        match (&self.epsilon, &self.delta) {
            (Some(e), Some(d)) => Ok((e.clone(), Real::from(d.clone()))),
            (Some(e), None) => {
                let d = match &self.mechanism {
                    Mechanism::Table(m) => tight_delta(m, e),
                    Mechanism::Laplace(_) => Real::zero(),
                };
                Ok((e.clone(), d))
            }
            (None, Some(_)) => Err(Error::validation("$.epsilon", "delta given without epsilon")),
            (None, None) => audited(),
        }
    }
}

pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let text = std::fs::read_to_string(path.as_ref())?;
    ScenarioFile::from_json(&text)
}

/// A mechanism followed by a post-processor over its outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    mechanism: Mechanism,
    post: PostProcessor,
}

impl Model {
    pub fn mechanism(&self) -> &Mechanism {
        &self.mechanism
    }
}

impl ConsequenceMechanism for Model {
    fn input_space(&self) -> &InputSpace {
        self.mechanism.space()
    }

    fn consequences(&self) -> &[String] {
        self.post.consequences()
    }

    fn consequence_distribution(&self, x: &[usize]) -> Result<Vec<Real>> {
        let d = self.mechanism.distribution(x)?;
        let mut out = vec![Real::zero(); self.post.consequences().len()];
        for (p, row) in d.iter().zip(self.post.rows()) {
            for (acc, q) in out.iter_mut().zip(row) {
                if q != &Rational::from_integer(0.into()) {
                    *acc += &p.scale(q);
                }
            }
        }
        Ok(out)
    }
}
