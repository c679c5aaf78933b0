//! Epistemic expectation models and update by observation.
//!
//! An [`ExpectationModel`] is a Kripke structure whose worlds each carry an
//! observation expression describing the observation strings expected
//! there. Observing a word removes the worlds whose expectation has no
//! continuation for it and residuates the expectations of the survivors.

mod eval;
mod formula;

pub use eval::{BoxGuard, EvalOptions};
pub use formula::{parse_formula, Formula};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::obslang::{ObsExpr, ObsWord};

/// Marker bound for world identifiers; models are generic so that callers
/// can use whatever identifier fits (the muddy protocol uses bit vectors).
pub trait World: Clone + Eq + Ord + Hash + fmt::Debug {}

impl<T: Clone + Eq + Ord + Hash + fmt::Debug> World for T {}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Agent(pub String);

impl Agent {
    pub fn new(name: &str) -> Self {
        Agent(name.to_string())
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An atomic proposition name, e.g. `m_a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prop(pub String);

impl Prop {
    pub fn new(name: &str) -> Self {
        Prop(name.to_string())
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolError {
    /// An update left no world standing; expectation models must stay
    /// non-empty, so this is surfaced instead of an empty value.
    #[error("update by observation left an empty model")]
    EmptyModel,
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("world {0} not in model")]
    WorldNotFound(String),
    #[error("box evaluation exceeded the word-length cap of {cap}")]
    BoundExceeded { cap: usize },
}

/// Plain Kripke structure: worlds, one accessibility relation per agent,
/// and a valuation for atomic propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicModel<W: World> {
    pub worlds: BTreeSet<W>,
    pub relations: BTreeMap<Agent, BTreeSet<(W, W)>>,
    pub valuation: BTreeMap<Prop, BTreeSet<W>>,
}

impl<W: World> EpistemicModel<W> {
    pub fn new(
        worlds: BTreeSet<W>,
        relations: BTreeMap<Agent, BTreeSet<(W, W)>>,
        valuation: BTreeMap<Prop, BTreeSet<W>>,
    ) -> Self {
        EpistemicModel { worlds, relations, valuation }
    }

    /// Worlds the agent cannot distinguish from `w`.
    pub fn neighbors<'a>(&'a self, agent: &Agent, w: &'a W) -> impl Iterator<Item = &'a W> {
        self.relations
            .get(agent)
            .into_iter()
            .flat_map(|pairs| pairs.iter())
            .filter(move |(from, _)| from == w)
            .map(|(_, to)| to)
    }

    /// Restricts worlds, relations, and valuation to `keep`.
    pub fn restricted_to(&self, keep: &BTreeSet<W>) -> Self {
        let worlds: BTreeSet<W> = self.worlds.intersection(keep).cloned().collect();
        let relations = self
            .relations
            .iter()
            .map(|(agent, pairs)| {
                let kept = pairs
                    .iter()
                    .filter(|(a, b)| worlds.contains(a) && worlds.contains(b))
                    .cloned()
                    .collect();
                (agent.clone(), kept)
            })
            .collect();
        let valuation = self
            .valuation
            .iter()
            .map(|(prop, set)| (prop.clone(), set.intersection(&worlds).cloned().collect()))
            .collect();
        EpistemicModel { worlds, relations, valuation }
    }
}

/// Builds the equivalence relation whose classes are the given blocks.
pub fn equivalence_from_classes<W: World>(classes: &[Vec<W>]) -> BTreeSet<(W, W)> {
    let mut pairs = BTreeSet::new();
    for class in classes {
        for a in class {
            for b in class {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    pairs
}

/// A violation found by [`ExpectationModel::validate`]. Violations are
/// reported as data rather than errors so that a model can be inspected
/// wholesale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `exp(w)` has an empty language.
    NonEmptiness(String),
    /// A world has no expectation assigned.
    MissingExpectation(String),
    /// An expectation is assigned to a world outside the model.
    DanglingExpectation(String),
    /// A relation pair mentions a world outside the model.
    RelationOutOfWorlds(Agent),
    /// A valuation entry mentions a world outside the model.
    ValuationOutOfWorlds(Prop),
    /// With the S5 flag, an agent's relation is not an equivalence.
    Equivalence(Agent),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonEmptiness(w) => write!(f, "expectation at world {w} has empty language"),
            Violation::MissingExpectation(w) => write!(f, "world {w} has no expectation"),
            Violation::DanglingExpectation(w) => {
                write!(f, "expectation assigned to unknown world {w}")
            }
            Violation::RelationOutOfWorlds(a) => {
                write!(f, "relation of agent {a} mentions worlds outside the model")
            }
            Violation::ValuationOutOfWorlds(p) => {
                write!(f, "valuation of {p} mentions worlds outside the model")
            }
            Violation::Equivalence(a) => {
                write!(f, "relation of agent {a} is not an equivalence relation")
            }
        }
    }
}

/// Epistemic expectation model: a Kripke skeleton plus one observation
/// expression per world, each with a non-empty language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationModel<W: World> {
    pub skeleton: EpistemicModel<W>,
    pub exp: BTreeMap<W, ObsExpr>,
}

impl<W: World> ExpectationModel<W> {
    pub fn new(skeleton: EpistemicModel<W>, exp: BTreeMap<W, ObsExpr>) -> Self {
        ExpectationModel { skeleton, exp }
    }

    pub fn worlds(&self) -> &BTreeSet<W> {
        &self.skeleton.worlds
    }

    pub fn contains_world(&self, w: &W) -> bool {
        self.skeleton.worlds.contains(w)
    }

    /// Checks every structural invariant; with `s5` set, also that each
    /// agent's relation is an equivalence relation on the worlds.
    pub fn validate(&self, s5: bool) -> Vec<Violation> {
        let mut out = Vec::new();
        let worlds = &self.skeleton.worlds;
        for w in worlds {
            match self.exp.get(w) {
                None => out.push(Violation::MissingExpectation(format!("{w:?}"))),
                Some(e) if e.is_empty_language() => {
                    out.push(Violation::NonEmptiness(format!("{w:?}")))
                }
                Some(_) => {}
            }
        }
        for w in self.exp.keys() {
            if !worlds.contains(w) {
                out.push(Violation::DanglingExpectation(format!("{w:?}")));
            }
        }
        for (agent, pairs) in &self.skeleton.relations {
            if pairs
                .iter()
                .any(|(a, b)| !worlds.contains(a) || !worlds.contains(b))
            {
                out.push(Violation::RelationOutOfWorlds(agent.clone()));
            }
            if s5 && !is_equivalence(pairs, worlds) {
                out.push(Violation::Equivalence(agent.clone()));
            }
        }
        for (prop, set) in &self.skeleton.valuation {
            if set.iter().any(|w| !worlds.contains(w)) {
                out.push(Violation::ValuationOutOfWorlds(prop.clone()));
            }
        }
        out
    }

    /// Update by an observed word: keeps exactly the worlds whose
    /// expectation language still has a continuation after `word`, and
    /// residuates the survivors' expectations. The input is untouched.
    pub fn update_by_observation(&self, word: &ObsWord) -> Result<Self, PolError> {
        let mut exp = BTreeMap::new();
        let mut keep = BTreeSet::new();
        for (w, e) in &self.exp {
            if !self.skeleton.worlds.contains(w) {
                continue;
            }
            let residual = e.residual(word);
            if !residual.is_empty_language() {
                keep.insert(w.clone());
                exp.insert(w.clone(), residual);
            }
        }
        if keep.is_empty() {
            return Err(PolError::EmptyModel);
        }
        Ok(ExpectationModel { skeleton: self.skeleton.restricted_to(&keep), exp })
    }

    /// Truth at a world under the default box guard.
    pub fn eval(&self, w: &W, f: &Formula) -> Result<bool, PolError> {
        self.eval_with(w, f, &EvalOptions::default())
    }

    /// Truth at a world under the alternative existential box guard: a word
    /// is considered as long as *some* world still expects it, even when
    /// `w` itself does not survive the update.
    pub fn eval_existential(&self, w: &W, f: &Formula) -> Result<bool, PolError> {
        self.eval_with(w, f, &EvalOptions { guard: BoxGuard::Existential, ..EvalOptions::default() })
    }

    pub fn eval_with(&self, w: &W, f: &Formula, opts: &EvalOptions) -> Result<bool, PolError> {
        if !self.skeleton.worlds.contains(w) {
            return Err(PolError::WorldNotFound(format!("{w:?}")));
        }
        eval::eval_at(self, w, f, opts)
    }

    /// Truth at every world of the model.
    pub fn holds_everywhere(&self, f: &Formula, opts: &EvalOptions) -> Result<bool, PolError> {
        for w in &self.skeleton.worlds {
            if !self.eval_with(w, f, opts)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn is_equivalence<W: World>(pairs: &BTreeSet<(W, W)>, worlds: &BTreeSet<W>) -> bool {
    for w in worlds {
        if !pairs.contains(&(w.clone(), w.clone())) {
            return false;
        }
    }
    for (a, b) in pairs {
        if !pairs.contains(&(b.clone(), a.clone())) {
            return false;
        }
    }
    for (a, b) in pairs {
        for (c, d) in pairs {
            if b == c && !pairs.contains(&(a.clone(), d.clone())) {
                return false;
            }
        }
    }
    true
}
