//! The muddy-children protocol over expectation models.
//!
//! Worlds are bit vectors, one position per child; each world expects as
//! many father's questions as it has muddy bits, which makes the i-th
//! question remove exactly the worlds with fewer than i muddy children.
//!
//! A question runs in three steps: the first question carries the father's
//! announcement (the all-clean world goes away); children who already knew
//! their own state *before* the question answer it, collapsing the model
//! to the true assignment; otherwise, from the second question on, the
//! public silence removes every world where someone would have known. A
//! session is *answered* once a declaration has happened: that is the
//! moment the father's repeated question is finally met, and the count of
//! questions up to it is what the protocol measures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::obslang::{ActionSymbol, ObsExpr};
use crate::polcore::{
    equivalence_from_classes, Agent, EpistemicModel, ExpectationModel, Prop,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MuddyError {
    #[error("session has no agents")]
    NoAgents,
    #[error("duplicate agent `{0}` in session")]
    DuplicateAgent(Agent),
    #[error("agent `{0}` has no truth assignment")]
    MissingAssignment(Agent),
    #[error("session `{0}` has no muddy agent; the announcement would be false")]
    FalseAnnouncement(SessionId),
    #[error("unknown agent `{0}`")]
    UnknownAgent(Agent),
    #[error("world {0} not in session model")]
    WorldNotFound(String),
    #[error("session `{0}` is already resolved")]
    AlreadyResolved(SessionId),
    #[error("session `{0}` did not resolve within {1} questions")]
    QuestionCapExceeded(SessionId, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct SessionId(pub String);

impl SessionId {
    pub fn new(id: &str) -> Self {
        SessionId(id.to_string())
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One truth assignment over a session's children, in agent-list order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitWorld(Vec<bool>);

impl BitWorld {
    pub fn new(bits: Vec<bool>) -> Self {
        BitWorld(bits)
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        BitWorld(bits.iter().map(|&b| b != 0).collect())
    }

    /// All assignments over `len` positions, in increasing binary order.
    pub fn cube(len: usize) -> Vec<BitWorld> {
        (0..(1usize << len))
            .map(|n| BitWorld((0..len).map(|i| n & (1 << (len - 1 - i)) != 0).collect()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, pos: usize) -> bool {
        self.0[pos]
    }

    /// Number of muddy positions.
    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn with_bit(&self, pos: usize, value: bool) -> BitWorld {
        let mut bits = self.0.clone();
        bits[pos] = value;
        BitWorld(bits)
    }
}

impl fmt::Display for BitWorld {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitWorld {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid bit `{other}`")),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(BitWorld)
    }
}

/// Static description of one session: who plays and who is actually muddy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionSpec {
    id: SessionId,
    agents: Vec<Agent>,
    actual: BTreeMap<Agent, bool>,
}

impl SessionSpec {
    pub fn new(
        id: SessionId,
        agents: Vec<Agent>,
        actual: BTreeMap<Agent, bool>,
    ) -> Result<Self, MuddyError> {
        if agents.is_empty() {
            return Err(MuddyError::NoAgents);
        }
        let mut seen = BTreeSet::new();
        for a in &agents {
            if !seen.insert(a.clone()) {
                return Err(MuddyError::DuplicateAgent(a.clone()));
            }
            if !actual.contains_key(a) {
                return Err(MuddyError::MissingAssignment(a.clone()));
            }
        }
        if !agents.iter().any(|a| actual[a]) {
            return Err(MuddyError::FalseAnnouncement(id));
        }
        Ok(SessionSpec { id, agents, actual })
    }

    /// Builds the spec from a global muddy set, taking each agent's bit
    /// from membership.
    pub fn from_muddy_set(
        id: SessionId,
        agents: Vec<Agent>,
        muddy: &BTreeSet<Agent>,
    ) -> Result<Self, MuddyError> {
        let actual = agents
            .iter()
            .map(|a| (a.clone(), muddy.contains(a)))
            .collect();
        SessionSpec::new(id, agents, actual)
    }

    pub fn id(&self) -> &SessionId {
        &self.id
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn position_of(&self, agent: &Agent) -> Result<usize, MuddyError> {
        self.agents
            .iter()
            .position(|a| a == agent)
            .ok_or_else(|| MuddyError::UnknownAgent(agent.clone()))
    }

    /// The hidden true assignment as a world.
    pub fn actual_world(&self) -> BitWorld {
        BitWorld(self.agents.iter().map(|a| self.actual[a]).collect())
    }

    /// Projection of a world onto an agent's own position.
    pub fn muddy_at(&self, agent: &Agent, w: &BitWorld) -> Result<bool, MuddyError> {
        Ok(w.bit(self.position_of(agent)?))
    }

    pub fn muddy_count(&self) -> usize {
        self.actual_world().ones()
    }

    /// The worlds surviving i father's questions under the pure counting
    /// reading: everything with at least i muddy positions (the full cube
    /// for i = 0).
    pub fn counting_worlds(&self, i: usize) -> BTreeSet<BitWorld> {
        BitWorld::cube(self.agents.len())
            .into_iter()
            .filter(|w| i == 0 || w.ones() >= i)
            .collect()
    }
}

/// One observable step in a session's history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// The question (of the session the event belongs to, or of the source
    /// session for propagations) that produced this event.
    pub question_index: usize,
    pub kind: EventKind,
    /// Worlds removed from the affected session's model, disjoint from the
    /// surviving set.
    pub removed: Vec<BitWorld>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventKind {
    /// The father's first question doubles as the announcement that at
    /// least one child is muddy.
    Announce,
    /// A child who already knew their own state answers, naming the entire
    /// actual assignment (their own bit plus everything they see).
    Declare { agent: Agent, world: BitWorld },
    /// Nobody answered; every world where somebody would have known goes.
    NobodyKnows,
    /// Another session pinned a shared agent's state; conflicting worlds go.
    Propagated { from: SessionId },
}

impl Event {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            EventKind::Announce => "announce",
            EventKind::Declare { .. } => "declare",
            EventKind::NobodyKnows => "nobody_knows",
            EventKind::Propagated { .. } => "propagated",
        }
    }
}

/// One live session: its spec, current model, question counter, and log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    spec: SessionSpec,
    model: ExpectationModel<BitWorld>,
    asked: usize,
    answered: bool,
    log: Vec<Event>,
}

pub fn question_symbol() -> ActionSymbol {
    ActionSymbol::new("QF").expect("QF is a valid symbol")
}

pub fn muddy_prop(agent: &Agent) -> Prop {
    Prop::new(&format!("m_{agent}"))
}

/// Builds the initial session model: the full cube of assignments, one
/// equivalence class per own-bit flip, valuation from the bits, and an
/// expectation of one question per muddy bit.
pub fn build_session(spec: &SessionSpec) -> Result<SessionState, MuddyError> {
    let n = spec.agents().len();
    let worlds: BTreeSet<BitWorld> = BitWorld::cube(n).into_iter().collect();
    let mut relations = BTreeMap::new();
    for (pos, agent) in spec.agents().iter().enumerate() {
        let mut classes = Vec::new();
        for w in &worlds {
            if !w.bit(pos) {
                classes.push(vec![w.clone(), w.with_bit(pos, true)]);
            }
        }
        relations.insert(agent.clone(), equivalence_from_classes(&classes));
    }
    let mut valuation = BTreeMap::new();
    for (pos, agent) in spec.agents().iter().enumerate() {
        valuation.insert(
            muddy_prop(agent),
            worlds.iter().filter(|w| w.bit(pos)).cloned().collect(),
        );
    }
    let exp: BTreeMap<BitWorld, ObsExpr> = worlds
        .iter()
        .map(|w| (w.clone(), ObsExpr::power(question_symbol(), w.ones())))
        .collect();
    let model = ExpectationModel::new(EpistemicModel::new(worlds, relations, valuation), exp);
    Ok(SessionState { spec: spec.clone(), model, asked: 0, answered: false, log: Vec::new() })
}

impl SessionState {
    pub fn spec(&self) -> &SessionSpec {
        &self.spec
    }

    pub fn id(&self) -> &SessionId {
        self.spec.id()
    }

    pub fn model(&self) -> &ExpectationModel<BitWorld> {
        &self.model
    }

    pub fn worlds(&self) -> &BTreeSet<BitWorld> {
        self.model.worlds()
    }

    pub fn asked(&self) -> usize {
        self.asked
    }

    pub fn log(&self) -> &[Event] {
        &self.log
    }

    /// Has a question been answered? This is the operational end of the
    /// session: the father stops asking once he hears the declaration.
    pub fn is_answered(&self) -> bool {
        self.answered
    }

    /// Does every child know their own state at the true assignment? Note
    /// that this can precede the answering question: when all children are
    /// muddy, the final silence already settles everyone's state, and the
    /// next question merely collects the answer.
    pub fn is_resolved(&self) -> bool {
        let actual = self.spec.actual_world();
        self.spec
            .agents()
            .iter()
            .all(|a| self.agent_knows_own(a, &actual).unwrap_or(false))
    }

    /// Model-level muddy fact for one agent: `Some(bit)` when every
    /// surviving world agrees on the agent's position, `None` otherwise.
    pub fn muddy_status(&self, agent: &Agent) -> Result<Option<bool>, MuddyError> {
        let pos = self.spec.position_of(agent)?;
        let mut values = self.worlds().iter().map(|w| w.bit(pos));
        match values.next() {
            None => Ok(None),
            Some(first) => {
                if values.all(|b| b == first) {
                    Ok(Some(first))
                } else {
                    Ok(None)
                }
            }
        }
    }

    /// Whether the agent can settle their own bit at `w`: every world they
    /// cannot distinguish from `w` agrees with `w` on their position.
    pub fn agent_knows_own(&self, agent: &Agent, w: &BitWorld) -> Result<bool, MuddyError> {
        if !self.model.contains_world(w) {
            return Err(MuddyError::WorldNotFound(w.to_string()));
        }
        let pos = self.spec.position_of(agent)?;
        Ok(self
            .model
            .skeleton
            .neighbors(agent, w)
            .all(|v| v.bit(pos) == w.bit(pos)))
    }

    fn restrict(&mut self, keep: &BTreeSet<BitWorld>) -> Vec<BitWorld> {
        let removed: Vec<BitWorld> = self
            .worlds()
            .iter()
            .filter(|w| !keep.contains(*w))
            .cloned()
            .collect();
        if !removed.is_empty() {
            self.model = ExpectationModel::new(
                self.model.skeleton.restricted_to(keep),
                self.model
                    .exp
                    .iter()
                    .filter(|(w, _)| keep.contains(*w))
                    .map(|(w, e)| (w.clone(), e.clone()))
                    .collect(),
            );
        }
        removed
    }

    /// One father's question. Step 1: the first question announces that
    /// someone is muddy. Step 2: children who knew their own state before
    /// the question answer it with the full actual assignment. Step 3:
    /// otherwise, from the second question on, the silence removes every
    /// world where someone would have known.
    pub fn ask_question(&self) -> Result<(SessionState, Vec<Event>), MuddyError> {
        if self.answered {
            return Err(MuddyError::AlreadyResolved(self.spec.id().clone()));
        }
        let mut next = self.clone();
        next.asked += 1;
        let i = next.asked;
        let mut events = Vec::new();
        let actual = self.spec.actual_world();

        // Knowledge is read off the model as it stood before this
        // question's announcement.
        let knowers: Vec<Agent> = self
            .spec
            .agents()
            .iter()
            .filter(|a| self.agent_knows_own(a, &actual).unwrap_or(false))
            .cloned()
            .collect();

        if i == 1 {
            let all_clean = BitWorld::new(vec![false; self.spec.agents().len()]);
            let keep: BTreeSet<BitWorld> = next
                .worlds()
                .iter()
                .filter(|w| **w != all_clean)
                .cloned()
                .collect();
            let removed = next.restrict(&keep);
            events.push(Event { question_index: i, kind: EventKind::Announce, removed });
        }

        if !knowers.is_empty() {
            let keep: BTreeSet<BitWorld> = [actual.clone()].into_iter().collect();
            let mut removed = next.restrict(&keep);
            for agent in knowers {
                events.push(Event {
                    question_index: i,
                    kind: EventKind::Declare { agent, world: actual.clone() },
                    removed: std::mem::take(&mut removed),
                });
            }
            next.answered = true;
        } else if i >= 2 {
            let keep: BTreeSet<BitWorld> = next
                .worlds()
                .iter()
                .filter(|w| {
                    !self
                        .spec
                        .agents()
                        .iter()
                        .any(|a| self.agent_knows_own(a, w).unwrap_or(false))
                })
                .cloned()
                .collect();
            let removed = next.restrict(&keep);
            events.push(Event { question_index: i, kind: EventKind::NobodyKnows, removed });
        }

        next.log.extend(events.iter().cloned());
        Ok((next, events))
    }

    /// Drops the given worlds on another session's say-so.
    pub(crate) fn apply_propagation(
        &self,
        from: &SessionId,
        source_question: usize,
        remove: &BTreeSet<BitWorld>,
    ) -> (SessionState, Option<Event>) {
        let keep: BTreeSet<BitWorld> = self
            .worlds()
            .iter()
            .filter(|w| !remove.contains(*w))
            .cloned()
            .collect();
        if keep.len() == self.worlds().len() {
            return (self.clone(), None);
        }
        let mut next = self.clone();
        let removed = next.restrict(&keep);
        let event = Event {
            question_index: source_question,
            kind: EventKind::Propagated { from: from.clone() },
            removed,
        };
        next.log.push(event.clone());
        (next, Some(event))
    }
}

/// Runs the session's questions until one is answered and returns how many
/// it took. The guard cap of `agents + 2` is never reached in practice
/// (the count is muddy-count + 1).
pub fn questions_to_resolve(spec: &SessionSpec) -> Result<usize, MuddyError> {
    let cap = spec.agents().len() + 2;
    let mut state = build_session(spec)?;
    while !state.is_answered() {
        if state.asked() >= cap {
            return Err(MuddyError::QuestionCapExceeded(spec.id().clone(), cap));
        }
        let (next, _) = state.ask_question()?;
        state = next;
    }
    Ok(state.asked())
}
