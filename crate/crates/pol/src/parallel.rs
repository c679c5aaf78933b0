//! Parallel sessions with cross-session knowledge propagation.
//!
//! Sessions share agents; once one session pins a shared agent's state,
//! every other session containing that agent drops the worlds that
//! disagree. Propagation cascades: a target session whose worlds shrank
//! may itself pin further agents, so the restriction is iterated to a
//! fixpoint (world sets only shrink, so it terminates).

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::muddy::{
    build_session, questions_to_resolve, BitWorld, Event, MuddyError, SessionId, SessionSpec,
    SessionState,
};
use crate::polcore::Agent;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParallelError {
    #[error("duplicate session id `{0}`")]
    DuplicateSession(SessionId),
    #[error("unknown session `{0}`")]
    UnknownSession(SessionId),
    #[error("muddy agent `{0}` plays in no session")]
    UnknownMuddyAgent(Agent),
    #[error("no schedule within {bound} questions resolves every session")]
    BoundExceeded { bound: usize },
    #[error("bound {bound} is below the session count {sessions}")]
    BoundTooSmall { bound: usize, sessions: usize },
    #[error(transparent)]
    Session(#[from] MuddyError),
}

/// The global setup: sessions over a shared agent universe plus the hidden
/// set of actually muddy agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    sessions: Vec<SessionSpec>,
    muddy: BTreeSet<Agent>,
}

impl Scenario {
    /// Builds session specs from `(id, agents)` pairs, assigning each
    /// agent's bit by membership in `muddy`. Fails on duplicate ids, on a
    /// muddy agent playing nowhere, and on any session with no muddy agent.
    pub fn new(
        sessions: Vec<(SessionId, Vec<Agent>)>,
        muddy: BTreeSet<Agent>,
    ) -> Result<Self, ParallelError> {
        let mut ids = BTreeSet::new();
        for (id, _) in &sessions {
            if !ids.insert(id.clone()) {
                return Err(ParallelError::DuplicateSession(id.clone()));
            }
        }
        let all_agents: BTreeSet<&Agent> =
            sessions.iter().flat_map(|(_, agents)| agents.iter()).collect();
        for m in &muddy {
            if !all_agents.contains(m) {
                return Err(ParallelError::UnknownMuddyAgent(m.clone()));
            }
        }
        let specs = sessions
            .into_iter()
            .map(|(id, agents)| SessionSpec::from_muddy_set(id, agents, &muddy))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scenario { sessions: specs, muddy })
    }

    pub fn sessions(&self) -> &[SessionSpec] {
        &self.sessions
    }

    pub fn muddy(&self) -> &BTreeSet<Agent> {
        &self.muddy
    }

    pub fn session(&self, id: &SessionId) -> Option<&SessionSpec> {
        self.sessions.iter().find(|s| s.id() == id)
    }
}

/// A sequence of session ids: which father asks next.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule(pub Vec<SessionId>);

impl Schedule {
    pub fn parse(text: &str) -> Self {
        Schedule(
            text.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(SessionId::new)
                .collect(),
        )
    }

    pub fn steps(&self) -> &[SessionId] {
        &self.0
    }
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The ordered product of session states plus a global event log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelState {
    states: Vec<SessionState>,
    total_asked: usize,
    log: Vec<(SessionId, Event)>,
}

impl ParallelState {
    /// Fresh parallel state: every session built independently, nothing
    /// propagated yet (full cubes pin no agent).
    pub fn new(scenario: &Scenario) -> Result<Self, ParallelError> {
        let states = scenario
            .sessions()
            .iter()
            .map(build_session)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParallelState { states, total_asked: 0, log: Vec::new() })
    }

    pub fn sessions(&self) -> &[SessionState] {
        &self.states
    }

    pub fn total_asked(&self) -> usize {
        self.total_asked
    }

    /// Global log: `(affected session, event)` in application order.
    pub fn log(&self) -> &[(SessionId, Event)] {
        &self.log
    }

    pub fn session(&self, id: &SessionId) -> Result<&SessionState, ParallelError> {
        self.states
            .iter()
            .find(|s| s.id() == id)
            .ok_or_else(|| ParallelError::UnknownSession(id.clone()))
    }

    fn index_of(&self, id: &SessionId) -> Result<usize, ParallelError> {
        self.states
            .iter()
            .position(|s| s.id() == id)
            .ok_or_else(|| ParallelError::UnknownSession(id.clone()))
    }

    /// Every father has heard his answer.
    pub fn all_answered(&self) -> bool {
        self.states.iter().all(|s| s.is_answered())
    }

    /// Every child of every session knows their own state.
    pub fn all_resolved(&self) -> bool {
        self.states.iter().all(|s| s.is_resolved())
    }

    /// Pushes the source session's pinned agent states into every session
    /// sharing an agent with it, cascading until nothing changes. Returns
    /// the new state and the propagation events in application order.
    pub fn propagate(
        &self,
        source: &SessionId,
    ) -> Result<(ParallelState, Vec<(SessionId, Event)>), ParallelError> {
        let mut next = self.clone();
        let mut events = Vec::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(self.index_of(source)?);

        while let Some(src_idx) = queue.pop_front() {
            let src = next.states[src_idx].clone();
            let defined: Vec<(Agent, bool)> = src
                .spec()
                .agents()
                .iter()
                .filter_map(|a| src.muddy_status(a).ok().flatten().map(|bit| (a.clone(), bit)))
                .collect();
            if defined.is_empty() {
                continue;
            }
            for tgt_idx in 0..next.states.len() {
                if tgt_idx == src_idx {
                    continue;
                }
                let tgt = &next.states[tgt_idx];
                let mut remove: BTreeSet<BitWorld> = BTreeSet::new();
                for (agent, bit) in &defined {
                    let Ok(pos) = tgt.spec().position_of(agent) else { continue };
                    remove.extend(tgt.worlds().iter().filter(|w| w.bit(pos) != *bit).cloned());
                }
                if remove.is_empty() {
                    continue;
                }
                let (updated, event) =
                    tgt.apply_propagation(src.id(), src.asked(), &remove);
                if let Some(event) = event {
                    events.push((updated.id().clone(), event.clone()));
                    next.log.push((updated.id().clone(), event));
                    next.states[tgt_idx] = updated;
                    queue.push_back(tgt_idx);
                }
            }
        }
        Ok((next, events))
    }

    /// One step of the parallel protocol: the chosen father asks, then the
    /// outcome is propagated to a fixpoint.
    pub fn apply_action(&self, session: &SessionId) -> Result<ParallelState, ParallelError> {
        let idx = self.index_of(session)?;
        let (asked_state, events) = self.states[idx].ask_question()?;
        let mut next = self.clone();
        next.states[idx] = asked_state;
        next.total_asked += 1;
        next.log
            .extend(events.into_iter().map(|e| (session.clone(), e)));
        let (propagated, _) = next.propagate(session)?;
        Ok(propagated)
    }
}

/// Folds [`ParallelState::apply_action`] over the schedule. Steps that
/// address an already-answered session are rejected.
pub fn run_schedule(
    scenario: &Scenario,
    schedule: &Schedule,
) -> Result<ParallelState, ParallelError> {
    let mut state = ParallelState::new(scenario)?;
    for step in schedule.steps() {
        state = state.apply_action(step)?;
    }
    Ok(state)
}

/// Question count of the sequential baseline: every session runs alone,
/// with no propagation between them.
pub fn sequential_total(scenario: &Scenario) -> Result<usize, ParallelError> {
    let mut total = 0;
    for spec in scenario.sessions() {
        total += questions_to_resolve(spec)?;
    }
    Ok(total)
}

/// Breadth-first search over session choices for a schedule that answers
/// every father with the fewest total questions. States are deduplicated
/// by per-session world sets, question counters, and answered flags (the
/// question rule is counter-dependent, so the counters must be part of
/// the key).
pub fn search_min_schedule(
    scenario: &Scenario,
    bound: usize,
) -> Result<(usize, Schedule), ParallelError> {
    if bound < scenario.sessions().len() {
        return Err(ParallelError::BoundTooSmall {
            bound,
            sessions: scenario.sessions().len(),
        });
    }
    let initial = ParallelState::new(scenario)?;

    type Key = Vec<(Vec<BitWorld>, usize, bool)>;
    fn key_of(state: &ParallelState) -> Key {
        state
            .sessions()
            .iter()
            .map(|s| {
                (
                    s.worlds().iter().cloned().collect(),
                    s.asked(),
                    s.is_answered(),
                )
            })
            .collect()
    }

    let mut visited: HashSet<Key> = HashSet::new();
    visited.insert(key_of(&initial));
    let mut frontier: VecDeque<(ParallelState, Vec<SessionId>)> = VecDeque::new();
    frontier.push_back((initial, Vec::new()));

    while let Some((state, path)) = frontier.pop_front() {
        if state.all_answered() {
            return Ok((state.total_asked(), Schedule(path)));
        }
        if state.total_asked() >= bound {
            continue;
        }
        for session in state.sessions() {
            if session.is_answered() {
                continue;
            }
            let id = session.id().clone();
            let next = state.apply_action(&id)?;
            if visited.insert(key_of(&next)) {
                let mut next_path = path.clone();
                next_path.push(id);
                frontier.push_back((next, next_path));
            }
        }
    }
    Err(ParallelError::BoundExceeded { bound })
}
