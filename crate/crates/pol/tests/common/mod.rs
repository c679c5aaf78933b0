//! Shared randomized generators for the integration suites. Everything is
//! driven by a caller-supplied RNG so the acceptance runs stay
//! reproducible.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::prelude::*;

use pol::muddy::SessionId;
use pol::obslang::{ActionSymbol, ObsExpr};
use pol::parallel::Scenario;
use pol::polcore::{
    equivalence_from_classes, Agent, EpistemicModel, ExpectationModel, Formula, Prop,
};

pub fn symbols(names: &[&str]) -> Vec<ActionSymbol> {
    names.iter().map(|n| ActionSymbol::new(n).unwrap()).collect()
}

/// Random observation expression of bounded depth over the given symbols.
pub fn gen_expr(rng: &mut impl Rng, syms: &[ActionSymbol], depth: usize) -> ObsExpr {
    let leaf = |rng: &mut dyn RngCore| match rng.gen_range(0..7) {
        0 => ObsExpr::Empty,
        1 | 2 => ObsExpr::Epsilon,
        _ => ObsExpr::atom(syms[rng.gen_range(0..syms.len())].clone()),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..8) {
        0 | 1 => leaf(rng),
        2 | 3 => ObsExpr::concat(
            gen_expr(rng, syms, depth - 1),
            gen_expr(rng, syms, depth - 1),
        ),
        4 | 5 => ObsExpr::union(
            gen_expr(rng, syms, depth - 1),
            gen_expr(rng, syms, depth - 1),
        ),
        _ => ObsExpr::star(gen_expr(rng, syms, depth - 1)),
    }
}

/// As [`gen_expr`], retrying until the language is non-empty.
pub fn gen_nonempty_expr(rng: &mut impl Rng, syms: &[ActionSymbol], depth: usize) -> ObsExpr {
    loop {
        let e = gen_expr(rng, syms, depth);
        if !e.is_empty_language() {
            return e;
        }
    }
}

pub struct RandomModel {
    pub model: ExpectationModel<u32>,
    pub agents: Vec<Agent>,
    pub props: Vec<Prop>,
    pub obs_symbols: Vec<ActionSymbol>,
}

/// Random S5 expectation model: a handful of worlds, per-agent random
/// partitions (so every relation is an equivalence), a random valuation,
/// and a non-empty random expectation per world.
pub fn gen_s5_model(rng: &mut impl Rng) -> RandomModel {
    let world_count = rng.gen_range(2..=5u32);
    let worlds: Vec<u32> = (0..world_count).collect();
    let agents: Vec<Agent> = (0..rng.gen_range(2..=3))
        .map(|i| Agent::new(&format!("a{i}")))
        .collect();
    let props: Vec<Prop> = (0..rng.gen_range(2..=3))
        .map(|i| Prop::new(&format!("p{i}")))
        .collect();
    let obs_symbols = symbols(&["QF", "A"]);

    let mut relations = BTreeMap::new();
    for agent in &agents {
        let class_count = rng.gen_range(1..=worlds.len());
        let mut classes: Vec<Vec<u32>> = vec![Vec::new(); class_count];
        for &w in &worlds {
            classes[rng.gen_range(0..class_count)].push(w);
        }
        classes.retain(|c| !c.is_empty());
        relations.insert(agent.clone(), equivalence_from_classes(&classes));
    }

    let mut valuation = BTreeMap::new();
    for prop in &props {
        let set: BTreeSet<u32> = worlds.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        valuation.insert(prop.clone(), set);
    }

    let exp: BTreeMap<u32, ObsExpr> = worlds
        .iter()
        .map(|&w| (w, gen_nonempty_expr(rng, &obs_symbols, 2)))
        .collect();

    let skeleton = EpistemicModel::new(worlds.into_iter().collect(), relations, valuation);
    RandomModel { model: ExpectationModel::new(skeleton, exp), agents, props, obs_symbols }
}

/// Random formula over the model's vocabulary.
pub fn gen_formula(
    rng: &mut impl Rng,
    props: &[Prop],
    agents: &[Agent],
    syms: &[ActionSymbol],
    depth: usize,
) -> Formula {
    let leaf = |rng: &mut dyn RngCore| match rng.gen_range(0..5) {
        0 => Formula::Top,
        _ => Formula::Atom(props[rng.gen_range(0..props.len())].clone()),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..10) {
        0 | 1 => leaf(rng),
        2 | 3 => Formula::not(gen_formula(rng, props, agents, syms, depth - 1)),
        4 | 5 => Formula::and(
            gen_formula(rng, props, agents, syms, depth - 1),
            gen_formula(rng, props, agents, syms, depth - 1),
        ),
        6 => Formula::or(
            gen_formula(rng, props, agents, syms, depth - 1),
            gen_formula(rng, props, agents, syms, depth - 1),
        ),
        7 | 8 => Formula::knows(
            agents[rng.gen_range(0..agents.len())].clone(),
            gen_formula(rng, props, agents, syms, depth - 1),
        ),
        _ => Formula::boxed(
            gen_expr(rng, syms, 2),
            gen_formula(rng, props, agents, syms, depth - 1),
        ),
    }
}

/// Random valid scenario: up to `max_sessions` sessions over up to
/// `max_agents` named agents, overlapping freely, each with at least one
/// muddy member.
pub fn gen_scenario(rng: &mut impl Rng, max_sessions: usize, max_agents: usize) -> Scenario {
    const NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
    let agent_count = rng.gen_range(1..=max_agents.min(NAMES.len()));
    let agents: Vec<Agent> = NAMES[..agent_count].iter().map(|n| Agent::new(n)).collect();
    let muddy_size = rng.gen_range(1..=agent_count);
    let mut shuffled = agents.clone();
    shuffled.shuffle(rng);
    let muddy: BTreeSet<Agent> = shuffled[..muddy_size].iter().cloned().collect();

    let session_count = rng.gen_range(1..=max_sessions);
    let mut sessions = Vec::new();
    for i in 0..session_count {
        // Seed with one muddy agent so the announcement is truthful, then
        // sprinkle the rest in.
        let muddy_vec: Vec<&Agent> = muddy.iter().collect();
        let seed = muddy_vec[rng.gen_range(0..muddy_vec.len())].clone();
        let mut members = vec![seed.clone()];
        for a in &agents {
            if a != &seed && rng.gen_bool(0.45) {
                members.push(a.clone());
            }
        }
        members.shuffle(rng);
        sessions.push((SessionId::new(&format!("s{}", i + 1)), members));
    }
    // Only agents that actually play count; the per-session seeds keep
    // the set non-empty.
    let playing: BTreeSet<Agent> = sessions
        .iter()
        .flat_map(|(_, members)| members.iter().cloned())
        .collect();
    let muddy: BTreeSet<Agent> = muddy.intersection(&playing).cloned().collect();
    Scenario::new(sessions, muddy).expect("generated scenario is valid")
}
