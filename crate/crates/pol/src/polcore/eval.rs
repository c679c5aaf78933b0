//! Formula evaluation, including `[pi]` over star expressions.
//!
//! A box `[pi]f` quantifies over the (possibly infinite) language of `pi`.
//! Instead of enumerating words, the evaluator walks symbol derivatives of
//! `pi` paired with the correspondingly updated model. States are memoized
//! on canonical expression forms, so the walk visits each distinct
//! (residual expression, model) pair once and terminates.

use std::collections::{HashSet, VecDeque};

use crate::obslang::{ObsExpr, ObsWord};

use super::{ExpectationModel, Formula, PolError, World};

/// How a box decides which words of its expression are in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoxGuard {
    /// A word counts iff the evaluation world itself still expects it.
    #[default]
    Local,
    /// A word counts iff some world still expects it; the evaluation world
    /// may fall out of the updated model, in which case atoms are false
    /// there and knowledge is vacuous.
    Existential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    pub guard: BoxGuard,
    /// Word-length cap for box exploration. The derivative walk normally
    /// closes long before this; hitting the cap raises
    /// [`PolError::BoundExceeded`] rather than guessing.
    pub word_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { guard: BoxGuard::Local, word_cap: 32 }
    }
}

/// Truth of `f` at `w`, without a membership precheck: under the
/// `Existential` guard, `w` may legitimately be absent from `m`.
pub(super) fn eval_at<W: World>(
    m: &ExpectationModel<W>,
    w: &W,
    f: &Formula,
    opts: &EvalOptions,
) -> Result<bool, PolError> {
    match f {
        Formula::Top => Ok(true),
        Formula::Atom(p) => {
            let holds_at = m
                .skeleton
                .valuation
                .get(p)
                .ok_or_else(|| PolError::UnknownAtom(p.to_string()))?;
            Ok(holds_at.contains(w))
        }
        Formula::Not(inner) => Ok(!eval_at(m, w, inner, opts)?),
        Formula::And(l, r) => Ok(eval_at(m, w, l, opts)? && eval_at(m, w, r, opts)?),
        Formula::Or(l, r) => Ok(eval_at(m, w, l, opts)? || eval_at(m, w, r, opts)?),
        Formula::Knows(agent, inner) => {
            let pairs = m
                .skeleton
                .relations
                .get(agent)
                .ok_or_else(|| PolError::UnknownAgent(agent.to_string()))?;
            for (from, to) in pairs {
                if from == w && !eval_at(m, to, inner, opts)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Box(pi, body) => eval_box(m, w, pi, body, opts),
    }
}

/// One state of the box exploration: the residual of the box expression by
/// the consumed prefix, paired with the model updated by that prefix.
type BoxState<W> = (ObsExpr, ExpectationModel<W>);

fn state_key<W: World>(state: &BoxState<W>) -> (ObsExpr, Vec<W>, Vec<ObsExpr>) {
    let (expr, model) = state;
    (
        expr.clone(),
        model.skeleton.worlds.iter().cloned().collect(),
        model.exp.values().cloned().collect(),
    )
}

fn eval_box<W: World>(
    m: &ExpectationModel<W>,
    w: &W,
    pi: &ObsExpr,
    body: &Formula,
    opts: &EvalOptions,
) -> Result<bool, PolError> {
    let mut seen: HashSet<(ObsExpr, Vec<W>, Vec<ObsExpr>)> = HashSet::new();
    let mut queue: VecDeque<(BoxState<W>, usize)> = VecDeque::new();
    queue.push_back(((pi.canonicalize(), m.clone()), 0));

    while let Some(((expr, model), depth)) = queue.pop_front() {
        if !seen.insert(state_key(&(expr.clone(), model.clone()))) {
            continue;
        }
        if expr.is_empty_language() {
            continue;
        }
        if depth > opts.word_cap {
            return Err(PolError::BoundExceeded { cap: opts.word_cap });
        }
        if expr.nullable() {
            // The consumed prefix is itself a word of the box expression,
            // and it passed the guard along the way: discharge the body.
            let in_play = match opts.guard {
                BoxGuard::Local => model.contains_world(w),
                BoxGuard::Existential => true,
            };
            if in_play && !eval_at(&model, w, body, opts)? {
                return Ok(false);
            }
        }
        for sym in expr.atoms() {
            let next_expr = expr.derivative(&sym);
            if next_expr.is_empty_language() {
                continue;
            }
            match model.update_by_observation(&ObsWord::single(sym)) {
                Ok(next_model) => {
                    let viable = match opts.guard {
                        // Once w stops expecting the prefix, no extension
                        // can bring it back; the branch is vacuous.
                        BoxGuard::Local => next_model.contains_world(w),
                        BoxGuard::Existential => true,
                    };
                    if viable {
                        queue.push_back(((next_expr, next_model), depth + 1));
                    }
                }
                // No world at all expects this prefix: vacuous under
                // either guard.
                Err(PolError::EmptyModel) => {}
                Err(other) => return Err(other),
            }
        }
    }
    Ok(true)
}
