//! Brute-force reference semantics, kept independent of the main engine.
//!
//! The body is evaluated by direct recursion over suffix positions (the
//! Until clause literally searches for a witness position), and the prefix
//! is expanded over every binding without caching or short-circuiting. This
//! is the oracle the optimized engines are cross-validated against.

use super::EvalError;
use crate::formula::{HyperFormula, LtlBody, Quantifier, TraceVar};
use crate::kripke::FiniteTrace;

const TUPLE_LIMIT: u128 = 1_000_000;

/// Decides `traces |= f` by exhaustive enumeration.
pub fn brute_force_check(traces: &[FiniteTrace], f: &HyperFormula) -> Result<bool, EvalError> {
    if traces.is_empty() {
        return Err(EvalError::EmptyTraceSet);
    }
    let quantifiers = f.prefix().len() as u32;
    let tuples = (traces.len() as u128)
        .checked_pow(quantifiers)
        .unwrap_or(u128::MAX);
    if tuples > TUPLE_LIMIT {
        return Err(EvalError::TupleBlowup {
            tuples,
            limit: TUPLE_LIMIT,
        });
    }
    let mut env: Vec<(&TraceVar, &FiniteTrace)> = Vec::new();
    Ok(quantify(traces, f.prefix().entries(), f.body(), &mut env))
}

fn quantify<'a>(
    traces: &'a [FiniteTrace],
    prefix: &'a [(Quantifier, TraceVar)],
    body: &LtlBody,
    env: &mut Vec<(&'a TraceVar, &'a FiniteTrace)>,
) -> bool {
    let Some(((kind, var), rest)) = prefix.split_first() else {
        let horizon = env.iter().map(|(_, t)| t.len()).max().unwrap_or(1);
        return holds_at(body, env, horizon, 0);
    };
    let values: Vec<bool> = traces
        .iter()
        .map(|t| {
            env.push((var, t));
            let v = quantify(traces, rest, body, env);
            env.pop();
            v
        })
        .collect();
    match kind {
        Quantifier::Forall => values.into_iter().fold(true, |acc, v| acc & v),
        Quantifier::Exists => values.into_iter().fold(false, |acc, v| acc | v),
    }
}

/// Satisfaction at suffix position `j`; all traces stutter from
/// `horizon - 1` on, so witness positions beyond it are redundant.
fn holds_at(
    body: &LtlBody,
    env: &[(&TraceVar, &FiniteTrace)],
    horizon: usize,
    j: usize,
) -> bool {
    match body {
        LtlBody::True => true,
        LtlBody::Atom(p, v) => {
            let trace = env
                .iter()
                .find(|(var, _)| *var == v)
                .map(|(_, t)| t)
                .expect("closed formula");
            trace.letter_at(j).contains(p)
        }
        LtlBody::Not(x) => !holds_at(x, env, horizon, j),
        LtlBody::And(a, b) => holds_at(a, env, horizon, j) && holds_at(b, env, horizon, j),
        LtlBody::Or(a, b) => holds_at(a, env, horizon, j) || holds_at(b, env, horizon, j),
        LtlBody::Implies(a, b) => !holds_at(a, env, horizon, j) || holds_at(b, env, horizon, j),
        LtlBody::Iff(a, b) => holds_at(a, env, horizon, j) == holds_at(b, env, horizon, j),
        LtlBody::Next(x) => holds_at(x, env, horizon, j + 1),
        LtlBody::Until(a, b) => (j..=j.max(horizon - 1)).any(|i| {
            holds_at(b, env, horizon, i) && (j..i).all(|k| holds_at(a, env, horizon, k))
        }),
        LtlBody::Eventually(x) => {
            (j..=j.max(horizon - 1)).any(|i| holds_at(x, env, horizon, i))
        }
        LtlBody::Globally(x) => {
            (j..=j.max(horizon - 1)).all(|i| holds_at(x, env, horizon, i))
        }
        LtlBody::WeakUntil(a, b) => {
            let until = (j..=j.max(horizon - 1)).any(|i| {
                holds_at(b, env, horizon, i) && (j..i).all(|k| holds_at(a, env, horizon, k))
            });
            until || (j..=j.max(horizon - 1)).all(|i| holds_at(a, env, horizon, i))
        }
    }
}
