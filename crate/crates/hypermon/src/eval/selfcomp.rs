//! Alternation-free checking through the self-composition.
//!
//! An existential formula over `n` trace variables holds iff some maximal
//! path of the n-fold self-composition satisfies the body with every atom
//! `a@p_i` rewritten to the indexed proposition `a__i`. The search walks the
//! product with formula progression, deduplicating progressed bodies per
//! product state; terminal states resolve the residual on their constant
//! letter. Universal formulas are dualized and the result complemented.

use std::collections::{BTreeMap, HashMap};

use super::{EvalError, EvalStats, Verdict};
use crate::formula::{FragmentPattern, HyperFormula, LtlBody, TraceVar};
use crate::kripke::{
    classify_frame, enumerate_traces, self_composition, FiniteTrace, FrameClass, KripkeStructure,
    Letter, StateId,
};

/// Decides `k |= f` for alternation-free `f` over a tree or acyclic `k`.
pub fn check_selfcomp(k: &KripkeStructure, f: &HyperFormula) -> Result<Verdict, EvalError> {
    let frame = classify_frame(k).map_err(crate::kripke::EnumerateError::from)?;
    if frame == FrameClass::General {
        return Err(crate::kripke::EnumerateError::GeneralFrameUnsupported.into());
    }
    let class = f.classify();
    let (existential, complemented) = match class.pattern {
        FragmentPattern::ExistsOnly => (f.clone(), false),
        FragmentPattern::ForallOnly => (f.dualize(), true),
        _ => {
            return Err(EvalError::UnsupportedFragment {
                engine: "selfcomp",
                detail: format!(
                    "requires an alternation-free prefix, got alternation depth {}",
                    class.alternation_depth
                ),
            })
        }
    };

    let vars: Vec<&TraceVar> = existential
        .prefix()
        .entries()
        .iter()
        .map(|(_, v)| v)
        .collect();
    let n = vars.len();
    let product = self_composition(k, n).map_err(crate::kripke::EnumerateError::from)?;

    // a@p_i -> a__i on a single implicit path variable.
    let rewritten = existential.body().map_atoms(&|prop, var| {
        let slot = vars.iter().position(|v| *v == var).expect("closed formula") + 1;
        (prop.indexed(slot), var.clone())
    });

    let mut search = PathSearch {
        k: &product,
        memo: HashMap::new(),
        stats: EvalStats::default(),
    };
    let found = search.satisfiable_from(product.init(), &rewritten);

    let witness = if found {
        let path = search.reconstruct(product.init(), &rewritten);
        Some(decode_witness(k, &path, &vars)?)
    } else {
        None
    };

    Ok(Verdict {
        holds: if complemented { !found } else { found },
        witness,
        stats: search.stats,
    })
}

struct PathSearch<'a> {
    k: &'a KripkeStructure,
    memo: HashMap<(StateId, LtlBody), bool>,
    stats: EvalStats,
}

impl PathSearch<'_> {
    /// Does some maximal path from `s` satisfy `body`?
    fn satisfiable_from(&mut self, s: StateId, body: &LtlBody) -> bool {
        if let Some(value) = constant_of(body) {
            return value;
        }
        if self.k.successors(s) == [s] {
            return eval_constant(body, self.k.label(s));
        }
        let key = (s, body.clone());
        if let Some(&hit) = self.memo.get(&key) {
            self.stats.cache_hits += 1;
            return hit;
        }
        self.stats.tuples_evaluated += 1;
        let stepped = progress(body, self.k.label(s));
        let value = match constant_of(&stepped) {
            Some(v) => v,
            None => {
                let succs: Vec<StateId> = self
                    .k
                    .successors(s)
                    .iter()
                    .copied()
                    .filter(|&t| t != s)
                    .collect();
                succs.iter().any(|&t| self.satisfiable_from(t, &stepped))
            }
        };
        self.memo.insert(key, value);
        value
    }

    /// Walks a satisfying maximal path after `satisfiable_from` returned
    /// true, preferring the smallest successor ids.
    fn reconstruct(&mut self, init: StateId, body: &LtlBody) -> Vec<StateId> {
        let mut path = vec![init];
        let mut state = init;
        let mut residual = body.clone();
        loop {
            if self.k.successors(state) == [state] {
                return path;
            }
            if constant_of(&residual) == Some(true) {
                // Any continuation works; take the smallest non-loop branch.
                let next = self.k.successors(state)[0];
                let next = if next == state {
                    self.k.successors(state)[1]
                } else {
                    next
                };
                path.push(next);
                state = next;
                continue;
            }
            let stepped = progress(&residual, self.k.label(state));
            let succs: Vec<StateId> = self
                .k
                .successors(state)
                .iter()
                .copied()
                .filter(|&t| t != state)
                .collect();
            let next = succs
                .iter()
                .copied()
                .find(|&t| self.satisfiable_from(t, &stepped))
                .expect("a satisfying successor exists");
            path.push(next);
            state = next;
            residual = stepped;
        }
    }
}

/// One-letter progression: the residual holds on the rest of the word iff
/// the input held on the letter-prefixed word.
fn progress(body: &LtlBody, letter: &Letter) -> LtlBody {
    match body {
        LtlBody::True => LtlBody::True,
        LtlBody::Atom(p, _) => constant(letter.contains(p)),
        LtlBody::Not(x) => simplify_not(progress(x, letter)),
        LtlBody::And(a, b) => simplify_and(progress(a, letter), progress(b, letter)),
        LtlBody::Or(a, b) => simplify_or(progress(a, letter), progress(b, letter)),
        LtlBody::Implies(a, b) => {
            simplify_or(simplify_not(progress(a, letter)), progress(b, letter))
        }
        LtlBody::Iff(a, b) => {
            let (pa, pb) = (progress(a, letter), progress(b, letter));
            simplify_or(
                simplify_and(pa.clone(), pb.clone()),
                simplify_and(simplify_not(pa), simplify_not(pb)),
            )
        }
        LtlBody::Next(x) => x.as_ref().clone(),
        LtlBody::Until(a, b) => simplify_or(
            progress(b, letter),
            simplify_and(progress(a, letter), body.clone()),
        ),
        LtlBody::WeakUntil(a, b) => simplify_or(
            progress(b, letter),
            simplify_and(progress(a, letter), body.clone()),
        ),
        LtlBody::Eventually(x) => simplify_or(progress(x, letter), body.clone()),
        LtlBody::Globally(x) => simplify_and(progress(x, letter), body.clone()),
    }
}

/// Truth of a body on the constant word `letter^omega` (the terminal
/// self-loop): temporal operators collapse onto the single letter.
fn eval_constant(body: &LtlBody, letter: &Letter) -> bool {
    match body {
        LtlBody::True => true,
        LtlBody::Atom(p, _) => letter.contains(p),
        LtlBody::Not(x) => !eval_constant(x, letter),
        LtlBody::And(a, b) => eval_constant(a, letter) && eval_constant(b, letter),
        LtlBody::Or(a, b) => eval_constant(a, letter) || eval_constant(b, letter),
        LtlBody::Implies(a, b) => !eval_constant(a, letter) || eval_constant(b, letter),
        LtlBody::Iff(a, b) => eval_constant(a, letter) == eval_constant(b, letter),
        LtlBody::Next(x) => eval_constant(x, letter),
        LtlBody::Until(_, b) => eval_constant(b, letter),
        LtlBody::WeakUntil(a, b) => eval_constant(b, letter) || eval_constant(a, letter),
        LtlBody::Eventually(x) => eval_constant(x, letter),
        LtlBody::Globally(x) => eval_constant(x, letter),
    }
}

fn constant(value: bool) -> LtlBody {
    if value {
        LtlBody::True
    } else {
        LtlBody::not(LtlBody::True)
    }
}

fn constant_of(body: &LtlBody) -> Option<bool> {
    match body {
        LtlBody::True => Some(true),
        LtlBody::Not(x) => constant_of(x).map(|v| !v),
        _ => None,
    }
}

fn simplify_not(x: LtlBody) -> LtlBody {
    match constant_of(&x) {
        Some(v) => constant(!v),
        None => LtlBody::not(x),
    }
}

fn simplify_and(a: LtlBody, b: LtlBody) -> LtlBody {
    match (constant_of(&a), constant_of(&b)) {
        (Some(false), _) | (_, Some(false)) => constant(false),
        (Some(true), _) => b,
        (_, Some(true)) => a,
        _ => LtlBody::and(a, b),
    }
}

fn simplify_or(a: LtlBody, b: LtlBody) -> LtlBody {
    match (constant_of(&a), constant_of(&b)) {
        (Some(true), _) | (_, Some(true)) => constant(true),
        (Some(false), _) => b,
        (_, Some(false)) => a,
        _ => LtlBody::or(a, b),
    }
}

/// Projects a product path onto its components and maps each component
/// trace to its index in enumeration order.
fn decode_witness(
    k: &KripkeStructure,
    path: &[StateId],
    vars: &[&TraceVar],
) -> Result<BTreeMap<TraceVar, usize>, EvalError> {
    let order: Vec<FiniteTrace> = enumerate_traces(k)?.collect();
    let base = k.state_count();
    let n = vars.len();
    let mut witness = BTreeMap::new();
    for (slot, var) in vars.iter().enumerate() {
        let letters: Vec<Letter> = path
            .iter()
            .map(|&product_state| {
                let mut rest = product_state;
                for _ in 0..(n - 1 - slot) {
                    rest /= base;
                }
                k.label(rest % base).clone()
            })
            .collect();
        let trace = FiniteTrace::new(letters).expect("paths are non-empty");
        let index = order
            .iter()
            .position(|t| *t == trace)
            .expect("component path projects to a trace of k");
        witness.insert((*var).clone(), index);
    }
    Ok(witness)
}
