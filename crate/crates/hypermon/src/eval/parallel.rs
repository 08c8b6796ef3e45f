//! Data-parallel tuple evaluation for alternation-free formulas and for
//! two-quantifier formulas with one alternation.
//!
//! Every trace tuple is an independent pure task; workers fill disjoint
//! slices of the result table, and the verdict is folded afterwards through
//! the conjunction/disjunction tree dictated by the prefix. The fold is
//! associative, so the verdict is identical for every worker count.

use std::collections::BTreeMap;
use std::sync::Mutex;

use super::{
    body_hash, BodyArena, CheckOptions, EvalCache, EvalError, EvalStats, Verdict,
};
use crate::formula::{HyperFormula, Quantifier, TraceVar};
use crate::kripke::FiniteTrace;

const RESULT_LIMIT: u128 = 50_000_000;

/// Decides `traces |= f` with `workers` threads.
///
/// Supported prefixes: alternation-free with any number of quantifiers, or
/// exactly two quantifiers with one alternation.
pub fn check_parallel(
    traces: &[FiniteTrace],
    f: &HyperFormula,
    workers: usize,
    cache: Option<&EvalCache>,
    opts: &CheckOptions,
) -> Result<Verdict, EvalError> {
    if workers == 0 {
        return Err(EvalError::ZeroWorkers);
    }
    let class = f.classify();
    let supported = class.is_alternation_free()
        || (class.alternation_depth == 1 && f.prefix().len() == 2);
    if !supported {
        return Err(EvalError::UnsupportedFragment {
            engine: "parallel",
            detail: "requires an alternation-free prefix or a two-quantifier \
                     prefix with one alternation"
                .to_string(),
        });
    }
    if traces.is_empty() {
        return super::empty_set_verdict(f, opts);
    }

    let prefix = f.prefix().entries();
    let q = prefix.len();
    let n = traces.len();
    let total_wide = (n as u128).checked_pow(q as u32).unwrap_or(u128::MAX);
    if total_wide > RESULT_LIMIT {
        return Err(EvalError::TupleBlowup {
            tuples: total_wide,
            limit: RESULT_LIMIT,
        });
    }
    let total = total_wide as usize;

    let order: Vec<&TraceVar> = prefix.iter().map(|(_, v)| v).collect();
    let arena = BodyArena::build(f.body(), &order);
    let masks: Vec<_> = traces.iter().map(|t| arena.trace_masks(t)).collect();
    let hash = body_hash(f.body());

    let mut results = vec![false; total];
    let stats_acc = Mutex::new(EvalStats::default());
    let chunk_size = total.div_ceil(workers);

    std::thread::scope(|scope| {
        for (chunk_index, chunk) in results.chunks_mut(chunk_size.max(1)).enumerate() {
            let arena = &arena;
            let masks = &masks;
            let stats_acc = &stats_acc;
            let start = chunk_index * chunk_size.max(1);
            scope.spawn(move || {
                let mut scratch = Vec::new();
                let mut binding: Vec<u32> = vec![0; q];
                let mut local = EvalStats::default();
                for (offset, slot) in chunk.iter_mut().enumerate() {
                    let mut rest = start + offset;
                    for i in (0..q).rev() {
                        binding[i] = (rest % n) as u32;
                        rest /= n;
                    }
                    local.tuples_evaluated += 1;
                    let value = match cache {
                        Some(c) => {
                            let key = (hash, binding.clone());
                            match c.get(&key) {
                                Some(hit) => {
                                    local.cache_hits += 1;
                                    hit
                                }
                                None => {
                                    let v = arena.eval(masks, &binding, &mut scratch);
                                    c.put(key, v);
                                    v
                                }
                            }
                        }
                        None => arena.eval(masks, &binding, &mut scratch),
                    };
                    *slot = value;
                }
                let mut acc = stats_acc.lock().unwrap();
                acc.tuples_evaluated += local.tuples_evaluated;
                acc.cache_hits += local.cache_hits;
            });
        }
    });

    let stats = *stats_acc.lock().unwrap();
    let verdict = reduce(&results, prefix, n, stats);
    Ok(verdict)
}

/// Folds the result table through the quantifier tree. Tuples are indexed
/// with the first variable most significant, so the table splits into
/// contiguous rows per outer binding.
fn reduce(
    results: &[bool],
    prefix: &[(Quantifier, TraceVar)],
    n: usize,
    stats: EvalStats,
) -> Verdict {
    let outer_kind = prefix[0].0;
    let alternation_free = prefix.iter().all(|(k, _)| *k == outer_kind);

    if alternation_free {
        let q = prefix.len();
        let deciding = match outer_kind {
            Quantifier::Forall => results.iter().position(|&v| !v),
            Quantifier::Exists => results.iter().position(|&v| v),
        };
        let holds = match outer_kind {
            Quantifier::Forall => deciding.is_none(),
            Quantifier::Exists => deciding.is_some(),
        };
        let witness = deciding.map(|index| {
            let mut rest = index;
            let mut tuple = vec![0usize; q];
            for i in (0..q).rev() {
                tuple[i] = rest % n;
                rest /= n;
            }
            prefix
                .iter()
                .zip(tuple)
                .map(|((_, v), i)| (v.clone(), i))
                .collect::<BTreeMap<_, _>>()
        });
        return Verdict {
            holds,
            witness,
            stats,
        };
    }

    // Exactly two quantifiers with one alternation: rows are the inner
    // quantifier, folded per outer binding.
    let rows: Vec<bool> = results
        .chunks(n)
        .map(|row| match prefix[1].0 {
            Quantifier::Forall => row.iter().all(|&v| v),
            Quantifier::Exists => row.iter().any(|&v| v),
        })
        .collect();
    let deciding = match outer_kind {
        Quantifier::Forall => rows.iter().position(|&v| !v),
        Quantifier::Exists => rows.iter().position(|&v| v),
    };
    let holds = match outer_kind {
        Quantifier::Forall => deciding.is_none(),
        Quantifier::Exists => deciding.is_some(),
    };
    let witness =
        deciding.map(|index| BTreeMap::from([(prefix[0].1.clone(), index)]));
    Verdict {
        holds,
        witness,
        stats,
    }
}
