//! Deciding whether a trace set satisfies a HyperLTL formula.
//!
//! [`check`] enumerates trace tuples over the quantifier prefix with
//! short-circuiting and evaluates the body by backwards dynamic programming
//! over the joint stuttering horizon. [`brute_force_check`] is an
//! independent oracle that transcribes the satisfaction relation with
//! explicit suffix recursion. [`check_selfcomp`] decides alternation-free
//! formulas by path search through the self-composition, and
//! [`check_parallel`] evaluates tuple batches on worker threads.

mod oracle;
mod parallel;
mod selfcomp;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::Mutex;

use serde::Serialize;

use crate::formula::{HyperFormula, LtlBody, Prop, Quantifier, TraceVar};
use crate::kripke::{enumerate_traces, EnumerateError, FiniteTrace, KripkeStructure, TraceLog};

pub use oracle::brute_force_check;
pub use parallel::check_parallel;
pub use selfcomp::check_selfcomp;

/// Errors raised by the evaluation engines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("atom references unbound trace variable `{0}`")]
    UnboundVariable(String),
    #[error("empty trace set; pass an empty-set policy to resolve quantifiers vacuously")]
    EmptyTraceSet,
    #[error("{tuples} trace tuples exceed the limit of {limit}")]
    TupleBlowup { tuples: u128, limit: u128 },
    #[error("engine `{engine}` does not support this quantifier prefix: {detail}")]
    UnsupportedFragment {
        engine: &'static str,
        detail: String,
    },
    #[error("worker count must be positive")]
    ZeroWorkers,
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
}

/// How quantifiers over an empty trace set resolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptySetPolicy {
    /// Reject empty trace sets (the default).
    #[default]
    Error,
    /// Resolve per the quantifier clauses: `forall` holds, `exists` fails.
    Vacuous,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub empty_set: EmptySetPolicy,
}

/// Evaluation counters reported with every verdict.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub tuples_evaluated: u64,
    pub cache_hits: u64,
}

/// Outcome of a check: the truth value, an optional witness for the
/// outermost quantifier block, and evaluation statistics.
///
/// The witness binds each variable of the outermost maximal block of equal
/// quantifiers to a trace index; it is present exactly when that block is
/// existential and the formula holds, or universal and the formula fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<BTreeMap<TraceVar, usize>>,
    pub stats: EvalStats,
}

#[derive(Serialize)]
struct VerdictJson<'a> {
    holds: bool,
    witness: Option<BTreeMap<&'a str, usize>>,
    stats: EvalStats,
}

impl Verdict {
    pub fn to_json_string(&self) -> String {
        let json = VerdictJson {
            holds: self.holds,
            witness: self
                .witness
                .as_ref()
                .map(|w| w.iter().map(|(v, &i)| (v.name(), i)).collect()),
            stats: self.stats,
        };
        serde_json::to_string(&json).expect("verdict serializes")
    }
}

/// Memo of per-tuple body verdicts, keyed by body hash and trace indices.
///
/// Entries never change once written: the truth of a quantifier-free body
/// on a fixed tuple does not depend on the surrounding trace set, so the
/// cache may outlive monitor batches. Writes are idempotent; concurrent
/// duplicate computation is allowed.
#[derive(Debug, Default)]
pub struct EvalCache {
    map: Mutex<HashMap<(u64, Vec<u32>), bool>>,
}

impl EvalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, key: &(u64, Vec<u32>)) -> Option<bool> {
        self.map.lock().unwrap().get(key).copied()
    }

    fn put(&self, key: (u64, Vec<u32>), value: bool) {
        self.map.lock().unwrap().insert(key, value);
    }
}

/// A partial map from trace variables to traces (the assignment the
/// satisfaction relation is defined over).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceAssignment {
    bindings: BTreeMap<TraceVar, FiniteTrace>,
}

impl TraceAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, var: TraceVar, trace: FiniteTrace) {
        self.bindings.insert(var, trace);
    }

    pub fn get(&self, var: &TraceVar) -> Option<&FiniteTrace> {
        self.bindings.get(var)
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&TraceVar, &FiniteTrace)> {
        self.bindings.iter()
    }
}

/// Evaluates a quantifier-free body under a full assignment.
///
/// The joint horizon is the longest stutter-normal prefix among the bound
/// traces; beyond it every trace stutters, so temporal operators resolve on
/// the final product letter (`U` holds there iff its right side does).
pub fn ltl_eval(body: &LtlBody, assignment: &TraceAssignment) -> Result<bool, EvalError> {
    let mut order: Vec<&TraceVar> = Vec::new();
    for var in body.variables() {
        if assignment.get(var).is_none() {
            return Err(EvalError::UnboundVariable(var.name().to_string()));
        }
        order.push(var);
    }
    let arena = BodyArena::build(body, &order);
    let masks: Vec<TraceMasks> = order
        .iter()
        .map(|v| arena.trace_masks(assignment.get(v).unwrap()))
        .collect();
    let binding: Vec<u32> = (0..order.len() as u32).collect();
    let mut scratch = Vec::new();
    Ok(arena.eval(&masks, &binding, &mut scratch))
}

/// Flattened body with atoms compiled to bitmask tests; children precede
/// parents, enabling a single backwards pass per position.
pub(crate) struct BodyArena {
    nodes: Vec<ArenaNode>,
    root: usize,
    /// Distinct atom propositions, in first-occurrence order; atom nodes
    /// index into per-trace bitmask rows over this list.
    props: Vec<Prop>,
}

#[derive(Debug, Clone)]
pub(crate) enum ArenaNode {
    True,
    Atom { slot: usize, word: usize, mask: u64 },
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Iff(usize, usize),
    Next(usize),
    Until(usize, usize),
    WeakUntil(usize, usize),
    Eventually(usize),
    Globally(usize),
}

/// Per-position proposition bitmasks of one trace, with the arena's word
/// stride.
pub(crate) struct TraceMasks {
    words: Vec<u64>,
    len: usize,
}

impl BodyArena {
    /// `order` assigns each trace variable its binding slot.
    pub(crate) fn build(body: &LtlBody, order: &[&TraceVar]) -> BodyArena {
        let mut arena = BodyArena {
            nodes: Vec::new(),
            root: 0,
            props: Vec::new(),
        };
        arena.root = arena.push(body, order);
        arena
    }

    fn word_stride(&self) -> usize {
        self.props.len().div_ceil(64).max(1)
    }

    fn push(&mut self, body: &LtlBody, order: &[&TraceVar]) -> usize {
        let node = match body {
            LtlBody::True => ArenaNode::True,
            LtlBody::Atom(p, v) => {
                let slot = order
                    .iter()
                    .position(|o| *o == v)
                    .expect("atom variable has a slot");
                let index = match self.props.iter().position(|q| q == p) {
                    Some(i) => i,
                    None => {
                        self.props.push(p.clone());
                        self.props.len() - 1
                    }
                };
                ArenaNode::Atom {
                    slot,
                    word: index / 64,
                    mask: 1u64 << (index % 64),
                }
            }
            LtlBody::Not(x) => ArenaNode::Not(self.push(x, order)),
            LtlBody::Next(x) => ArenaNode::Next(self.push(x, order)),
            LtlBody::Eventually(x) => ArenaNode::Eventually(self.push(x, order)),
            LtlBody::Globally(x) => ArenaNode::Globally(self.push(x, order)),
            LtlBody::And(a, b) => {
                let (a, b) = (self.push(a, order), self.push(b, order));
                ArenaNode::And(a, b)
            }
            LtlBody::Or(a, b) => {
                let (a, b) = (self.push(a, order), self.push(b, order));
                ArenaNode::Or(a, b)
            }
            LtlBody::Implies(a, b) => {
                let (a, b) = (self.push(a, order), self.push(b, order));
                ArenaNode::Implies(a, b)
            }
            LtlBody::Iff(a, b) => {
                let (a, b) = (self.push(a, order), self.push(b, order));
                ArenaNode::Iff(a, b)
            }
            LtlBody::Until(a, b) => {
                let (a, b) = (self.push(a, order), self.push(b, order));
                ArenaNode::Until(a, b)
            }
            LtlBody::WeakUntil(a, b) => {
                let (a, b) = (self.push(a, order), self.push(b, order));
                ArenaNode::WeakUntil(a, b)
            }
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Precomputes the per-position bitmasks of a trace over the arena's
    /// proposition list.
    pub(crate) fn trace_masks(&self, trace: &FiniteTrace) -> TraceMasks {
        let stride = self.word_stride();
        let len = trace.len();
        let mut words = vec![0u64; stride * len];
        for (pos, letter) in trace.letters().iter().enumerate() {
            for (index, prop) in self.props.iter().enumerate() {
                if letter.contains(prop) {
                    words[pos * stride + index / 64] |= 1u64 << (index % 64);
                }
            }
        }
        TraceMasks { words, len }
    }

    /// Backwards dynamic programming from the joint horizon to position 0;
    /// `binding[slot]` selects the mask row of the trace bound to a slot.
    pub(crate) fn eval(
        &self,
        masks: &[TraceMasks],
        binding: &[u32],
        scratch: &mut Vec<bool>,
    ) -> bool {
        let horizon = binding
            .iter()
            .map(|&i| masks[i as usize].len)
            .max()
            .unwrap_or(1);
        let stride = self.word_stride();
        let width = self.nodes.len();
        scratch.clear();
        scratch.resize(width * 2, false);
        // The first half of `scratch` holds position `pos` (children are
        // written before their parents), the second half position `pos + 1`.
        for pos in (0..horizon).rev() {
            let tail = pos + 1 == horizon;
            for (i, node) in self.nodes.iter().enumerate() {
                let value = match node {
                    ArenaNode::True => true,
                    ArenaNode::Atom { slot, word, mask } => {
                        let m = &masks[binding[*slot] as usize];
                        let clamped = pos.min(m.len - 1);
                        m.words[clamped * stride + word] & mask != 0
                    }
                    ArenaNode::Not(x) => !scratch[*x],
                    ArenaNode::And(a, b) => scratch[*a] && scratch[*b],
                    ArenaNode::Or(a, b) => scratch[*a] || scratch[*b],
                    ArenaNode::Implies(a, b) => !scratch[*a] || scratch[*b],
                    ArenaNode::Iff(a, b) => scratch[*a] == scratch[*b],
                    ArenaNode::Next(x) => {
                        if tail {
                            scratch[*x]
                        } else {
                            scratch[width + *x]
                        }
                    }
                    ArenaNode::Until(a, b) => {
                        if tail {
                            scratch[*b]
                        } else {
                            scratch[*b] || (scratch[*a] && scratch[width + i])
                        }
                    }
                    ArenaNode::WeakUntil(a, b) => {
                        if tail {
                            scratch[*b] || scratch[*a]
                        } else {
                            scratch[*b] || (scratch[*a] && scratch[width + i])
                        }
                    }
                    ArenaNode::Eventually(x) => {
                        if tail {
                            scratch[*x]
                        } else {
                            scratch[*x] || scratch[width + i]
                        }
                    }
                    ArenaNode::Globally(x) => {
                        if tail {
                            scratch[*x]
                        } else {
                            scratch[*x] && scratch[width + i]
                        }
                    }
                };
                scratch[i] = value;
            }
            if pos > 0 {
                let (cur_row, next_row) = scratch.split_at_mut(width);
                next_row.copy_from_slice(cur_row);
            }
        }
        scratch[self.root]
    }
}

pub(crate) fn body_hash(body: &LtlBody) -> u64 {
    let mut hasher = DefaultHasher::new();
    body.hash(&mut hasher);
    hasher.finish()
}

struct Engine<'a> {
    trace_count: usize,
    masks: Vec<TraceMasks>,
    prefix: &'a [(Quantifier, TraceVar)],
    arena: BodyArena,
    body_hash: u64,
    cache: Option<&'a EvalCache>,
    stats: EvalStats,
    scratch: Vec<bool>,
}

impl<'a> Engine<'a> {
    fn tuple_eval(&mut self, binding: &[u32]) -> bool {
        self.stats.tuples_evaluated += 1;
        match self.cache {
            Some(cache) => {
                let key = (self.body_hash, binding.to_vec());
                if let Some(hit) = cache.get(&key) {
                    self.stats.cache_hits += 1;
                    return hit;
                }
                let value = self.arena.eval(&self.masks, binding, &mut self.scratch);
                cache.put(key, value);
                value
            }
            None => self.arena.eval(&self.masks, binding, &mut self.scratch),
        }
    }

    /// Short-circuiting enumeration below `depth`.
    fn eval_suffix(&mut self, depth: usize, binding: &mut Vec<u32>) -> bool {
        if depth == self.prefix.len() {
            return self.tuple_eval(binding);
        }
        let kind = self.prefix[depth].0;
        for i in 0..self.trace_count as u32 {
            binding.push(i);
            let value = self.eval_suffix(depth + 1, binding);
            binding.pop();
            match kind {
                Quantifier::Exists if value => return true,
                Quantifier::Forall if !value => return false,
                _ => {}
            }
        }
        matches!(kind, Quantifier::Forall)
    }
}

/// Decides `traces |= f` by recursive enumeration over the prefix.
///
/// Traces are enumerated in slice order; `exists` stops at the first
/// satisfying binding and `forall` at the first counterexample, so the
/// returned witness is the first deciding block binding in that order.
pub fn check(
    traces: &[FiniteTrace],
    f: &HyperFormula,
    cache: Option<&EvalCache>,
    opts: &CheckOptions,
) -> Result<Verdict, EvalError> {
    if traces.is_empty() {
        return empty_set_verdict(f, opts);
    }
    let prefix = f.prefix().entries();
    let order: Vec<&TraceVar> = prefix.iter().map(|(_, v)| v).collect();
    let arena = BodyArena::build(f.body(), &order);
    let masks: Vec<TraceMasks> = traces.iter().map(|t| arena.trace_masks(t)).collect();
    let mut engine = Engine {
        trace_count: traces.len(),
        masks,
        prefix,
        arena,
        body_hash: body_hash(f.body()),
        cache,
        stats: EvalStats::default(),
        scratch: Vec::new(),
    };

    let block_kind = prefix[0].0;
    let block_len = prefix.iter().take_while(|(k, _)| *k == block_kind).count();
    let n = traces.len() as u32;

    // Odometer over the outermost block, first variable most significant.
    let mut block: Vec<u32> = vec![0; block_len];
    loop {
        let mut binding = block.clone();
        let value = engine.eval_suffix(block_len, &mut binding);
        let decided = match block_kind {
            Quantifier::Exists => value,
            Quantifier::Forall => !value,
        };
        if decided {
            let witness: BTreeMap<TraceVar, usize> = prefix[..block_len]
                .iter()
                .zip(&block)
                .map(|((_, v), &i)| (v.clone(), i as usize))
                .collect();
            return Ok(Verdict {
                holds: matches!(block_kind, Quantifier::Exists),
                witness: Some(witness),
                stats: engine.stats,
            });
        }
        // Advance the odometer.
        let mut slot = block_len;
        loop {
            if slot == 0 {
                return Ok(Verdict {
                    holds: matches!(block_kind, Quantifier::Forall),
                    witness: None,
                    stats: engine.stats,
                });
            }
            slot -= 1;
            block[slot] += 1;
            if block[slot] < n {
                break;
            }
            block[slot] = 0;
        }
    }
}

fn empty_set_verdict(f: &HyperFormula, opts: &CheckOptions) -> Result<Verdict, EvalError> {
    match opts.empty_set {
        EmptySetPolicy::Error => Err(EvalError::EmptyTraceSet),
        EmptySetPolicy::Vacuous => Ok(Verdict {
            holds: matches!(f.prefix().entries()[0].0, Quantifier::Forall),
            witness: None,
            stats: EvalStats::default(),
        }),
    }
}

/// [`check`] over a trace log, in trace insertion order.
pub fn check_log(
    log: &TraceLog,
    f: &HyperFormula,
    cache: Option<&EvalCache>,
    opts: &CheckOptions,
) -> Result<Verdict, EvalError> {
    check(log.traces(), f, cache, opts)
}

/// [`check`] over the trace set of a tree or acyclic structure, in
/// enumeration order.
pub fn check_structure(
    k: &KripkeStructure,
    f: &HyperFormula,
    cache: Option<&EvalCache>,
    opts: &CheckOptions,
) -> Result<Verdict, EvalError> {
    let traces: Vec<FiniteTrace> = enumerate_traces(k)?.collect();
    check(&traces, f, cache, opts)
}
