//! Deterministic random instances: traces, formulas, and acyclic
//! structures. Used by the bench suites and by the cross-validation tests.

use crate::formula::{HyperFormula, LtlBody, Prop, Quantifier, QuantifierPrefix, TraceVar};
use crate::kripke::{FiniteTrace, KripkeStructure, Letter};
use crate::rng::SplitMix64;

/// The first `n` single-letter proposition names.
pub fn props(n: usize) -> Vec<Prop> {
    (0..n)
        .map(|i| {
            let name = char::from(b'a' + i as u8).to_string();
            Prop::new(&name).expect("single letters are valid")
        })
        .collect()
}

pub fn random_letter(rng: &mut SplitMix64, props: &[Prop]) -> Letter {
    Letter::new(
        props
            .iter()
            .filter(|_| rng.bool())
            .cloned()
            .collect::<Vec<_>>(),
    )
}

/// A trace of 1..=max_len letters.
pub fn random_trace(rng: &mut SplitMix64, props: &[Prop], max_len: usize) -> FiniteTrace {
    let len = 1 + rng.below(max_len);
    let letters = (0..len).map(|_| random_letter(rng, props)).collect();
    FiniteTrace::new(letters).expect("non-empty")
}

/// A batch of 1..=max_traces traces sharing a first letter.
pub fn random_batch(
    rng: &mut SplitMix64,
    props: &[Prop],
    max_traces: usize,
    max_len: usize,
) -> Vec<FiniteTrace> {
    let root = random_letter(rng, props);
    let count = 1 + rng.below(max_traces);
    (0..count)
        .map(|_| {
            let extra = rng.below(max_len);
            let mut letters = vec![root.clone()];
            letters.extend((0..extra).map(|_| random_letter(rng, props)));
            FiniteTrace::new(letters).expect("non-empty")
        })
        .collect()
}

pub fn random_body(
    rng: &mut SplitMix64,
    vars: &[TraceVar],
    props: &[Prop],
    depth: usize,
) -> LtlBody {
    if depth == 0 || rng.below(6) == 0 {
        return if rng.below(8) == 0 {
            LtlBody::True
        } else {
            let p = props[rng.below(props.len())].clone();
            let v = vars[rng.below(vars.len())].clone();
            LtlBody::atom(p, v)
        };
    }
    let sub = |rng: &mut SplitMix64| random_body(rng, vars, props, depth - 1);
    match rng.below(10) {
        0 => LtlBody::not(sub(rng)),
        1 => LtlBody::next(sub(rng)),
        2 => LtlBody::eventually(sub(rng)),
        3 => LtlBody::globally(sub(rng)),
        4 => LtlBody::and(sub(rng), sub(rng)),
        5 => LtlBody::or(sub(rng), sub(rng)),
        6 => LtlBody::implies(sub(rng), sub(rng)),
        7 => LtlBody::iff(sub(rng), sub(rng)),
        8 => LtlBody::until(sub(rng), sub(rng)),
        _ => LtlBody::weak_until(sub(rng), sub(rng)),
    }
}

fn prefix_vars(count: usize) -> Vec<TraceVar> {
    (1..=count)
        .map(|i| TraceVar::new(&format!("p{i}")).expect("valid"))
        .collect()
}

/// A formula with 1..=max_quantifiers random quantifiers.
pub fn random_formula(
    rng: &mut SplitMix64,
    max_quantifiers: usize,
    props: &[Prop],
    body_depth: usize,
) -> HyperFormula {
    let count = 1 + rng.below(max_quantifiers);
    let vars = prefix_vars(count);
    let entries = vars
        .iter()
        .map(|v| {
            let kind = if rng.bool() {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            (kind, v.clone())
        })
        .collect();
    let prefix = QuantifierPrefix::new(entries).expect("distinct");
    let body = random_body(rng, &vars, props, body_depth);
    HyperFormula::new(prefix, body).expect("closed")
}

/// An alternation-free formula with 1..=max_quantifiers quantifiers.
pub fn random_alternation_free_formula(
    rng: &mut SplitMix64,
    max_quantifiers: usize,
    props: &[Prop],
    body_depth: usize,
) -> HyperFormula {
    let count = 1 + rng.below(max_quantifiers);
    let vars = prefix_vars(count);
    let kind = if rng.bool() {
        Quantifier::Forall
    } else {
        Quantifier::Exists
    };
    let prefix =
        QuantifierPrefix::new(vars.iter().map(|v| (kind, v.clone())).collect()).expect("distinct");
    let body = random_body(rng, &vars, props, body_depth);
    HyperFormula::new(prefix, body).expect("closed")
}

/// A two-quantifier formula with one alternation.
pub fn random_single_alternation_pair(
    rng: &mut SplitMix64,
    props: &[Prop],
    body_depth: usize,
) -> HyperFormula {
    let vars = prefix_vars(2);
    let lead = if rng.bool() {
        Quantifier::Forall
    } else {
        Quantifier::Exists
    };
    let prefix = QuantifierPrefix::new(vec![
        (lead, vars[0].clone()),
        (lead.dual(), vars[1].clone()),
    ])
    .expect("distinct");
    let body = random_body(rng, &vars, props, body_depth);
    HyperFormula::new(prefix, body).expect("closed")
}

/// A random structure whose frame is acyclic: states are topologically
/// ordered, edges only go forward, and self-loops sit on terminal states.
pub fn random_acyclic_structure(
    rng: &mut SplitMix64,
    max_states: usize,
    props: &[Prop],
) -> KripkeStructure {
    let n = 1 + rng.below(max_states);
    let labels: Vec<Letter> = (0..n).map(|_| random_letter(rng, props)).collect();
    let mut edges = Vec::new();
    for s in 0..n {
        let terminal = s + 1 == n || rng.below(4) == 0;
        if terminal {
            edges.push((s, s));
            continue;
        }
        let max_out = (n - s - 1).min(3);
        let out = 1 + rng.below(max_out);
        for offset in rng.distinct(n - s - 1, out) {
            edges.push((s, s + 1 + offset));
        }
    }
    KripkeStructure::new(props.iter().cloned(), labels, 0, edges).expect("valid structure")
}
