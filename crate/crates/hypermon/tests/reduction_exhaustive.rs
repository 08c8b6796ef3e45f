//! Exhaustive cross-validation of both QBF reductions on every small
//! instance: all quantifier prefixes and all clause combinations over one
//! and two variables, plus every prefix with sampled clause sets over
//! three variables. Complements the random corpus in the acceptance suite
//! with complete coverage of the corner cases (unit clauses, pure
//! universal/existential prefixes, repeated clauses, deep alternation).

use hypermon::rng::SplitMix64;
use hypermon::{
    check_structure, classify_frame, qbf_solve, reduce_qbf_acyclic, reduce_qbf_tree,
    CheckOptions, FrameClass, Qbf, QbfBody, QbfLiteral, Quantifier,
};

/// Every clause over `n` variables with distinct variables: all non-empty
/// variable subsets with all sign patterns.
fn all_clauses(n: usize) -> Vec<Vec<QbfLiteral>> {
    let mut clauses = Vec::new();
    for subset in 1u32..(1 << n) {
        let vars: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
        for signs in 0u32..(1 << vars.len()) {
            clauses.push(
                vars.iter()
                    .enumerate()
                    .map(|(j, &var)| QbfLiteral {
                        var,
                        negated: signs & (1 << j) != 0,
                    })
                    .collect(),
            );
        }
    }
    clauses
}

fn all_prefixes(n: usize) -> Vec<Vec<(String, Quantifier)>> {
    (0u32..(1 << n))
        .map(|bits| {
            (0..n)
                .map(|i| {
                    let kind = if bits & (1 << i) != 0 {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    };
                    (format!("x{}", i + 1), kind)
                })
                .collect()
        })
        .collect()
}

fn validate(q: &Qbf) {
    let expected = qbf_solve(q).unwrap();

    let acyclic = reduce_qbf_acyclic(q).unwrap();
    assert_eq!(acyclic.ground_truth, expected);
    assert_eq!(
        classify_frame(&acyclic.structure).unwrap(),
        FrameClass::Acyclic
    );
    let verdict = check_structure(
        &acyclic.structure,
        &acyclic.formula,
        None,
        &CheckOptions::default(),
    )
    .unwrap();
    assert_eq!(verdict.holds, expected, "acyclic reduction differs on {q:?}");

    let tree = reduce_qbf_tree(q).unwrap();
    assert_eq!(tree.ground_truth, expected);
    assert_eq!(classify_frame(&tree.structure).unwrap(), FrameClass::Tree);
    let verdict = check_structure(
        &tree.structure,
        &tree.formula,
        None,
        &CheckOptions::default(),
    )
    .unwrap();
    assert_eq!(verdict.holds, expected, "tree reduction differs on {q:?}");
}

#[test]
fn exhaustive_one_and_two_variables() {
    let mut count = 0usize;
    for n in 1..=2usize {
        let clauses = all_clauses(n);
        for prefix in all_prefixes(n) {
            // Every single clause and every ordered clause pair.
            for c1 in &clauses {
                let q = Qbf::new(prefix.clone(), QbfBody::Cnf(vec![c1.clone()])).unwrap();
                validate(&q);
                count += 1;
                for c2 in &clauses {
                    let q = Qbf::new(
                        prefix.clone(),
                        QbfBody::Cnf(vec![c1.clone(), c2.clone()]),
                    )
                    .unwrap();
                    validate(&q);
                    count += 1;
                }
            }
        }
    }
    println!("validated {count} exhaustive instances");
    assert_eq!(count, 300);
}

#[test]
fn all_three_variable_prefixes_with_sampled_clauses() {
    let clauses = all_clauses(3);
    let mut rng = SplitMix64::new(0xe8a5);
    let mut count = 0usize;
    for prefix in all_prefixes(3) {
        for _ in 0..24 {
            let m = 1 + rng.below(3);
            let body: Vec<Vec<QbfLiteral>> = (0..m)
                .map(|_| clauses[rng.below(clauses.len())].clone())
                .collect();
            let q = Qbf::new(prefix.clone(), QbfBody::Cnf(body)).unwrap();
            validate(&q);
            count += 1;
        }
    }
    println!("validated {count} sampled three-variable instances");
    assert_eq!(count, 8 * 24);
}
