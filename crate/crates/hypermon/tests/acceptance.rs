//! Acceptance suite: one test per criterion, each printing a PASS line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hypermon::gen;
use hypermon::rng::SplitMix64;
use hypermon::{
    brute_force_check, build_tree, check, check_parallel, check_selfcomp, check_structure,
    classify_frame, enumerate_traces, minimize_to_dag, parse_formula, qbf_solve, random_qbf,
    reduce_qbf_acyclic, reduce_qbf_tree, BoolExpr, CheckOptions, EmptySetPolicy,
    FiniteTrace, FrameClass, KripkeStructure, Letter, LogMode, Prop, Qbf, QbfBody, QbfLiteral,
    Quantifier, Session, TraceVar,
};

fn pass(number: usize, name: &str, detail: String) {
    println!("ACCEPTANCE {number} ({name}): PASS ({detail})");
}

fn letter(names: &[&str]) -> Letter {
    Letter::new(names.iter().map(|n| Prop::new(n).unwrap()))
}

fn trace(letters: &[&[&str]]) -> FiniteTrace {
    FiniteTrace::new(letters.iter().map(|l| letter(l)).collect()).unwrap()
}

/// The four-state acyclic example: `a`-labeled root and inner state, two
/// `b`-labeled terminal states, with edges root->inner, inner->both leaves,
/// root->second leaf.
fn golden_structure() -> KripkeStructure {
    KripkeStructure::new(
        [Prop::new("a").unwrap(), Prop::new("b").unwrap()],
        vec![
            letter(&["a"]),
            letter(&["a"]),
            letter(&["b"]),
            letter(&["b"]),
        ],
        0,
        [(0, 1), (1, 2), (1, 3), (0, 3), (2, 2), (3, 3)],
    )
    .unwrap()
}

#[test]
fn acceptance_01_golden_example() {
    let started = Instant::now();
    let k = golden_structure();
    assert_eq!(classify_frame(&k).unwrap(), FrameClass::Acyclic);
    let f = parse_formula("forall p1. forall p2. a@p1 U b@p2").unwrap();
    let verdict = check_structure(&k, &f, None, &CheckOptions::default()).unwrap();
    assert!(!verdict.holds, "the example structure must violate the formula");

    let traces: Vec<FiniteTrace> = enumerate_traces(&k).unwrap().collect();
    let witness = verdict.witness.expect("failed universal block yields a witness");
    let p1 = &traces[witness[&TraceVar::new("p1").unwrap()]];
    let p2 = &traces[witness[&TraceVar::new("p2").unwrap()]];
    assert_eq!(*p1, trace(&[&["a"], &["b"]]));
    assert_eq!(*p2, trace(&[&["a"], &["a"], &["b"]]));

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(
        1,
        "golden example",
        format!("counterexample ({p1}, {p2}) in {elapsed:?}"),
    );
}

#[test]
fn acceptance_02_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0acc_0002);
    let props = gen::props(3);
    let mut agreements = 0usize;
    for _ in 0..500 {
        let count = 1 + rng.below(10);
        let mut traces: Vec<FiniteTrace> = Vec::new();
        for _ in 0..count {
            let t = gen::random_trace(&mut rng, &props, 6);
            if !traces.contains(&t) {
                traces.push(t);
            }
        }
        let f = gen::random_formula(&mut rng, 3, &props, 4);
        let fast = check(&traces, &f, None, &CheckOptions::default())
            .unwrap()
            .holds;
        let oracle = brute_force_check(&traces, &f).unwrap();
        assert_eq!(fast, oracle, "engines disagree on {f} over {traces:?}");
        agreements += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(
        2,
        "oracle equivalence",
        format!("{agreements}/500 agreements in {elapsed:?}"),
    );
}

/// The worked five-variable, four-clause QBF instance of the acyclic
/// reduction; true by exhaustive evaluation.
fn worked_qbf() -> Qbf {
    let lit = |var: usize, negated: bool| QbfLiteral { var, negated };
    Qbf::new(
        vec![
            ("x1".into(), Quantifier::Exists),
            ("x2".into(), Quantifier::Forall),
            ("x3".into(), Quantifier::Exists),
            ("x4".into(), Quantifier::Exists),
            ("x5".into(), Quantifier::Forall),
        ],
        QbfBody::Cnf(vec![
            vec![lit(0, false), lit(1, true), lit(2, false)],
            vec![lit(0, true), lit(1, false), lit(3, true)],
            vec![lit(2, true), lit(3, false), lit(4, true)],
            vec![lit(0, false), lit(3, false), lit(4, false)],
        ]),
    )
    .unwrap()
}

fn qbf_corpus() -> Vec<Qbf> {
    let mut instances = Vec::new();
    let mut seed = 0u64;
    let mut rng = SplitMix64::new(0x0acc_0003);
    while instances.len() < 100 {
        seed += 1;
        let n = 1 + rng.below(6);
        let m = 1 + rng.below(5);
        let alt = rng.below(3.min(n));
        if let Ok(q) = random_qbf(seed, n, m, alt) {
            instances.push(q);
        }
    }
    instances
}

#[test]
fn acceptance_03_qbf_acyclic_cross_validation() {
    let started = Instant::now();

    let worked = worked_qbf();
    let out = reduce_qbf_acyclic(&worked).unwrap();
    assert_eq!(out.structure.state_count(), 61);
    assert!(out.ground_truth, "the worked instance is true");
    let verdict = check_structure(&out.structure, &out.formula, None, &CheckOptions::default())
        .unwrap();
    assert!(verdict.holds);

    let corpus = qbf_corpus();
    let mut lead_exists = 0usize;
    let mut lead_forall = 0usize;
    for q in &corpus {
        match q.vars()[0].1 {
            Quantifier::Exists => lead_exists += 1,
            Quantifier::Forall => lead_forall += 1,
        }
        let expected = qbf_solve(q).unwrap();
        let out = reduce_qbf_acyclic(q).unwrap();
        assert_eq!(out.ground_truth, expected);
        let verdict =
            check_structure(&out.structure, &out.formula, None, &CheckOptions::default())
                .unwrap();
        assert_eq!(
            verdict.holds, expected,
            "acyclic reduction disagrees with the oracle on {q:?}"
        );
    }
    assert!(lead_exists > 0 && lead_forall > 0, "both parities covered");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    pass(
        3,
        "QBF acyclic reduction",
        format!(
            "100/100 agreements ({lead_exists} lead-exists, {lead_forall} lead-forall), \
             worked instance 61 states and true, in {elapsed:?}"
        ),
    );
}

#[test]
fn acceptance_04_qbf_tree_cross_validation() {
    let started = Instant::now();

    // The tree reduction also accepts arbitrary Boolean bodies.
    let negated_pair = Qbf::new(
        vec![
            ("x1".into(), Quantifier::Forall),
            ("x2".into(), Quantifier::Exists),
        ],
        QbfBody::Expr(BoolExpr::Or(
            Box::new(BoolExpr::Var(0)),
            Box::new(BoolExpr::Not(Box::new(BoolExpr::Var(1)))),
        )),
    )
    .unwrap();
    let out = reduce_qbf_tree(&negated_pair).unwrap();
    assert!(out.ground_truth);
    assert!(
        check_structure(&out.structure, &out.formula, None, &CheckOptions::default())
            .unwrap()
            .holds
    );

    for q in qbf_corpus().iter().chain([worked_qbf()].iter()) {
        let expected = qbf_solve(q).unwrap();
        let out = reduce_qbf_tree(q).unwrap();
        assert_eq!(out.structure.state_count(), 3);
        assert_eq!(classify_frame(&out.structure).unwrap(), FrameClass::Tree);
        assert_eq!(out.ground_truth, expected);
        let verdict =
            check_structure(&out.structure, &out.formula, None, &CheckOptions::default())
                .unwrap();
        assert_eq!(
            verdict.holds, expected,
            "tree reduction disagrees with the oracle on {q:?}"
        );
    }

    let elapsed = started.elapsed();
    pass(
        4,
        "QBF tree reduction",
        format!("101/101 agreements, all 3-state trees, in {elapsed:?}"),
    );
}

#[test]
fn acceptance_05_selfcomp_equivalence() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0acc_0005);
    let props = gen::props(3);
    for _ in 0..200 {
        let k = gen::random_acyclic_structure(&mut rng, 8, &props);
        let f = gen::random_alternation_free_formula(&mut rng, 3, &props, 3);
        let product = hypermon::self_composition(&k, f.prefix().len()).unwrap();
        assert!(classify_frame(&product).unwrap().is_acyclic());
        let fast = check_selfcomp(&k, &f).unwrap();
        let reference = check_structure(&k, &f, None, &CheckOptions::default()).unwrap();
        assert_eq!(
            fast.holds, reference.holds,
            "self-composition engine disagrees on {f}"
        );
    }
    let elapsed = started.elapsed();
    pass(
        5,
        "self-composition engine",
        format!("200/200 agreements, all products acyclic, in {elapsed:?}"),
    );
}

#[test]
fn acceptance_06_parallel_equivalence() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0acc_0006);
    let props = gen::props(3);
    for round in 0..200 {
        let k = gen::random_acyclic_structure(&mut rng, 8, &props);
        let traces: Vec<FiniteTrace> = enumerate_traces(&k).unwrap().collect();
        let f = if round % 2 == 0 {
            gen::random_alternation_free_formula(&mut rng, 3, &props, 3)
        } else {
            gen::random_single_alternation_pair(&mut rng, &props, 3)
        };
        let reference = check(&traces, &f, None, &CheckOptions::default()).unwrap();
        for workers in [1, 2, 8] {
            let par =
                check_parallel(&traces, &f, workers, None, &CheckOptions::default()).unwrap();
            assert_eq!(
                par.holds, reference.holds,
                "parallel engine with {workers} workers disagrees on {f}"
            );
        }
    }
    let elapsed = started.elapsed();
    pass(
        6,
        "parallel engine",
        format!("200/200 agreements across workers 1, 2, 8 in {elapsed:?}"),
    );
}

#[test]
fn acceptance_07_representation_independence() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0acc_0007);
    let props = gen::props(3);
    for _ in 0..200 {
        let batch = gen::random_batch(&mut rng, &props, 8, 6);
        let tree = build_tree(&batch).unwrap();
        let dag = minimize_to_dag(&tree);
        assert!(dag.structure().state_count() <= tree.structure().state_count());

        let tree_set: BTreeSet<FiniteTrace> =
            enumerate_traces(tree.structure()).unwrap().collect();
        let dag_set: BTreeSet<FiniteTrace> =
            enumerate_traces(dag.structure()).unwrap().collect();
        assert_eq!(tree_set, dag_set, "minimization changed the trace set");

        let f = gen::random_formula(&mut rng, 3, &props, 3);
        let tree_verdict =
            check_structure(tree.structure(), &f, None, &CheckOptions::default()).unwrap();
        let dag_verdict =
            check_structure(dag.structure(), &f, None, &CheckOptions::default()).unwrap();
        assert_eq!(tree_verdict.holds, dag_verdict.holds, "verdicts diverge on {f}");
    }
    let elapsed = started.elapsed();
    pass(
        7,
        "representation independence",
        format!("200/200 tree/DAG agreements in {elapsed:?}"),
    );
}

#[test]
fn acceptance_08_monitoring_soundness() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0acc_0008);
    let props = gen::props(3);
    for _ in 0..200 {
        let formula = gen::random_formula(&mut rng, 2, &props, 3);
        let mut warm = Session::new(formula.clone(), LogMode::Tree, EmptySetPolicy::Error);
        let mut cold =
            Session::new(formula.clone(), LogMode::Tree, EmptySetPolicy::Error).without_cache();
        let mut union: Vec<FiniteTrace> = Vec::new();
        let root = gen::random_letter(&mut rng, &props);
        let batches = 1 + rng.below(4);
        for _ in 0..batches {
            let count = 1 + rng.below(3);
            let traces: Vec<FiniteTrace> = (0..count)
                .map(|_| {
                    let mut letters = vec![root.clone()];
                    letters.extend(
                        (0..rng.below(5)).map(|_| gen::random_letter(&mut rng, &props)),
                    );
                    FiniteTrace::new(letters).unwrap()
                })
                .collect();
            for t in &traces {
                if !union.contains(t) {
                    union.push(t.clone());
                }
            }
            let batch = hypermon::Batch::new(traces, None).unwrap();
            let warm_verdict = warm.ingest(&batch).unwrap().holds;
            let cold_verdict = cold.ingest(&batch).unwrap().holds;
            let scratch = check(&union, &formula, None, &CheckOptions::default())
                .unwrap()
                .holds;
            assert_eq!(warm_verdict, scratch, "warm session diverged on {formula}");
            assert_eq!(cold_verdict, scratch, "cold session diverged on {formula}");
        }
        // Lock soundness under random extension.
        if let Some(locked) = warm.locked_verdict() {
            let mut extended = union.clone();
            for _ in 0..3 {
                let mut letters = vec![root.clone()];
                letters.extend((0..rng.below(5)).map(|_| gen::random_letter(&mut rng, &props)));
                let t = FiniteTrace::new(letters).unwrap();
                if !extended.contains(&t) {
                    extended.push(t);
                }
            }
            let scratch = check(&extended, &formula, None, &CheckOptions::default())
                .unwrap()
                .holds;
            assert_eq!(locked, scratch, "lock contradicted a superset check");
        }
    }
    let elapsed = started.elapsed();
    pass(
        8,
        "monitoring soundness",
        format!("200/200 batch sequences match from-scratch checks in {elapsed:?}"),
    );
}

#[test]
fn acceptance_09_stutter_invariance() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0acc_0009);
    let props = gen::props(3);
    for _ in 0..200 {
        let batch = gen::random_batch(&mut rng, &props, 6, 5);
        let f = gen::random_formula(&mut rng, 3, &props, 3);
        let padded: Vec<FiniteTrace> = batch
            .iter()
            .map(|t| {
                let mut letters = t.letters().to_vec();
                if rng.bool() {
                    let last = letters.last().unwrap().clone();
                    letters.extend(std::iter::repeat_n(last, 1 + rng.below(3)));
                }
                FiniteTrace::new(letters).unwrap()
            })
            .collect();
        let plain = check(&batch, &f, None, &CheckOptions::default()).unwrap();
        let stuttered = check(&padded, &f, None, &CheckOptions::default()).unwrap();
        assert_eq!(plain.holds, stuttered.holds, "stuttering changed a verdict");

        let tree_plain = build_tree(&batch).unwrap();
        let tree_padded = build_tree(&padded).unwrap();
        assert_eq!(tree_plain.structure(), tree_padded.structure());
    }
    let elapsed = started.elapsed();
    pass(
        9,
        "stutter invariance",
        format!("200/200 padded instances agree in {elapsed:?}"),
    );
}
