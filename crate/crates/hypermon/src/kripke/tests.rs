use super::*;
use crate::gen;
use crate::rng::SplitMix64;
use proptest::prelude::*;

fn p(name: &str) -> Prop {
    Prop::new(name).unwrap()
}

fn letter(names: &[&str]) -> Letter {
    Letter::new(names.iter().map(|n| p(n)))
}

fn trace(letters: &[&[&str]]) -> FiniteTrace {
    FiniteTrace::new(letters.iter().map(|l| letter(l)).collect()).unwrap()
}

/// The four-state acyclic structure used as the running example: an `a`
/// root with an `a` child, both reaching `b` leaves.
pub(crate) fn example_structure() -> KripkeStructure {
    KripkeStructure::new(
        [p("a"), p("b")],
        vec![
            letter(&["a"]), // 0: init
            letter(&["a"]), // 1
            letter(&["b"]), // 2
            letter(&["b"]), // 3
        ],
        0,
        [(0, 1), (1, 2), (1, 3), (0, 3), (2, 2), (3, 3)],
    )
    .unwrap()
}

#[test]
fn traces_stutter_normalize() {
    let a = trace(&[&["a"], &["b"], &["b"], &["b"]]);
    let b = trace(&[&["a"], &["b"]]);
    assert_eq!(a, b);
    assert_eq!(a.len(), 2);
    // Internal repetition is preserved.
    let c = trace(&[&["a"], &["a"], &["b"]]);
    assert_eq!(c.len(), 3);
    assert_ne!(a, c);
}

#[test]
fn letter_at_clamps_to_tail() {
    let t = trace(&[&["a"], &["b"]]);
    assert!(t.letter_at(0).contains(&p("a")));
    assert!(t.letter_at(5).contains(&p("b")));
}

#[test]
fn classify_example_structure() {
    assert_eq!(
        classify_frame(&example_structure()).unwrap(),
        FrameClass::Acyclic
    );
}

#[test]
fn classify_single_selfloop_is_tree() {
    let k = KripkeStructure::new([p("a")], vec![letter(&["a"])], 0, [(0, 0)]).unwrap();
    assert_eq!(classify_frame(&k).unwrap(), FrameClass::Tree);
}

#[test]
fn classify_two_cycle_is_general() {
    let k = KripkeStructure::new(
        [p("a")],
        vec![letter(&["a"]), letter(&["a"])],
        0,
        [(0, 1), (1, 0)],
    )
    .unwrap();
    assert_eq!(classify_frame(&k).unwrap(), FrameClass::General);
}

#[test]
fn classify_selfloop_with_extra_edge_is_general() {
    let k = KripkeStructure::new(
        [p("a")],
        vec![letter(&["a"]), letter(&["a"])],
        0,
        [(0, 0), (0, 1), (1, 1)],
    )
    .unwrap();
    assert_eq!(classify_frame(&k).unwrap(), FrameClass::General);
}

#[test]
fn totality_violation_reports_state() {
    let k = KripkeStructure::new(
        [p("a")],
        vec![letter(&["a"]), letter(&["a"])],
        0,
        [(0, 1)],
    )
    .unwrap();
    assert_eq!(
        classify_frame(&k),
        Err(StructureError::NotTotal { state: 1 })
    );
}

#[test]
fn build_tree_matches_example_minus_one_edge() {
    let log = build_tree(&[
        trace(&[&["a"], &["a"], &["b"]]),
        trace(&[&["a"], &["b"]]),
    ])
    .unwrap();
    let k = log.structure();
    assert_eq!(k.state_count(), 4);
    assert_eq!(classify_frame(k).unwrap(), FrameClass::Tree);
    // Root a -> a -> b(loop), root -> b(loop): the example structure
    // without its (s1, s3) edge.
    let edges: Vec<(StateId, StateId)> = k.edges().collect();
    assert_eq!(edges, vec![(0, 1), (0, 3), (1, 2), (2, 2), (3, 3)]);
}

#[test]
fn build_tree_single_trace_is_a_path() {
    let log = build_tree(&[trace(&[&["a"], &["b"], &[]])]).unwrap();
    let k = log.structure();
    assert_eq!(k.state_count(), 3);
    assert_eq!(k.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 2)]);
}

#[test]
fn build_tree_rejects_mismatched_roots() {
    let err = build_tree(&[trace(&[&["a"]]), trace(&[&["b"]])]).unwrap_err();
    assert!(matches!(err, LogError::FirstLetterMismatch { .. }));
    assert!(matches!(build_tree(&[]), Err(LogError::EmptyInput)));
}

#[test]
fn build_tree_handles_prefix_traces() {
    // One trace is a stutter-prefix of the other.
    let log = build_tree(&[
        trace(&[&["a"], &["b"]]),
        trace(&[&["a"], &["b"], &["c"]]),
    ])
    .unwrap();
    let set: Vec<FiniteTrace> = enumerate_traces(log.structure()).unwrap().collect();
    assert_eq!(set.len(), 2);
    assert!(set.contains(&trace(&[&["a"], &["b"]])));
    assert!(set.contains(&trace(&[&["a"], &["b"], &["c"]])));
    assert_eq!(classify_frame(log.structure()).unwrap(), FrameClass::Tree);
}

#[test]
fn enumerate_example_traces_in_order() {
    let traces: Vec<FiniteTrace> =
        enumerate_traces(&example_structure()).unwrap().collect();
    assert_eq!(
        traces,
        vec![
            trace(&[&["a"], &["a"], &["b"]]),
            trace(&[&["a"], &["b"]]),
        ]
    );
}

#[test]
fn enumerate_single_state() {
    let k = KripkeStructure::new([p("a")], vec![letter(&["a"])], 0, [(0, 0)]).unwrap();
    let traces: Vec<FiniteTrace> = enumerate_traces(&k).unwrap().collect();
    assert_eq!(traces, vec![trace(&[&["a"]])]);
}

#[test]
fn enumerate_deduplicates_diamond() {
    // Two middle states with equal labels yield one trace.
    let k = KripkeStructure::new(
        [p("a"), p("b")],
        vec![
            letter(&["a"]),
            letter(&["b"]),
            letter(&["b"]),
            letter(&[]),
        ],
        0,
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 3)],
    )
    .unwrap();
    let traces: Vec<FiniteTrace> = enumerate_traces(&k).unwrap().collect();
    assert_eq!(traces, vec![trace(&[&["a"], &["b"], &[]])]);
}

#[test]
fn enumerate_rejects_general_frames() {
    let k = KripkeStructure::new(
        [p("a")],
        vec![letter(&["a"]), letter(&["a"])],
        0,
        [(0, 1), (1, 0)],
    )
    .unwrap();
    assert!(matches!(
        enumerate_traces(&k),
        Err(EnumerateError::GeneralFrameUnsupported)
    ));
}

#[test]
fn minimize_merges_shared_suffixes() {
    // {a}{a}{b} and {a}{b}{b} ingest as {a}{a}{b} and {a}{b}; the two b
    // leaves merge.
    let log = build_tree(&[
        trace(&[&["a"], &["a"], &["b"]]),
        trace(&[&["a"], &["b"], &["b"]]),
    ])
    .unwrap();
    assert_eq!(log.structure().state_count(), 4);
    let dag = minimize_to_dag(&log);
    assert_eq!(dag.structure().state_count(), 3);
    assert_eq!(classify_frame(dag.structure()).unwrap(), FrameClass::Acyclic);
    let tree_set: std::collections::BTreeSet<FiniteTrace> =
        enumerate_traces(log.structure()).unwrap().collect();
    let dag_set: std::collections::BTreeSet<FiniteTrace> =
        enumerate_traces(dag.structure()).unwrap().collect();
    assert_eq!(tree_set, dag_set);
}

#[test]
fn minimize_keeps_minimal_paths() {
    let log = build_tree(&[trace(&[&["a"], &["b"], &["c"]])]).unwrap();
    let dag = minimize_to_dag(&log);
    assert_eq!(dag.structure().state_count(), log.structure().state_count());
}

#[test]
fn self_composition_square_size_and_labels() {
    let k = example_structure();
    let k2 = self_composition(&k, 2).unwrap();
    assert_eq!(k2.state_count(), 16);
    assert_eq!(classify_frame(&k2).unwrap(), FrameClass::Acyclic);
    // (init, s3) has id 0 * 4 + 3 = 3 and label {a__1, b__2}.
    assert_eq!(*k2.label(3), letter(&["a__1", "b__2"]));
    assert_eq!(k2.init(), 0);
    assert!(matches!(
        self_composition(&k, 0),
        Err(StructureError::ZeroCopies)
    ));
}

#[test]
fn structure_json_roundtrip() {
    let k = example_structure();
    let json = k.to_json_string();
    let back = KripkeStructure::from_json_str(&json).unwrap();
    assert_eq!(k, back);
}

#[test]
fn structure_json_remaps_sparse_ids() {
    let text = r#"{
        "ap": ["a"],
        "states": [{"id": 10, "props": ["a"]}, {"id": 3, "props": []}],
        "init": 10,
        "edges": [[10, 3], [3, 3]]
    }"#;
    let k = KripkeStructure::from_json_str(text).unwrap();
    assert_eq!(k.state_count(), 2);
    assert_eq!(k.init(), 1); // id 10 sorts after id 3
    assert_eq!(*k.label(1), letter(&["a"]));
}

#[test]
fn trace_file_roundtrip() {
    let text = "# a comment\na;a;b\n\n.;x\n";
    let traces = parse_trace_file(text).unwrap();
    assert_eq!(
        traces,
        vec![
            trace(&[&["a"], &["a"], &["b"]]),
            trace(&[&[], &["x"]]),
        ]
    );
    assert_eq!(traces[0].to_string(), "a;a;b");
    assert_eq!(traces[1].to_string(), ".;x");
}

#[test]
fn trace_file_errors_carry_line_numbers() {
    let err = parse_trace_file("a;b\n;;\n").unwrap_err();
    assert!(matches!(err, TraceError::Parse { line: 2, .. }));
}

fn arb_letter() -> impl Strategy<Value = Letter> {
    proptest::collection::btree_set(0usize..3, 0..3).prop_map(|set| {
        Letter::new(set.into_iter().map(|i| {
            let name = char::from(b'a' + i as u8).to_string();
            Prop::new(&name).unwrap()
        }))
    })
}

fn arb_trace(max_len: usize) -> impl Strategy<Value = FiniteTrace> {
    proptest::collection::vec(arb_letter(), 1..=max_len)
        .prop_map(|letters| FiniteTrace::new(letters).unwrap())
}

fn arb_batch() -> impl Strategy<Value = Vec<FiniteTrace>> {
    (arb_letter(), proptest::collection::vec(arb_trace(5), 0..8)).prop_map(|(root, tails)| {
        let mut batch = vec![FiniteTrace::new(vec![root.clone()]).unwrap()];
        batch.extend(tails.into_iter().map(|t| {
            let mut letters = vec![root.clone()];
            letters.extend(t.letters().iter().cloned());
            FiniteTrace::new(letters).unwrap()
        }));
        batch
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn build_then_enumerate_is_identity(batch in arb_batch()) {
        let log = build_tree(&batch).unwrap();
        let expected: std::collections::BTreeSet<FiniteTrace> = batch.iter().cloned().collect();
        let got: std::collections::BTreeSet<FiniteTrace> =
            enumerate_traces(log.structure()).unwrap().collect();
        prop_assert_eq!(expected, got);
        prop_assert_eq!(classify_frame(log.structure()).unwrap(), FrameClass::Tree);
    }

    #[test]
    fn minimize_preserves_traces_and_shrinks(batch in arb_batch()) {
        let log = build_tree(&batch).unwrap();
        let dag = minimize_to_dag(&log);
        prop_assert!(dag.structure().state_count() <= log.structure().state_count());
        prop_assert!(classify_frame(dag.structure()).unwrap().is_acyclic());
        let tree_set: std::collections::BTreeSet<FiniteTrace> =
            enumerate_traces(log.structure()).unwrap().collect();
        let dag_set: std::collections::BTreeSet<FiniteTrace> =
            enumerate_traces(dag.structure()).unwrap().collect();
        prop_assert_eq!(tree_set, dag_set);
        // Idempotent on its own output.
        let again = minimize_to_dag(&dag);
        prop_assert_eq!(again.structure(), dag.structure());
    }

    #[test]
    fn stutter_extension_never_changes_the_structure(batch in arb_batch(), reps in 1usize..4) {
        let log = build_tree(&batch).unwrap();
        let padded: Vec<FiniteTrace> = batch
            .iter()
            .map(|t| {
                let mut letters = t.letters().to_vec();
                let last = letters.last().unwrap().clone();
                letters.extend(std::iter::repeat_n(last, reps));
                FiniteTrace::new(letters).unwrap()
            })
            .collect();
        let padded_log = build_tree(&padded).unwrap();
        prop_assert_eq!(log.structure(), padded_log.structure());
    }
}

#[test]
fn self_composition_trace_correspondence() {
    // The product's trace set equals the componentwise products of the
    // factor's traces, for small structures and up to three copies.
    let mut rng = SplitMix64::new(0x5e1f);
    let props = gen::props(2);
    for _ in 0..60 {
        let k = gen::random_acyclic_structure(&mut rng, 5, &props);
        let factor_traces: Vec<FiniteTrace> = enumerate_traces(&k).unwrap().collect();
        for n in 1..=3usize {
            let product = self_composition(&k, n).unwrap();
            assert!(classify_frame(&product).unwrap().is_acyclic());
            let got: std::collections::BTreeSet<FiniteTrace> =
                enumerate_traces(&product).unwrap().collect();

            let mut expected = std::collections::BTreeSet::new();
            let mut choice = vec![0usize; n];
            loop {
                let tuple: Vec<&FiniteTrace> =
                    choice.iter().map(|&c| &factor_traces[c]).collect();
                let horizon = tuple.iter().map(|t| t.len()).max().unwrap();
                let letters: Vec<Letter> = (0..horizon)
                    .map(|pos| {
                        let mut combined = Letter::empty();
                        for (slot, t) in tuple.iter().enumerate() {
                            for prop in t.letter_at(pos).props() {
                                combined.insert(prop.indexed(slot + 1));
                            }
                        }
                        combined
                    })
                    .collect();
                expected.insert(FiniteTrace::new(letters).unwrap());

                let mut slot = n;
                loop {
                    if slot == 0 {
                        break;
                    }
                    slot -= 1;
                    choice[slot] += 1;
                    if choice[slot] < factor_traces.len() {
                        break;
                    }
                    choice[slot] = 0;
                    if slot == 0 {
                        break;
                    }
                }
                if choice.iter().all(|&c| c == 0) {
                    break;
                }
            }
            assert_eq!(got, expected);
        }
    }
}

#[test]
fn log_insert_deduplicates_and_tracks_paths() {
    let mut log = build_tree(&[trace(&[&["a"], &["b"]])]).unwrap();
    assert!(!log.insert(trace(&[&["a"], &["b"], &["b"]])).unwrap());
    assert!(log.insert(trace(&[&["a"], &["b"], &["c"]])).unwrap());
    assert_eq!(log.traces().len(), 2);
    let paths = log.paths();
    assert_eq!(paths.len(), 2);
    // Replaying each path through the structure must reproduce the trace.
    for (t, path) in log.traces().iter().zip(&paths) {
        let letters: Vec<Letter> = path.iter().map(|&s| log.structure().label(s).clone()).collect();
        assert_eq!(FiniteTrace::new(letters).unwrap(), *t);
    }
}
