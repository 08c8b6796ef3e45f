//! The demo bindings are plain functions over JSON strings, so the API
//! surface is testable on the host.

use hypermon_wasm::{check_traces, generate_qbf, render_log};

#[test]
fn render_log_reports_shape_and_svg() {
    let result: serde_json::Value =
        serde_json::from_str(&render_log("i;i,o\ni;i\n", false)).unwrap();
    assert_eq!(result["ok"], serde_json::json!(true));
    assert_eq!(result["frame"], serde_json::json!("tree"));
    assert_eq!(result["states"], serde_json::json!(3));
    assert!(result["svg"].as_str().unwrap().starts_with("<svg"));

    let minimized: serde_json::Value =
        serde_json::from_str(&render_log("a;a;b\na;b;b\n", true)).unwrap();
    assert_eq!(minimized["states"], serde_json::json!(3));
    assert_eq!(minimized["frame"], serde_json::json!("acyclic"));

    let bad: serde_json::Value = serde_json::from_str(&render_log("a\nb\n", false)).unwrap();
    assert_eq!(bad["ok"], serde_json::json!(false));
    assert!(bad["error"].as_str().unwrap().contains("rooted"));
}

#[test]
fn check_traces_all_engines() {
    let traces = "i;i,o\ni;i\n";
    let formula = "forall p1. forall p2. (G (i@p1 <-> i@p2)) -> (G (o@p1 <-> o@p2))";
    for engine in ["enum", "parallel"] {
        let result: serde_json::Value =
            serde_json::from_str(&check_traces(traces, formula, false, engine)).unwrap();
        assert_eq!(result["ok"], serde_json::json!(true), "engine {engine}");
        assert_eq!(result["holds"], serde_json::json!(false));
    }
    let af = "exists p. F o@p";
    let result: serde_json::Value =
        serde_json::from_str(&check_traces(traces, af, true, "selfcomp")).unwrap();
    assert_eq!(result["ok"], serde_json::json!(true));
    assert_eq!(result["holds"], serde_json::json!(true));
    assert!(result["witness"]["p"]["trace"].is_string());

    let bad: serde_json::Value =
        serde_json::from_str(&check_traces(traces, "forall p. q@r", false, "enum")).unwrap();
    assert_eq!(bad["ok"], serde_json::json!(false));
}

#[test]
fn generate_qbf_agrees_with_ground_truth() {
    for reduction in ["acyclic", "tree"] {
        for seed in 0..20u32 {
            let result: serde_json::Value =
                serde_json::from_str(&generate_qbf(reduction, seed, 3, 2, 1)).unwrap();
            assert_eq!(result["ok"], serde_json::json!(true));
            assert_eq!(
                result["agrees"],
                serde_json::json!(true),
                "{reduction} seed {seed} disagrees"
            );
        }
    }
    let expected_states = 1 + (2 + 1) + 2 * 3 * 2 + 3 * 3;
    let acyclic: serde_json::Value =
        serde_json::from_str(&generate_qbf("acyclic", 1, 3, 2, 1)).unwrap();
    assert_eq!(acyclic["states"], serde_json::json!(expected_states));
    let tree: serde_json::Value =
        serde_json::from_str(&generate_qbf("tree", 1, 3, 2, 1)).unwrap();
    assert_eq!(tree["states"], serde_json::json!(3));
}
