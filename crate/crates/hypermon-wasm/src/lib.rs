//! Browser demo bindings: build and render trace logs, check formulas,
//! and generate QBF reduction instances. Every entry point returns a JSON
//! string with an `ok` flag so the page never has to catch exceptions.

mod svg;

use serde_json::json;
use wasm_bindgen::prelude::*;

use hypermon::{
    build_tree, check, check_parallel, check_selfcomp, check_structure, classify_frame,
    enumerate_traces, minimize_to_dag, parse_formula, parse_trace_file, random_qbf,
    reduce_qbf_acyclic, reduce_qbf_tree, CheckOptions, FiniteTrace, TraceLog, Verdict,
};

fn err(message: String) -> String {
    json!({ "ok": false, "error": message }).to_string()
}

fn load_log(traces_text: &str, minimize: bool) -> Result<TraceLog, String> {
    let traces = parse_trace_file(traces_text).map_err(|e| e.to_string())?;
    let log = build_tree(&traces).map_err(|e| e.to_string())?;
    Ok(if minimize { minimize_to_dag(&log) } else { log })
}

/// Builds the tree (or minimized DAG) for a trace file and renders it.
#[wasm_bindgen]
pub fn render_log(traces_text: &str, minimize: bool) -> String {
    let log = match load_log(traces_text, minimize) {
        Ok(log) => log,
        Err(e) => return err(e),
    };
    let k = log.structure();
    let frame = match classify_frame(k) {
        Ok(frame) => frame,
        Err(e) => return err(e.to_string()),
    };
    json!({
        "ok": true,
        "svg": svg::structure_svg(k),
        "states": k.state_count(),
        "edges": k.edge_count(),
        "frame": frame.to_string(),
        "traces": log.traces().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    })
    .to_string()
}

/// Checks a formula over a trace file with the selected engine
/// (`enum`, `selfcomp`, or `parallel`).
#[wasm_bindgen]
pub fn check_traces(traces_text: &str, formula_text: &str, minimize: bool, engine: &str) -> String {
    let formula = match parse_formula(formula_text) {
        Ok(f) => f,
        Err(e) => return err(e.to_string()),
    };
    let log = match load_log(traces_text, minimize) {
        Ok(log) => log,
        Err(e) => return err(e),
    };
    let verdict: Result<Verdict, String> = match engine {
        "selfcomp" => check_selfcomp(log.structure(), &formula).map_err(|e| e.to_string()),
        "parallel" => check_parallel(
            log.traces(),
            &formula,
            2,
            None,
            &CheckOptions::default(),
        )
        .map_err(|e| e.to_string()),
        _ => check(log.traces(), &formula, None, &CheckOptions::default())
            .map_err(|e| e.to_string()),
    };
    let verdict = match verdict {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    // Witness indices refer to the engine's trace order; for the selfcomp
    // engine that is enumeration order of the structure.
    let order: Vec<FiniteTrace> = if engine == "selfcomp" {
        match enumerate_traces(log.structure()) {
            Ok(iter) => iter.collect(),
            Err(e) => return err(e.to_string()),
        }
    } else {
        log.traces().to_vec()
    };
    let witness = verdict.witness.as_ref().map(|w| {
        w.iter()
            .map(|(var, &idx)| {
                (
                    var.name().to_string(),
                    json!({ "index": idx, "trace": order[idx].to_string() }),
                )
            })
            .collect::<serde_json::Map<String, serde_json::Value>>()
    });
    json!({
        "ok": true,
        "holds": verdict.holds,
        "witness": witness,
        "stats": {
            "tuples_evaluated": verdict.stats.tuples_evaluated,
            "cache_hits": verdict.stats.cache_hits,
        },
        "fragment": format!("{:?}", formula.classify().pattern),
    })
    .to_string()
}

/// Generates a seeded QBF instance, reduces it, and renders the structure.
#[wasm_bindgen]
pub fn generate_qbf(
    reduction: &str,
    seed: u32,
    vars: u32,
    clauses: u32,
    alternations: u32,
) -> String {
    let qbf = match random_qbf(
        seed as u64,
        vars as usize,
        clauses as usize,
        alternations as usize,
    ) {
        Ok(q) => q,
        Err(e) => return err(e.to_string()),
    };
    let output = match if reduction == "tree" {
        reduce_qbf_tree(&qbf)
    } else {
        reduce_qbf_acyclic(&qbf)
    } {
        Ok(out) => out,
        Err(e) => return err(e.to_string()),
    };
    let verdict =
        match check_structure(&output.structure, &output.formula, None, &CheckOptions::default())
        {
            Ok(v) => v,
            Err(e) => return err(e.to_string()),
        };
    json!({
        "ok": true,
        "svg": svg::structure_svg(&output.structure),
        "formula": hypermon::format_formula(&output.formula),
        "states": output.structure.state_count(),
        "ground_truth": output.ground_truth,
        "checked": verdict.holds,
        "agrees": verdict.holds == output.ground_truth,
    })
    .to_string()
}
