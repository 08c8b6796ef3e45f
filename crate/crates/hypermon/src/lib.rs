//! HyperLTL model checking and runtime monitoring over tree-shaped and
//! acyclic trace logs.
//!
//! A trace log is a finite set of finite traces, stored either as a prefix
//! tree or as a minimized acyclic Kripke structure. Leaves carry self-loops,
//! so every finite trace denotes the infinite word obtained by repeating its
//! final letter. The [`eval`] module decides whether a log satisfies a
//! HyperLTL formula, with a brute-force oracle, a self-composition engine for
//! alternation-free formulas, and a data-parallel engine. The [`reductions`]
//! module generates QBF-derived model-checking instances with known ground
//! truth, which serve as self-validating stress tests for the engines.

pub mod eval;
pub mod formula;
pub mod gen;
pub mod kripke;
pub mod monitor;
pub mod reductions;
pub mod rng;

pub use eval::{
    brute_force_check, check, check_log, check_parallel, check_selfcomp, check_structure,
    ltl_eval, CheckOptions, EmptySetPolicy, EvalCache, EvalError, EvalStats, TraceAssignment,
    Verdict,
};
pub use formula::{
    format_formula, parse_formula, FormulaError, FragmentClass, FragmentPattern, HyperFormula,
    LtlBody, ParseError, Prop, Quantifier, QuantifierPrefix, TraceVar,
};
pub use kripke::{
    build_tree, classify_frame, enumerate_traces, minimize_to_dag, parse_letter,
    parse_trace_file, parse_trace_line, self_composition, EnumerateError, FiniteTrace,
    FrameClass, KripkeStructure, Letter, LogError, LogMode, StateId, StructureError, TraceError,
    TraceLog,
};
pub use monitor::{Batch, BatchRecord, MonitorError, Session};
pub use reductions::{
    qbf_solve, random_qbf, reduce_qbf_acyclic, reduce_qbf_tree, BoolExpr, Qbf, QbfBody,
    QbfLiteral, ReductionError, ReductionOutput,
};
