//! Information-flow policy corpus.
//!
//! The conference-manager policies compare a decision variable `dec` that
//! ranges over four values: accepted, rejected, undecided, and the dummy
//! value used for purged observations. Only propositions exist in the logic,
//! so `dec` is bit-blasted into two propositions `dec0` and `dec1`:
//!
//! ```text
//! dummy     !dec0 & !dec1
//! accepted   dec0 & !dec1
//! rejected  !dec0 &  dec1
//! undecided  dec0 &  dec1
//! ```
//!
//! Equality `dec = dec'` then becomes agreement on both bits, and
//! `dec = dummy` becomes `!dec0 & !dec1`. This encoding is one choice among
//! several; anything that injects the four values into two bits works the
//! same way. The plain-text corpus under `policies/` in the repository root
//! carries the same formulas for CLI use.

use super::{parse_formula, HyperFormula};

/// Observational determinism: pairs of traces that agree globally on the
/// low input `i` must agree globally on the low output `o`.
pub const OBSERVATIONAL_DETERMINISM: &str =
    "forall p1. forall p2. (G (i@p1 <-> i@p2)) -> (G (o@p1 <-> o@p2))";

/// Non-interference for deterministic systems: if `p2` is globally purged
/// (`dec` stays the dummy value) and the two traces globally differ on the
/// decision, the session output `ses` must still agree.
pub const NON_INTERFERENCE: &str = "forall p1. forall p2. \
     ((G (!dec0@p2 & !dec1@p2)) & (G !((dec0@p1 <-> dec0@p2) & (dec1@p1 <-> dec1@p2)))) \
     -> (G (ses@p1 <-> ses@p2))";

/// Generalized non-interference: some interleaving trace `p3` carries `p1`'s
/// decisions and `p2`'s session outputs.
pub const GENERALIZED_NON_INTERFERENCE: &str = "forall p1. forall p2. exists p3. \
     (G ((dec0@p1 <-> dec0@p3) & (dec1@p1 <-> dec1@p3))) & (G (ses@p2 <-> ses@p3))";

/// Shared-objective predicate used by the refined policy: if `p1` ever
/// accepts (rejects) a paper, so does `p2`.
pub const SAME_OBJECTIVES: &str = "forall p1. forall p2. \
     ((F (dec0@p1 & !dec1@p1)) -> (F (dec0@p2 & !dec1@p2))) \
     & ((F (!dec0@p1 & dec1@p1)) -> (F (!dec0@p2 & dec1@p2)))";

/// Refined non-interference with three quantifier alternations: the
/// universally chosen trace is replaced by an existentially chosen trace
/// that accomplishes the same objectives.
pub const REFINED_NON_INTERFERENCE: &str = "forall p1. exists p2. forall p3. exists p4. \
     (((F (dec0@p1 & !dec1@p1)) -> (F (dec0@p2 & !dec1@p2))) \
      & ((F (!dec0@p1 & dec1@p1)) -> (F (!dec0@p2 & dec1@p2)))) \
     & (G ((dec0@p4 <-> dec0@p2) & (dec1@p4 <-> dec1@p2))) \
     & (G (ses@p4 <-> ses@p3))";

pub fn observational_determinism() -> HyperFormula {
    parse_formula(OBSERVATIONAL_DETERMINISM).expect("corpus formula parses")
}

pub fn non_interference() -> HyperFormula {
    parse_formula(NON_INTERFERENCE).expect("corpus formula parses")
}

pub fn generalized_non_interference() -> HyperFormula {
    parse_formula(GENERALIZED_NON_INTERFERENCE).expect("corpus formula parses")
}

pub fn same_objectives() -> HyperFormula {
    parse_formula(SAME_OBJECTIVES).expect("corpus formula parses")
}

pub fn refined_non_interference() -> HyperFormula {
    parse_formula(REFINED_NON_INTERFERENCE).expect("corpus formula parses")
}

/// Every shipped policy with its corpus file stem.
pub fn corpus() -> Vec<(&'static str, HyperFormula)> {
    vec![
        ("obs", observational_determinism()),
        ("gmni", non_interference()),
        ("gni", generalized_non_interference()),
        ("obj", same_objectives()),
        ("ref", refined_non_interference()),
    ]
}
