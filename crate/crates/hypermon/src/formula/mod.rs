//! HyperLTL formulas: abstract syntax, concrete syntax, and quantifier
//! prefix classification.
//!
//! A formula is a quantifier prefix over trace variables followed by a
//! quantifier-free LTL body whose atoms are indexed by trace variables
//! (written `prop@var` in the concrete syntax). Formulas are closed by
//! construction: [`HyperFormula::new`] rejects bodies that mention a trace
//! variable not bound by the prefix.

mod parse;
pub mod policies;

use std::collections::BTreeSet;
use std::fmt;

pub use parse::{parse_formula, ParseError};

/// Errors raised by formula constructors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("reserved identifier `{0}`: names starting with `__` are reserved")]
    ReservedIdentifier(String),
    #[error("duplicate trace variable `{0}` in quantifier prefix")]
    DuplicateVariable(String),
    #[error("unbound trace variable `{0}` in formula body")]
    UnboundVariable(String),
    #[error("quantifier prefix must not be empty")]
    EmptyPrefix,
}

fn validate_identifier(name: &str) -> Result<(), FormulaError> {
    let mut chars = name.chars();
    let head_ok = chars
        .next()
        .map(|c| c.is_ascii_alphabetic() || c == '_')
        .unwrap_or(false);
    if !head_ok || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(FormulaError::InvalidIdentifier(name.to_string()));
    }
    if name.starts_with("__") {
        return Err(FormulaError::ReservedIdentifier(name.to_string()));
    }
    Ok(())
}

/// An atomic proposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prop(String);

impl Prop {
    pub fn new(name: &str) -> Result<Self, FormulaError> {
        validate_identifier(name)?;
        Ok(Prop(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The indexed proposition `name__i` used by self-composition labels.
    pub fn indexed(&self, i: usize) -> Prop {
        Prop(format!("{}__{}", self.0, i))
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A trace variable bound by a quantifier prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceVar(String);

impl TraceVar {
    pub fn new(name: &str) -> Result<Self, FormulaError> {
        validate_identifier(name)?;
        Ok(TraceVar(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TraceVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Quantifier kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        })
    }
}

/// An ordered, duplicate-free quantifier prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantifierPrefix {
    entries: Vec<(Quantifier, TraceVar)>,
}

impl QuantifierPrefix {
    pub fn new(entries: Vec<(Quantifier, TraceVar)>) -> Result<Self, FormulaError> {
        if entries.is_empty() {
            return Err(FormulaError::EmptyPrefix);
        }
        let mut seen = BTreeSet::new();
        for (_, var) in &entries {
            if !seen.insert(var.clone()) {
                return Err(FormulaError::DuplicateVariable(var.name().to_string()));
            }
        }
        Ok(QuantifierPrefix { entries })
    }

    pub fn entries(&self) -> &[(Quantifier, TraceVar)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn binds(&self, var: &TraceVar) -> bool {
        self.entries.iter().any(|(_, v)| v == var)
    }

    /// Maximal blocks of equal quantifier kind, outermost first.
    pub fn blocks(&self) -> Vec<(Quantifier, usize)> {
        let mut blocks: Vec<(Quantifier, usize)> = Vec::new();
        for (kind, _) in &self.entries {
            match blocks.last_mut() {
                Some((k, n)) if k == kind => *n += 1,
                _ => blocks.push((*kind, 1)),
            }
        }
        blocks
    }
}

/// Quantifier-free LTL body with trace-indexed atoms.
///
/// Derived operators (`F`, `G`, `W`, `->`, `<->`) are kept as distinct
/// constructors so that formatting round-trips; evaluators expand them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LtlBody {
    True,
    Atom(Prop, TraceVar),
    Not(Box<LtlBody>),
    And(Box<LtlBody>, Box<LtlBody>),
    Or(Box<LtlBody>, Box<LtlBody>),
    Implies(Box<LtlBody>, Box<LtlBody>),
    Iff(Box<LtlBody>, Box<LtlBody>),
    Next(Box<LtlBody>),
    Until(Box<LtlBody>, Box<LtlBody>),
    WeakUntil(Box<LtlBody>, Box<LtlBody>),
    Eventually(Box<LtlBody>),
    Globally(Box<LtlBody>),
}

impl LtlBody {
    pub fn atom(prop: Prop, var: TraceVar) -> Self {
        LtlBody::Atom(prop, var)
    }
    #[allow(clippy::should_implement_trait)] // constructor family, not an operator impl
    pub fn not(x: LtlBody) -> Self {
        LtlBody::Not(Box::new(x))
    }
    pub fn and(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Iff(Box::new(a), Box::new(b))
    }
    pub fn next(x: LtlBody) -> Self {
        LtlBody::Next(Box::new(x))
    }
    pub fn until(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::Until(Box::new(a), Box::new(b))
    }
    pub fn weak_until(a: LtlBody, b: LtlBody) -> Self {
        LtlBody::WeakUntil(Box::new(a), Box::new(b))
    }
    pub fn eventually(x: LtlBody) -> Self {
        LtlBody::Eventually(Box::new(x))
    }
    pub fn globally(x: LtlBody) -> Self {
        LtlBody::Globally(Box::new(x))
    }

    /// Conjunction of a list, `true` when empty.
    pub fn conjunction(mut parts: Vec<LtlBody>) -> LtlBody {
        match parts.len() {
            0 => LtlBody::True,
            1 => parts.pop().unwrap(),
            _ => {
                let last = parts.pop().unwrap();
                parts.into_iter().rev().fold(last, |acc, p| LtlBody::and(p, acc))
            }
        }
    }

    /// Disjunction of a list, `!true` when empty.
    pub fn disjunction(mut parts: Vec<LtlBody>) -> LtlBody {
        match parts.len() {
            0 => LtlBody::not(LtlBody::True),
            1 => parts.pop().unwrap(),
            _ => {
                let last = parts.pop().unwrap();
                parts.into_iter().rev().fold(last, |acc, p| LtlBody::or(p, acc))
            }
        }
    }

    /// Trace variables occurring in atoms.
    pub fn variables(&self) -> BTreeSet<&TraceVar> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables<'a>(&'a self, out: &mut BTreeSet<&'a TraceVar>) {
        match self {
            LtlBody::True => {}
            LtlBody::Atom(_, v) => {
                out.insert(v);
            }
            LtlBody::Not(x)
            | LtlBody::Next(x)
            | LtlBody::Eventually(x)
            | LtlBody::Globally(x) => x.collect_variables(out),
            LtlBody::And(a, b)
            | LtlBody::Or(a, b)
            | LtlBody::Implies(a, b)
            | LtlBody::Iff(a, b)
            | LtlBody::Until(a, b)
            | LtlBody::WeakUntil(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }

    /// Rewrites every atom through `f`.
    pub fn map_atoms(&self, f: &impl Fn(&Prop, &TraceVar) -> (Prop, TraceVar)) -> LtlBody {
        match self {
            LtlBody::True => LtlBody::True,
            LtlBody::Atom(p, v) => {
                let (p2, v2) = f(p, v);
                LtlBody::Atom(p2, v2)
            }
            LtlBody::Not(x) => LtlBody::not(x.map_atoms(f)),
            LtlBody::Next(x) => LtlBody::next(x.map_atoms(f)),
            LtlBody::Eventually(x) => LtlBody::eventually(x.map_atoms(f)),
            LtlBody::Globally(x) => LtlBody::globally(x.map_atoms(f)),
            LtlBody::And(a, b) => LtlBody::and(a.map_atoms(f), b.map_atoms(f)),
            LtlBody::Or(a, b) => LtlBody::or(a.map_atoms(f), b.map_atoms(f)),
            LtlBody::Implies(a, b) => LtlBody::implies(a.map_atoms(f), b.map_atoms(f)),
            LtlBody::Iff(a, b) => LtlBody::iff(a.map_atoms(f), b.map_atoms(f)),
            LtlBody::Until(a, b) => LtlBody::until(a.map_atoms(f), b.map_atoms(f)),
            LtlBody::WeakUntil(a, b) => LtlBody::weak_until(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    /// Removes nested double negations, e.g. `!!x` becomes `x`.
    pub fn eliminate_double_negation(&self) -> LtlBody {
        match self {
            LtlBody::Not(inner) => match inner.as_ref() {
                LtlBody::Not(x) => x.eliminate_double_negation(),
                _ => LtlBody::not(inner.eliminate_double_negation()),
            },
            LtlBody::True | LtlBody::Atom(_, _) => self.clone(),
            LtlBody::Next(x) => LtlBody::next(x.eliminate_double_negation()),
            LtlBody::Eventually(x) => LtlBody::eventually(x.eliminate_double_negation()),
            LtlBody::Globally(x) => LtlBody::globally(x.eliminate_double_negation()),
            LtlBody::And(a, b) => LtlBody::and(
                a.eliminate_double_negation(),
                b.eliminate_double_negation(),
            ),
            LtlBody::Or(a, b) => LtlBody::or(
                a.eliminate_double_negation(),
                b.eliminate_double_negation(),
            ),
            LtlBody::Implies(a, b) => LtlBody::implies(
                a.eliminate_double_negation(),
                b.eliminate_double_negation(),
            ),
            LtlBody::Iff(a, b) => LtlBody::iff(
                a.eliminate_double_negation(),
                b.eliminate_double_negation(),
            ),
            LtlBody::Until(a, b) => LtlBody::until(
                a.eliminate_double_negation(),
                b.eliminate_double_negation(),
            ),
            LtlBody::WeakUntil(a, b) => LtlBody::weak_until(
                a.eliminate_double_negation(),
                b.eliminate_double_negation(),
            ),
        }
    }
}

/// A closed HyperLTL formula: quantifier prefix plus LTL body.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperFormula {
    prefix: QuantifierPrefix,
    body: LtlBody,
}

impl HyperFormula {
    /// Builds a sentence, rejecting bodies with unbound trace variables.
    pub fn new(prefix: QuantifierPrefix, body: LtlBody) -> Result<Self, FormulaError> {
        for var in body.variables() {
            if !prefix.binds(var) {
                return Err(FormulaError::UnboundVariable(var.name().to_string()));
            }
        }
        Ok(HyperFormula { prefix, body })
    }

    pub fn prefix(&self) -> &QuantifierPrefix {
        &self.prefix
    }

    pub fn body(&self) -> &LtlBody {
        &self.body
    }

    /// Quantifier pattern and alternation depth; depends only on the prefix.
    pub fn classify(&self) -> FragmentClass {
        let blocks = self.prefix.blocks();
        let depth = blocks.len() - 1;
        let pattern = match (blocks[0].0, depth) {
            (Quantifier::Forall, 0) => FragmentPattern::ForallOnly,
            (Quantifier::Exists, 0) => FragmentPattern::ExistsOnly,
            (Quantifier::Forall, k) => FragmentPattern::AeK(k),
            (Quantifier::Exists, k) => FragmentPattern::EaK(k),
        };
        FragmentClass {
            pattern,
            alternation_depth: depth,
        }
    }

    /// Flips every quantifier and negates the body, so that for all trace
    /// sets `T`: `T` satisfies `self` iff `T` does not satisfy the dual.
    pub fn dualize(&self) -> HyperFormula {
        let entries = self
            .prefix
            .entries()
            .iter()
            .map(|(k, v)| (k.dual(), v.clone()))
            .collect();
        HyperFormula {
            prefix: QuantifierPrefix { entries },
            body: LtlBody::not(self.body.clone()),
        }
    }
}

impl fmt::Display for HyperFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (kind, var) in self.prefix.entries() {
            write!(f, "{kind} {var}. ")?;
        }
        write_body(f, &self.body)
    }
}

/// Canonical fully-parenthesized concrete syntax; `parse_formula` inverts it.
pub fn format_formula(f: &HyperFormula) -> String {
    f.to_string()
}

fn write_body(f: &mut fmt::Formatter<'_>, body: &LtlBody) -> fmt::Result {
    match body {
        LtlBody::True => f.write_str("true"),
        LtlBody::Atom(p, v) => write!(f, "{p}@{v}"),
        LtlBody::Not(x) => {
            f.write_str("!")?;
            write_body(f, x)
        }
        LtlBody::Next(x) => {
            f.write_str("X ")?;
            write_body(f, x)
        }
        LtlBody::Eventually(x) => {
            f.write_str("F ")?;
            write_body(f, x)
        }
        LtlBody::Globally(x) => {
            f.write_str("G ")?;
            write_body(f, x)
        }
        LtlBody::And(a, b) => write_infix(f, a, "&", b),
        LtlBody::Or(a, b) => write_infix(f, a, "|", b),
        LtlBody::Implies(a, b) => write_infix(f, a, "->", b),
        LtlBody::Iff(a, b) => write_infix(f, a, "<->", b),
        LtlBody::Until(a, b) => write_infix(f, a, "U", b),
        LtlBody::WeakUntil(a, b) => write_infix(f, a, "W", b),
    }
}

fn write_infix(f: &mut fmt::Formatter<'_>, a: &LtlBody, op: &str, b: &LtlBody) -> fmt::Result {
    f.write_str("(")?;
    write_body(f, a)?;
    write!(f, " {op} ")?;
    write_body(f, b)?;
    f.write_str(")")
}

/// Quantifier pattern of a prefix, following the fragment naming where the
/// lead quantifier and the number of alternations identify the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FragmentPattern {
    ExistsOnly,
    ForallOnly,
    /// Lead existential with `k` alternations, `k >= 1`.
    EaK(usize),
    /// Lead universal with `k` alternations, `k >= 1`.
    AeK(usize),
}

/// Structural classification of a formula's quantifier prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FragmentClass {
    pub pattern: FragmentPattern,
    pub alternation_depth: usize,
}

impl FragmentClass {
    pub fn is_alternation_free(&self) -> bool {
        self.alternation_depth == 0
    }
}
