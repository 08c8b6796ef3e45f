//! Kripke structures, frame classification, trace enumeration, and
//! self-composition.
//!
//! Structures are finite, have a single initial state and a total transition
//! relation. Trace logs restrict the frame to trees and acyclic graphs whose
//! only cycles are self-loops on terminal states; such a self-loop encodes
//! the stuttering of a finite trace's final letter.

mod log;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{FormulaError, Prop};

pub use log::{build_tree, minimize_to_dag, LogError, LogMode, TraceLog};

/// A letter of the alphabet `2^AP`: the set of propositions holding in one
/// state or at one trace position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(BTreeSet<Prop>);

impl Letter {
    pub fn empty() -> Self {
        Letter(BTreeSet::new())
    }

    pub fn new(props: impl IntoIterator<Item = Prop>) -> Self {
        Letter(props.into_iter().collect())
    }

    pub fn contains(&self, prop: &Prop) -> bool {
        self.0.contains(prop)
    }

    pub fn props(&self) -> impl Iterator<Item = &Prop> {
        self.0.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, prop: Prop) {
        self.0.insert(prop);
    }
}

impl fmt::Display for Letter {
    /// Trace-file syntax: `.` for the empty letter, otherwise a
    /// comma-separated proposition list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str(".");
        }
        let mut first = true;
        for p in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

/// A finite letter sequence denoting the infinite word that repeats its
/// final letter forever.
///
/// Stored in stutter-normal form: trailing repetitions of the final letter
/// are removed on construction, so equality and hashing coincide with
/// equality of the denoted infinite words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteTrace {
    letters: Vec<Letter>,
}

/// Errors raised by trace constructors and the trace file parser.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("a trace must contain at least one letter")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Name(#[from] FormulaError),
}

impl FiniteTrace {
    pub fn new(mut letters: Vec<Letter>) -> Result<Self, TraceError> {
        if letters.is_empty() {
            return Err(TraceError::Empty);
        }
        while letters.len() > 1 && letters[letters.len() - 1] == letters[letters.len() - 2] {
            letters.pop();
        }
        Ok(FiniteTrace { letters })
    }

    /// Length of the stutter-normal form.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn first(&self) -> &Letter {
        &self.letters[0]
    }

    /// Letter at position `i` of the denoted infinite word; positions past
    /// the end stutter on the final letter.
    pub fn letter_at(&self, i: usize) -> &Letter {
        &self.letters[i.min(self.letters.len() - 1)]
    }
}

impl fmt::Display for FiniteTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(";")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// States are dense indices into the structure's state table.
pub type StateId = usize;

/// Errors raised by structure constructors and validation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("state {state} has no successor; the transition relation must be total")]
    NotTotal { state: StateId },
    #[error("structure has no states")]
    NoStates,
    #[error("initial state {0} does not exist")]
    BadInit(StateId),
    #[error("edge ({0}, {1}) references an unknown state")]
    BadEdge(StateId, StateId),
    #[error("state {state} is labeled with `{prop}` which is not in the declared AP")]
    LabelOutsideAp { state: StateId, prop: String },
    #[error("duplicate state id {0}")]
    DuplicateStateId(StateId),
    #[error("self-composition requires at least one copy")]
    ZeroCopies,
    #[error("self-composition of {states} states with {copies} copies is too large")]
    ProductTooLarge { states: usize, copies: usize },
    #[error("invalid structure JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Name(#[from] FormulaError),
}

/// A finite Kripke structure with a single initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeStructure {
    ap: BTreeSet<Prop>,
    labels: Vec<Letter>,
    init: StateId,
    succs: Vec<Vec<StateId>>,
}

impl KripkeStructure {
    /// Builds a structure over dense state ids `0..labels.len()`.
    ///
    /// Totality is not enforced here; [`classify_frame`] and the trace
    /// operations report it with the offending state.
    pub fn new(
        ap: impl IntoIterator<Item = Prop>,
        labels: Vec<Letter>,
        init: StateId,
        edges: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<Self, StructureError> {
        let ap: BTreeSet<Prop> = ap.into_iter().collect();
        let n = labels.len();
        if n == 0 {
            return Err(StructureError::NoStates);
        }
        if init >= n {
            return Err(StructureError::BadInit(init));
        }
        for (s, letter) in labels.iter().enumerate() {
            for p in letter.props() {
                if !ap.contains(p) {
                    return Err(StructureError::LabelOutsideAp {
                        state: s,
                        prop: p.name().to_string(),
                    });
                }
            }
        }
        let mut succs = vec![Vec::new(); n];
        for (from, to) in edges {
            if from >= n || to >= n {
                return Err(StructureError::BadEdge(from, to));
            }
            succs[from].push(to);
        }
        for list in &mut succs {
            list.sort_unstable();
            list.dedup();
        }
        Ok(KripkeStructure {
            ap,
            labels,
            init,
            succs,
        })
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn ap(&self) -> &BTreeSet<Prop> {
        &self.ap
    }

    pub fn label(&self, s: StateId) -> &Letter {
        &self.labels[s]
    }

    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.succs[s]
    }

    pub fn edges(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(from, tos)| tos.iter().map(move |&to| (from, to)))
    }

    pub fn edge_count(&self) -> usize {
        self.succs.iter().map(|v| v.len()).sum()
    }

    /// Checks that every state has at least one successor.
    pub fn validate_total(&self) -> Result<(), StructureError> {
        for (s, tos) in self.succs.iter().enumerate() {
            if tos.is_empty() {
                return Err(StructureError::NotTotal { state: s });
            }
        }
        Ok(())
    }

    /// A terminal state: its sole outgoing edge is its self-loop.
    fn is_terminal(&self, s: StateId) -> bool {
        self.succs[s] == [s]
    }
}

/// Frame shape of a structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameClass {
    Tree,
    Acyclic,
    General,
}

impl FrameClass {
    /// Trees satisfy the acyclic frame property; only general frames don't.
    pub fn is_acyclic(self) -> bool {
        !matches!(self, FrameClass::General)
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameClass::Tree => "tree",
            FrameClass::Acyclic => "acyclic",
            FrameClass::General => "general",
        })
    }
}

/// Classifies the frame of `k`.
///
/// Acyclic means the only loops are self-loops on terminal states; a tree is
/// additionally rooted at the initial state with unique predecessors
/// (self-loops not counted).
pub fn classify_frame(k: &KripkeStructure) -> Result<FrameClass, StructureError> {
    k.validate_total()?;
    let n = k.state_count();

    for s in 0..n {
        if k.successors(s).contains(&s) && !k.is_terminal(s) {
            return Ok(FrameClass::General);
        }
    }

    // Cycle check over the graph without terminal self-loops.
    let mut color = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
    for start in 0..n {
        if color[start] != 0 {
            continue;
        }
        let mut stack: Vec<(StateId, usize)> = vec![(start, 0)];
        color[start] = 1;
        while let Some(&(s, idx)) = stack.last() {
            let next = k.successors(s).iter().copied().filter(|&t| t != s).nth(idx);
            stack.last_mut().unwrap().1 = idx + 1;
            match next {
                Some(t) => match color[t] {
                    0 => {
                        color[t] = 1;
                        stack.push((t, 0));
                    }
                    1 => return Ok(FrameClass::General),
                    _ => {}
                },
                None => {
                    color[s] = 2;
                    stack.pop();
                }
            }
        }
    }

    // Tree: unique predecessor for every non-root state, none for the root.
    let mut preds = vec![0usize; n];
    for (from, to) in k.edges() {
        if from != to {
            preds[to] += 1;
        }
    }
    let is_tree =
        preds[k.init()] == 0 && (0..n).all(|s| s == k.init() || preds[s] == 1);
    Ok(if is_tree {
        FrameClass::Tree
    } else {
        FrameClass::Acyclic
    })
}

/// Errors raised by trace enumeration.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("trace enumeration requires a tree or acyclic frame")]
    GeneralFrameUnsupported,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Lazily enumerates the traces of a tree or acyclic structure.
///
/// Each maximal path from the initial state to a terminal self-loop yields
/// one stutter-normalized trace; duplicates are suppressed and paths are
/// visited in lexicographic state-id order.
pub fn enumerate_traces(
    k: &KripkeStructure,
) -> Result<TraceEnumeration<'_>, EnumerateError> {
    match classify_frame(k)? {
        FrameClass::General => Err(EnumerateError::GeneralFrameUnsupported),
        _ => Ok(TraceEnumeration {
            k,
            stack: vec![(k.init(), 0)],
            seen: HashSet::new(),
        }),
    }
}

pub struct TraceEnumeration<'a> {
    k: &'a KripkeStructure,
    /// DFS frames: (state, index of the next successor to explore).
    stack: Vec<(StateId, usize)>,
    seen: HashSet<FiniteTrace>,
}

impl TraceEnumeration<'_> {
    fn current_trace(&self) -> FiniteTrace {
        let letters = self
            .stack
            .iter()
            .map(|&(s, _)| self.k.label(s).clone())
            .collect();
        FiniteTrace::new(letters).expect("paths are non-empty")
    }
}

impl Iterator for TraceEnumeration<'_> {
    type Item = FiniteTrace;

    fn next(&mut self) -> Option<FiniteTrace> {
        while let Some(&(s, idx)) = self.stack.last() {
            if self.k.is_terminal(s) && idx == 0 {
                let trace = self.current_trace();
                self.stack.last_mut().unwrap().1 = 1;
                if self.seen.insert(trace.clone()) {
                    return Some(trace);
                }
                continue;
            }
            let succs = self.k.successors(s);
            let next = succs.iter().copied().filter(|&t| t != s).nth(idx);
            match next {
                Some(t) => {
                    self.stack.last_mut().unwrap().1 = idx + 1;
                    self.stack.push((t, 0));
                }
                None => {
                    self.stack.pop();
                }
            }
        }
        None
    }
}

/// The n-fold self-composition with indexed propositions `a__i`.
///
/// States are tuples ordered lexicographically with the first copy most
/// significant; the label of a tuple collects `a__i` for every `a` holding
/// in its i-th component (1-based). A tree or acyclic input yields an
/// acyclic product.
pub fn self_composition(
    k: &KripkeStructure,
    n: usize,
) -> Result<KripkeStructure, StructureError> {
    if n == 0 {
        return Err(StructureError::ZeroCopies);
    }
    k.validate_total()?;
    let base = k.state_count();
    let total = base
        .checked_pow(n as u32)
        .filter(|&t| t <= 5_000_000)
        .ok_or(StructureError::ProductTooLarge {
            states: base,
            copies: n,
        })?;

    let ap: BTreeSet<Prop> = k
        .ap()
        .iter()
        .flat_map(|p| (1..=n).map(move |i| p.indexed(i)))
        .collect();

    let decode = |id: usize| -> Vec<StateId> {
        let mut rest = id;
        let mut tuple = vec![0; n];
        for slot in (0..n).rev() {
            tuple[slot] = rest % base;
            rest /= base;
        }
        tuple
    };

    let mut labels = Vec::with_capacity(total);
    for id in 0..total {
        let tuple = decode(id);
        let mut letter = Letter::empty();
        for (slot, &component) in tuple.iter().enumerate() {
            for p in k.label(component).props() {
                letter.insert(p.indexed(slot + 1));
            }
        }
        labels.push(letter);
    }

    let mut edges = Vec::new();
    for id in 0..total {
        let tuple = decode(id);
        // Cartesian product of per-component successor choices.
        let mut choice: Vec<usize> = vec![0; n];
        loop {
            let mut target = 0usize;
            for slot in 0..n {
                target = target * base + k.successors(tuple[slot])[choice[slot]];
            }
            edges.push((id, target));
            let mut slot = n;
            loop {
                if slot == 0 {
                    break;
                }
                slot -= 1;
                choice[slot] += 1;
                if choice[slot] < k.successors(tuple[slot]).len() {
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
    }

    let init = {
        let mut id = 0usize;
        for _ in 0..n {
            id = id * base + k.init();
        }
        id
    };

    KripkeStructure::new(ap, labels, init, edges)
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    id: usize,
    props: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct StructureJson {
    ap: Vec<String>,
    states: Vec<StateJson>,
    init: usize,
    edges: Vec<(usize, usize)>,
}

impl KripkeStructure {
    /// Serializes to the structure JSON format
    /// `{ap, states: [{id, props}], init, edges: [[from, to]]}`.
    pub fn to_json_string(&self) -> String {
        let json = StructureJson {
            ap: self.ap.iter().map(|p| p.name().to_string()).collect(),
            states: (0..self.state_count())
                .map(|s| StateJson {
                    id: s,
                    props: self.labels[s].props().map(|p| p.name().to_string()).collect(),
                })
                .collect(),
            init: self.init,
            edges: {
                let mut e: Vec<(usize, usize)> = self.edges().collect();
                e.sort_unstable();
                e
            },
        };
        serde_json::to_string_pretty(&json).expect("structure serializes")
    }

    /// Parses the structure JSON format. Arbitrary state ids are remapped to
    /// dense indices in increasing id order.
    pub fn from_json_str(text: &str) -> Result<Self, StructureError> {
        let json: StructureJson =
            serde_json::from_str(text).map_err(|e| StructureError::Json(e.to_string()))?;
        let mut ap = BTreeSet::new();
        for name in &json.ap {
            ap.insert(Prop::new(name)?);
        }
        let mut ids: Vec<usize> = json.states.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(StructureError::DuplicateStateId(w[0]));
            }
        }
        let index_of = |id: usize| -> Result<usize, StructureError> {
            ids.binary_search(&id)
                .map_err(|_| StructureError::BadEdge(id, id))
        };
        let mut labels = vec![Letter::empty(); ids.len()];
        for state in &json.states {
            let mut letter = Letter::empty();
            for p in &state.props {
                letter.insert(Prop::new(p)?);
            }
            labels[index_of(state.id)?] = letter;
        }
        let init = ids
            .binary_search(&json.init)
            .map_err(|_| StructureError::BadInit(json.init))?;
        let mut edges = Vec::with_capacity(json.edges.len());
        for &(from, to) in &json.edges {
            let f = ids
                .binary_search(&from)
                .map_err(|_| StructureError::BadEdge(from, to))?;
            let t = ids
                .binary_search(&to)
                .map_err(|_| StructureError::BadEdge(from, to))?;
            edges.push((f, t));
        }
        KripkeStructure::new(ap, labels, init, edges)
    }
}

/// Parses one letter in trace-file syntax: `.` or a comma-separated
/// proposition list.
pub fn parse_letter(text: &str) -> Result<Letter, TraceError> {
    let text = text.trim();
    if text == "." {
        return Ok(Letter::empty());
    }
    if text.is_empty() {
        return Err(TraceError::Parse {
            line: 0,
            message: "empty letter; use `.` for the empty set".to_string(),
        });
    }
    let mut letter = Letter::empty();
    for part in text.split(',') {
        letter.insert(Prop::new(part.trim())?);
    }
    Ok(letter)
}

/// Parses one trace line: letters separated by `;`.
pub fn parse_trace_line(line: &str) -> Result<FiniteTrace, TraceError> {
    let letters = line
        .trim()
        .split(';')
        .map(parse_letter)
        .collect::<Result<Vec<_>, _>>()?;
    FiniteTrace::new(letters)
}

/// Parses a trace file: one trace per line, `#` lines are comments, blank
/// lines are ignored.
pub fn parse_trace_file(text: &str) -> Result<Vec<FiniteTrace>, TraceError> {
    let mut traces = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let trace = parse_trace_line(line).map_err(|e| match e {
            TraceError::Parse { message, .. } => TraceError::Parse {
                line: lineno + 1,
                message,
            },
            TraceError::Name(err) => TraceError::Parse {
                line: lineno + 1,
                message: err.to_string(),
            },
            TraceError::Empty => TraceError::Parse {
                line: lineno + 1,
                message: "empty trace".to_string(),
            },
        })?;
        traces.push(trace);
    }
    Ok(traces)
}

#[cfg(test)]
pub(crate) mod tests;
