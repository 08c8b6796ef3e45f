//! Trace logs: prefix-tree construction and suffix-sharing minimization.
//!
//! A log ingests finite traces in stutter-normal form and maintains a
//! prefix tree whose leaves carry self-loops. Minimization merges states
//! with equal label and equal suffix-trace set (bottom-up congruence),
//! yielding an acyclic structure with the same trace set.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{FiniteTrace, KripkeStructure, Letter, StateId, StructureError};
use crate::formula::Prop;

/// Storage mode of a log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogMode {
    Tree,
    Dag,
}

/// Errors raised by log construction and ingestion.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogError {
    #[error("cannot build a log from an empty trace list")]
    EmptyInput,
    #[error("trace starts with `{got}` but the log is rooted at `{expected}`")]
    FirstLetterMismatch { expected: String, got: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone)]
struct TrieNode {
    letter: Letter,
    children: BTreeMap<Letter, usize>,
    leaf: bool,
}

impl TrieNode {
    fn new(letter: Letter) -> Self {
        TrieNode {
            letter,
            children: BTreeMap::new(),
            leaf: false,
        }
    }
}

/// Prefix tree over stutter-normalized traces.
///
/// At most one child per (node, letter). A node is leaf-marked only while it
/// has no children; extending a trace through a leaf demotes it by moving
/// the stutter to a fresh child with the same letter, so the derived Kripke
/// frame stays a tree whose self-loops sit on terminal states only.
#[derive(Debug, Clone, Default)]
struct Trie {
    nodes: Vec<TrieNode>,
}

impl Trie {
    fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn root_letter(&self) -> Option<&Letter> {
        self.nodes.first().map(|n| &n.letter)
    }

    fn child(&self, node: usize, letter: &Letter) -> Option<usize> {
        self.nodes[node].children.get(letter).copied()
    }

    fn add_child(&mut self, node: usize, letter: Letter) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TrieNode::new(letter.clone()));
        self.nodes[node].children.insert(letter, id);
        id
    }

    /// Unmarks a leaf, preserving its trace via a stuttering child.
    fn demote(&mut self, node: usize) {
        debug_assert!(self.nodes[node].leaf && self.nodes[node].children.is_empty());
        self.nodes[node].leaf = false;
        let letter = self.nodes[node].letter.clone();
        let child = self.add_child(node, letter);
        self.nodes[child].leaf = true;
    }

    fn insert(&mut self, trace: &FiniteTrace) -> Result<(), LogError> {
        if self.is_empty() {
            self.nodes.push(TrieNode::new(trace.first().clone()));
        } else if self.root_letter() != Some(trace.first()) {
            return Err(LogError::FirstLetterMismatch {
                expected: self.root_letter().unwrap().to_string(),
                got: trace.first().to_string(),
            });
        }
        let mut cur = 0usize;
        for letter in &trace.letters()[1..] {
            if self.nodes[cur].leaf {
                self.demote(cur);
            }
            cur = match self.child(cur, letter) {
                Some(c) => c,
                None => self.add_child(cur, letter.clone()),
            };
        }
        self.accept(cur);
        Ok(())
    }

    /// Marks the trace ending at `node` as accepting, descending through
    /// same-letter children when the node already has successors.
    fn accept(&mut self, node: usize) {
        let mut cur = node;
        loop {
            if self.nodes[cur].leaf {
                return;
            }
            if self.nodes[cur].children.is_empty() {
                self.nodes[cur].leaf = true;
                return;
            }
            let letter = self.nodes[cur].letter.clone();
            cur = match self.child(cur, &letter) {
                Some(c) => c,
                None => {
                    let c = self.add_child(cur, letter);
                    self.nodes[c].leaf = true;
                    return;
                }
            };
        }
    }

    /// Walks the accepting path of a previously inserted trace.
    fn accepting_path(&self, trace: &FiniteTrace) -> Vec<StateId> {
        let mut path = vec![0usize];
        let mut cur = 0usize;
        for letter in &trace.letters()[1..] {
            cur = self.child(cur, letter).expect("trace was inserted");
            path.push(cur);
        }
        // Descend the stutter chain to the accepting leaf.
        while !self.nodes[cur].leaf {
            let letter = self.nodes[cur].letter.clone();
            cur = self.child(cur, &letter).expect("trace was inserted");
            path.push(cur);
        }
        path
    }

    fn to_structure(&self) -> KripkeStructure {
        let mut ap: BTreeSet<Prop> = BTreeSet::new();
        let mut labels = Vec::with_capacity(self.nodes.len());
        let mut edges = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            ap.extend(node.letter.props().cloned());
            labels.push(node.letter.clone());
            if node.leaf {
                edges.push((id, id));
            }
            for &child in node.children.values() {
                edges.push((id, child));
            }
        }
        KripkeStructure::new(ap, labels, 0, edges).expect("trie yields a valid structure")
    }

    /// Suffix-trace set of every node, as stutter-normalized words.
    fn suffix_sets(&self) -> Vec<BTreeSet<Vec<Letter>>> {
        let mut sets: Vec<Option<BTreeSet<Vec<Letter>>>> = vec![None; self.nodes.len()];
        // Children always have larger indices, so one reverse pass suffices.
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let mut set = BTreeSet::new();
            if node.leaf {
                set.insert(vec![node.letter.clone()]);
            }
            for &child in node.children.values() {
                for suffix in sets[child].as_ref().unwrap() {
                    let mut word = Vec::with_capacity(suffix.len() + 1);
                    word.push(node.letter.clone());
                    word.extend(suffix.iter().cloned());
                    if word.len() == 2 && word[0] == word[1] {
                        word.pop();
                    }
                    set.insert(word);
                }
            }
            sets[id] = Some(set);
        }
        sets.into_iter().map(|s| s.unwrap()).collect()
    }

    /// Merges nodes with equal label and equal suffix-trace set.
    ///
    /// Returns the minimized structure and the node-to-state mapping.
    fn minimize(&self) -> (KripkeStructure, Vec<StateId>) {
        let sets = self.suffix_sets();
        // Equal suffix sets imply equal labels (the label is the first
        // letter of every suffix), so the set alone keys the congruence.
        let mut class_of_set: HashMap<&BTreeSet<Vec<Letter>>, usize> = HashMap::new();
        let mut class_of_node = vec![0usize; self.nodes.len()];
        let mut representative: Vec<usize> = Vec::new();
        for id in 0..self.nodes.len() {
            let class = *class_of_set.entry(&sets[id]).or_insert_with(|| {
                representative.push(id);
                representative.len() - 1
            });
            class_of_node[id] = class;
        }

        let mut ap: BTreeSet<Prop> = BTreeSet::new();
        let mut labels = Vec::with_capacity(representative.len());
        for &rep in &representative {
            ap.extend(self.nodes[rep].letter.props().cloned());
            labels.push(self.nodes[rep].letter.clone());
        }
        let mut edges = BTreeSet::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if node.leaf {
                edges.insert((class_of_node[id], class_of_node[id]));
            }
            for &child in node.children.values() {
                edges.insert((class_of_node[id], class_of_node[child]));
            }
        }
        let structure = KripkeStructure::new(ap, labels, class_of_node[0], edges)
            .expect("minimization yields a valid structure");
        (structure, class_of_node)
    }
}

/// A growing trace log: the ingested traces plus their tree or DAG
/// representation as a Kripke structure.
#[derive(Debug, Clone)]
pub struct TraceLog {
    mode: LogMode,
    entries: Vec<FiniteTrace>,
    index: HashSet<FiniteTrace>,
    trie: Trie,
    /// Tree view, rebuilt on change.
    tree_structure: KripkeStructure,
    /// Minimized view and trie-node remap, present in DAG mode.
    dag: Option<(KripkeStructure, Vec<StateId>)>,
}

impl TraceLog {
    pub fn mode(&self) -> LogMode {
        self.mode
    }

    /// Ingested traces in insertion order; the index of a trace in this
    /// slice is its stable trace id.
    pub fn traces(&self) -> &[FiniteTrace] {
        &self.entries
    }

    pub fn contains(&self, trace: &FiniteTrace) -> bool {
        self.index.contains(trace)
    }

    /// The log's Kripke structure in its current mode.
    pub fn structure(&self) -> &KripkeStructure {
        match (&self.mode, &self.dag) {
            (LogMode::Dag, Some((k, _))) => k,
            _ => &self.tree_structure,
        }
    }

    pub fn state_count(&self) -> usize {
        self.structure().state_count()
    }

    /// Accepting leaf path of each ingested trace, per insertion index.
    pub fn paths(&self) -> Vec<Vec<StateId>> {
        self.entries
            .iter()
            .map(|t| {
                let tree_path = self.trie.accepting_path(t);
                match (&self.mode, &self.dag) {
                    (LogMode::Dag, Some((_, remap))) => {
                        let mut path: Vec<StateId> =
                            tree_path.into_iter().map(|n| remap[n]).collect();
                        path.dedup();
                        path
                    }
                    _ => tree_path,
                }
            })
            .collect()
    }

    /// Inserts a trace, returning whether it was new. Re-ingesting a known
    /// trace is a silent no-op.
    pub fn insert(&mut self, trace: FiniteTrace) -> Result<bool, LogError> {
        if self.index.contains(&trace) {
            return Ok(false);
        }
        self.trie.insert(&trace)?;
        self.index.insert(trace.clone());
        self.entries.push(trace);
        self.refresh();
        Ok(true)
    }

    fn refresh(&mut self) {
        self.tree_structure = self.trie.to_structure();
        if self.mode == LogMode::Dag {
            self.dag = Some(self.trie.minimize());
        }
    }
}

/// Builds a tree-mode log from a non-empty batch of traces sharing a first
/// letter.
pub fn build_tree(traces: &[FiniteTrace]) -> Result<TraceLog, LogError> {
    let first = traces.first().ok_or(LogError::EmptyInput)?;
    let mut trie = Trie::default();
    trie.insert(first)?;
    let mut log = TraceLog {
        mode: LogMode::Tree,
        entries: vec![first.clone()],
        index: HashSet::from([first.clone()]),
        tree_structure: trie.to_structure(),
        trie,
        dag: None,
    };
    for trace in &traces[1..] {
        log.insert(trace.clone())?;
    }
    Ok(log)
}

/// Re-represents a log in DAG mode by merging states with equal label and
/// equal suffix-trace set. The trace set is preserved and the state count
/// never increases; applying it to a DAG-mode log is a no-op.
pub fn minimize_to_dag(log: &TraceLog) -> TraceLog {
    let mut out = log.clone();
    out.mode = LogMode::Dag;
    out.dag = Some(out.trie.minimize());
    out
}
