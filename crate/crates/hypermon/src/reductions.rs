//! QBF-derived model-checking instances with known ground truth.
//!
//! Both generators map a quantified Boolean formula to a structure/formula
//! pair whose verdict equals the QBF's truth value, computed here by an
//! exhaustive game-tree oracle. The acyclic gadget encodes a CNF instance
//! into clause branches and an assignment diamond; the tree gadget encodes
//! an arbitrary-body instance into a fixed three-state tree whose two
//! traces act as the Boolean constants.

use serde::{Deserialize, Serialize};

use crate::formula::{HyperFormula, LtlBody, Prop, Quantifier, QuantifierPrefix, TraceVar};
use crate::kripke::{KripkeStructure, Letter};
use crate::rng::SplitMix64;

/// Errors raised by QBF validation, solving, and reduction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("QBF has {0} variables; the oracle is capped at {MAX_ORACLE_VARS}")]
    TooManyVariables(usize),
    #[error("clause {clause} repeats variable `{var}`")]
    DuplicateVariableInClause { clause: usize, var: String },
    #[error("literal references unknown variable index {0}")]
    UnknownVariable(usize),
    #[error("the acyclic reduction requires a CNF body")]
    NotCnf,
    #[error("QBF must have at least one variable")]
    NoVariables,
    #[error("cannot fit {alternations} alternations into {vars} variables")]
    InfeasibleShape { alternations: usize, vars: usize },
}

const MAX_ORACLE_VARS: usize = 20;

/// A literal: variable index with optional negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbfLiteral {
    pub var: usize,
    pub negated: bool,
}

/// Boolean body for the tree reduction, which accepts arbitrary formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Const(bool),
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Var(i) => assignment[*i],
            BoolExpr::Not(x) => !x.eval(assignment),
            BoolExpr::And(a, b) => a.eval(assignment) && b.eval(assignment),
            BoolExpr::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            BoolExpr::Const(_) => None,
            BoolExpr::Var(i) => Some(*i),
            BoolExpr::Not(x) => x.max_var(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }
}

/// Body of a QBF: CNF clauses or an arbitrary Boolean formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QbfBody {
    Cnf(Vec<Vec<QbfLiteral>>),
    Expr(BoolExpr),
}

/// A prenex quantified Boolean formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qbf {
    vars: Vec<(String, Quantifier)>,
    body: QbfBody,
}

impl Qbf {
    /// Validates variable references; CNF clauses must not repeat a
    /// variable.
    pub fn new(vars: Vec<(String, Quantifier)>, body: QbfBody) -> Result<Qbf, ReductionError> {
        if vars.is_empty() {
            return Err(ReductionError::NoVariables);
        }
        match &body {
            QbfBody::Cnf(clauses) => {
                for (ci, clause) in clauses.iter().enumerate() {
                    for (i, lit) in clause.iter().enumerate() {
                        if lit.var >= vars.len() {
                            return Err(ReductionError::UnknownVariable(lit.var));
                        }
                        if clause[..i].iter().any(|other| other.var == lit.var) {
                            return Err(ReductionError::DuplicateVariableInClause {
                                clause: ci,
                                var: vars[lit.var].0.clone(),
                            });
                        }
                    }
                }
            }
            QbfBody::Expr(expr) => {
                if let Some(max) = expr.max_var() {
                    if max >= vars.len() {
                        return Err(ReductionError::UnknownVariable(max));
                    }
                }
            }
        }
        Ok(Qbf { vars, body })
    }

    pub fn vars(&self) -> &[(String, Quantifier)] {
        &self.vars
    }

    pub fn body(&self) -> &QbfBody {
        &self.body
    }

    /// Maximal blocks of equal quantifier kind, outermost first.
    pub fn blocks(&self) -> Vec<(Quantifier, usize)> {
        let mut blocks: Vec<(Quantifier, usize)> = Vec::new();
        for (_, kind) in &self.vars {
            match blocks.last_mut() {
                Some((k, n)) if k == kind => *n += 1,
                _ => blocks.push((*kind, 1)),
            }
        }
        blocks
    }

    pub fn alternations(&self) -> usize {
        self.blocks().len() - 1
    }

    /// Alternation depth of each variable, numbered from the inside out:
    /// the innermost block has depth 1 and the outermost has depth k+1 for
    /// k alternations.
    pub fn depths(&self) -> Vec<usize> {
        let blocks = self.blocks();
        let total = blocks.len();
        let mut depths = Vec::with_capacity(self.vars.len());
        for (block_index, (_, size)) in blocks.iter().enumerate() {
            for _ in 0..*size {
                depths.push(total - block_index);
            }
        }
        depths
    }

    /// Quantifier kind of the block at a given depth.
    fn kind_at_depth(&self, depth: usize) -> Quantifier {
        let blocks = self.blocks();
        blocks[blocks.len() - depth].0
    }

    fn eval_body(&self, assignment: &[bool]) -> bool {
        match &self.body {
            QbfBody::Cnf(clauses) => clauses.iter().all(|clause| {
                clause
                    .iter()
                    .any(|lit| assignment[lit.var] != lit.negated)
            }),
            QbfBody::Expr(expr) => expr.eval(assignment),
        }
    }
}

/// Exhaustive game-tree oracle for QBF truth.
pub fn qbf_solve(q: &Qbf) -> Result<bool, ReductionError> {
    let n = q.vars.len();
    if n > MAX_ORACLE_VARS {
        return Err(ReductionError::TooManyVariables(n));
    }
    let mut assignment = vec![false; n];
    Ok(solve_from(q, 0, &mut assignment))
}

fn solve_from(q: &Qbf, index: usize, assignment: &mut Vec<bool>) -> bool {
    if index == q.vars.len() {
        return q.eval_body(assignment);
    }
    let mut outcome = [false; 2];
    for (slot, value) in [false, true].into_iter().enumerate() {
        assignment[index] = value;
        outcome[slot] = solve_from(q, index + 1, assignment);
    }
    assignment[index] = false;
    match q.vars[index].1 {
        Quantifier::Exists => outcome[0] || outcome[1],
        Quantifier::Forall => outcome[0] && outcome[1],
    }
}

/// A generated model-checking instance with its ground truth.
#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub structure: KripkeStructure,
    pub formula: HyperFormula,
    pub ground_truth: bool,
}

fn prop(name: &str) -> Prop {
    Prop::new(name).expect("generated proposition names are valid")
}

fn tvar(name: &str) -> TraceVar {
    TraceVar::new(name).expect("generated trace variable names are valid")
}

/// Maps a CNF QBF to an acyclic structure and a formula over depth-indexed
/// trace variables whose verdict equals the QBF's truth value.
///
/// The structure has one branch per clause (states `r_j`, `v_i^j`, `u_i^j`)
/// and one assignment diamond (states `s_i`, `sbar_i`, `shat_i`); in total
/// `1 + (m+1) + 2nm + 3n` states for `n` variables and `m` clauses. Clause
/// branches are marked `c` at their first step. Position `2i` of a branch
/// carries the depth proposition `q__d` of variable `i` plus `p` or `pbar`
/// when the variable occurs in the clause; the diamond carries the chosen
/// polarity at the same positions. The formula's body requires, whenever
/// the universally chosen traces are assignment traces and the reference
/// trace is a clause branch, that the existentially chosen traces are
/// assignment traces and that some position matches its counterpart: the
/// depth proposition holds on both traces and the polarities agree.
pub fn reduce_qbf_acyclic(q: &Qbf) -> Result<ReductionOutput, ReductionError> {
    let QbfBody::Cnf(clauses) = &q.body else {
        return Err(ReductionError::NotCnf);
    };
    let ground_truth = qbf_solve(q)?;
    let n = q.vars.len();
    let m = clauses.len();
    let depths = q.depths();
    let depth_count = q.alternations() + 1;

    let p_prop = prop("p");
    let pbar_prop = prop("pbar");
    let c_prop = prop("c");
    let q_prop = |d: usize| prop(&format!("q__{d}"));

    let mut ap: Vec<Prop> = vec![c_prop.clone(), p_prop.clone(), pbar_prop.clone()];
    for d in 1..=depth_count {
        ap.push(q_prop(d));
    }

    // State ids: s_init, r_0..r_m, then per clause j the chain
    // v_1^j u_1^j .. v_n^j u_n^j, then per variable i the diamond
    // s_i sbar_i shat_i.
    let state_init = 0usize;
    let state_r = |j: usize| 1 + j;
    let clause_base = 2 + m;
    let state_v = |j: usize, i: usize| clause_base + (j - 1) * 2 * n + 2 * (i - 1);
    let state_u = |j: usize, i: usize| state_v(j, i) + 1;
    let diamond_base = clause_base + 2 * n * m;
    let state_s = |i: usize| diamond_base + 3 * (i - 1);
    let state_sbar = |i: usize| state_s(i) + 1;
    let state_shat = |i: usize| state_s(i) + 2;
    let total_states = diamond_base + 3 * n;

    let mut labels = vec![Letter::empty(); total_states];
    for j in 1..=m {
        labels[state_r(j)] = Letter::new([c_prop.clone()]);
        for i in 1..=n {
            let mut letter = Letter::new([q_prop(depths[i - 1])]);
            for lit in &clauses[j - 1] {
                if lit.var == i - 1 {
                    letter.insert(if lit.negated {
                        pbar_prop.clone()
                    } else {
                        p_prop.clone()
                    });
                }
            }
            labels[state_v(j, i)] = letter;
        }
    }
    for i in 1..=n {
        labels[state_s(i)] = Letter::new([p_prop.clone(), q_prop(depths[i - 1])]);
        labels[state_sbar(i)] = Letter::new([pbar_prop.clone(), q_prop(depths[i - 1])]);
    }

    let mut edges = Vec::new();
    for j in 0..=m {
        edges.push((state_init, state_r(j)));
    }
    edges.push((state_r(0), state_s(1)));
    edges.push((state_r(0), state_sbar(1)));
    for j in 1..=m {
        edges.push((state_r(j), state_v(j, 1)));
        for i in 1..=n {
            edges.push((state_v(j, i), state_u(j, i)));
            if i < n {
                edges.push((state_u(j, i), state_v(j, i + 1)));
            }
        }
        edges.push((state_u(j, n), state_u(j, n)));
    }
    for i in 1..=n {
        edges.push((state_s(i), state_shat(i)));
        edges.push((state_sbar(i), state_shat(i)));
        if i < n {
            edges.push((state_shat(i), state_s(i + 1)));
            edges.push((state_shat(i), state_sbar(i + 1)));
        }
    }
    edges.push((state_shat(n), state_shat(n)));

    let structure = KripkeStructure::new(ap, labels, state_init, edges)
        .expect("reduction yields a valid structure");

    // Depth-indexed trace variables, outermost depth first, then the
    // universally quantified clause-reference variable.
    let depth_var = |d: usize| tvar(&format!("p{d}"));
    let clause_var = tvar("pc");
    let mut prefix_entries = Vec::with_capacity(depth_count + 1);
    for d in (1..=depth_count).rev() {
        prefix_entries.push((q.kind_at_depth(d), depth_var(d)));
    }
    prefix_entries.push((Quantifier::Forall, clause_var.clone()));
    let prefix = QuantifierPrefix::new(prefix_entries).expect("distinct variables");

    let universal_depths: Vec<usize> = (1..=depth_count)
        .filter(|&d| q.kind_at_depth(d) == Quantifier::Forall)
        .collect();
    let existential_depths: Vec<usize> = (1..=depth_count)
        .filter(|&d| q.kind_at_depth(d) == Quantifier::Exists)
        .collect();

    let not_clause_trace = |d: usize| {
        LtlBody::next(LtlBody::not(LtlBody::atom(
            c_prop.clone(),
            depth_var(d),
        )))
    };
    let mut lhs_parts: Vec<LtlBody> =
        universal_depths.iter().map(|&d| not_clause_trace(d)).collect();
    lhs_parts.push(LtlBody::next(LtlBody::atom(
        c_prop.clone(),
        clause_var.clone(),
    )));
    let lhs = LtlBody::conjunction(lhs_parts);

    let match_disjuncts: Vec<LtlBody> = (1..=depth_count)
        .map(|d| {
            let depth_marker = LtlBody::and(
                LtlBody::atom(q_prop(d), depth_var(d)),
                LtlBody::atom(q_prop(d), clause_var.clone()),
            );
            let polarity = LtlBody::or(
                LtlBody::and(
                    LtlBody::atom(p_prop.clone(), clause_var.clone()),
                    LtlBody::atom(p_prop.clone(), depth_var(d)),
                ),
                LtlBody::and(
                    LtlBody::atom(pbar_prop.clone(), clause_var.clone()),
                    LtlBody::atom(pbar_prop.clone(), depth_var(d)),
                ),
            );
            LtlBody::and(depth_marker, polarity)
        })
        .collect();
    let mut rhs_parts: Vec<LtlBody> = existential_depths
        .iter()
        .map(|&d| not_clause_trace(d))
        .collect();
    rhs_parts.push(LtlBody::eventually(LtlBody::disjunction(match_disjuncts)));
    let rhs = LtlBody::conjunction(rhs_parts);

    let formula = HyperFormula::new(prefix, LtlBody::implies(lhs, rhs))
        .expect("reduction formula is closed");

    Ok(ReductionOutput {
        structure,
        formula,
        ground_truth,
    })
}

/// Maps an arbitrary-body QBF to the fixed three-state tree whose two
/// traces encode the Boolean constants, and a formula with the same
/// quantifier prefix where variable `x_i` becomes `X x@x_i`.
pub fn reduce_qbf_tree(q: &Qbf) -> Result<ReductionOutput, ReductionError> {
    let ground_truth = qbf_solve(q)?;
    let x = prop("x");
    let structure = KripkeStructure::new(
        [x.clone()],
        vec![Letter::empty(), Letter::new([x.clone()]), Letter::empty()],
        0,
        [(0, 1), (0, 2), (1, 1), (2, 2)],
    )
    .expect("tree gadget is valid");

    let trace_var = |i: usize| tvar(&q.vars[i].0);
    let prefix = QuantifierPrefix::new(
        q.vars
            .iter()
            .enumerate()
            .map(|(i, (_, kind))| (*kind, trace_var(i)))
            .collect(),
    )
    .expect("QBF variables are distinct");

    let var_body = |i: usize| LtlBody::next(LtlBody::atom(x.clone(), trace_var(i)));
    let body = match &q.body {
        QbfBody::Cnf(clauses) => LtlBody::conjunction(
            clauses
                .iter()
                .map(|clause| {
                    LtlBody::disjunction(
                        clause
                            .iter()
                            .map(|lit| {
                                if lit.negated {
                                    LtlBody::not(var_body(lit.var))
                                } else {
                                    var_body(lit.var)
                                }
                            })
                            .collect(),
                    )
                })
                .collect(),
        ),
        QbfBody::Expr(expr) => expr_to_body(expr, &var_body),
    };

    let formula = HyperFormula::new(prefix, body).expect("reduction formula is closed");
    Ok(ReductionOutput {
        structure,
        formula,
        ground_truth,
    })
}

fn expr_to_body(expr: &BoolExpr, var_body: &impl Fn(usize) -> LtlBody) -> LtlBody {
    match expr {
        BoolExpr::Const(true) => LtlBody::True,
        BoolExpr::Const(false) => LtlBody::not(LtlBody::True),
        BoolExpr::Var(i) => var_body(*i),
        BoolExpr::Not(x) => LtlBody::not(expr_to_body(x, var_body)),
        BoolExpr::And(a, b) => {
            LtlBody::and(expr_to_body(a, var_body), expr_to_body(b, var_body))
        }
        BoolExpr::Or(a, b) => {
            LtlBody::or(expr_to_body(a, var_body), expr_to_body(b, var_body))
        }
    }
}

/// Deterministic pseudorandom CNF QBF with the requested prefix shape; the
/// same seed yields the same instance.
pub fn random_qbf(
    seed: u64,
    n_vars: usize,
    n_clauses: usize,
    alternations: usize,
) -> Result<Qbf, ReductionError> {
    if n_vars == 0 {
        return Err(ReductionError::NoVariables);
    }
    if n_vars > MAX_ORACLE_VARS {
        return Err(ReductionError::TooManyVariables(n_vars));
    }
    if alternations + 1 > n_vars {
        return Err(ReductionError::InfeasibleShape {
            alternations,
            vars: n_vars,
        });
    }
    let mut rng = SplitMix64::new(seed);
    let blocks = alternations + 1;
    let lead = if rng.bool() {
        Quantifier::Exists
    } else {
        Quantifier::Forall
    };

    // Random composition of n_vars into `blocks` positive parts.
    let mut sizes = vec![1usize; blocks];
    for _ in 0..(n_vars - blocks) {
        let slot = rng.below(blocks);
        sizes[slot] += 1;
    }

    let mut vars = Vec::with_capacity(n_vars);
    let mut kind = lead;
    let mut index = 0;
    for size in sizes {
        for _ in 0..size {
            index += 1;
            vars.push((format!("x{index}"), kind));
        }
        kind = kind.dual();
    }

    let max_width = n_vars.min(3);
    let clauses = (0..n_clauses)
        .map(|_| {
            let width = 1 + rng.below(max_width);
            let mut chosen = rng.distinct(n_vars, width);
            chosen.sort_unstable();
            chosen
                .into_iter()
                .map(|var| QbfLiteral {
                    var,
                    negated: rng.bool(),
                })
                .collect()
        })
        .collect();

    Qbf::new(vars, QbfBody::Cnf(clauses))
}
