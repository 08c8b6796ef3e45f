//! Incremental monitoring sessions.
//!
//! A session holds a fixed policy and a growing trace log. Each ingested
//! batch extends the log and re-checks the policy; per-tuple verdicts are
//! cached across batches since they do not depend on the surrounding trace
//! set. For monotone fragments the verdict can lock: a universal policy
//! that failed stays failed on every superset, and an existential policy
//! that held stays held, so later batches skip evaluation entirely.

use crate::eval::{check, CheckOptions, EvalCache, EvalError, EvalStats, EmptySetPolicy, Verdict};
use crate::formula::{FragmentPattern, HyperFormula};
use crate::kripke::{minimize_to_dag, FiniteTrace, LogError, LogMode, TraceLog};

/// Errors raised by session operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MonitorError {
    #[error("batches must contain at least one trace")]
    EmptyBatch,
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A non-empty group of traces ingested together.
#[derive(Debug, Clone)]
pub struct Batch {
    traces: Vec<FiniteTrace>,
    label: Option<String>,
}

impl Batch {
    pub fn new(traces: Vec<FiniteTrace>, label: Option<String>) -> Result<Self, MonitorError> {
        if traces.is_empty() {
            return Err(MonitorError::EmptyBatch);
        }
        Ok(Batch { traces, label })
    }

    pub fn traces(&self) -> &[FiniteTrace] {
        &self.traces
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

/// One line of session history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchRecord {
    pub batch: usize,
    pub holds: bool,
    pub tuples_evaluated: u64,
    pub cache_hits: u64,
}

/// An incremental monitoring session.
pub struct Session {
    policy: HyperFormula,
    mode: LogMode,
    log: Option<TraceLog>,
    cache: Option<EvalCache>,
    opts: CheckOptions,
    locked: Option<bool>,
    last: Option<Verdict>,
    history: Vec<BatchRecord>,
}

impl Session {
    pub fn new(policy: HyperFormula, mode: LogMode, empty_set: EmptySetPolicy) -> Session {
        Session {
            policy,
            mode,
            log: None,
            cache: Some(EvalCache::new()),
            opts: CheckOptions { empty_set },
            locked: None,
            last: None,
            history: Vec::new(),
        }
    }

    /// Disables the per-tuple cache; used to cross-check cache soundness.
    pub fn without_cache(mut self) -> Session {
        self.cache = None;
        self
    }

    pub fn policy(&self) -> &HyperFormula {
        &self.policy
    }

    pub fn log(&self) -> Option<&TraceLog> {
        self.log.as_ref()
    }

    pub fn locked_verdict(&self) -> Option<bool> {
        self.locked
    }

    pub fn history(&self) -> &[BatchRecord] {
        &self.history
    }

    /// Ingests a batch, extends the log, and re-checks the policy.
    ///
    /// A locked verdict is honored without recomputation; re-ingesting known
    /// traces is a silent no-op at the log level.
    pub fn ingest(&mut self, batch: &Batch) -> Result<&BatchRecord, MonitorError> {
        if let Some(locked) = self.locked {
            self.extend_log(batch)?;
            self.history.push(BatchRecord {
                batch: self.history.len(),
                holds: locked,
                tuples_evaluated: 0,
                cache_hits: 0,
            });
            return Ok(self.history.last().unwrap());
        }

        self.extend_log(batch)?;
        let log = self.log.as_ref().expect("log exists after ingest");
        let verdict = check(log.traces(), &self.policy, self.cache.as_ref(), &self.opts)?;

        match (self.policy.classify().pattern, verdict.holds) {
            (FragmentPattern::ForallOnly, false) => self.locked = Some(false),
            (FragmentPattern::ExistsOnly, true) => self.locked = Some(true),
            _ => {}
        }
        self.history.push(BatchRecord {
            batch: self.history.len(),
            holds: verdict.holds,
            tuples_evaluated: verdict.stats.tuples_evaluated,
            cache_hits: verdict.stats.cache_hits,
        });
        self.last = Some(verdict);
        Ok(self.history.last().unwrap())
    }

    fn extend_log(&mut self, batch: &Batch) -> Result<(), MonitorError> {
        match &mut self.log {
            Some(log) => {
                for trace in batch.traces() {
                    log.insert(trace.clone())?;
                }
            }
            None => {
                let mut log = crate::kripke::build_tree(batch.traces())?;
                if self.mode == LogMode::Dag {
                    log = minimize_to_dag(&log);
                }
                self.log = Some(log);
            }
        }
        Ok(())
    }

    /// The current verdict: the last computed one, or the empty-set verdict
    /// for a fresh session.
    pub fn current_verdict(&self) -> Result<Verdict, EvalError> {
        if let Some(locked) = self.locked {
            return Ok(Verdict {
                holds: locked,
                witness: self.last.as_ref().and_then(|v| v.witness.clone()),
                stats: self
                    .last
                    .as_ref()
                    .map(|v| v.stats)
                    .unwrap_or_default(),
            });
        }
        match &self.last {
            Some(v) => Ok(v.clone()),
            None => check(&[], &self.policy, None, &self.opts),
        }
    }

    /// The verdict of the last processed batch, with that batch's own
    /// evaluation counters (zero for batches decided by a lock).
    pub fn batch_verdict(&self, record: &BatchRecord) -> Verdict {
        Verdict {
            holds: record.holds,
            witness: self.last.as_ref().and_then(|v| v.witness.clone()),
            stats: crate::eval::EvalStats {
                tuples_evaluated: record.tuples_evaluated,
                cache_hits: record.cache_hits,
            },
        }
    }

    /// Total cache entries accumulated across batches.
    pub fn cache_size(&self) -> usize {
        self.cache.as_ref().map(|c| c.len()).unwrap_or(0)
    }

    /// Stats of the last computed verdict.
    pub fn last_stats(&self) -> Option<EvalStats> {
        self.last.as_ref().map(|v| v.stats)
    }
}
