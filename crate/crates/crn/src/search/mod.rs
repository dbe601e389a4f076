//! Bounded explicit-state oracle: breadth-first closure of an initial
//! configuration under one-step rule application, with hashed state
//! deduplication and explicit truncation reporting. Backs the reachability,
//! production, and universal-reachability deciders and cross-checks every
//! polynomial-time solver.

mod certificate;
mod engine;

pub use certificate::{search_certificate, verify_certificate, CertificateError, OrderedCertificate};

use crate::model::{Configuration, Count, Crn, Instance, Species};
use crate::Verdict;
use engine::{CompactConfig, Engine, StopReason};
use num_traits::ToPrimitive;

/// Exploration bounds. Truncation is reported, never silent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of distinct configurations to store.
    pub state_cap: usize,
    /// Configurations with a larger volume are pruned. The effective cap is
    /// raised to the initial configuration's volume so a search is never
    /// empty.
    pub volume_cap: u64,
    /// Maximum number of rule applications along any path; `None` leaves
    /// depth unbounded.
    pub step_cap: Option<usize>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            state_cap: 1_000_000,
            volume_cap: 64,
            step_cap: None,
        }
    }
}

/// Which bound truncated a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundHit {
    StateCap,
    VolumeCap,
    StepCap,
}

impl BoundHit {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundHit::StateCap => "state-cap",
            BoundHit::VolumeCap => "volume-cap",
            BoundHit::StepCap => "step-cap",
        }
    }
}

/// Result of an oracle run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    /// `Unreachable` is only reported when the full reachable set was
    /// enumerated within every cap.
    pub verdict: Verdict,
    pub states_explored: usize,
    pub bound_hit: Option<BoundHit>,
    /// Rule ids replaying the initial configuration to the goal, present
    /// for `Reachable` verdicts.
    pub trace: Option<Vec<usize>>,
}

/// The reachable set computed by [`explore`], kept in compact form.
pub struct Exploration {
    engine: Engine,
}

impl Exploration {
    pub fn states_explored(&self) -> usize {
        self.engine.len()
    }

    pub fn bound_hit(&self) -> Option<BoundHit> {
        self.engine.bound_hit()
    }

    /// `true` when the closure is the complete reachable set.
    pub fn is_complete(&self) -> bool {
        self.engine.bound_hit().is_none()
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        CompactConfig::try_from_configuration(c)
            .map(|key| self.engine.contains(&key))
            .unwrap_or(false)
    }

    /// All stored configurations, in discovery order.
    pub fn configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.engine.iter_configurations()
    }

    /// Rule ids of a shortest replay from the initial configuration, if the
    /// configuration was reached.
    pub fn trace_to(&self, c: &Configuration) -> Option<Vec<usize>> {
        let key = CompactConfig::try_from_configuration(c)?;
        self.engine.trace_to(&key)
    }
}

/// Breadth-first closure of `{initial}` under one-step application.
pub fn explore(crn: &Crn, initial: &Configuration, limits: &SearchLimits) -> Exploration {
    let mut engine = Engine::new(crn, initial, limits, false);
    engine.run(|_| false);
    Exploration { engine }
}

/// Decides reachability by bounded search: `Reachable` with a trace if the
/// target is found, `Unreachable` if the closure completed without it,
/// `Unknown` if a bound truncated the search first.
pub fn decide_reach_oracle(instance: &Instance, limits: &SearchLimits) -> OracleOutcome {
    let target = match CompactConfig::try_from_configuration(&instance.target) {
        Some(t) => t,
        None => {
            // A target too large to even represent cannot be found within
            // word-sized search bounds.
            return OracleOutcome {
                verdict: Verdict::Unknown,
                states_explored: 0,
                bound_hit: Some(BoundHit::VolumeCap),
                trace: None,
            };
        }
    };
    let mut engine = Engine::new(&instance.crn, &instance.initial, limits, false);
    let stop = engine.run(|state| state == target.entries());
    outcome_from_engine(engine, stop, &target)
}

/// Decides whether any reachable configuration holds at least `threshold`
/// copies of `species`.
pub fn decide_production_oracle(
    crn: &Crn,
    initial: &Configuration,
    species: Species,
    threshold: &Count,
    limits: &SearchLimits,
) -> OracleOutcome {
    let idx = species.0;
    // Counts inside the search never exceed the (word-sized) volume cap, so
    // an over-sized threshold can only be met never.
    let need = threshold.to_u64();
    let mut engine = Engine::new(crn, initial, limits, false);
    let stop = engine.run(|state| need.map(|n| state[idx] >= n).unwrap_or(false));
    let found = matches!(stop, StopReason::Goal(_));
    let verdict = if found {
        Verdict::Reachable
    } else if engine.bound_hit().is_none() {
        Verdict::Unreachable
    } else {
        Verdict::Unknown
    };
    let trace = match stop {
        StopReason::Goal(at) => Some(engine.trace_to_index(at)),
        _ => None,
    };
    OracleOutcome {
        verdict,
        states_explored: engine.len(),
        bound_hit: engine.bound_hit(),
        trace,
    }
}

/// Decides universal reachability: is the target reachable from every
/// configuration reachable from the initial one? The closure is enumerated
/// once together with its one-step transition graph, and the verdict is the
/// backward closure of the target covering every explored state.
pub fn decide_universal_oracle(instance: &Instance, limits: &SearchLimits) -> OracleOutcome {
    let target = match CompactConfig::try_from_configuration(&instance.target) {
        Some(t) => t,
        None => {
            return OracleOutcome {
                verdict: Verdict::Unknown,
                states_explored: 0,
                bound_hit: Some(BoundHit::VolumeCap),
                trace: None,
            };
        }
    };
    let mut engine = Engine::new(&instance.crn, &instance.initial, limits, true);
    engine.run(|_| false);
    let states_explored = engine.len();
    let bound_hit = engine.bound_hit();
    if bound_hit.is_some() {
        // The reachable set was not fully enumerated; some unseen
        // configuration could miss the target.
        return OracleOutcome {
            verdict: Verdict::Unknown,
            states_explored,
            bound_hit,
            trace: None,
        };
    }
    let target_index = match engine.index_of(&target) {
        Some(i) => i,
        None => {
            return OracleOutcome {
                verdict: Verdict::Unreachable,
                states_explored,
                bound_hit,
                trace: None,
            };
        }
    };
    let all_reach_target = engine.backward_closure_covers_all(target_index);
    OracleOutcome {
        verdict: if all_reach_target {
            Verdict::Reachable
        } else {
            Verdict::Unreachable
        },
        states_explored,
        bound_hit,
        trace: Some(engine.trace_to_index(target_index)),
    }
}

fn outcome_from_engine(engine: Engine, stop: StopReason, target: &CompactConfig) -> OracleOutcome {
    let found_at = match stop {
        StopReason::Goal(at) => Some(at),
        StopReason::Exhausted => engine.index_of(target),
    };
    let verdict = if found_at.is_some() {
        Verdict::Reachable
    } else if engine.bound_hit().is_none() {
        Verdict::Unreachable
    } else {
        Verdict::Unknown
    };
    let trace = found_at.map(|at| engine.trace_to_index(at));
    OracleOutcome {
        verdict,
        states_explored: engine.len(),
        bound_hit: engine.bound_hit(),
        trace,
    }
}
