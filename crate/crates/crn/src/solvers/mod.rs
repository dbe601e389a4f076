//! Decision procedures and the dispatcher that routes an instance to the
//! first one whose preconditions hold, falling back to the bounded
//! explicit-state oracle when no polynomial procedure applies.

mod prune;
mod unimolecular;
mod void2;

pub use prune::{
    decide_ff_1consuming_no_autogenesis, decide_ff_1source_1consuming, decide_ff_1source_no_void,
    prune_step, prune_step_void, Inconsistent, PruneResult,
};
pub use unimolecular::{decide_unimolecular, produce_unimolecular};
pub use void2::{decide_void2_bipartite_flow, decide_void2_matching, DEFAULT_UNARY_CAP};

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::classify::{self, ClassificationProfile};
use crate::model::{rule_traits, Count, Crn, Instance, Problem, Rule};
use crate::search::{
    decide_production_oracle, decide_reach_oracle, decide_universal_oracle, OrderedCertificate,
    SearchLimits,
};
use crate::Verdict;

/// Identifier of the procedure that produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Token routing for size-(1,1) rule sets.
    Uni,
    /// Closure counting for size-(1,1) production.
    UniProduce,
    /// Leaf pruning for feed-forward, single-source, no-void rule sets.
    FfSsNv,
    /// Rule reversal plus leaf pruning for feed-forward, single-consuming,
    /// no-autogenesis rule sets.
    FfScNa,
    /// Leaf pruning with void rules allowed, for feed-forward rule sets
    /// that are both single-source and single-consuming.
    FfSsSc,
    /// Saturating flow for bipartite all-(2,0) systems.
    Void2Bi,
    /// Perfect matching on the expanded graph for all-(2,0) systems.
    Void2Uni,
    /// Bounded breadth-first search.
    Oracle,
    OracleProduce,
    OracleUniversal,
    /// Bounded search used because a pruning run could not be trusted.
    Fallback,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Uni => "uni",
            Method::UniProduce => "uni-produce",
            Method::FfSsNv => "ff-ss-nv",
            Method::FfScNa => "ff-sc-na",
            Method::FfSsSc => "ff-ss-sc",
            Method::Void2Bi => "void2-bi",
            Method::Void2Uni => "void2-uni",
            Method::Oracle => "oracle",
            Method::OracleProduce => "oracle-produce",
            Method::OracleUniversal => "oracle-universal",
            Method::Fallback => "fallback",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("{method} requires {requirement}")]
    PreconditionViolated {
        method: Method,
        requirement: &'static str,
    },
    #[error("rule {0} is not a size-(2,0) void rule")]
    NotVoid2System(usize),
    #[error("the rule set is not bipartite")]
    NotBipartite,
    #[error("rule {0} is not of size (1,1)")]
    NotUnimolecular(usize),
    #[error("expanded graph needs {required} vertices, above the unary cap {cap}")]
    VolumeCapExceeded { required: Count, cap: usize },
    #[error("procedure expects a {expected} instance")]
    WrongProblem { expected: &'static str },
}

/// Outcome of a decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    pub method: Method,
    /// Ordered replay witnessing a `Reachable` verdict, when the procedure
    /// can produce one.
    pub certificate: Option<OrderedCertificate>,
    /// Per-rule application counts found by pruning or flow procedures.
    pub witness_applications: Option<BTreeMap<usize, Count>>,
    /// Which bound produced an `Unknown` verdict.
    pub bound: Option<&'static str>,
    /// Free-form remarks, including logged divergences of best-effort
    /// procedures from the oracle.
    pub notes: Vec<String>,
    /// Populated when a procedure was forced despite failed preconditions.
    pub warnings: Vec<String>,
}

impl Decision {
    pub(crate) fn new(verdict: Verdict, method: Method) -> Self {
        Decision {
            verdict,
            method,
            certificate: None,
            witness_applications: None,
            bound: None,
            notes: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub(crate) fn from_oracle(outcome: &crate::search::OracleOutcome, method: Method) -> Self {
        let mut d = Decision::new(outcome.verdict, method);
        d.certificate = outcome
            .trace
            .as_deref()
            .map(OrderedCertificate::from_trace);
        d.bound = outcome.bound_hit.map(|b| b.as_str());
        d
    }
}

/// Swaps reactants and products of every rule, preserving ids.
pub fn reverse_rules(rules: &[Rule]) -> Vec<Rule> {
    rules.iter().map(Rule::reversed).collect()
}

/// Tunables for [`dispatch`].
#[derive(Debug, Clone)]
pub struct DispatchOptions {
    pub limits: SearchLimits,
    /// Largest expanded-vertex count the matching procedure accepts.
    pub unary_cap: usize,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        DispatchOptions {
            limits: SearchLimits::default(),
            unary_cap: DEFAULT_UNARY_CAP,
        }
    }
}

pub(crate) fn all_rules_size(crn: &Crn, reactant_volume: u8, product_volume: u8) -> bool {
    crn.rules().iter().all(|r| {
        r.reactants().volume() == Count::from(reactant_volume)
            && r.products().volume() == Count::from(product_volume)
    })
}

/// Routes the instance to the first applicable procedure: unimolecular
/// routing, the three pruning solvers, the two all-(2,0) procedures, then
/// the bounded oracle. The chosen method is always reported.
pub fn dispatch(instance: &Instance, options: &DispatchOptions) -> Decision {
    match &instance.problem {
        Problem::Production { species, threshold } => {
            if !instance.crn.rules().is_empty() && all_rules_size(&instance.crn, 1, 1) {
                produce_unimolecular(instance).expect("preconditions checked")
            } else {
                Decision::from_oracle(
                    &decide_production_oracle(
                        &instance.crn,
                        &instance.initial,
                        *species,
                        threshold,
                        &options.limits,
                    ),
                    Method::OracleProduce,
                )
            }
        }
        Problem::UniversalReach => Decision::from_oracle(
            &decide_universal_oracle(instance, &options.limits),
            Method::OracleUniversal,
        ),
        Problem::Reach => dispatch_reach(instance, options),
    }
}

fn dispatch_reach(instance: &Instance, options: &DispatchOptions) -> Decision {
    let crn = &instance.crn;
    let profile = classify::profile(crn);
    if !crn.rules().is_empty() && all_rules_size(crn, 1, 1) {
        return decide_unimolecular(instance).expect("preconditions checked");
    }
    if profile.is_feed_forward() {
        if profile.max_source <= 1 && !profile.has_void {
            return decide_ff_1source_no_void(instance).expect("preconditions checked");
        }
        if profile.max_consuming <= 1 && !profile.has_autogenesis {
            return decide_ff_1consuming_no_autogenesis(instance).expect("preconditions checked");
        }
        if profile.max_source <= 1 && profile.max_consuming <= 1 {
            return decide_ff_1source_1consuming(instance, &options.limits)
                .expect("preconditions checked");
        }
    }
    if !crn.rules().is_empty() && crn.rules().iter().all(is_void2_rule) {
        if profile.bipartition.is_some() {
            return decide_void2_bipartite_flow(instance).expect("preconditions checked");
        }
        match decide_void2_matching(instance, options.unary_cap) {
            Ok(decision) => return decision,
            Err(SolveError::VolumeCapExceeded { required, cap }) => {
                let mut d = Decision::new(Verdict::Unknown, Method::Void2Uni);
                d.bound = Some("unary-cap");
                d.notes.push(format!(
                    "expanded graph needs {required} vertices (cap {cap}); \
                     non-bipartite pair-consumption reachability left undecided"
                ));
                return d;
            }
            Err(other) => unreachable!("matching preconditions checked: {other}"),
        }
    }
    Decision::from_oracle(&decide_reach_oracle(instance, &options.limits), Method::Oracle)
}

pub(crate) fn is_void2_rule(rule: &Rule) -> bool {
    let t = rule_traits(rule);
    t.size.0 == Count::from(2u8) && t.size.1.is_zero()
}

/// The oracle decider matching the instance's problem kind.
fn oracle_decision(instance: &Instance, options: &DispatchOptions) -> Decision {
    match &instance.problem {
        Problem::Reach => Decision::from_oracle(
            &decide_reach_oracle(instance, &options.limits),
            Method::Oracle,
        ),
        Problem::Production { species, threshold } => Decision::from_oracle(
            &decide_production_oracle(
                &instance.crn,
                &instance.initial,
                *species,
                threshold,
                &options.limits,
            ),
            Method::OracleProduce,
        ),
        Problem::UniversalReach => Decision::from_oracle(
            &decide_universal_oracle(instance, &options.limits),
            Method::OracleUniversal,
        ),
    }
}

/// Runs a named procedure regardless of its preconditions, for testing.
/// A failed precondition is downgraded to a `precondition_violated`
/// warning: the pruning procedures run anyway, while procedures that need
/// structure the rule set lacks fall back to the oracle.
pub fn force_method(instance: &Instance, method: Method, options: &DispatchOptions) -> Decision {
    let force = |checked: Result<Decision, SolveError>,
                 unchecked: Option<Decision>|
     -> Decision {
        match checked {
            Ok(decision) => decision,
            Err(err) => {
                let mut d = unchecked.unwrap_or_else(|| oracle_decision(instance, options));
                d.warnings.push(format!("precondition_violated: {err}"));
                d
            }
        }
    };
    match method {
        Method::Uni => force(decide_unimolecular(instance), None),
        Method::UniProduce => force(produce_unimolecular(instance), None),
        Method::FfSsNv => force(
            decide_ff_1source_no_void(instance),
            Some(decide_ff_1source_no_void_unchecked(instance)),
        ),
        Method::FfScNa => force(
            decide_ff_1consuming_no_autogenesis(instance),
            Some(decide_ff_1consuming_no_autogenesis_unchecked(instance)),
        ),
        Method::FfSsSc => force(
            decide_ff_1source_1consuming(instance, &options.limits),
            Some(decide_ff_1source_1consuming_unchecked(instance, &options.limits)),
        ),
        Method::Void2Bi => force(decide_void2_bipartite_flow(instance), None),
        Method::Void2Uni => force(decide_void2_matching(instance, options.unary_cap), None),
        Method::Oracle
        | Method::Fallback
        | Method::OracleProduce
        | Method::OracleUniversal => oracle_decision(instance, options),
    }
}

pub(crate) fn precondition(
    ok: bool,
    method: Method,
    requirement: &'static str,
) -> Result<(), SolveError> {
    if ok {
        Ok(())
    } else {
        Err(SolveError::PreconditionViolated {
            method,
            requirement,
        })
    }
}

pub(crate) fn profile_of(instance: &Instance) -> ClassificationProfile {
    classify::profile(&instance.crn)
}

use prune::{
    decide_ff_1consuming_no_autogenesis_unchecked, decide_ff_1source_1consuming_unchecked,
    decide_ff_1source_no_void_unchecked,
};
