//! Leaf pruning for feed-forward rule sets.
//!
//! Pruning works backwards from the target: a leaf rule (one whose
//! net-produced species no other rule reads) has a forced application
//! count, because nothing else moves those species; subtract its
//! contribution and recurse on the smaller rule set. Reversing every rule
//! swaps the roles of sources and consumers, which turns the
//! single-consuming case into the single-source case.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{precondition, profile_of, Decision, Method, SolveError};
use crate::model::{
    is_applicable, rule_traits, Configuration, Count, Crn, Delta, Instance, Problem, Rule,
};
use crate::search::{decide_reach_oracle, OrderedCertificate, SearchLimits};
use crate::Verdict;

/// Result of removing one leaf rule from the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PruneResult {
    /// How many times the rule must have fired.
    pub applications: Count,
    /// `target - applications · R_a`.
    pub pruned_target: Configuration,
}

/// The target cannot be explained by any application count of the rule;
/// for an exact prune this means the target is unreachable.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("target is inconsistent with the initial configuration for rule {rule}: {reason}")]
pub struct Inconsistent {
    pub rule: usize,
    pub reason: String,
}

fn inconsistent(rule: &Rule, reason: impl Into<String>) -> Inconsistent {
    Inconsistent {
        rule: rule.id(),
        reason: reason.into(),
    }
}

/// Solves `target[i] = initial[i] + x · av[i]` for one coordinate.
fn solve_coord(
    rule: &Rule,
    target: &Count,
    initial: &Count,
    delta: &Delta,
) -> Result<Count, Inconsistent> {
    let diff = BigInt::from(target.clone()) - BigInt::from(initial.clone());
    if diff.is_negative() == delta.is_positive() && !diff.is_zero() {
        return Err(inconsistent(rule, "application count would be negative"));
    }
    let (q, r) = diff.div_rem(delta);
    if !r.is_zero() {
        return Err(inconsistent(rule, "species difference is not a multiple of the rule's net change"));
    }
    Ok(q.to_biguint()
        .ok_or_else(|| inconsistent(rule, "application count would be negative"))?)
}

/// Endpoint feasibility of running the rule `x` times ending exactly at
/// `target`: the rule must be applicable at `target - x·R_a` and at
/// `target - R_a`. Skipped entirely for `x = 0`.
fn check_endpoints(
    rule: &Rule,
    target: &Configuration,
    x: &Count,
) -> Result<Configuration, Inconsistent> {
    let av = rule.application_vector();
    let negated: Vec<Delta> = av.iter().map(|d| -d).collect();
    let start = target
        .add_scaled_delta(&negated, x)
        .ok_or_else(|| inconsistent(rule, "pruned target has a negative entry"))?;
    if x.is_zero() {
        return Ok(start);
    }
    if !is_applicable(&start, rule) {
        return Err(inconsistent(rule, "rule not applicable at the start of its run"));
    }
    let before_last = target
        .add_scaled_delta(&negated, &Count::one())
        .ok_or_else(|| inconsistent(rule, "final application would need negative counts"))?;
    if !is_applicable(&before_last, rule) {
        return Err(inconsistent(rule, "rule not applicable at its final application"));
    }
    Ok(start)
}

/// Prunes a non-void leaf rule: the application count is forced by the
/// net-produced coordinates, which only this rule can move.
pub fn prune_step(
    target: &Configuration,
    initial: &Configuration,
    rule: &Rule,
) -> Result<PruneResult, Inconsistent> {
    let av = rule.application_vector();
    let mut x: Option<Count> = None;
    for (i, d) in av.iter().enumerate() {
        if !d.is_positive() {
            continue;
        }
        let q = solve_coord(rule, &target.counts()[i], &initial.counts()[i], d)?;
        match &x {
            Some(prev) if *prev != q => {
                return Err(inconsistent(rule, "net-produced species demand different application counts"));
            }
            _ => x = Some(q),
        }
    }
    let x = match x {
        Some(x) => x,
        // No net change at all: the rule never needs to fire.
        None if av.iter().all(Zero::is_zero) => Count::zero(),
        None => return Err(inconsistent(rule, "rule has no net products")),
    };
    let pruned_target = check_endpoints(rule, target, &x)?;
    Ok(PruneResult {
        applications: x,
        pruned_target,
    })
}

/// Prunes a void leaf rule: the application count is solved from every
/// net-changed (necessarily consumed) coordinate. In a single-consuming
/// system no other rule consumes them, but another rule may still produce
/// them, so this prune is best effort; callers flag it for cross-checking.
pub fn prune_step_void(
    target: &Configuration,
    initial: &Configuration,
    rule: &Rule,
) -> Result<PruneResult, Inconsistent> {
    let av = rule.application_vector();
    let mut x: Option<Count> = None;
    for (i, d) in av.iter().enumerate() {
        if d.is_zero() {
            continue;
        }
        let q = solve_coord(rule, &target.counts()[i], &initial.counts()[i], d)?;
        match &x {
            Some(prev) if *prev != q => {
                return Err(inconsistent(rule, "consumed species demand different application counts"));
            }
            _ => x = Some(q),
        }
    }
    let x = x.ok_or_else(|| inconsistent(rule, "rule changes nothing"))?;
    let pruned_target = check_endpoints(rule, target, &x)?;
    Ok(PruneResult {
        applications: x,
        pruned_target,
    })
}

/// Leaf rules of the live subset under occurrence semantics: no species
/// occurring in the rule's products (catalysts included) occurs as a
/// reactant of another live rule. This is the selection order the prune
/// recursion relies on; the coarser net-product notion in [`crate::classify`]
/// describes single rules in isolation.
fn occurrence_leaves(crn: &Crn, alive: &[bool]) -> Vec<usize> {
    let rules = crn.rules();
    (0..rules.len())
        .filter(|&i| alive[i])
        .filter(|&i| {
            let products = rules[i].products().counts();
            (0..rules.len())
                .filter(|&j| alive[j] && j != i)
                .all(|j| {
                    products
                        .iter()
                        .zip(rules[j].reactants().counts())
                        .all(|(p, r)| p.is_zero() || r.is_zero())
                })
        })
        .collect()
}

enum PruneRun {
    Done {
        verdict: Verdict,
        /// `(rule index, applications)` in prune order; replaying the
        /// reverse lands on the target.
        sequence: Vec<(usize, Count)>,
        /// A void or autogenesis rule was pruned along the way, so an
        /// unreachable verdict cannot be trusted.
        flagged: bool,
    },
    /// No live leaf could be pruned.
    Stuck,
}

fn prune_loop(
    crn: &Crn,
    initial: &Configuration,
    target: &Configuration,
    allow_void: bool,
) -> PruneRun {
    let rules = crn.rules();
    let mut alive = vec![true; rules.len()];
    let mut remaining = rules.len();
    let mut current = target.clone();
    let mut sequence = Vec::with_capacity(rules.len());
    let mut flagged = false;
    while remaining > 0 {
        let leaves = occurrence_leaves(crn, &alive);
        let (void_leaves, plain_leaves): (Vec<usize>, Vec<usize>) = leaves
            .iter()
            .partition(|&&i| rule_traits(&rules[i]).is_void);
        let mut pruned = None;
        if let Some(&i) = plain_leaves.first() {
            match prune_step(&current, initial, &rules[i]) {
                Ok(result) => pruned = Some((i, result)),
                Err(_) => {
                    // The application count of a non-void leaf is forced;
                    // failure means the target is unreachable.
                    return PruneRun::Done {
                        verdict: Verdict::Unreachable,
                        sequence,
                        flagged,
                    };
                }
            }
        } else if allow_void {
            for &i in &void_leaves {
                if let Ok(result) = prune_step_void(&current, initial, &rules[i]) {
                    flagged = true;
                    pruned = Some((i, result));
                    break;
                }
            }
        }
        match pruned {
            Some((i, result)) => {
                if rule_traits(&rules[i]).is_autogenesis {
                    flagged = true;
                }
                alive[i] = false;
                remaining -= 1;
                sequence.push((i, result.applications));
                current = result.pruned_target;
            }
            None => return PruneRun::Stuck,
        }
    }
    PruneRun::Done {
        verdict: if current == *initial {
            Verdict::Reachable
        } else {
            Verdict::Unreachable
        },
        sequence,
        flagged,
    }
}

/// Builds the decision for a finished prune run. `replay_in_prune_order`
/// distinguishes the reversed solver (whose replay runs forward through the
/// original rules in prune order) from the direct ones.
fn decision_from_run(
    crn: &Crn,
    method: Method,
    verdict: Verdict,
    sequence: &[(usize, Count)],
    replay_in_prune_order: bool,
) -> Decision {
    let mut decision = Decision::new(verdict, method);
    if verdict == Verdict::Reachable {
        let mut blocks: Vec<(usize, Count)> = sequence
            .iter()
            .map(|(i, x)| (crn.rules()[*i].id(), x.clone()))
            .collect();
        if !replay_in_prune_order {
            blocks.reverse();
        }
        decision.certificate = Some(OrderedCertificate::from_blocks(blocks));
        decision.witness_applications = Some(
            sequence
                .iter()
                .map(|(i, x)| (crn.rules()[*i].id(), x.clone()))
                .collect(),
        );
    }
    decision
}

pub(crate) fn decide_ff_1source_no_void_unchecked(instance: &Instance) -> Decision {
    match prune_loop(&instance.crn, &instance.initial, &instance.target, false) {
        PruneRun::Done {
            verdict, sequence, ..
        } => decision_from_run(&instance.crn, Method::FfSsNv, verdict, &sequence, false),
        PruneRun::Stuck => {
            let mut d = Decision::new(Verdict::Unknown, Method::FfSsNv);
            d.notes
                .push("pruning got stuck outside its preconditions".into());
            d
        }
    }
}

/// Reachability for feed-forward, single-source rule sets without void
/// rules, by pruning one leaf rule at a time.
pub fn decide_ff_1source_no_void(instance: &Instance) -> Result<Decision, SolveError> {
    precondition(
        instance.problem == Problem::Reach,
        Method::FfSsNv,
        "a reachability instance",
    )?;
    let profile = profile_of(instance);
    precondition(
        profile.is_feed_forward(),
        Method::FfSsNv,
        "a feed-forward rule set",
    )?;
    precondition(profile.max_source <= 1, Method::FfSsNv, "a single-source rule set")?;
    precondition(!profile.has_void, Method::FfSsNv, "a rule set without void rules")?;
    Ok(decide_ff_1source_no_void_unchecked(instance))
}

pub(crate) fn decide_ff_1consuming_no_autogenesis_unchecked(instance: &Instance) -> Decision {
    let reversed = instance.reversed();
    match prune_loop(&reversed.crn, &reversed.initial, &reversed.target, false) {
        PruneRun::Done {
            verdict, sequence, ..
        } => {
            // Undoing the reversed replay step by step runs the original
            // rules forward, so the blocks stay in prune order.
            decision_from_run(&instance.crn, Method::FfScNa, verdict, &sequence, true)
        }
        PruneRun::Stuck => {
            let mut d = Decision::new(Verdict::Unknown, Method::FfScNa);
            d.notes
                .push("pruning got stuck outside its preconditions".into());
            d
        }
    }
}

/// Reachability for feed-forward, single-consuming rule sets without
/// autogenesis rules: reverse every rule, swap the endpoint configurations,
/// and prune.
pub fn decide_ff_1consuming_no_autogenesis(instance: &Instance) -> Result<Decision, SolveError> {
    precondition(
        instance.problem == Problem::Reach,
        Method::FfScNa,
        "a reachability instance",
    )?;
    let profile = profile_of(instance);
    precondition(
        profile.is_feed_forward(),
        Method::FfScNa,
        "a feed-forward rule set",
    )?;
    precondition(
        profile.max_consuming <= 1,
        Method::FfScNa,
        "a single-consuming rule set",
    )?;
    precondition(
        !profile.has_autogenesis,
        Method::FfScNa,
        "a rule set without autogenesis rules",
    )?;
    Ok(decide_ff_1consuming_no_autogenesis_unchecked(instance))
}

pub(crate) fn decide_ff_1source_1consuming_unchecked(
    instance: &Instance,
    limits: &SearchLimits,
) -> Decision {
    let run = prune_loop(&instance.crn, &instance.initial, &instance.target, true);
    match run {
        PruneRun::Done {
            verdict, sequence, flagged,
        } => {
            if verdict == Verdict::Reachable || !flagged {
                // Reachable prunes carry their own replay; unreachable ones
                // are exact when only forced prunes happened.
                return decision_from_run(&instance.crn, Method::FfSsSc, verdict, &sequence, false);
            }
            // A void or autogenesis prune guessed an application count; the
            // unreachable answer needs the oracle behind it.
            let oracle = decide_reach_oracle(instance, limits);
            let mut d = Decision::from_oracle(&oracle, Method::Fallback);
            if oracle.verdict != Verdict::Unknown && oracle.verdict != verdict {
                d.notes.push(format!(
                    "divergence: pruning with void rules answered {verdict}, oracle shows {}",
                    oracle.verdict
                ));
            }
            d
        }
        PruneRun::Stuck => {
            let oracle = decide_reach_oracle(instance, limits);
            let mut d = Decision::from_oracle(&oracle, Method::Fallback);
            d.notes.push("no leaf rule was prunable; oracle fallback used".into());
            d
        }
    }
}

/// Reachability for feed-forward rule sets that are both single-source and
/// single-consuming, with void and autogenesis rules permitted. Untrusted
/// unreachable answers fall back to the bounded oracle and report method
/// `fallback`.
pub fn decide_ff_1source_1consuming(
    instance: &Instance,
    limits: &SearchLimits,
) -> Result<Decision, SolveError> {
    precondition(
        instance.problem == Problem::Reach,
        Method::FfSsSc,
        "a reachability instance",
    )?;
    let profile = profile_of(instance);
    precondition(
        profile.is_feed_forward(),
        Method::FfSsSc,
        "a feed-forward rule set",
    )?;
    precondition(profile.max_source <= 1, Method::FfSsSc, "a single-source rule set")?;
    precondition(
        profile.max_consuming <= 1,
        Method::FfSsSc,
        "a single-consuming rule set",
    )?;
    Ok(decide_ff_1source_1consuming_unchecked(instance, limits))
}
