//! Reachability for systems whose rules all consume exactly two copies and
//! produce nothing. The surplus `I - D` must be used up in pairs, one rule
//! application per pair, and any application order works, so the question
//! is a matching problem: perfect matching on the copy-expanded graph in
//! general, or a saturating flow when the species split into two sides.

use num_traits::Zero;
use petgraph::algo::matching::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};

use super::{is_void2_rule, precondition, Decision, Method, SolveError};
use crate::classify;
use crate::flow::FlowNetwork;
use crate::model::{Configuration, Count, Instance, Problem};
use crate::search::OrderedCertificate;
use crate::Verdict;

/// Default bound on the number of expanded vertices the matching procedure
/// will create. The expansion is linear in the surplus volume, which is
/// exponential in the size of a binary-encoded input.
pub const DEFAULT_UNARY_CAP: usize = 5000;

fn check_void2(instance: &Instance, method: Method) -> Result<(), SolveError> {
    precondition(
        instance.problem == Problem::Reach,
        method,
        "a reachability instance",
    )?;
    precondition(
        !instance.crn.rules().is_empty(),
        method,
        "a non-empty rule set",
    )?;
    for rule in instance.crn.rules() {
        if !is_void2_rule(rule) {
            return Err(SolveError::NotVoid2System(rule.id()));
        }
    }
    Ok(())
}

/// The surplus to consume, or an immediately unreachable verdict: rules
/// only consume, so the target must sit entrywise below the start.
fn surplus(instance: &Instance) -> Result<Configuration, Decision> {
    instance
        .initial
        .checked_sub(&instance.target)
        .ok_or_else(|| Decision::new(Verdict::Unreachable, Method::Void2Uni))
}

fn witness_decision(method: Method, applications: Vec<(usize, Count)>) -> Decision {
    let mut counts = std::collections::BTreeMap::new();
    for (id, k) in applications {
        if !k.is_zero() {
            *counts.entry(id).or_insert_with(Count::zero) += k;
        }
    }
    let mut d = Decision::new(Verdict::Reachable, method);
    d.certificate = Some(OrderedCertificate::from_blocks(
        counts.iter().map(|(id, k)| (*id, k.clone())).collect(),
    ));
    d.witness_applications = Some(counts);
    d
}

/// Decides reachability by maximum matching on the expanded graph: one
/// vertex per surplus copy, and for every rule a complete bundle of edges
/// between (or within) the groups of its two reactants. Reachable iff a
/// perfect matching exists. Fails with [`SolveError::VolumeCapExceeded`]
/// when the expansion would exceed `unary_cap` vertices.
pub fn decide_void2_matching(instance: &Instance, unary_cap: usize) -> Result<Decision, SolveError> {
    check_void2(instance, Method::Void2Uni)?;
    let surplus = match surplus(instance) {
        Ok(s) => s,
        Err(decision) => return Ok(decision),
    };
    let total = surplus.volume();
    if total > Count::from(unary_cap) {
        return Err(SolveError::VolumeCapExceeded {
            required: total,
            cap: unary_cap,
        });
    }
    if total.bit(0) {
        // Odd surplus: pairs can never cover it.
        return Ok(Decision::new(Verdict::Unreachable, Method::Void2Uni));
    }

    let mut graph: UnGraph<(), usize> = UnGraph::new_undirected();
    let mut groups: Vec<Vec<NodeIndex>> = Vec::with_capacity(surplus.len());
    for (_, count) in surplus.iter() {
        let copies = usize::try_from(count).expect("below the unary cap");
        groups.push((0..copies).map(|_| graph.add_node(())).collect());
    }
    for rule in instance.crn.rules() {
        let pair: Vec<usize> = rule
            .reactants()
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(i, _)| i)
            .collect();
        match pair.as_slice() {
            [a, b] => {
                for &u in &groups[*a] {
                    for &v in &groups[*b] {
                        graph.add_edge(u, v, rule.id());
                    }
                }
            }
            [a] => {
                // Two copies of one species: edges inside the group.
                let g = &groups[*a];
                for i in 0..g.len() {
                    for j in i + 1..g.len() {
                        graph.add_edge(g[i], g[j], rule.id());
                    }
                }
            }
            _ => unreachable!("size-(2,0) rules touch one or two species"),
        }
    }
    let matching = maximum_matching(&graph);
    if !matching.is_perfect() {
        return Ok(Decision::new(Verdict::Unreachable, Method::Void2Uni));
    }
    let mut per_edge = Vec::new();
    for (u, v) in matching.edges() {
        let edge = graph.find_edge(u, v).expect("matched edge");
        per_edge.push((graph[edge], Count::from(1u8)));
    }
    Ok(witness_decision(Method::Void2Uni, per_edge))
}

/// Decides reachability for bipartite systems by a saturating flow: source
/// edges carry each left species' surplus, sink edges each right species'
/// surplus, and every rule contributes an unbounded middle edge. Reachable
/// iff both cut sides saturate, which never expands the counts in unary.
pub fn decide_void2_bipartite_flow(instance: &Instance) -> Result<Decision, SolveError> {
    check_void2(instance, Method::Void2Bi)?;
    let partition = classify::bipartite_partition(&instance.crn)
        .map_err(|e| match e {
            classify::ClassifyError::NotVoid2System(id) => SolveError::NotVoid2System(id),
        })?
        .ok_or(SolveError::NotBipartite)?;
    let surplus = match surplus(instance) {
        Ok(s) => s,
        Err(mut decision) => {
            decision.method = Method::Void2Bi;
            return Ok(decision);
        }
    };
    let (left, right) = partition;
    let mut side = vec![false; instance.crn.species_count()];
    for s in &right {
        side[s.0] = true;
    }
    let left_total: Count = left.iter().map(|s| surplus.get(*s)).sum();
    let right_total: Count = right.iter().map(|s| surplus.get(*s)).sum();
    if left_total != right_total {
        // Every application consumes one copy from each side.
        return Ok(Decision::new(Verdict::Unreachable, Method::Void2Bi));
    }
    let n = instance.crn.species_count();
    let source = n;
    let sink = n + 1;
    let mut net = FlowNetwork::new(n + 2);
    for s in &left {
        if !surplus.get(*s).is_zero() {
            net.add_edge(source, s.0, surplus.get(*s).clone());
        }
    }
    for s in &right {
        if !surplus.get(*s).is_zero() {
            net.add_edge(s.0, sink, surplus.get(*s).clone());
        }
    }
    let mut rule_edges = Vec::new();
    for rule in instance.crn.rules() {
        let pair: Vec<usize> = rule
            .reactants()
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(i, _)| i)
            .collect();
        let [a, b] = pair.as_slice() else {
            unreachable!("bipartite rules touch two distinct species");
        };
        let (from, to) = if side[*a] { (*b, *a) } else { (*a, *b) };
        // Any finite bound at or above one side's total behaves as infinity.
        rule_edges.push((rule.id(), net.add_edge(from, to, left_total.clone())));
    }
    let flow = net.max_flow(source, sink);
    if flow != left_total {
        return Ok(Decision::new(Verdict::Unreachable, Method::Void2Bi));
    }
    let applications = rule_edges
        .into_iter()
        .map(|(id, e)| (id, net.flow(e).clone()))
        .collect();
    Ok(witness_decision(Method::Void2Bi, applications))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Configuration, Crn, CrnBuilder};
    use crate::search::verify_certificate;

    fn big(n: u64) -> Count {
        Count::from(n)
    }

    fn void2_crn(pairs: &[(&str, &str)]) -> Crn {
        let mut b = CrnBuilder::new();
        for (x, y) in pairs {
            if x == y {
                b.rule_by_names(&[(x, 2)], &[]);
            } else {
                b.rule_by_names(&[(x, 1), (y, 1)], &[]);
            }
        }
        b.finish().unwrap()
    }

    fn inst(crn: &Crn, init: &[(&str, u64)], target: &[(&str, u64)]) -> Instance {
        let mut i = Configuration::zero(crn.species_count());
        for (n, k) in init {
            i.set(crn.species_by_name(n).unwrap(), big(*k));
        }
        let mut t = Configuration::zero(crn.species_count());
        for (n, k) in target {
            t.set(crn.species_by_name(n).unwrap(), big(*k));
        }
        Instance::reach(crn.clone(), i, t).unwrap()
    }

    #[test]
    fn triangle_with_single_copies_is_odd() {
        let crn = void2_crn(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let i = inst(&crn, &[("a", 1), ("b", 1), ("c", 1)], &[]);
        let d = decide_void2_matching(&i, DEFAULT_UNARY_CAP).unwrap();
        assert_eq!(d.verdict, Verdict::Unreachable);
    }

    #[test]
    fn triangle_with_two_copies_each_matches() {
        let crn = void2_crn(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let i = inst(&crn, &[("a", 2), ("b", 2), ("c", 2)], &[]);
        let d = decide_void2_matching(&i, DEFAULT_UNARY_CAP).unwrap();
        assert_eq!(d.verdict, Verdict::Reachable);
        assert!(verify_certificate(&i, &d.certificate.unwrap()));
    }

    #[test]
    fn pair_rule_consumes_equal_counts() {
        let crn = void2_crn(&[("a", "b")]);
        let d = decide_void2_matching(&inst(&crn, &[("a", 3), ("b", 3)], &[]), DEFAULT_UNARY_CAP)
            .unwrap();
        assert_eq!(d.verdict, Verdict::Reachable);
    }

    #[test]
    fn target_above_initial_is_unreachable() {
        let crn = void2_crn(&[("a", "b")]);
        let d = decide_void2_matching(&inst(&crn, &[("a", 1)], &[("b", 1)]), DEFAULT_UNARY_CAP)
            .unwrap();
        assert_eq!(d.verdict, Verdict::Unreachable);
    }

    #[test]
    fn self_pair_rule_matches_within_group() {
        let crn = void2_crn(&[("a", "a")]);
        let d = decide_void2_matching(&inst(&crn, &[("a", 4)], &[]), DEFAULT_UNARY_CAP).unwrap();
        assert_eq!(d.verdict, Verdict::Reachable);
        let d = decide_void2_matching(&inst(&crn, &[("a", 3)], &[("a", 0)]), DEFAULT_UNARY_CAP)
            .unwrap();
        assert_eq!(d.verdict, Verdict::Unreachable);
    }

    #[test]
    fn cap_is_reported() {
        let crn = void2_crn(&[("a", "b")]);
        let err = decide_void2_matching(&inst(&crn, &[("a", 60), ("b", 60)], &[]), 100).unwrap_err();
        assert!(matches!(err, SolveError::VolumeCapExceeded { .. }));
    }

    #[test]
    fn flow_agrees_on_small_bipartite_cases() {
        let crn = void2_crn(&[("a", "b"), ("b", "c")]);
        for (init, target) in [
            (vec![("a", 2u64), ("b", 2), ("c", 0)], vec![]),
            (vec![("a", 1), ("b", 2), ("c", 1)], vec![]),
            (vec![("a", 2), ("b", 1), ("c", 1)], vec![]),
            (vec![("a", 3), ("b", 3), ("c", 0)], vec![("a", 1), ("b", 1)]),
        ] {
            let i = inst(&crn, &init, &target);
            let m = decide_void2_matching(&i, DEFAULT_UNARY_CAP).unwrap();
            let f = decide_void2_bipartite_flow(&i).unwrap();
            assert_eq!(m.verdict, f.verdict, "init {init:?}");
            if f.verdict == Verdict::Reachable {
                assert!(verify_certificate(&i, &f.certificate.unwrap()));
            }
        }
    }

    #[test]
    fn flow_handles_binary_scale_counts() {
        let crn = void2_crn(&[("a", "b")]);
        let mut i = Configuration::zero(2);
        i.set(crn.species_by_name("a").unwrap(), Count::from(1u8) << 40);
        i.set(crn.species_by_name("b").unwrap(), Count::from(1u8) << 40);
        let instance = Instance::reach(crn, i, Configuration::zero(2)).unwrap();
        let start = std::time::Instant::now();
        let d = decide_void2_bipartite_flow(&instance).unwrap();
        assert!(start.elapsed().as_millis() < 100);
        assert_eq!(d.verdict, Verdict::Reachable);
        assert!(verify_certificate(&instance, &d.certificate.unwrap()));
    }

    #[test]
    fn flow_rejects_unbalanced_sides() {
        let crn = void2_crn(&[("a", "b")]);
        let d = decide_void2_bipartite_flow(&inst(&crn, &[("a", 2), ("b", 1)], &[])).unwrap();
        assert_eq!(d.verdict, Verdict::Unreachable);
    }

    #[test]
    fn flow_identity_instance_reachable_with_zero_flow() {
        let crn = void2_crn(&[("a", "b")]);
        let d = decide_void2_bipartite_flow(&inst(&crn, &[("a", 5)], &[("a", 5)])).unwrap();
        assert_eq!(d.verdict, Verdict::Reachable);
    }

    #[test]
    fn flow_refuses_odd_cycles() {
        let crn = void2_crn(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let err = decide_void2_bipartite_flow(&inst(&crn, &[("a", 2)], &[])).unwrap_err();
        assert_eq!(err, SolveError::NotBipartite);
    }

    #[test]
    fn isolated_surplus_is_unreachable() {
        // d has surplus but no rule consumes it.
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1), ("b", 1)], &[]);
        b.species("d");
        let crn = b.finish().unwrap();
        let i = inst(&crn, &[("a", 1), ("b", 1), ("d", 2)], &[]);
        assert_eq!(
            decide_void2_matching(&i, DEFAULT_UNARY_CAP).unwrap().verdict,
            Verdict::Unreachable
        );
        assert_eq!(
            decide_void2_bipartite_flow(&i).unwrap().verdict,
            Verdict::Unreachable
        );
    }
}
