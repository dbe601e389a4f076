//! Reachability and production when every rule moves a single copy:
//! species form a digraph with one edge per rule, and copies travel along
//! directed paths independently. Reachability becomes a supply/demand
//! routing question over the reachability closure, which handles
//! binary-encoded counts without tracking individual copies.

use num_traits::Zero;

use super::{precondition, Decision, Method, SolveError};
use crate::flow::FlowNetwork;
use crate::model::{Count, Crn, Instance, Problem};
use crate::Verdict;

fn unimolecular_edges(crn: &Crn) -> Result<Vec<(usize, usize)>, SolveError> {
    let one = Count::from(1u8);
    crn.rules()
        .iter()
        .map(|rule| {
            if rule.reactants().volume() != one || rule.products().volume() != one {
                return Err(SolveError::NotUnimolecular(rule.id()));
            }
            let from = rule
                .reactants()
                .support()
                .next()
                .expect("volume-one vector has support");
            let to = rule
                .products()
                .support()
                .next()
                .expect("volume-one vector has support");
            Ok((from.0, to.0))
        })
        .collect()
}

/// `closure[s]` lists the species reachable from `s` along rule edges,
/// including `s` itself.
fn reachability_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        adjacency[a].push(b);
    }
    (0..n)
        .map(|start| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Reachability for all-(1,1) rule sets: the target is reachable iff the
/// initial copies can be routed to the demanded species along directed
/// paths, decided by a feasibility flow from supplies to demands.
pub fn decide_unimolecular(instance: &Instance) -> Result<Decision, SolveError> {
    precondition(
        instance.problem == Problem::Reach,
        Method::Uni,
        "a reachability instance",
    )?;
    let edges = unimolecular_edges(&instance.crn)?;
    let volume = instance.initial.volume();
    if volume != instance.target.volume() {
        return Ok(Decision::new(Verdict::Unreachable, Method::Uni));
    }
    if volume.is_zero() {
        return Ok(Decision::new(Verdict::Reachable, Method::Uni));
    }
    let n = instance.crn.species_count();
    let closure = reachability_closure(n, &edges);

    // Supply node per species, demand node per species.
    let source = 2 * n;
    let sink = 2 * n + 1;
    let mut net = FlowNetwork::new(2 * n + 2);
    for (s, k) in instance.initial.iter() {
        if !k.is_zero() {
            net.add_edge(source, s.0, k.clone());
        }
    }
    for (t, k) in instance.target.iter() {
        if !k.is_zero() {
            net.add_edge(n + t.0, sink, k.clone());
        }
    }
    for s in 0..n {
        if instance.initial.counts()[s].is_zero() {
            continue;
        }
        for t in 0..n {
            if closure[s][t] && !instance.target.counts()[t].is_zero() {
                net.add_edge(s, n + t, volume.clone());
            }
        }
    }
    let verdict = if net.max_flow(source, sink) == volume {
        Verdict::Reachable
    } else {
        Verdict::Unreachable
    };
    Ok(Decision::new(verdict, Method::Uni))
}

/// Production for all-(1,1) rule sets: at least `threshold` copies of the
/// species can pile up iff that many initial copies sit on species with a
/// directed path to it.
pub fn produce_unimolecular(instance: &Instance) -> Result<Decision, SolveError> {
    let Problem::Production { species, threshold } = &instance.problem else {
        return Err(SolveError::WrongProblem {
            expected: "production",
        });
    };
    let edges = unimolecular_edges(&instance.crn)?;
    let n = instance.crn.species_count();
    let closure = reachability_closure(n, &edges);
    let available: Count = instance
        .initial
        .iter()
        .filter(|(s, _)| closure[s.0][species.0])
        .map(|(_, k)| k)
        .sum();
    let verdict = if available >= *threshold {
        Verdict::Reachable
    } else {
        Verdict::Unreachable
    };
    Ok(Decision::new(verdict, Method::UniProduce))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Configuration, CrnBuilder, Species};

    fn big(n: u64) -> Count {
        Count::from(n)
    }

    fn digraph_crn(edges: &[(&str, &str)]) -> Crn {
        let mut b = CrnBuilder::new();
        for (a, v) in edges {
            b.rule_by_names(&[(a, 1)], &[(v, 1)]);
        }
        b.finish().unwrap()
    }

    fn cfg(crn: &Crn, pairs: &[(&str, u64)]) -> Configuration {
        let mut c = Configuration::zero(crn.species_count());
        for (n, k) in pairs {
            c.set(crn.species_by_name(n).unwrap(), big(*k));
        }
        c
    }

    #[test]
    fn single_edge_moves_single_copy() {
        let crn = digraph_crn(&[("s", "t")]);
        let i = Instance::reach(crn.clone(), cfg(&crn, &[("s", 1)]), cfg(&crn, &[("t", 1)])).unwrap();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Reachable);
    }

    #[test]
    fn untouched_species_pass_through() {
        let crn = digraph_crn(&[("a", "b")]);
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1)], &[("b", 1)]);
        b.species("c");
        let crn2 = b.finish().unwrap();
        let _ = crn;
        let i = Instance::reach(
            crn2.clone(),
            cfg(&crn2, &[("a", 1), ("c", 1)]),
            cfg(&crn2, &[("b", 1), ("c", 1)]),
        )
        .unwrap();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Reachable);
    }

    #[test]
    fn edges_are_directed() {
        let crn = digraph_crn(&[("a", "b")]);
        let i = Instance::reach(crn.clone(), cfg(&crn, &[("b", 1)]), cfg(&crn, &[("a", 1)])).unwrap();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Unreachable);
    }

    #[test]
    fn volume_mismatch_is_unreachable() {
        let crn = digraph_crn(&[("a", "b")]);
        let i = Instance::reach(crn.clone(), cfg(&crn, &[("a", 2)]), cfg(&crn, &[("b", 1)])).unwrap();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Unreachable);
    }

    #[test]
    fn routing_respects_disjoint_demands() {
        // Two tokens on a, demands on b and c, both reachable: feasible.
        let crn = digraph_crn(&[("a", "b"), ("a", "c")]);
        let i = Instance::reach(
            crn.clone(),
            cfg(&crn, &[("a", 2)]),
            cfg(&crn, &[("b", 1), ("c", 1)]),
        )
        .unwrap();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Reachable);

        // One token cannot satisfy two demands.
        let i = Instance::reach(
            crn.clone(),
            cfg(&crn, &[("a", 1), ("b", 1)]),
            cfg(&crn, &[("c", 2)]),
        )
        .unwrap();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Unreachable);
    }

    #[test]
    fn binary_counts_route_without_expansion() {
        let crn = digraph_crn(&[("a", "b"), ("b", "c")]);
        let huge: Count = Count::from(1u8) << 40;
        let mut init = Configuration::zero(crn.species_count());
        init.set(crn.species_by_name("a").unwrap(), huge.clone());
        let mut target = Configuration::zero(crn.species_count());
        target.set(crn.species_by_name("c").unwrap(), huge);
        let i = Instance::reach(crn, init, target).unwrap();
        let start = std::time::Instant::now();
        assert_eq!(decide_unimolecular(&i).unwrap().verdict, Verdict::Reachable);
        assert!(start.elapsed().as_millis() < 100);
    }

    #[test]
    fn production_sums_upstream_supply() {
        let crn = digraph_crn(&[("a", "b"), ("b", "c")]);
        let i = Instance::production(
            crn.clone(),
            cfg(&crn, &[("a", 2)]),
            crn.species_by_name("c").unwrap(),
            big(2),
        )
        .unwrap();
        assert_eq!(produce_unimolecular(&i).unwrap().verdict, Verdict::Reachable);

        let i = Instance::production(
            crn.clone(),
            cfg(&crn, &[("b", 1)]),
            crn.species_by_name("a").unwrap(),
            big(1),
        )
        .unwrap();
        assert_eq!(produce_unimolecular(&i).unwrap().verdict, Verdict::Unreachable);
    }

    #[test]
    fn production_counts_existing_copies() {
        let crn = digraph_crn(&[("a", "b")]);
        let i = Instance::production(
            crn.clone(),
            cfg(&crn, &[("b", 1)]),
            crn.species_by_name("b").unwrap(),
            big(1),
        )
        .unwrap();
        assert_eq!(produce_unimolecular(&i).unwrap().verdict, Verdict::Reachable);
    }

    #[test]
    fn non_unimolecular_rules_are_rejected() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1), ("b", 1)], &[("c", 1), ("d", 1)]);
        let crn = b.finish().unwrap();
        let i = Instance::reach(
            crn.clone(),
            Configuration::zero(4),
            Configuration::zero(4),
        )
        .unwrap();
        assert_eq!(
            decide_unimolecular(&i).unwrap_err(),
            SolveError::NotUnimolecular(0)
        );
        let _ = Species(0);
    }
}
