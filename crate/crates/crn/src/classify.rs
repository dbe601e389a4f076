//! Restriction predicates of a network: feed-forward orderings, source and
//! consuming degrees, void/autogenesis/catalyst flags, rule-size bounds,
//! volume monotonicity, and the two-partition of all-(2,0) systems. The
//! dispatcher selects a decision procedure from this profile.

use num_traits::Zero;
use thiserror::Error;

use crate::model::{rule_traits, Count, Crn, Rule, Species};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("rule {0} is not a size-(2,0) void rule")]
    NotVoid2System(usize),
}

/// Overall volume behaviour of a rule set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    /// Every rule strictly increases volume.
    Increasing,
    /// Every rule strictly decreases volume.
    Decreasing,
    /// Every rule preserves volume (also holds for the empty rule set).
    Preserving,
    /// Rule deltas disagree in sign, or zero deltas mix with non-zero ones.
    Mixed,
}

/// Everything the dispatcher needs to know about one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationProfile {
    /// A rule ordering witnessing the feed-forward property, if one exists.
    pub feed_forward_order: Option<Vec<usize>>,
    /// Maximum, over species, of the number of rules net-producing it.
    pub max_source: usize,
    /// Maximum, over species, of the number of rules net-consuming it.
    pub max_consuming: usize,
    pub has_void: bool,
    pub has_autogenesis: bool,
    pub has_catalyst: bool,
    /// Entrywise maxima of the rule sizes `(i, j)`.
    pub rule_size_bound: (Count, Count),
    pub monotonicity: Monotonicity,
    /// All rules are size (2,2).
    pub is_population_protocol: bool,
    /// Two-partition of the species, present only when every rule is a
    /// size-(2,0) void rule and the reactant-pair graph is two-colorable.
    pub bipartition: Option<(Vec<Species>, Vec<Species>)>,
}

impl ClassificationProfile {
    pub fn is_feed_forward(&self) -> bool {
        self.feed_forward_order.is_some()
    }
}

/// Computes the full profile of a network.
pub fn profile(crn: &Crn) -> ClassificationProfile {
    let traits: Vec<_> = crn.rules().iter().map(rule_traits).collect();
    let degrees = source_consuming_degrees(crn);
    let all_void2 = !crn.rules().is_empty()
        && traits
            .iter()
            .map(|t| &t.size)
            .all(|(i, j)| *i == Count::from(2u8) && j.is_zero());
    let mut size_bound = (Count::zero(), Count::zero());
    for t in &traits {
        size_bound.0 = size_bound.0.clone().max(t.size.0.clone());
        size_bound.1 = size_bound.1.clone().max(t.size.1.clone());
    }
    ClassificationProfile {
        feed_forward_order: feed_forward_order(crn),
        max_source: degrees.max_source,
        max_consuming: degrees.max_consuming,
        has_void: traits.iter().any(|t| t.is_void),
        has_autogenesis: traits.iter().any(|t| t.is_autogenesis),
        has_catalyst: traits.iter().any(|t| !t.catalysts.is_empty()),
        rule_size_bound: size_bound,
        monotonicity: monotonicity(crn),
        is_population_protocol: !crn.rules().is_empty()
            && traits
                .iter()
                .all(|t| t.size == (Count::from(2u8), Count::from(2u8))),
        bipartition: if all_void2 {
            bipartite_partition(crn).expect("all rules checked to be (2,0)")
        } else {
            None
        },
    }
}

/// Dependency edge: some species occurring in `from`'s products (including
/// catalysts) also occurs in `to`'s reactants. Self-loops are ignored; a
/// rule may feed itself.
fn occurrence_edge(from: &Rule, to: &Rule) -> bool {
    from.products()
        .counts()
        .iter()
        .zip(to.reactants().counts())
        .any(|(p, r)| !p.is_zero() && !r.is_zero())
}

/// Returns a rule ordering in which no rule's products occur as reactants
/// of an earlier rule, or `None` when the dependency graph is cyclic.
/// Among the valid orderings the lexicographically smallest by rule id is
/// produced.
pub fn feed_forward_order(crn: &Crn) -> Option<Vec<usize>> {
    let rules = crn.rules();
    let n = rules.len();
    let mut indegree = vec![0usize; n];
    let mut edges = vec![Vec::new(); n];
    for (i, a) in rules.iter().enumerate() {
        for (j, b) in rules.iter().enumerate() {
            if i != j && occurrence_edge(a, b) {
                edges[i].push(j);
                indegree[j] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    for _ in 0..n {
        let next = (0..n).find(|&i| !done[i] && indegree[i] == 0)?;
        done[next] = true;
        order.push(rules[next].id());
        for &j in &edges[next] {
            indegree[j] -= 1;
        }
    }
    Some(order)
}

/// Verbatim check that `order` is a feed-forward ordering: the products of
/// any rule never occur as reactants of an earlier rule.
pub fn is_feed_forward_order(crn: &Crn, order: &[usize]) -> bool {
    if order.len() != crn.rules().len() {
        return false;
    }
    let rule_of = |id: usize| crn.rule(id).expect("rule id");
    for (pos, &later) in order.iter().enumerate() {
        for &earlier in &order[..pos] {
            if occurrence_edge(rule_of(later), rule_of(earlier)) {
                return false;
            }
        }
    }
    // Every rule exactly once.
    let mut seen = vec![false; crn.rules().len()];
    for &id in order {
        if crn.rule(id).is_none() || seen[id] {
            return false;
        }
        seen[id] = true;
    }
    true
}

/// Per-species production/consumption rule counts plus the system maxima.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degrees {
    /// For each species: (rules net-producing it, rules net-consuming it).
    /// Catalyst occurrences count toward neither.
    pub per_species: Vec<(usize, usize)>,
    pub max_source: usize,
    pub max_consuming: usize,
}

pub fn source_consuming_degrees(crn: &Crn) -> Degrees {
    let mut per_species = vec![(0usize, 0usize); crn.species_count()];
    for rule in crn.rules() {
        for (i, (p, r)) in rule
            .products()
            .counts()
            .iter()
            .zip(rule.reactants().counts())
            .enumerate()
        {
            if p > r {
                per_species[i].0 += 1;
            } else if p < r {
                per_species[i].1 += 1;
            }
        }
    }
    Degrees {
        max_source: per_species.iter().map(|d| d.0).max().unwrap_or(0),
        max_consuming: per_species.iter().map(|d| d.1).max().unwrap_or(0),
        per_species,
    }
}

pub fn monotonicity(crn: &Crn) -> Monotonicity {
    let mut pos = false;
    let mut neg = false;
    let mut zero = false;
    for rule in crn.rules() {
        let delta = rule_traits(rule).volume_delta;
        if delta.is_zero() {
            zero = true;
        } else if delta > num_bigint::BigInt::zero() {
            pos = true;
        } else {
            neg = true;
        }
    }
    match (pos, neg, zero) {
        (false, false, _) => Monotonicity::Preserving,
        (true, false, false) => Monotonicity::Increasing,
        (false, true, false) => Monotonicity::Decreasing,
        _ => Monotonicity::Mixed,
    }
}

/// Two-colors the species graph whose edges are the reactant pairs of each
/// size-(2,0) rule. A rule consuming two copies of one species is a
/// self-loop and forces `None`. Species untouched by any rule land in the
/// first partition.
pub fn bipartite_partition(
    crn: &Crn,
) -> Result<Option<(Vec<Species>, Vec<Species>)>, ClassifyError> {
    let n = crn.species_count();
    let mut adjacent = vec![Vec::new(); n];
    for rule in crn.rules() {
        let t = rule_traits(rule);
        if t.size.0 != Count::from(2u8) || !t.size.1.is_zero() {
            return Err(ClassifyError::NotVoid2System(rule.id()));
        }
        let support: Vec<usize> = rule
            .reactants()
            .counts()
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(i, _)| i)
            .collect();
        match support.as_slice() {
            [single] => {
                // 2a -> 0 is a self-loop; no two-coloring exists.
                let _ = single;
                return Ok(None);
            }
            [a, b] => {
                adjacent[*a].push(*b);
                adjacent[*b].push(*a);
            }
            _ => unreachable!("size-(2,0) rule has one or two reactant species"),
        }
    }
    let mut color = vec![None; n];
    for start in 0..n {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = color[u].unwrap();
            for &v in &adjacent[u] {
                match color[v] {
                    None => {
                        color[v] = Some(!cu);
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => return Ok(None),
                    Some(_) => {}
                }
            }
        }
    }
    let part1 = (0..n).filter(|&i| color[i] == Some(false)).map(Species).collect();
    let part2 = (0..n).filter(|&i| color[i] == Some(true)).map(Species).collect();
    Ok(Some((part1, part2)))
}

/// Rules none of whose net-produced species occur as reactants of any other
/// rule. A rule producing nothing on net (in particular every void rule) is
/// vacuously a leaf.
pub fn leaf_rules(crn: &Crn) -> Vec<usize> {
    let rules = crn.rules();
    rules
        .iter()
        .filter(|rule| {
            let t = rule_traits(rule);
            t.produced.iter().all(|s| {
                rules
                    .iter()
                    .filter(|other| other.id() != rule.id())
                    .all(|other| other.reactants().get(*s).is_zero())
            })
        })
        .map(|r| r.id())
        .collect()
}
