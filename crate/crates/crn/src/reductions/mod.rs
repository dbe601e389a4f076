//! Instance generators that encode hard combinatorial problems as
//! reachability or production questions: directed Hamiltonian path,
//! three-dimensional matching, directed s-t connectivity, 3-CNF
//! satisfiability, and gadget motion planning. Used to validate the
//! solvers against independent answers and to benchmark.

mod gadgets;

pub use gadgets::{
    gen_gadget_crn, Gadget, GadgetKind, GadgetMode, GadgetSystem, PortRef, ToggleState, Wire,
    WireDirection,
};

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::model::{Configuration, Count, Crn, CrnBuilder, Instance, Species};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("hypergraph partitions must have equal sizes")]
    UnbalancedPartitions,
    #[error("malformed clause: {0}")]
    MalformedClause(String),
    #[error("invalid wiring: {0}")]
    InvalidWiring(String),
    #[error("rule {0} is not of size (2,2)")]
    NotBimolecular(usize),
    #[error("invalid name: {0}")]
    InvalidName(String),
    #[error("source and target must differ")]
    SameSourceTarget,
}

/// A generated instance together with a role annotation for every species
/// and any non-fatal warnings raised during generation.
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub instance: Instance,
    pub annotations: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

impl GeneratedInstance {
    fn new(instance: Instance, annotations: BTreeMap<String, String>) -> Self {
        debug_assert!(instance
            .crn
            .alphabet()
            .iter()
            .all(|s| annotations.contains_key(s)));
        GeneratedInstance {
            instance,
            annotations,
            warnings: Vec::new(),
        }
    }
}

/// A directed graph over named nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub nodes: Vec<String>,
    /// Directed edges as node-index pairs.
    pub edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(a, _)| *a == v).count()
    }

    fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|(_, b)| *b == v).count()
    }
}

/// Which rule shape the Hamiltonian-path encoding uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamPathVariant {
    /// Signal hand-off leaves a visited marker behind: rules of size (2,2).
    Size22,
    /// Visited markers dropped: rules of size (2,1).
    Size21,
    /// The reverse of [`HamPathVariant::Size21`] with the endpoint
    /// configurations swapped: rules of size (1,2).
    Size12,
}

/// Encodes "does `g` have a Hamiltonian path from `s` to `t`?" as a
/// reachability instance. Each vertex carries an initial species, signal
/// species indexed by path position, and (in the (2,2) variant) a visited
/// species; each edge moves the signal forward one position.
pub fn gen_ham_path(
    g: &Digraph,
    s: usize,
    t: usize,
    variant: HamPathVariant,
) -> Result<GeneratedInstance, GenError> {
    if s == t {
        return Err(GenError::SameSourceTarget);
    }
    let n = g.nodes.len();
    let mut b = CrnBuilder::new();
    let with_visited = variant == HamPathVariant::Size22;

    let mut annotations = BTreeMap::new();
    let mut initial_species = Vec::with_capacity(n);
    let mut visited_species = Vec::with_capacity(n);
    let mut signal_species = Vec::with_capacity(n);
    for v in 0..n {
        let name = &g.nodes[v];
        let init = b.species(name);
        annotations.insert(name.clone(), format!("vertex {name}, unvisited"));
        initial_species.push(init);
        if with_visited {
            let visited = b.species(&format!("{name}_v"));
            annotations.insert(format!("{name}_v"), format!("vertex {name}, visited"));
            visited_species.push(visited);
        }
        let signals: Vec<Species> = (0..n)
            .map(|i| {
                let sig = b.species(&format!("{name}_s{i}"));
                annotations.insert(
                    format!("{name}_s{i}"),
                    format!("signal: path head at {name} after {i} steps"),
                );
                sig
            })
            .collect();
        signal_species.push(signals);
    }

    for &(u, w) in &g.edges {
        for i in 0..n.saturating_sub(1) {
            let reactants = vec![
                (signal_species[u][i], Count::from(1u8)),
                (initial_species[w], Count::from(1u8)),
            ];
            match variant {
                HamPathVariant::Size22 => {
                    b.rule_sparse(
                        reactants,
                        vec![
                            (visited_species[u], Count::from(1u8)),
                            (signal_species[w][i + 1], Count::from(1u8)),
                        ],
                    );
                }
                HamPathVariant::Size21 => {
                    b.rule_sparse(
                        reactants,
                        vec![(signal_species[w][i + 1], Count::from(1u8))],
                    );
                }
                HamPathVariant::Size12 => {
                    b.rule_sparse(
                        vec![(signal_species[w][i + 1], Count::from(1u8))],
                        reactants,
                    );
                }
            }
        }
    }

    let crn = b.finish().expect("generated rules are well-formed");
    let len = crn.species_count();

    // Forward endpoints: signal starts at s, every other vertex untouched.
    let mut start_pairs: Vec<(Species, Count)> = vec![(signal_species[s][0], Count::from(1u8))];
    for v in 0..n {
        if v != s {
            start_pairs.push((initial_species[v], Count::from(1u8)));
        }
    }
    let start = Configuration::from_pairs(len, &start_pairs);
    let mut goal_pairs: Vec<(Species, Count)> =
        vec![(signal_species[t][n - 1], Count::from(1u8))];
    if with_visited {
        for v in 0..n {
            if v != t {
                goal_pairs.push((visited_species[v], Count::from(1u8)));
            }
        }
    }
    let goal = Configuration::from_pairs(len, &goal_pairs);

    let (initial, target) = match variant {
        HamPathVariant::Size12 => (goal, start),
        _ => (start, goal),
    };
    let instance = Instance::reach(crn, initial, target).expect("lengths match");
    let mut generated = GeneratedInstance::new(instance, annotations);
    if (0..n).any(|v| g.out_degree(v) > 2 || g.in_degree(v) > 2) {
        generated.warnings.push(
            "a vertex has in- or out-degree above 2; the encoding stays correct \
             but is no longer 2-source/2-consuming"
                .into(),
        );
    }
    Ok(generated)
}

/// A tripartite hypergraph: three disjoint vertex sets and hyperedges
/// picking one vertex from each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph3 {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    /// Index triples into `x`, `y`, `z`.
    pub triples: Vec<(usize, usize, usize)>,
}

fn hypergraph_builder(h: &Hypergraph3) -> Result<(CrnBuilder, Vec<Species>, BTreeMap<String, String>), GenError> {
    if h.x.len() != h.y.len() || h.y.len() != h.z.len() {
        return Err(GenError::UnbalancedPartitions);
    }
    let mut b = CrnBuilder::new();
    let mut annotations = BTreeMap::new();
    let mut species = Vec::new();
    for (part, names) in [("X", &h.x), ("Y", &h.y), ("Z", &h.z)] {
        for name in names.iter() {
            if b.lookup(name).is_some() {
                return Err(GenError::InvalidName(format!("duplicate vertex {name}")));
            }
            species.push(b.species(name));
            annotations.insert(name.clone(), format!("vertex in partition {part}"));
        }
    }
    Ok((b, species, annotations))
}

/// Encodes three-dimensional matching as reachability with pure
/// consumption: one copy of every vertex species, one size-(3,0) rule per
/// hyperedge, and the all-zero target.
pub fn gen_3dm(h: &Hypergraph3) -> Result<GeneratedInstance, GenError> {
    let (mut b, species, annotations) = hypergraph_builder(h)?;
    let n = h.x.len();
    for &(x, y, z) in &h.triples {
        b.rule_sparse(
            vec![
                (species[x], Count::from(1u8)),
                (species[n + y], Count::from(1u8)),
                (species[2 * n + z], Count::from(1u8)),
            ],
            vec![],
        );
    }
    let crn = b.finish().expect("generated rules are well-formed");
    let len = crn.species_count();
    let initial = Configuration::from_counts(vec![Count::from(1u8); len]);
    let target = Configuration::zero(len);
    let instance = Instance::reach(crn, initial, target).expect("lengths match");
    Ok(GeneratedInstance::new(instance, annotations))
}

/// The matching encoding with a shared sink species instead of pure
/// consumption: every hyperedge rule produces one sink copy and the target
/// demands one per partition element. The result is feed-forward with no
/// void or autogenesis rules.
pub fn gen_3dm_species(h: &Hypergraph3) -> Result<GeneratedInstance, GenError> {
    let (mut b, species, mut annotations) = hypergraph_builder(h)?;
    let n = h.x.len();
    let mut sink_name = String::from("a");
    while b.lookup(&sink_name).is_some() {
        sink_name.push('_');
    }
    let sink = b.species(&sink_name);
    annotations.insert(sink_name.clone(), "sink collecting one copy per matched edge".into());
    for &(x, y, z) in &h.triples {
        b.rule_sparse(
            vec![
                (species[x], Count::from(1u8)),
                (species[n + y], Count::from(1u8)),
                (species[2 * n + z], Count::from(1u8)),
            ],
            vec![(sink, Count::from(1u8))],
        );
    }
    let crn = b.finish().expect("generated rules are well-formed");
    let len = crn.species_count();
    let mut initial = Configuration::from_counts(vec![Count::from(1u8); len]);
    initial.set(sink, Count::zero());
    let mut target = Configuration::zero(len);
    target.set(sink, Count::from(n as u64));
    let instance = Instance::reach(crn, initial, target).expect("lengths match");
    Ok(GeneratedInstance::new(instance, annotations))
}

/// Encodes directed s-t connectivity: one species per node, one
/// size-(1,1) rule per edge, a single copy walking the graph.
pub fn gen_digraph_path(g: &Digraph, s: usize, t: usize) -> Result<GeneratedInstance, GenError> {
    let mut b = CrnBuilder::new();
    let mut annotations = BTreeMap::new();
    let species: Vec<Species> = g
        .nodes
        .iter()
        .map(|name| {
            annotations.insert(name.clone(), format!("graph node {name}"));
            b.species(name)
        })
        .collect();
    for &(u, v) in &g.edges {
        b.rule_sparse(
            vec![(species[u], Count::from(1u8))],
            vec![(species[v], Count::from(1u8))],
        );
    }
    let crn = b.finish().expect("generated rules are well-formed");
    let len = crn.species_count();
    let initial = Configuration::from_pairs(len, &[(species[s], Count::from(1u8))]);
    let target = Configuration::from_pairs(len, &[(species[t], Count::from(1u8))]);
    let instance = Instance::reach(crn, initial, target).expect("lengths match");
    Ok(GeneratedInstance::new(instance, annotations))
}

/// One literal of a CNF clause: a 1-based variable index and its polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub variable: usize,
    pub negated: bool,
}

/// A CNF formula; the production encoding requires exactly three literals
/// per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub variables: usize,
    pub clauses: Vec<Vec<Literal>>,
}

/// Encodes 3-CNF satisfiability as a production question: assignment rules
/// fix each variable once, clause slots convert to satisfied markers under
/// the matching assignment catalyst, and a chain species counts satisfied
/// clauses. The formula is satisfiable iff the final chain species is
/// producible.
pub fn gen_sat_production(f: &CnfFormula) -> Result<GeneratedInstance, GenError> {
    for (j, clause) in f.clauses.iter().enumerate() {
        if clause.len() != 3 {
            return Err(GenError::MalformedClause(format!(
                "clause {j} has {} literals, expected 3",
                clause.len()
            )));
        }
        for lit in clause {
            if lit.variable == 0 || lit.variable > f.variables {
                return Err(GenError::MalformedClause(format!(
                    "clause {j} references variable {} outside 1..={}",
                    lit.variable, f.variables
                )));
            }
        }
    }
    let m = f.clauses.len();
    let mut b = CrnBuilder::new();
    let mut annotations = BTreeMap::new();
    let mut note = |b: &mut CrnBuilder, name: String, role: String| {
        let s = b.species(&name);
        annotations.insert(name, role);
        s
    };

    let truthy = note(&mut b, "T".into(), "catalyst for assigning true".into());
    let falsy = note(&mut b, "F".into(), "catalyst for assigning false".into());
    let mut pos = Vec::with_capacity(f.variables);
    let mut neg = Vec::with_capacity(f.variables);
    let mut assigned_true = Vec::with_capacity(f.variables);
    let mut assigned_false = Vec::with_capacity(f.variables);
    for i in 1..=f.variables {
        pos.push(note(&mut b, format!("x{i}"), format!("unassigned positive literal of variable {i}")));
        neg.push(note(&mut b, format!("nx{i}"), format!("unassigned negated literal of variable {i}")));
        assigned_true.push(note(&mut b, format!("xT{i}"), format!("variable {i} assigned true")));
        assigned_false.push(note(&mut b, format!("xF{i}"), format!("variable {i} assigned false")));
    }
    let chain: Vec<Species> = (0..=m)
        .map(|j| note(&mut b, format!("SAT{j}"), format!("chain marker: first {j} clauses satisfied")))
        .collect();
    let one = || Count::from(1u8);
    for i in 0..f.variables {
        b.rule_sparse(
            vec![(truthy, one()), (pos[i], one()), (neg[i], one())],
            vec![(truthy, one()), (neg[i], one()), (assigned_true[i], one())],
        );
        b.rule_sparse(
            vec![(falsy, one()), (pos[i], one()), (neg[i], one())],
            vec![(falsy, one()), (pos[i], one()), (assigned_false[i], one())],
        );
    }
    let mut initial_pairs: Vec<(Species, Count)> = vec![(truthy, one()), (falsy, one()), (chain[0], one())];
    for i in 0..f.variables {
        initial_pairs.push((pos[i], one()));
        initial_pairs.push((neg[i], one()));
    }
    for (j, clause) in f.clauses.iter().enumerate() {
        let satisfied = note(&mut b, format!("cSAT{j}"), format!("clause {j} satisfied"));
        for (slot, lit) in clause.iter().enumerate() {
            let slot_species = note(
                &mut b,
                format!("c{j}_{slot}"),
                format!("slot {slot} of clause {j}"),
            );
            initial_pairs.push((slot_species, one()));
            let witness = if lit.negated {
                assigned_false[lit.variable - 1]
            } else {
                assigned_true[lit.variable - 1]
            };
            b.rule_sparse(
                vec![(slot_species, one()), (witness, one())],
                vec![(satisfied, one()), (witness, one())],
            );
        }
        b.rule_sparse(
            vec![(chain[j], one()), (satisfied, one())],
            vec![(chain[j + 1], one())],
        );
    }
    let crn = b.finish().expect("generated rules are well-formed");
    let len = crn.species_count();
    let initial = Configuration::from_pairs(len, &initial_pairs);
    let instance = Instance::production(crn, initial, chain[m], one()).expect("threshold is 1");
    Ok(GeneratedInstance::new(instance, annotations))
}

/// Splits every size-(2,2) rule into a size-(2,1) rule producing a fresh
/// intermediate and a size-(1,2) rule consuming it. Reachability between
/// intermediate-free configurations is preserved.
pub fn split_non_monotone(crn: &Crn) -> Result<Crn, GenError> {
    let two = Count::from(2u8);
    for rule in crn.rules() {
        if rule.reactants().volume() != two || rule.products().volume() != two {
            return Err(GenError::NotBimolecular(rule.id()));
        }
    }
    let mut b = CrnBuilder::new();
    for name in crn.alphabet() {
        b.species(name);
    }
    for rule in crn.rules() {
        let mut mid_name = format!("m{}", rule.id());
        while b.lookup(&mid_name).is_some() {
            mid_name.push('_');
        }
        let mid = b.species(&mid_name);
        let reactants: Vec<(Species, Count)> = rule
            .reactants()
            .iter()
            .filter(|(_, k)| !k.is_zero())
            .map(|(s, k)| (s, k.clone()))
            .collect();
        let products: Vec<(Species, Count)> = rule
            .products()
            .iter()
            .filter(|(_, k)| !k.is_zero())
            .map(|(s, k)| (s, k.clone()))
            .collect();
        b.rule_sparse(reactants, vec![(mid, Count::from(1u8))]);
        b.rule_sparse(vec![(mid, Count::from(1u8))], products);
    }
    Ok(b.finish().expect("split rules are well-formed"))
}

/// Pads a configuration over the original alphabet with zeros for species
/// a transformation appended.
pub fn pad_configuration(c: &Configuration, new_len: usize) -> Configuration {
    let mut counts = c.counts().to_vec();
    counts.resize(new_len, Count::zero());
    Configuration::from_counts(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify;
    use crate::model::rule_traits;
    use crate::search::{decide_production_oracle, decide_reach_oracle, SearchLimits};
    use crate::Verdict;

    pub(crate) fn figure_digraph() -> (Digraph, usize, usize) {
        let g = Digraph {
            nodes: ["S", "A", "B", "C", "T"].map(String::from).to_vec(),
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 1), (2, 4), (3, 4)],
        };
        (g, 0, 4)
    }

    #[test]
    fn ham_path_figure_instance_shape() {
        let (g, s, t) = figure_digraph();
        let gen = gen_ham_path(&g, s, t, HamPathVariant::Size22).unwrap();
        let crn = &gen.instance.crn;
        // 5 vertices, each with initial + visited + 5 signals.
        assert_eq!(crn.species_count(), 5 * 7);
        // 6 edges, 4 signal positions each.
        assert_eq!(crn.rules().len(), 24);
        let get = |name: &str| crn.species_by_name(name).unwrap();
        assert!(!gen.instance.initial.get(get("S_s0")).is_zero());
        assert!(!gen.instance.initial.get(get("A")).is_zero());
        assert!(gen.instance.initial.get(get("S")).is_zero());
        assert!(!gen.instance.target.get(get("T_s4")).is_zero());
        assert!(!gen.instance.target.get(get("C_v")).is_zero());
        assert!(gen.warnings.is_empty());
    }

    #[test]
    fn ham_path_figure_is_reachable() {
        let (g, s, t) = figure_digraph();
        let gen = gen_ham_path(&g, s, t, HamPathVariant::Size22).unwrap();
        let out = decide_reach_oracle(&gen.instance, &SearchLimits::default());
        assert_eq!(out.verdict, Verdict::Reachable);
    }

    #[test]
    fn ham_path_no_edges_is_unreachable() {
        let g = Digraph {
            nodes: vec!["u".into(), "v".into()],
            edges: vec![],
        };
        let gen = gen_ham_path(&g, 0, 1, HamPathVariant::Size22).unwrap();
        let out = decide_reach_oracle(&gen.instance, &SearchLimits::default());
        assert_eq!(out.verdict, Verdict::Unreachable);
    }

    #[test]
    fn ham_path_rejects_equal_endpoints() {
        let (g, _, _) = figure_digraph();
        assert_eq!(
            gen_ham_path(&g, 1, 1, HamPathVariant::Size22).unwrap_err(),
            GenError::SameSourceTarget
        );
    }

    #[test]
    fn ham_path_high_degree_warns() {
        let g = Digraph {
            nodes: ["h", "a", "b", "c"].map(String::from).to_vec(),
            edges: vec![(0, 1), (0, 2), (0, 3)],
        };
        let gen = gen_ham_path(&g, 0, 3, HamPathVariant::Size22).unwrap();
        assert_eq!(gen.warnings.len(), 1);
    }

    #[test]
    fn ham_path_size22_profile() {
        let (g, s, t) = figure_digraph();
        let gen = gen_ham_path(&g, s, t, HamPathVariant::Size22).unwrap();
        let crn = &gen.instance.crn;
        let p = classify::profile(crn);
        assert!(p.is_feed_forward());
        assert!(p.is_population_protocol);
        // Rules come in one family per edge (instantiated once per signal
        // position). With in/out-degrees at most 2, each species is
        // produced and consumed by at most 2 families, and the signal
        // species meet the bound even rule by rule.
        let n = g.nodes.len();
        let families = |species: crate::model::Species, consuming: bool| {
            let mut edges = std::collections::BTreeSet::new();
            for (r, rule) in crn.rules().iter().enumerate() {
                let (a, b) = (rule.reactants().get(species), rule.products().get(species));
                if (consuming && a > b) || (!consuming && b > a) {
                    edges.insert(r / (n - 1));
                }
            }
            edges.len()
        };
        for species in crn.species() {
            assert!(families(species, false) <= 2);
            assert!(families(species, true) <= 2);
        }
        let d = classify::source_consuming_degrees(crn);
        for (i, (src, cons)) in d.per_species.iter().enumerate() {
            if crn.species_name(crate::model::Species(i)).contains("_s") {
                assert!(*src <= 2 && *cons <= 2, "signal species degree");
            }
        }
    }

    #[test]
    fn ham_path_variants_agree_with_size22() {
        let (g, s, t) = figure_digraph();
        let limits = SearchLimits::default();
        let full = decide_reach_oracle(
            &gen_ham_path(&g, s, t, HamPathVariant::Size22).unwrap().instance,
            &limits,
        );
        let dropped = decide_reach_oracle(
            &gen_ham_path(&g, s, t, HamPathVariant::Size21).unwrap().instance,
            &limits,
        );
        let reversed = decide_reach_oracle(
            &gen_ham_path(&g, s, t, HamPathVariant::Size12).unwrap().instance,
            &limits,
        );
        assert_eq!(full.verdict, Verdict::Reachable);
        assert_eq!(dropped.verdict, Verdict::Reachable);
        assert_eq!(reversed.verdict, Verdict::Reachable);
        // Rule shapes match the variant names.
        let g21 = gen_ham_path(&g, s, t, HamPathVariant::Size21).unwrap();
        for rule in g21.instance.crn.rules() {
            assert_eq!(rule_traits(rule).size, (Count::from(2u8), Count::from(1u8)));
        }
        let g12 = gen_ham_path(&g, s, t, HamPathVariant::Size12).unwrap();
        for rule in g12.instance.crn.rules() {
            assert_eq!(rule_traits(rule).size, (Count::from(1u8), Count::from(2u8)));
        }
    }

    fn tiny_hypergraph(n: usize, triples: &[(usize, usize, usize)]) -> Hypergraph3 {
        Hypergraph3 {
            x: (0..n).map(|i| format!("px{i}")).collect(),
            y: (0..n).map(|i| format!("py{i}")).collect(),
            z: (0..n).map(|i| format!("pz{i}")).collect(),
            triples: triples.to_vec(),
        }
    }

    #[test]
    fn matching_single_edge_covers() {
        let h = tiny_hypergraph(1, &[(0, 0, 0)]);
        let gen = gen_3dm(&h).unwrap();
        let out = decide_reach_oracle(&gen.instance, &SearchLimits::default());
        assert_eq!(out.verdict, Verdict::Reachable);
    }

    #[test]
    fn matching_overlapping_edges_fail() {
        // Both edges reuse x0, so the two y/z pairs cannot both be covered.
        let h = Hypergraph3 {
            x: vec!["px0".into(), "px1".into()],
            y: vec!["py0".into(), "py1".into()],
            z: vec!["pz0".into(), "pz1".into()],
            triples: vec![(0, 0, 0), (0, 1, 1)],
        };
        let gen = gen_3dm(&h).unwrap();
        let out = decide_reach_oracle(&gen.instance, &SearchLimits::default());
        assert_eq!(out.verdict, Verdict::Unreachable);
    }

    #[test]
    fn matching_rules_are_void3_decreasing() {
        let h = tiny_hypergraph(2, &[(0, 0, 0), (1, 1, 1)]);
        let gen = gen_3dm(&h).unwrap();
        for rule in gen.instance.crn.rules() {
            let t = rule_traits(rule);
            assert_eq!(t.size, (Count::from(3u8), Count::zero()));
            assert!(t.is_void);
        }
        assert_eq!(
            classify::monotonicity(&gen.instance.crn),
            classify::Monotonicity::Decreasing
        );
    }

    #[test]
    fn matching_rejects_unbalanced() {
        let h = Hypergraph3 {
            x: vec!["a1".into()],
            y: vec![],
            z: vec![],
            triples: vec![],
        };
        assert_eq!(gen_3dm(&h).unwrap_err(), GenError::UnbalancedPartitions);
    }

    #[test]
    fn matching_with_sink_is_feed_forward_no_void() {
        let h = tiny_hypergraph(2, &[(0, 0, 0), (1, 1, 1), (0, 1, 1)]);
        let gen = gen_3dm_species(&h).unwrap();
        let p = classify::profile(&gen.instance.crn);
        assert!(p.is_feed_forward());
        assert!(!p.has_void && !p.has_autogenesis);
        // Any ordering is feed-forward: check a couple explicitly.
        let ids: Vec<usize> = gen.instance.crn.rules().iter().map(|r| r.id()).collect();
        assert!(classify::is_feed_forward_order(&gen.instance.crn, &ids));
        let reversed: Vec<usize> = ids.iter().rev().copied().collect();
        assert!(classify::is_feed_forward_order(&gen.instance.crn, &reversed));
        // Only the sink is produced anywhere.
        let d = classify::source_consuming_degrees(&gen.instance.crn);
        let sink = gen.instance.crn.species_by_name("a").unwrap();
        for (i, (src, _)) in d.per_species.iter().enumerate() {
            if i == sink.0 {
                assert_eq!(*src, 3);
            } else {
                assert_eq!(*src, 0);
            }
        }
    }

    #[test]
    fn matching_with_sink_verdicts() {
        let covered = tiny_hypergraph(2, &[(0, 0, 0), (1, 1, 1)]);
        let out = decide_reach_oracle(
            &gen_3dm_species(&covered).unwrap().instance,
            &SearchLimits::default(),
        );
        assert_eq!(out.verdict, Verdict::Reachable);

        let uncovered = Hypergraph3 {
            x: vec!["px0".into(), "px1".into()],
            y: vec!["py0".into(), "py1".into()],
            z: vec!["pz0".into(), "pz1".into()],
            triples: vec![(0, 0, 0), (0, 1, 1)],
        };
        let out = decide_reach_oracle(
            &gen_3dm_species(&uncovered).unwrap().instance,
            &SearchLimits::default(),
        );
        assert_eq!(out.verdict, Verdict::Unreachable);
    }

    #[test]
    fn digraph_path_connectivity() {
        let g = Digraph {
            nodes: ["s", "m", "t", "iso"].map(String::from).to_vec(),
            edges: vec![(0, 1), (1, 2)],
        };
        let limits = SearchLimits::default();
        let gen = gen_digraph_path(&g, 0, 2).unwrap();
        assert_eq!(decide_reach_oracle(&gen.instance, &limits).verdict, Verdict::Reachable);
        let gen = gen_digraph_path(&g, 0, 3).unwrap();
        assert_eq!(decide_reach_oracle(&gen.instance, &limits).verdict, Verdict::Unreachable);
    }

    #[test]
    fn sat_single_positive_clause() {
        let f = CnfFormula {
            variables: 1,
            clauses: vec![vec![
                Literal { variable: 1, negated: false },
                Literal { variable: 1, negated: false },
                Literal { variable: 1, negated: false },
            ]],
        };
        let gen = gen_sat_production(&f).unwrap();
        let crate::model::Problem::Production { species, threshold } = &gen.instance.problem
        else {
            panic!("production instance expected")
        };
        let out = decide_production_oracle(
            &gen.instance.crn,
            &gen.instance.initial,
            *species,
            threshold,
            &SearchLimits::default(),
        );
        assert_eq!(out.verdict, Verdict::Reachable);
    }

    #[test]
    fn sat_contradiction_is_unreachable() {
        let lit = |negated| Literal { variable: 1, negated };
        let f = CnfFormula {
            variables: 1,
            clauses: vec![
                vec![lit(false), lit(false), lit(false)],
                vec![lit(true), lit(true), lit(true)],
            ],
        };
        let gen = gen_sat_production(&f).unwrap();
        let crate::model::Problem::Production { species, threshold } = &gen.instance.problem
        else {
            panic!("production instance expected")
        };
        let out = decide_production_oracle(
            &gen.instance.crn,
            &gen.instance.initial,
            *species,
            threshold,
            &SearchLimits::default(),
        );
        assert_eq!(out.verdict, Verdict::Unreachable);
    }

    #[test]
    fn sat_system_is_single_consuming() {
        let lit = |v, negated| Literal { variable: v, negated };
        let f = CnfFormula {
            variables: 3,
            clauses: vec![
                vec![lit(1, false), lit(2, true), lit(3, false)],
                vec![lit(2, false), lit(2, false), lit(1, true)],
            ],
        };
        let gen = gen_sat_production(&f).unwrap();
        let d = classify::source_consuming_degrees(&gen.instance.crn);
        assert!(d.max_consuming <= 1, "max consuming {}", d.max_consuming);
    }

    #[test]
    fn sat_rejects_malformed_clauses() {
        let f = CnfFormula {
            variables: 1,
            clauses: vec![vec![Literal { variable: 1, negated: false }]],
        };
        assert!(matches!(
            gen_sat_production(&f).unwrap_err(),
            GenError::MalformedClause(_)
        ));
    }

    #[test]
    fn split_produces_intermediate_pairs() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1), ("b", 1)], &[("c", 1), ("d", 1)]);
        let crn = b.finish().unwrap();
        let split = split_non_monotone(&crn).unwrap();
        assert_eq!(split.rules().len(), 2);
        let sizes: Vec<_> = split.rules().iter().map(|r| rule_traits(r).size).collect();
        assert_eq!(
            sizes,
            vec![
                (Count::from(2u8), Count::from(1u8)),
                (Count::from(1u8), Count::from(2u8))
            ]
        );
        assert!(split.species_by_name("m0").is_some());
    }

    #[test]
    fn split_preserves_reachability_between_plain_configurations() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1), ("b", 1)], &[("c", 1), ("b", 1)]);
        b.rule_by_names(&[("c", 1), ("b", 1)], &[("d", 1), ("d", 1)]);
        let crn = b.finish().unwrap();
        let split = split_non_monotone(&crn).unwrap();
        let limits = SearchLimits::default();
        let initial = Configuration::from_pairs(
            crn.species_count(),
            &[(Species(0), Count::from(2u8)), (Species(1), Count::from(1u8))],
        );
        let closure = crate::search::explore(&crn, &initial, &limits);
        assert!(closure.is_complete());
        for target in closure.configurations() {
            let inst = Instance::reach(
                split.clone(),
                pad_configuration(&initial, split.species_count()),
                pad_configuration(&target, split.species_count()),
            )
            .unwrap();
            assert_eq!(
                decide_reach_oracle(&inst, &limits).verdict,
                Verdict::Reachable,
                "split system must reach {target:?}"
            );
        }
    }

    #[test]
    fn split_rejects_non_bimolecular() {
        let mut b = CrnBuilder::new();
        b.rule_by_names(&[("a", 1)], &[("b", 1)]);
        let crn = b.finish().unwrap();
        assert_eq!(split_non_monotone(&crn).unwrap_err(), GenError::NotBimolecular(0));
    }

    #[test]
    fn split_of_empty_is_empty() {
        let crn = Crn::new(vec!["a".into()], vec![]).unwrap();
        assert_eq!(split_non_monotone(&crn).unwrap().rules().len(), 0);
    }
}
