//! Compact breadth-first engine. Configurations are stored as word-sized
//! count vectors in an insertion-ordered hash map (full-equality on hash
//! hits, so collisions are correctness-preserving), with parent links for
//! trace reconstruction.

use indexmap::IndexMap;
use num_traits::ToPrimitive;
use rustc_hash::FxBuildHasher;

use super::{BoundHit, SearchLimits};
use crate::model::{Configuration, Count, Crn};

/// A configuration with word-sized counts, usable as a visited-set key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(super) struct CompactConfig(Box<[u64]>);

impl CompactConfig {
    /// `None` when some count does not fit in a machine word; such
    /// configurations are outside what the engine can enumerate.
    pub(super) fn try_from_configuration(c: &Configuration) -> Option<Self> {
        c.counts()
            .iter()
            .map(|k| k.to_u64())
            .collect::<Option<Box<[u64]>>>()
            .map(CompactConfig)
    }

    pub(super) fn entries(&self) -> &[u64] {
        &self.0
    }

    fn to_configuration(&self) -> Configuration {
        Configuration::from_counts(self.0.iter().map(|&k| Count::from(k)).collect())
    }

    fn volume(&self) -> u128 {
        self.0.iter().map(|&k| k as u128).sum()
    }
}

struct CompactRule {
    id: usize,
    /// Sparse minimum counts required to fire.
    reactants: Vec<(usize, u64)>,
    /// Sparse net change on firing.
    delta: Vec<(usize, i128)>,
    volume_delta: i128,
    /// Some product coefficient exceeded a machine word: applying the rule
    /// always leaves the representable range.
    product_oversized: bool,
}

struct StateMeta {
    parent: u32,
    rule: u32,
    depth: u32,
}

const NO_PARENT: u32 = u32::MAX;

pub(super) enum StopReason {
    /// The goal predicate matched the state at this index.
    Goal(usize),
    /// The frontier was exhausted (or a hard cap stopped the search; see
    /// `bound_hit`).
    Exhausted,
}

pub(super) struct Engine {
    rules: Vec<CompactRule>,
    states: IndexMap<CompactConfig, StateMeta, FxBuildHasher>,
    /// One-step transitions, recorded only when requested.
    edges: Option<Vec<(u32, u32)>>,
    effective_volume_cap: u128,
    state_cap: usize,
    step_cap: Option<usize>,
    bound_hit: Option<BoundHit>,
    /// Set when the initial configuration itself was not representable.
    dead: bool,
}

impl Engine {
    pub(super) fn new(
        crn: &Crn,
        initial: &Configuration,
        limits: &SearchLimits,
        record_edges: bool,
    ) -> Engine {
        let rules = crn
            .rules()
            .iter()
            .filter_map(|rule| {
                let mut reactants = Vec::new();
                for (i, k) in rule.reactants().counts().iter().enumerate() {
                    if !num_traits::Zero::is_zero(k) {
                        // A reactant demand beyond a machine word can never be
                        // met by a representable configuration.
                        reactants.push((i, k.to_u64()?));
                    }
                }
                let mut delta = Vec::new();
                let mut volume_delta = 0i128;
                let mut product_oversized = false;
                for (i, (p, r)) in rule
                    .products()
                    .counts()
                    .iter()
                    .zip(rule.reactants().counts())
                    .enumerate()
                {
                    match (p.to_u64(), r.to_u64()) {
                        (Some(p), Some(r)) => {
                            let d = p as i128 - r as i128;
                            if d != 0 {
                                delta.push((i, d));
                                volume_delta += d;
                            }
                        }
                        // Reactant fits (checked above), so the product side
                        // overflowed.
                        _ => product_oversized = true,
                    }
                }
                Some(CompactRule {
                    id: rule.id(),
                    reactants,
                    delta,
                    volume_delta,
                    product_oversized,
                })
            })
            .collect();
        let mut states = IndexMap::with_hasher(FxBuildHasher);
        let mut dead = false;
        let mut effective_volume_cap = limits.volume_cap as u128;
        match CompactConfig::try_from_configuration(initial) {
            Some(init) => {
                effective_volume_cap = effective_volume_cap.max(init.volume());
                states.insert(
                    init,
                    StateMeta {
                        parent: NO_PARENT,
                        rule: 0,
                        depth: 0,
                    },
                );
            }
            None => dead = true,
        }
        Engine {
            rules,
            states,
            edges: record_edges.then(Vec::new),
            effective_volume_cap,
            state_cap: limits.state_cap.max(1),
            step_cap: limits.step_cap,
            bound_hit: dead.then_some(BoundHit::VolumeCap),
            dead,
        }
    }

    fn note_bound(&mut self, bound: BoundHit) {
        self.bound_hit.get_or_insert(bound);
    }

    /// Expands the closure breadth-first until the goal predicate matches,
    /// a hard cap stops the search, or the frontier empties.
    pub(super) fn run(&mut self, goal: impl Fn(&[u64]) -> bool) -> StopReason {
        if self.dead {
            return StopReason::Exhausted;
        }
        if goal(self.states.get_index(0).expect("initial").0.entries()) {
            return StopReason::Goal(0);
        }
        let mut cursor = 0usize;
        let mut scratch: Vec<u64> = Vec::new();
        while cursor < self.states.len() {
            let (state, meta) = self.states.get_index(cursor).expect("cursor in range");
            let depth = meta.depth;
            if self.step_cap.map(|cap| depth as usize >= cap).unwrap_or(false) {
                // Unexpanded frontier at the depth limit: the closure may be
                // incomplete from here on.
                self.note_bound(BoundHit::StepCap);
                cursor += 1;
                continue;
            }
            let volume = state.volume();
            for r in 0..self.rules.len() {
                let (state, _) = self.states.get_index(cursor).expect("cursor in range");
                let rule = &self.rules[r];
                if !rule
                    .reactants
                    .iter()
                    .all(|&(i, need)| state.entries()[i] >= need)
                {
                    continue;
                }
                if rule.product_oversized {
                    self.note_bound(BoundHit::VolumeCap);
                    continue;
                }
                let next_volume = volume.wrapping_add_signed(rule.volume_delta);
                if next_volume > self.effective_volume_cap {
                    self.note_bound(BoundHit::VolumeCap);
                    continue;
                }
                scratch.clear();
                scratch.extend_from_slice(state.entries());
                let mut representable = true;
                for &(i, d) in &rule.delta {
                    match (scratch[i] as i128).checked_add(d) {
                        Some(v) if v >= 0 && v <= u64::MAX as i128 => scratch[i] = v as u64,
                        _ => {
                            representable = false;
                            break;
                        }
                    }
                }
                if !representable {
                    self.note_bound(BoundHit::VolumeCap);
                    continue;
                }
                let key = CompactConfig(scratch.as_slice().into());
                if self.states.contains_key(&key) {
                    if let Some(edges) = &mut self.edges {
                        let to = self.states.get_index_of(&key).expect("present") as u32;
                        edges.push((cursor as u32, to));
                    }
                    continue;
                }
                if self.states.len() >= self.state_cap {
                    self.note_bound(BoundHit::StateCap);
                    return StopReason::Exhausted;
                }
                let hit = goal(key.entries());
                let index = self.states.len();
                self.states.insert(
                    key,
                    StateMeta {
                        parent: cursor as u32,
                        rule: rule.id as u32,
                        depth: depth + 1,
                    },
                );
                if let Some(edges) = &mut self.edges {
                    edges.push((cursor as u32, index as u32));
                }
                if hit {
                    return StopReason::Goal(index);
                }
            }
            cursor += 1;
        }
        StopReason::Exhausted
    }

    pub(super) fn len(&self) -> usize {
        self.states.len()
    }

    pub(super) fn bound_hit(&self) -> Option<BoundHit> {
        self.bound_hit
    }

    pub(super) fn contains(&self, key: &CompactConfig) -> bool {
        self.states.contains_key(key)
    }

    pub(super) fn index_of(&self, key: &CompactConfig) -> Option<usize> {
        self.states.get_index_of(key)
    }

    pub(super) fn iter_configurations(&self) -> impl Iterator<Item = Configuration> + '_ {
        self.states.keys().map(CompactConfig::to_configuration)
    }

    /// Rule ids along the parent chain from the initial state.
    pub(super) fn trace_to_index(&self, index: usize) -> Vec<usize> {
        let mut trace = Vec::new();
        let mut at = index;
        loop {
            let (_, meta) = self.states.get_index(at).expect("index in range");
            if meta.parent == NO_PARENT {
                break;
            }
            trace.push(meta.rule as usize);
            at = meta.parent as usize;
        }
        trace.reverse();
        trace
    }

    pub(super) fn trace_to(&self, key: &CompactConfig) -> Option<Vec<usize>> {
        self.index_of(key).map(|i| self.trace_to_index(i))
    }

    /// `true` iff every explored state can reach `target_index` inside the
    /// explored transition graph.
    pub(super) fn backward_closure_covers_all(&self, target_index: usize) -> bool {
        let edges = self
            .edges
            .as_ref()
            .expect("engine built with edge recording");
        let n = self.states.len();
        let mut incoming = vec![Vec::new(); n];
        for &(from, to) in edges {
            incoming[to as usize].push(from as usize);
        }
        // Tree edges from parent links are already included in `edges`.
        let mut can_reach = vec![false; n];
        can_reach[target_index] = true;
        let mut stack = vec![target_index];
        let mut seen = 1usize;
        while let Some(v) = stack.pop() {
            for &u in &incoming[v] {
                if !can_reach[u] {
                    can_reach[u] = true;
                    seen += 1;
                    stack.push(u);
                }
            }
        }
        seen == n
    }
}
