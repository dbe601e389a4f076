//! Compiles gadget motion-planning systems into reaction networks.
//!
//! A system is a set of toggle-lock and rotate gadgets whose ports are
//! pairwise connected by wires, plus a starting agent position and a
//! target wire. Each wire contributes one directed agent species per
//! travel direction, each toggle-lock a pair of gate catalysts, and the
//! rotate gadgets share a rotation catalyst. Every (incoming agent, gate
//! state) pair matches exactly one rule: a legal traversal moves the agent
//! through the gadget, anything else bounces it back along its wire with
//! the state unchanged, so the compiled network plays a deterministic
//! zero-player game.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{pad_configuration, split_non_monotone, GenError, GeneratedInstance};
use crate::model::{Configuration, Count, CrnBuilder, Instance, Species};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToggleState {
    Unlocked,
    Locked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GadgetKind {
    /// Four ports: a directed toggle tunnel `a -> c` (reversing and
    /// flipping the state each traversal) and a lock tunnel `b <-> d`
    /// open only while unlocked.
    ToggleLock { initial: ToggleState },
    /// Stateless router sending an incoming agent to the next port
    /// clockwise (ports `p0..p{k-1}`), or counterclockwise under the
    /// reversed catalyst.
    Rotate { ports: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gadget {
    pub name: String,
    pub kind: GadgetKind,
}

/// One end of a wire: a gadget name and one of its port names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortRef {
    pub gadget: String,
    pub port: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wire {
    pub name: String,
    pub a: PortRef,
    pub b: PortRef,
}

/// Travel direction along a wire, named after its endpoint order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireDirection {
    AToB,
    BToA,
}

impl WireDirection {
    pub fn reversed(self) -> Self {
        match self {
            WireDirection::AToB => WireDirection::BToA,
            WireDirection::BToA => WireDirection::AToB,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GadgetSystem {
    pub gadgets: Vec<Gadget>,
    pub wires: Vec<Wire>,
    /// Wire name and travel direction of the agent's starting position.
    pub agent_start: (String, WireDirection),
    /// The agent wins by traveling this wire from its A end to its B end.
    pub target_wire: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetMode {
    /// Ask whether the target wire's forward agent species is producible.
    Production,
    /// Ask whether the mirrored start configuration (agent reversed,
    /// rotation catalyst flipped) is reachable. Requires the target wire
    /// to feed a rotate gadget, where reaching it turns the agent around
    /// instead of rotating onward, keeping the play deterministic.
    Reachability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

/// Where each port attaches: wire index and which end.
type PortMap = BTreeMap<(String, String), (usize, Side)>;

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn port_names(kind: &GadgetKind) -> Vec<String> {
    match kind {
        GadgetKind::ToggleLock { .. } => ["a", "b", "c", "d"].map(String::from).to_vec(),
        GadgetKind::Rotate { ports } => (0..*ports).map(|i| format!("p{i}")).collect(),
    }
}

fn validate(sys: &GadgetSystem) -> Result<PortMap, GenError> {
    let bad = |msg: String| Err(GenError::InvalidWiring(msg));
    let mut gadget_kinds: BTreeMap<&str, &GadgetKind> = BTreeMap::new();
    for g in &sys.gadgets {
        if !valid_name(&g.name) {
            return Err(GenError::InvalidName(g.name.clone()));
        }
        if let GadgetKind::Rotate { ports } = g.kind {
            if ports == 0 {
                return bad(format!("rotate gadget {} has no ports", g.name));
            }
        }
        if gadget_kinds.insert(&g.name, &g.kind).is_some() {
            return bad(format!("duplicate gadget name {}", g.name));
        }
    }
    let mut ports: PortMap = BTreeMap::new();
    let mut wire_names = std::collections::BTreeSet::new();
    for (w, wire) in sys.wires.iter().enumerate() {
        if !valid_name(&wire.name) {
            return Err(GenError::InvalidName(wire.name.clone()));
        }
        if !wire_names.insert(&wire.name) {
            return bad(format!("duplicate wire name {}", wire.name));
        }
        if wire.a == wire.b {
            return bad(format!("wire {} connects a port to itself", wire.name));
        }
        for (endpoint, side) in [(&wire.a, Side::A), (&wire.b, Side::B)] {
            let Some(kind) = gadget_kinds.get(endpoint.gadget.as_str()) else {
                return bad(format!(
                    "wire {} references unknown gadget {}",
                    wire.name, endpoint.gadget
                ));
            };
            if !port_names(kind).contains(&endpoint.port) {
                return bad(format!(
                    "gadget {} has no port {}",
                    endpoint.gadget, endpoint.port
                ));
            }
            let key = (endpoint.gadget.clone(), endpoint.port.clone());
            if ports.insert(key, (w, side)).is_some() {
                return bad(format!(
                    "port {}.{} is wired twice",
                    endpoint.gadget, endpoint.port
                ));
            }
        }
    }
    for g in &sys.gadgets {
        for p in port_names(&g.kind) {
            if !ports.contains_key(&(g.name.clone(), p.clone())) {
                return bad(format!("port {}.{p} is not wired", g.name));
            }
        }
    }
    let wire_exists = |name: &str| sys.wires.iter().any(|w| w.name == name);
    if !wire_exists(&sys.agent_start.0) {
        return bad(format!("agent start wire {} does not exist", sys.agent_start.0));
    }
    if !wire_exists(&sys.target_wire) {
        return bad(format!("target wire {} does not exist", sys.target_wire));
    }
    Ok(ports)
}

/// Compiles the system. Every rule is size (2,2) and moves exactly one
/// agent species, so reachable configurations hold exactly one agent (or,
/// with `split`, one agent-or-intermediate). With `split`每 each rule is
/// divided into a size-(2,1) and a size-(1,2) half through a fresh
/// intermediate species.
pub fn gen_gadget_crn(
    sys: &GadgetSystem,
    mode: GadgetMode,
    split: bool,
) -> Result<GeneratedInstance, GenError> {
    let ports = validate(sys)?;
    let mut b = CrnBuilder::new();
    let mut annotations = BTreeMap::new();

    let mut fresh = |b: &mut CrnBuilder, name: String, role: String| -> Result<Species, GenError> {
        if b.lookup(&name).is_some() {
            return Err(GenError::InvalidName(format!(
                "derived species name {name} collides with an existing one"
            )));
        }
        let s = b.species(&name);
        annotations.insert(name, role);
        Ok(s)
    };

    // Two directed agent species per wire.
    let mut agent: Vec<[Species; 2]> = Vec::with_capacity(sys.wires.len());
    for wire in &sys.wires {
        let ab = fresh(
            &mut b,
            format!("{}_ab", wire.name),
            format!(
                "agent on wire {} heading to {}.{}",
                wire.name, wire.b.gadget, wire.b.port
            ),
        )?;
        let ba = fresh(
            &mut b,
            format!("{}_ba", wire.name),
            format!(
                "agent on wire {} heading to {}.{}",
                wire.name, wire.a.gadget, wire.a.port
            ),
        )?;
        agent.push([ab, ba]);
    }
    let arriving = |port: &(String, String)| -> Species {
        let (w, side) = ports[port];
        match side {
            Side::A => agent[w][1],
            Side::B => agent[w][0],
        }
    };
    let departing = |port: &(String, String)| -> Species {
        let (w, side) = ports[port];
        match side {
            Side::A => agent[w][0],
            Side::B => agent[w][1],
        }
    };
    let port = |g: &Gadget, p: &str| (g.name.clone(), p.to_string());

    let rot_cw = fresh(&mut b, "rot_cw".into(), "clockwise rotation catalyst".into())?;
    let rot_ccw = match mode {
        GadgetMode::Reachability => Some(fresh(
            &mut b,
            "rot_ccw".into(),
            "counterclockwise rotation catalyst".into(),
        )?),
        GadgetMode::Production => None,
    };

    let target_wire_index = sys
        .wires
        .iter()
        .position(|w| w.name == sys.target_wire)
        .expect("validated");
    let target_species = agent[target_wire_index][0];
    let reversed_target = agent[target_wire_index][1];
    if mode == GadgetMode::Reachability {
        let far = &sys.wires[target_wire_index].b;
        let is_rotate = sys
            .gadgets
            .iter()
            .any(|g| g.name == far.gadget && matches!(g.kind, GadgetKind::Rotate { .. }));
        if !is_rotate {
            return Err(GenError::InvalidWiring(format!(
                "reachability mode needs the target wire's far end on a rotate gadget, \
                 but {}.{} is not one",
                far.gadget, far.port
            )));
        }
    }

    let mut gate_initial = Vec::new();
    let one = || Count::from(1u8);
    for g in &sys.gadgets {
        match &g.kind {
            GadgetKind::ToggleLock { initial } => {
                let unlocked = fresh(
                    &mut b,
                    format!("{}_u", g.name),
                    format!("gate catalyst: toggle-lock {} unlocked", g.name),
                )?;
                let locked = fresh(
                    &mut b,
                    format!("{}_l", g.name),
                    format!("gate catalyst: toggle-lock {} locked", g.name),
                )?;
                gate_initial.push(match initial {
                    ToggleState::Unlocked => unlocked,
                    ToggleState::Locked => locked,
                });
                let (pa, pb, pc, pd) = (
                    port(g, "a"),
                    port(g, "b"),
                    port(g, "c"),
                    port(g, "d"),
                );
                // Toggle tunnel: direction flips with the state.
                b.rule_sparse(
                    vec![(arriving(&pa), one()), (unlocked, one())],
                    vec![(departing(&pc), one()), (locked, one())],
                );
                b.rule_sparse(
                    vec![(arriving(&pc), one()), (locked, one())],
                    vec![(departing(&pa), one()), (unlocked, one())],
                );
                // Lock tunnel: both ways, unlocked only, state kept.
                b.rule_sparse(
                    vec![(arriving(&pb), one()), (unlocked, one())],
                    vec![(departing(&pd), one()), (unlocked, one())],
                );
                b.rule_sparse(
                    vec![(arriving(&pd), one()), (unlocked, one())],
                    vec![(departing(&pb), one()), (unlocked, one())],
                );
                // Bounces: the state that refuses each port sends the agent
                // back along its wire unchanged.
                b.rule_sparse(
                    vec![(arriving(&pa), one()), (locked, one())],
                    vec![(departing(&pa), one()), (locked, one())],
                );
                b.rule_sparse(
                    vec![(arriving(&pc), one()), (unlocked, one())],
                    vec![(departing(&pc), one()), (unlocked, one())],
                );
                b.rule_sparse(
                    vec![(arriving(&pb), one()), (locked, one())],
                    vec![(departing(&pb), one()), (locked, one())],
                );
                b.rule_sparse(
                    vec![(arriving(&pd), one()), (locked, one())],
                    vec![(departing(&pd), one()), (locked, one())],
                );
            }
            GadgetKind::Rotate { ports: k } => {
                for i in 0..*k {
                    let here = port(g, &format!("p{i}"));
                    let clockwise = port(g, &format!("p{}", (i + 1) % k));
                    if mode == GadgetMode::Reachability && arriving(&here) == target_species {
                        // Reaching the target ends the forward play: turn
                        // the agent around and flip the rotation catalyst.
                        b.rule_sparse(
                            vec![(target_species, one()), (rot_cw, one())],
                            vec![(reversed_target, one()), (rot_ccw.expect("reachability"), one())],
                        );
                    } else {
                        b.rule_sparse(
                            vec![(arriving(&here), one()), (rot_cw, one())],
                            vec![(departing(&clockwise), one()), (rot_cw, one())],
                        );
                    }
                    if let Some(ccw) = rot_ccw {
                        let counter = port(g, &format!("p{}", (i + k - 1) % k));
                        b.rule_sparse(
                            vec![(arriving(&here), one()), (ccw, one())],
                            vec![(departing(&counter), one()), (ccw, one())],
                        );
                    }
                }
            }
        }
    }

    let crn = b.finish().expect("generated rules are well-formed");
    let start_wire_index = sys
        .wires
        .iter()
        .position(|w| w.name == sys.agent_start.0)
        .expect("validated");
    let start_agent = match sys.agent_start.1 {
        WireDirection::AToB => agent[start_wire_index][0],
        WireDirection::BToA => agent[start_wire_index][1],
    };
    let mut initial_pairs: Vec<(Species, Count)> = vec![(start_agent, one()), (rot_cw, one())];
    for gate in &gate_initial {
        initial_pairs.push((*gate, one()));
    }
    let initial = Configuration::from_pairs(crn.species_count(), &initial_pairs);

    let instance = match mode {
        GadgetMode::Production => {
            Instance::production(crn, initial, target_species, one()).expect("threshold is 1")
        }
        GadgetMode::Reachability => {
            let mut target_pairs: Vec<(Species, Count)> = vec![
                (
                    match sys.agent_start.1.reversed() {
                        WireDirection::AToB => agent[start_wire_index][0],
                        WireDirection::BToA => agent[start_wire_index][1],
                    },
                    one(),
                ),
                (rot_ccw.expect("reachability"), one()),
            ];
            for gate in &gate_initial {
                target_pairs.push((*gate, one()));
            }
            let target = Configuration::from_pairs(crn.species_count(), &target_pairs);
            Instance::reach(crn, initial, target).expect("lengths match")
        }
    };

    let generated = if split {
        let split_crn = split_non_monotone(&instance.crn)?;
        let len = split_crn.species_count();
        for (i, rule) in instance.crn.rules().iter().enumerate() {
            let name = split_crn.species_name(Species(instance.crn.species_count() + i));
            annotations.insert(
                name.to_string(),
                format!("intermediate of rule {}", rule.id()),
            );
        }
        let initial = pad_configuration(&instance.initial, len);
        let padded = match &instance.problem {
            crate::model::Problem::Production { species, threshold } => {
                Instance::production(split_crn, initial, *species, threshold.clone())
                    .expect("threshold unchanged")
            }
            _ => Instance::reach(split_crn, initial, pad_configuration(&instance.target, len))
                .expect("lengths match"),
        };
        GeneratedInstance::new(padded, annotations)
    } else {
        GeneratedInstance::new(instance, annotations)
    };
    Ok(generated)
}
