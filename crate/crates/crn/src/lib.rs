//! Reachability analysis for discrete chemical reaction networks.
//!
//! A network is an ordered alphabet of species together with rules that
//! consume and produce multisets of them. This crate answers reachability,
//! production, and universal-reachability questions about such networks:
//!
//! - [`model`] defines configurations, rules, and application semantics;
//! - [`classify`] computes the restriction profile of a network
//!   (feed-forward orderings, source/consuming degrees, void and
//!   autogenesis rules, volume monotonicity, bipartiteness);
//! - [`solvers`] holds the polynomial-time decision procedures and the
//!   dispatcher that picks the right one for a profile;
//! - [`search`] is the bounded explicit-state oracle plus ordered
//!   certificates and their verifier;
//! - [`reductions`] generates instances from hard combinatorial problems
//!   (Hamiltonian path, three-dimensional matching, satisfiability,
//!   gadget motion planning) for validation and benchmarking;
//! - [`text`] defines the file formats and [`report`] the run reports used
//!   by the `crn` command-line tool.
//!
//! See the crate examples for end-to-end walkthroughs of each capability.

pub mod classify;
pub mod flow;
pub mod model;
pub mod reductions;
pub mod search;
pub mod solvers;

/// Three-valued answer of a decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Reachable,
    Unreachable,
    /// Only produced by fallback paths whose exploration bounds were hit,
    /// never by a procedure whose preconditions held.
    Unknown,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Reachable => "reachable",
            Verdict::Unreachable => "unreachable",
            Verdict::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
