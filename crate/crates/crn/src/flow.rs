//! Maximum flow with unbounded integer capacities, via shortest augmenting
//! paths. The number of augmentations depends only on the graph shape, so
//! binary-encoded capacities are handled without unary expansion.

use num_traits::Zero;
use std::collections::VecDeque;

use crate::model::Count;

struct FlowEdge {
    to: usize,
    residual: Count,
}

/// A directed flow network over dense node indices.
pub struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    edges: Vec<FlowEdge>,
}

/// Handle of an edge added to a [`FlowNetwork`], usable to read back the
/// flow pushed through it.
#[derive(Debug, Clone, Copy)]
pub struct EdgeHandle(usize);

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        FlowNetwork {
            adjacency: vec![Vec::new(); nodes],
            edges: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, capacity: Count) -> EdgeHandle {
        let handle = self.edges.len();
        self.adjacency[from].push(handle);
        self.edges.push(FlowEdge {
            to,
            residual: capacity,
        });
        self.adjacency[to].push(handle + 1);
        self.edges.push(FlowEdge {
            to: from,
            residual: Count::zero(),
        });
        EdgeHandle(handle)
    }

    /// Flow currently assigned to the edge (the residual of its twin).
    pub fn flow(&self, edge: EdgeHandle) -> &Count {
        &self.edges[edge.0 ^ 1].residual
    }

    /// Runs breadth-first augmentation until no path from `source` to
    /// `sink` remains and returns the total flow value.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> Count {
        assert_ne!(source, sink);
        let mut total = Count::zero();
        loop {
            // Shortest augmenting path by edge count.
            let mut parent: Vec<Option<usize>> = vec![None; self.adjacency.len()];
            let mut queue = VecDeque::from([source]);
            let mut reached = false;
            'bfs: while let Some(u) = queue.pop_front() {
                for &e in &self.adjacency[u] {
                    let edge = &self.edges[e];
                    if edge.residual.is_zero() || edge.to == source || parent[edge.to].is_some() {
                        continue;
                    }
                    parent[edge.to] = Some(e);
                    if edge.to == sink {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(edge.to);
                }
            }
            if !reached {
                return total;
            }
            let mut bottleneck: Option<Count> = None;
            let mut v = sink;
            while v != source {
                let e = parent[v].expect("path edge");
                let r = &self.edges[e].residual;
                bottleneck = Some(match bottleneck {
                    Some(b) => b.min(r.clone()),
                    None => r.clone(),
                });
                v = self.edges[e ^ 1].to;
            }
            let bottleneck = bottleneck.expect("non-empty path");
            let mut v = sink;
            while v != source {
                let e = parent[v].expect("path edge");
                self.edges[e].residual -= &bottleneck;
                self.edges[e ^ 1].residual += &bottleneck;
                v = self.edges[e ^ 1].to;
            }
            total += bottleneck;
        }
    }
}
