//! Editable copy of a spanning tree on which paths are reduced.

use serde::Serialize;

use crate::ingest::graph::chord_angle;
use crate::ingest::SpanningTree;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeNode {
    pub x: f64,
    pub y: f64,
    pub attr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub angle: f64,
}

impl TreeEdge {
    pub fn other(&self, n: usize) -> usize {
        if self.u == n {
            self.v
        } else {
            self.u
        }
    }
}

/// A tree whose nodes and edges can be deleted and merged. Ids are stable:
/// deleted slots stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTree {
    nodes: Vec<Option<TreeNode>>,
    edges: Vec<Option<TreeEdge>>,
    incident: Vec<Vec<usize>>,
    principal_axis: f64,
}

impl From<&SpanningTree> for ReductionTree {
    fn from(tree: &SpanningTree) -> Self {
        let nodes = tree
            .nodes
            .iter()
            .map(|n| {
                Some(TreeNode {
                    x: n.x,
                    y: n.y,
                    attr: n.attr,
                })
            })
            .collect();
        let mut incident = vec![Vec::new(); tree.nodes.len()];
        let edges = tree
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                incident[e.u].push(k);
                incident[e.v].push(k);
                Some(TreeEdge {
                    u: e.u,
                    v: e.v,
                    weight: e.weight,
                    angle: e.angle,
                })
            })
            .collect();
        Self {
            nodes,
            edges,
            incident,
            principal_axis: tree.principal_axis,
        }
    }
}

impl ReductionTree {
    /// Builds a tree directly from node attributes and weighted edges; node
    /// `k` sits at `(k, 0)` unless positions are given. Mostly for tests.
    pub fn from_edges(attrs: &[f64], edges: &[(usize, usize, f64)]) -> Self {
        let positions: Vec<(f64, f64)> = (0..attrs.len()).map(|k| (k as f64, 0.0)).collect();
        Self::with_positions(attrs, &positions, edges, 0.0)
    }

    pub fn with_positions(attrs: &[f64], positions: &[(f64, f64)], edges: &[(usize, usize, f64)], axis: f64) -> Self {
        let nodes: Vec<Option<TreeNode>> = attrs
            .iter()
            .zip(positions)
            .map(|(&attr, &(x, y))| Some(TreeNode { x, y, attr }))
            .collect();
        let mut incident = vec![Vec::new(); nodes.len()];
        let mut out = Vec::with_capacity(edges.len());
        for (k, &(u, v, weight)) in edges.iter().enumerate() {
            incident[u].push(k);
            incident[v].push(k);
            out.push(Some(TreeEdge {
                u,
                v,
                weight,
                angle: chord_angle(positions[u], positions[v], axis),
            }));
        }
        Self {
            nodes,
            edges: out,
            incident,
            principal_axis: axis,
        }
    }

    pub fn node(&self, n: usize) -> Option<&TreeNode> {
        self.nodes.get(n).and_then(Option::as_ref)
    }

    pub fn edge(&self, k: usize) -> Option<&TreeEdge> {
        self.edges.get(k).and_then(Option::as_ref)
    }

    pub fn live_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&n| self.nodes[n].is_some())
    }

    pub fn live_edges(&self) -> impl Iterator<Item = &TreeEdge> + '_ {
        self.edges.iter().flatten()
    }

    pub fn degree(&self, n: usize) -> usize {
        self.incident.get(n).map_or(0, Vec::len)
    }

    /// Edge ids incident to `n`.
    pub fn incident(&self, n: usize) -> &[usize] {
        &self.incident[n]
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.incident
            .get(a)?
            .iter()
            .copied()
            .find(|&k| self.edges[k].as_ref().is_some_and(|e| e.other(a) == b))
    }

    pub fn total_weight(&self) -> f64 {
        self.live_edges().map(|e| e.weight).sum()
    }

    pub fn principal_axis(&self) -> f64 {
        self.principal_axis
    }

    /// Weight of everything hanging from `start` once the edge towards
    /// `from` is cut, excluding that edge.
    pub fn subtree_weight(&self, start: usize, from: usize) -> f64 {
        let mut total = 0.0;
        let mut stack = vec![(start, from)];
        while let Some((n, parent)) = stack.pop() {
            for &k in &self.incident[n] {
                let e = self.edges[k].as_ref().expect("incident edges are live");
                let m = e.other(n);
                if m != parent {
                    total += e.weight;
                    stack.push((m, n));
                }
            }
        }
        total
    }

    /// Nodes of the subtree hanging from `start` away from `from`,
    /// including `start`.
    fn subtree_nodes(&self, start: usize, from: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut stack = vec![(start, from)];
        while let Some((n, parent)) = stack.pop() {
            for &k in &self.incident[n] {
                let m = self.edges[k].as_ref().expect("incident edges are live").other(n);
                if m != parent {
                    out.push(m);
                    stack.push((m, n));
                }
            }
        }
        out
    }

    pub(crate) fn delete_edge(&mut self, k: usize) -> TreeEdge {
        let e = self.edges[k].take().expect("edge is live");
        self.incident[e.u].retain(|&j| j != k);
        self.incident[e.v].retain(|&j| j != k);
        e
    }

    /// Deletes `node` with all edges hanging off it except the ones towards
    /// `keep`, recursively deleting the detached subtrees.
    pub(crate) fn delete_node_with_branches(&mut self, node: usize, keep: &[usize]) {
        let branches: Vec<usize> = self.incident[node]
            .iter()
            .map(|&k| self.edges[k].as_ref().expect("live").other(node))
            .filter(|m| !keep.contains(m))
            .collect();
        for m in branches {
            for n in self.subtree_nodes(m, node) {
                for k in self.incident[n].clone() {
                    self.delete_edge(k);
                }
                self.nodes[n] = None;
            }
        }
        for k in self.incident[node].clone() {
            self.delete_edge(k);
        }
        self.nodes[node] = None;
    }

    pub(crate) fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> usize {
        let k = self.edges.len();
        let angle = self.chord(u, v);
        self.edges.push(Some(TreeEdge { u, v, weight, angle }));
        self.incident[u].push(k);
        self.incident[v].push(k);
        k
    }

    pub(crate) fn chord(&self, u: usize, v: usize) -> f64 {
        let (a, b) = (self.node(u).expect("live"), self.node(v).expect("live"));
        chord_angle((a.x, a.y), (b.x, b.y), self.principal_axis)
    }

    pub(crate) fn node_mut(&mut self, n: usize) -> &mut TreeNode {
        self.nodes[n].as_mut().expect("node is live")
    }

    pub(crate) fn edge_mut(&mut self, k: usize) -> &mut TreeEdge {
        self.edges[k].as_mut().expect("edge is live")
    }

    pub(crate) fn take_node(&mut self, n: usize) -> TreeNode {
        self.nodes[n].take().expect("node is live")
    }

    /// Moves every edge incident to `from` onto `to`.
    pub(crate) fn reattach(&mut self, from: usize, to: usize) {
        for k in std::mem::take(&mut self.incident[from]) {
            let e = self.edges[k].as_mut().expect("live");
            if e.u == from {
                e.u = to;
            }
            if e.v == from {
                e.v = to;
            }
            self.incident[to].push(k);
        }
    }
}
