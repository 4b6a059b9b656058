//! Maximum-weight spanning tree of a skeletal graph.

use serde::{Deserialize, Serialize};

use super::graph::{GraphEdge, GraphNode, SkeletalGraph};
use super::IngestError;

/// Maximum spanning tree over the nodes of a skeletal graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanningTree {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub principal_axis: f64,
    pub shape_id: String,
    /// `(neighbour, edge index)` per node, sorted by neighbour.
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Parent of each node when rooted at node 0 (`None` for the root).
    parent: Vec<Option<usize>>,
    pub total_weight: f64,
}

impl SpanningTree {
    /// Assembles a tree from nodes and edges, checking acyclicity and
    /// connectivity.
    pub fn from_parts(
        shape_id: impl Into<String>,
        nodes: Vec<GraphNode>,
        edges: Vec<GraphEdge>,
        principal_axis: f64,
    ) -> Result<Self, IngestError> {
        let n = nodes.len();
        if n == 0 {
            return Err(IngestError::BadGraph("tree without nodes".into()));
        }
        if edges.len() + 1 != n {
            return Err(IngestError::NotATree(format!("{} nodes but {} edges", n, edges.len())));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.u >= n || e.v >= n || e.u == e.v {
                return Err(IngestError::NotATree(format!("bad edge ({}, {})", e.u, e.v)));
            }
            adjacency[e.u].push((e.v, k));
            adjacency[e.v].push((e.u, k));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some(u);
                    stack.push(v);
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(IngestError::DisconnectedGraph);
        }
        let total_weight = edges.iter().map(|e| e.weight).sum();
        Ok(Self {
            nodes,
            edges,
            principal_axis,
            shape_id: shape_id.into(),
            adjacency,
            parent,
            total_weight,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    /// `(neighbour, edge index)` pairs of `node`, sorted by neighbour.
    pub fn adjacent(&self, node: usize) -> &[(usize, usize)] {
        &self.adjacency[node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub fn children(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[node]
            .iter()
            .map(|&(v, _)| v)
            .filter(move |&v| self.parent[v] == Some(node))
    }

    /// Index of the edge joining `a` and `b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency[a].iter().find(|&&(v, _)| v == b).map(|&(_, k)| k)
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Kruskal's algorithm on descending weights. Ties are broken by the
/// ordered endpoint pair, then by edge position; self-loops never enter the
/// tree.
pub fn max_spanning_tree(graph: &SkeletalGraph) -> Result<SpanningTree, IngestError> {
    let n = graph.nodes.len();
    if n == 0 {
        return Err(IngestError::DisconnectedGraph);
    }
    let mut order: Vec<usize> = (0..graph.edges.len())
        .filter(|&k| graph.edges[k].u != graph.edges[k].v)
        .collect();
    let key = |k: usize| {
        let e = &graph.edges[k];
        (e.u.min(e.v), e.u.max(e.v))
    };
    order.sort_by(|&a, &b| {
        graph.edges[b]
            .weight
            .total_cmp(&graph.edges[a].weight)
            .then(key(a).cmp(&key(b)))
            .then(a.cmp(&b))
    });
    let mut dsu: Vec<usize> = (0..n).collect();
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    for k in order {
        let e = &graph.edges[k];
        let (ru, rv) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
        if ru != rv {
            dsu[ru] = rv;
            chosen.push(k);
        }
    }
    if chosen.len() + 1 != n {
        return Err(IngestError::DisconnectedGraph);
    }
    chosen.sort_unstable();
    let edges = chosen.into_iter().map(|k| graph.edges[k].clone()).collect();
    SpanningTree::from_parts(
        graph.meta.shape_id.clone(),
        graph.nodes.clone(),
        edges,
        graph.meta.principal_axis,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::graph::GraphMeta;
    use proptest::prelude::*;

    pub(crate) fn graph(n: usize, edges: &[(usize, usize, f64)]) -> SkeletalGraph {
        SkeletalGraph {
            nodes: (0..n)
                .map(|id| GraphNode {
                    id,
                    x: id as f64,
                    y: 0.0,
                    attr: 0.0,
                })
                .collect(),
            edges: edges
                .iter()
                .map(|&(u, v, weight)| GraphEdge {
                    u,
                    v,
                    weight,
                    angle: 0.0,
                    pixel_chain: Vec::new(),
                })
                .collect(),
            meta: GraphMeta::default(),
        }
    }

    /// Maximum spanning-tree weight by enumerating every edge subset of
    /// size n - 1.
    fn brute_force_max(n: usize, edges: &[(usize, usize, f64)]) -> Option<f64> {
        let m = edges.len();
        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != n - 1 {
                continue;
            }
            let mut dsu: Vec<usize> = (0..n).collect();
            let mut ok = true;
            let mut w = 0.0;
            for (k, &(u, v, wt)) in edges.iter().enumerate() {
                if mask & (1 << k) == 0 {
                    continue;
                }
                let (a, b) = (find(&mut dsu, u), find(&mut dsu, v));
                if a == b {
                    ok = false;
                    break;
                }
                dsu[a] = b;
                w += wt;
            }
            if ok {
                best = Some(best.map_or(w, |b: f64| b.max(w)));
            }
        }
        best
    }

    #[test]
    fn tree_input_is_kept() {
        let g = graph(4, &[(0, 1, 0.2), (1, 2, 0.5), (1, 3, 0.1)]);
        let t = max_spanning_tree(&g).unwrap();
        assert_eq!(t.edges, g.edges);
    }

    #[test]
    fn triangle_keeps_heaviest_two() {
        let g = graph(3, &[(0, 1, 3.0), (1, 2, 2.0), (0, 2, 1.0)]);
        let t = max_spanning_tree(&g).unwrap();
        let mut w: Vec<f64> = t.edges.iter().map(|e| e.weight).collect();
        w.sort_by(f64::total_cmp);
        assert_eq!(w, vec![2.0, 3.0]);
        assert_eq!(t.total_weight, 5.0);
    }

    #[test]
    fn tie_break_prefers_lower_endpoints() {
        let g = graph(3, &[(1, 2, 1.0), (0, 2, 1.0), (0, 1, 1.0)]);
        let t = max_spanning_tree(&g).unwrap();
        let pairs: Vec<(usize, usize)> = t.edges.iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 2), (0, 1)]);
    }

    #[test]
    fn disconnected_rejected() {
        let g = graph(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        assert!(matches!(max_spanning_tree(&g), Err(IngestError::DisconnectedGraph)));
    }

    #[test]
    fn navigation() {
        let g = graph(4, &[(0, 1, 0.2), (1, 2, 0.5), (1, 3, 0.1)]);
        let t = max_spanning_tree(&g).unwrap();
        assert_eq!(t.parent(0), None);
        assert_eq!(t.parent(2), Some(1));
        assert_eq!(t.children(1).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(t.degree(1), 3);
        assert_eq!(t.edge_between(3, 1), Some(2));
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
        (2usize..=6).prop_flat_map(|n| {
            let tree = proptest::collection::vec((0usize..1000, 1u32..20), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 1u32..20), 0..=(8 - (n - 1)));
            (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
                let mut edges = Vec::new();
                for (i, (p, w)) in tree.into_iter().enumerate() {
                    let child = i + 1;
                    edges.push((p % child, child, w as f64 / 10.0));
                }
                for (u, v, w) in extra {
                    if u != v {
                        edges.push((u, v, w as f64 / 10.0));
                    }
                }
                (n, edges)
            })
        })
    }

    proptest! {
        #[test]
        fn matches_brute_force((n, edges) in random_graph()) {
            let t = max_spanning_tree(&graph(n, &edges)).unwrap();
            let best = brute_force_max(n, &edges).unwrap();
            prop_assert!((t.total_weight - best).abs() < 1e-9);
            prop_assert_eq!(t.edges.len(), n - 1);
        }
    }
}
