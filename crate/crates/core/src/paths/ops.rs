use serde::{Deserialize, Serialize};

use super::{Path, PathError, ReductionTree};

/// Which edit operation produced a level of a hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    NodeRemoval,
    EdgeContraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpRecord {
    pub kind: OpKind,
    /// Node index (removal) or edge index (contraction) within the path
    /// being reduced.
    pub index: usize,
    pub cost: f64,
    /// Mass that could not be redistributed (contraction of a lone edge).
    #[serde(default, skip_serializing_if = "is_zero")]
    pub dropped_weight: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// Cost of removing interior node `i` of `path`: the weight of every
/// branch leaving it off the path, each branch counting its subtree plus
/// the edge that attaches it.
pub fn node_removal_cost(tree: &ReductionTree, path: &Path, i: usize) -> Result<f64, PathError> {
    let n = path.nodes.len();
    if i == 0 || i + 1 >= n {
        return Err(PathError::NotInterior { index: i, len: n });
    }
    let node = path.nodes[i];
    if tree.degree(node) == 2 {
        return Err(PathError::DegreeTwoInTree { node });
    }
    let (prev, next) = (path.nodes[i - 1], path.nodes[i + 1]);
    let mut cost = 0.0;
    for &k in tree.incident(node) {
        let e = tree.edge(k).expect("incident edges are live");
        let m = e.other(node);
        if m != prev && m != next {
            cost += tree.subtree_weight(m, node) + e.weight;
        }
    }
    Ok(cost)
}

/// Removes interior node `i`: its off-path branches are deleted and its two
/// path edges are merged into one whose weight also absorbs `cost`, so the
/// tree keeps its total weight. The merged edge's angle is recomputed from
/// the endpoint positions.
pub fn remove_node(tree: &mut ReductionTree, path: &Path, i: usize, cost: f64) -> Result<Path, PathError> {
    let n = path.nodes.len();
    if i == 0 || i + 1 >= n {
        return Err(PathError::NotInterior { index: i, len: n });
    }
    let (prev, node, next) = (path.nodes[i - 1], path.nodes[i], path.nodes[i + 1]);
    let bad = || PathError::NotAPath(path.nodes.clone());
    let w1 = tree
        .edge(tree.edge_between(prev, node).ok_or_else(bad)?)
        .expect("live")
        .weight;
    let w2 = tree
        .edge(tree.edge_between(node, next).ok_or_else(bad)?)
        .expect("live")
        .weight;
    tree.delete_node_with_branches(node, &[prev, next]);
    tree.add_edge(prev, next, w1 + w2 + cost);
    let mut nodes = path.nodes.clone();
    nodes.remove(i);
    Path::from_tree(tree, &nodes)
}

/// Outcome of an edge contraction.
#[derive(Debug, Clone, PartialEq)]
pub struct Contraction {
    pub path: Path,
    /// Weight lost because the contracted edge had no neighbouring edge to
    /// pass its mass to.
    pub dropped_weight: f64,
}

/// Contracts path edge `i` (between nodes `i` and `i + 1`). The two
/// endpoints merge into one node at their midpoint with the mean attribute;
/// every surviving edge incident to either endpoint gains an equal share of
/// the removed weight and has its angle recomputed.
pub fn contract_edge(tree: &mut ReductionTree, path: &Path, i: usize) -> Result<Contraction, PathError> {
    if i >= path.len() {
        return Err(PathError::NoSuchEdge {
            index: i,
            len: path.len(),
        });
    }
    let (a, b) = (path.nodes[i], path.nodes[i + 1]);
    let k = tree
        .edge_between(a, b)
        .ok_or_else(|| PathError::NotAPath(path.nodes.clone()))?;
    let (keep, gone) = (a.min(b), a.max(b));
    let w = tree.delete_edge(k).weight;
    let survivors = tree.degree(a) + tree.degree(b);
    let gone_node = tree.take_node(gone);
    {
        let merged = tree.node_mut(keep);
        merged.x = 0.5 * (merged.x + gone_node.x);
        merged.y = 0.5 * (merged.y + gone_node.y);
        merged.attr = 0.5 * (merged.attr + gone_node.attr);
    }
    tree.reattach(gone, keep);
    let dropped_weight = if survivors == 0 {
        w
    } else {
        let share = w / survivors as f64;
        for &j in &tree.incident(keep).to_vec() {
            let (u, v) = {
                let e = tree.edge(j).expect("live");
                (e.u, e.v)
            };
            let angle = tree.chord(u, v);
            let e = tree.edge_mut(j);
            e.weight += share;
            e.angle = angle;
        }
        0.0
    };
    let mut nodes = path.nodes.clone();
    nodes[i] = keep;
    nodes.remove(i + 1);
    Ok(Contraction {
        path: Path::from_tree(tree, &nodes)?,
        dropped_weight,
    })
}

/// Applies the cheapest admissible operation to `path`. Node removals cost
/// their removed branch weight, contractions the contracted edge's weight;
/// ties prefer removals, then the lowest index.
pub fn reduce(tree: &mut ReductionTree, path: &Path) -> Result<(Path, OpRecord), PathError> {
    let mut best: Option<(f64, OpKind, usize)> = None;
    let mut consider = |cost: f64, kind: OpKind, index: usize| {
        if best.is_none_or(|(c, _, _)| cost < c) {
            best = Some((cost, kind, index));
        }
    };
    for i in 1..path.nodes.len().saturating_sub(1) {
        if let Ok(cost) = node_removal_cost(tree, path, i) {
            consider(cost, OpKind::NodeRemoval, i);
        }
    }
    for (i, e) in path.edges.iter().enumerate() {
        consider(e.weight, OpKind::EdgeContraction, i);
    }
    let (cost, kind, index) = best.ok_or(PathError::Irreducible(path.nodes.len()))?;
    match kind {
        OpKind::NodeRemoval => {
            let p = remove_node(tree, path, index, cost)?;
            Ok((
                p,
                OpRecord {
                    kind,
                    index,
                    cost,
                    dropped_weight: 0.0,
                },
            ))
        }
        OpKind::EdgeContraction => {
            let c = contract_edge(tree, path, index)?;
            Ok((
                c.path,
                OpRecord {
                    kind,
                    index,
                    cost,
                    dropped_weight: c.dropped_weight,
                },
            ))
        }
    }
}

/// A path and its successive reductions; `levels[0]` is the original.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathHierarchy {
    pub levels: Vec<Path>,
    pub ops: Vec<OpRecord>,
    pub max_reductions: usize,
}

impl PathHierarchy {
    pub fn original(&self) -> &Path {
        &self.levels[0]
    }

    /// The path after `j` reductions, if it exists.
    pub fn level(&self, j: usize) -> Option<&Path> {
        self.levels.get(j)
    }
}

/// Reduces `path` up to `d` times on `tree` (which the caller owns and
/// should treat as scratch). Stops early once a single node remains.
pub fn build_hierarchy(mut tree: ReductionTree, path: Path, d: usize) -> Result<PathHierarchy, PathError> {
    let mut levels = vec![path];
    let mut ops = Vec::new();
    while ops.len() < d && !levels.last().expect("non-empty").is_empty() {
        let (next, op) = reduce(&mut tree, levels.last().expect("non-empty"))?;
        levels.push(next);
        ops.push(op);
    }
    Ok(PathHierarchy {
        levels,
        ops,
        max_reductions: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path(tree: &ReductionTree, nodes: &[usize]) -> Path {
        Path::from_tree(tree, nodes).unwrap()
    }

    /// Path 0-1-2 where node 1 carries a two-edge branch 1-3-4 and node 2 a
    /// single edge 2-5.
    fn branched() -> ReductionTree {
        ReductionTree::from_edges(
            &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            &[(0, 1, 0.2), (1, 2, 0.1), (1, 3, 0.2), (3, 4, 0.1), (2, 5, 0.2)],
        )
    }

    #[test]
    fn removal_cost_sums_subtrees_and_attaching_edges() {
        let t = branched();
        let p = path(&t, &[0, 1, 2]);
        // branch 1-3 (0.2) plus the subtree below 3 (0.1)
        assert!((node_removal_cost(&t, &p, 1).unwrap() - 0.3).abs() < 1e-15);

        // a node with two off-path branches of total weight 0.3 and 0.2
        let t = ReductionTree::from_edges(
            &[0.0; 6],
            &[(0, 1, 0.1), (1, 2, 0.1), (1, 3, 0.3), (1, 4, 0.1), (4, 5, 0.1)],
        );
        let p = path(&t, &[0, 1, 2]);
        assert!((node_removal_cost(&t, &p, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn removal_rejects_endpoints_and_degree_two_nodes() {
        let t = ReductionTree::from_edges(&[0.0; 3], &[(0, 1, 0.5), (1, 2, 0.5)]);
        let p = path(&t, &[0, 1, 2]);
        assert_eq!(
            node_removal_cost(&t, &p, 0),
            Err(PathError::NotInterior { index: 0, len: 3 })
        );
        assert_eq!(
            node_removal_cost(&t, &p, 2),
            Err(PathError::NotInterior { index: 2, len: 3 })
        );
        assert_eq!(
            node_removal_cost(&t, &p, 1),
            Err(PathError::DegreeTwoInTree { node: 1 })
        );
    }

    #[test]
    fn remove_node_merges_edges_and_keeps_total_weight() {
        let mut t = branched();
        let total = t.total_weight();
        let p = path(&t, &[0, 1, 2]);
        let cost = node_removal_cost(&t, &p, 1).unwrap();
        let q = remove_node(&mut t, &p, 1, cost).unwrap();
        assert_eq!(q.nodes, vec![0, 2]);
        assert!((q.edges[0].weight - (0.2 + 0.1 + 0.3)).abs() < 1e-15);
        assert!((t.total_weight() - total).abs() < 1e-15);
        assert!(t.node(3).is_none() && t.node(4).is_none());
    }

    #[test]
    fn contraction_shares_weight_over_surviving_edges() {
        // a has degree 2, b has degree 3: the contracted 0.5 spreads over 3 edges
        let mut t = ReductionTree::from_edges(
            &[0.2, 0.4, 0.6, 0.0, 0.0, 0.0],
            &[(0, 1, 0.1), (1, 2, 0.5), (2, 3, 0.1), (2, 4, 0.1), (4, 5, 0.2)],
        );
        let total = t.total_weight();
        let p = path(&t, &[0, 1, 2, 3]);
        let c = contract_edge(&mut t, &p, 1).unwrap();
        assert_eq!(c.path.nodes, vec![0, 1, 3]);
        assert_eq!(c.dropped_weight, 0.0);
        let inc = 0.5 / 3.0;
        assert!((c.path.edges[0].weight - (0.1 + inc)).abs() < 1e-12);
        assert!((c.path.edges[1].weight - (0.1 + inc)).abs() < 1e-12);
        let k = t.edge_between(1, 4).unwrap();
        assert!((t.edge(k).unwrap().weight - (0.1 + inc)).abs() < 1e-12);
        assert!((t.total_weight() - total).abs() < 1e-12);
        let m = t.node(1).unwrap();
        assert!((m.attr - 0.5).abs() < 1e-15 && (m.x - 1.5).abs() < 1e-15);
    }

    #[test]
    fn contracting_a_lone_edge_drops_its_mass() {
        let mut t = ReductionTree::from_edges(&[0.0, 1.0], &[(0, 1, 1.0)]);
        let p = path(&t, &[0, 1]);
        let c = contract_edge(&mut t, &p, 0).unwrap();
        assert!(c.path.is_empty());
        assert_eq!(c.dropped_weight, 1.0);
    }

    #[test]
    fn reduce_prefers_removal_on_ties() {
        let t0 = ReductionTree::from_edges(&[0.0; 4], &[(0, 1, 0.3), (1, 2, 0.3), (1, 3, 0.3)]);
        let p = path(&t0, &[0, 1, 2]);
        let mut t = t0.clone();
        let (q, op) = reduce(&mut t, &p).unwrap();
        assert_eq!(op.kind, OpKind::NodeRemoval);
        assert_eq!(q.nodes, vec![0, 2]);

        // with no removable node, the lightest edge goes; ties take index 0
        let t0 = ReductionTree::from_edges(&[0.0; 3], &[(0, 1, 0.4), (1, 2, 0.4)]);
        let mut t = t0.clone();
        let (_, op) = reduce(&mut t, &path(&t0, &[0, 1, 2])).unwrap();
        assert_eq!((op.kind, op.index), (OpKind::EdgeContraction, 0));
    }

    #[test]
    fn reduce_of_single_node_is_irreducible() {
        let mut t = ReductionTree::from_edges(&[0.0, 0.0], &[(0, 1, 1.0)]);
        let p = path(&t, &[0]);
        assert_eq!(reduce(&mut t, &p).unwrap_err(), PathError::Irreducible(1));
    }

    #[test]
    fn hierarchy_of_five_edge_path() {
        let edges: Vec<_> = (0..5).map(|k| (k, k + 1, 0.1 + 0.01 * k as f64)).collect();
        let t = ReductionTree::from_edges(&[0.0; 6], &edges);
        let h = build_hierarchy(t.clone(), path(&t, &[0, 1, 2, 3, 4, 5]), 2).unwrap();
        let lens: Vec<_> = h.levels.iter().map(Path::len).collect();
        assert_eq!(lens, vec![5, 4, 3]);
        assert_eq!(h.ops.len(), 2);

        let h = build_hierarchy(t.clone(), path(&t, &[2, 3]), 3).unwrap();
        let lens: Vec<_> = h.levels.iter().map(Path::len).collect();
        assert_eq!(lens, vec![1, 0]);
    }

    /// Random tree on `n` nodes: node `k > 0` hangs from a random earlier
    /// node.
    fn random_tree() -> impl Strategy<Value = ReductionTree> {
        (2usize..14)
            .prop_flat_map(|n| {
                (
                    proptest::collection::vec(any::<prop::sample::Index>(), n - 1),
                    proptest::collection::vec(0.001f64..1.0, n - 1),
                    proptest::collection::vec((0.0f64..1.0, -50.0f64..50.0, -50.0f64..50.0), n),
                )
            })
            .prop_map(|(parents, weights, nodes)| {
                let edges: Vec<_> = parents
                    .iter()
                    .zip(&weights)
                    .enumerate()
                    .map(|(k, (p, &w))| (p.index(k + 1), k + 1, w))
                    .collect();
                let attrs: Vec<_> = nodes.iter().map(|n| n.0).collect();
                let pos: Vec<_> = nodes.iter().map(|n| (n.1, n.2)).collect();
                ReductionTree::with_positions(&attrs, &pos, &edges, 0.3)
            })
    }

    fn path_between(t: &ReductionTree, a: usize, b: usize) -> Vec<usize> {
        // DFS from a recording parents
        let mut parent = vec![usize::MAX; t.live_nodes().max().unwrap() + 1];
        let mut stack = vec![a];
        parent[a] = a;
        while let Some(n) = stack.pop() {
            for &k in t.incident(n) {
                let m = t.edge(k).unwrap().other(n);
                if parent[m] == usize::MAX {
                    parent[m] = n;
                    stack.push(m);
                }
            }
        }
        let mut out = vec![b];
        while *out.last().unwrap() != a {
            out.push(parent[*out.last().unwrap()]);
        }
        out.reverse();
        out
    }

    proptest! {
        #[test]
        fn contractions_conserve_weight(t in random_tree(), picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..20)) {
            let mut t = t;
            let total = t.total_weight();
            let mut dropped = 0.0;
            for pick in picks {
                let live: Vec<usize> = t.live_nodes().collect();
                if live.len() < 2 {
                    break;
                }
                let a = live[pick.index(live.len())];
                let k = t.incident(a)[0];
                let b = t.edge(k).unwrap().other(a);
                let p = Path::from_tree(&t, &[a, b]).unwrap();
                dropped += contract_edge(&mut t, &p, 0).unwrap().dropped_weight;
            }
            prop_assert!((t.total_weight() + dropped - total).abs() <= 1e-12 * total);
        }

        #[test]
        fn reduce_picks_a_minimal_cost_operation(t in random_tree(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
            let n = t.live_nodes().count();
            let (a, b) = (a.index(n), b.index(n));
            prop_assume!(a != b);
            let p = Path::from_tree(&t, &path_between(&t, a, b)).unwrap();
            let total = t.total_weight();
            let mut all_costs: Vec<f64> = p.edges.iter().map(|e| e.weight).collect();
            for i in 1..p.nodes.len() - 1 {
                if let Ok(c) = node_removal_cost(&t, &p, i) {
                    all_costs.push(c);
                }
            }
            let min = all_costs.iter().copied().fold(f64::INFINITY, f64::min);
            let mut work = t.clone();
            let (q, op) = reduce(&mut work, &p).unwrap();
            prop_assert_eq!(op.cost, min);
            prop_assert_eq!(q.len() + 1, p.len());
            prop_assert!((work.total_weight() + op.dropped_weight - total).abs() <= 1e-12 * total);
            // the reduced path is still a chain of live tree edges
            prop_assert!(Path::from_tree(&work, &q.nodes).is_ok());
        }
    }
}
