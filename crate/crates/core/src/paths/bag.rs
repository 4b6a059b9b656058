use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_hierarchy, Path, PathError, PathHierarchy, ReductionTree};
use crate::ingest::SpanningTree;

/// Default maximum path length (in edges).
pub const DEFAULT_MAX_LENGTH: usize = 5;

/// Every simple path of a spanning tree with between 1 and `max_length`
/// edges, in both orientations, each with its reduction hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BagOfPaths {
    pub shape_id: String,
    #[serde(default)]
    pub class: Option<String>,
    pub max_length: usize,
    pub max_reductions: usize,
    pub hierarchies: Vec<PathHierarchy>,
}

impl BagOfPaths {
    pub fn len(&self) -> usize {
        self.hierarchies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hierarchies.is_empty()
    }

    pub fn with_class(mut self, class: Option<String>) -> Self {
        self.class = class;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bags serialize")
    }
}

/// Node sequences of all simple paths with 1..=`max_length` edges, ordered
/// by start node and then depth-first by neighbour id.
pub fn enumerate_paths(tree: &SpanningTree, max_length: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for start in 0..tree.node_count() {
        let mut stack = vec![vec![start]];
        while let Some(p) = stack.pop() {
            if p.len() > 1 {
                out.push(p.clone());
            }
            if p.len() > max_length {
                continue;
            }
            let last = *p.last().expect("non-empty");
            let prev = (p.len() > 1).then(|| p[p.len() - 2]);
            // pushed in reverse so neighbours pop in ascending order
            for &(m, _) in tree.adjacent(last).iter().rev() {
                if Some(m) != prev {
                    let mut q = p.clone();
                    q.push(m);
                    stack.push(q);
                }
            }
        }
    }
    out
}

/// Builds the bag of paths of `tree` with hierarchies of up to `max_reductions`
/// reductions each. Each hierarchy is computed on its own copy of the tree.
pub fn enumerate_bag(tree: &SpanningTree, max_length: usize, max_reductions: usize) -> Result<BagOfPaths, PathError> {
    if max_length == 0 {
        return Err(PathError::InvalidParameter(
            "maximum path length must be at least 1".into(),
        ));
    }
    if tree.edges.is_empty() {
        return Err(PathError::EmptyTree);
    }
    let base = ReductionTree::from(tree);
    let hierarchies = enumerate_paths(tree, max_length)
        .into_par_iter()
        .map(|nodes| {
            let path = Path::from_tree(&base, &nodes)?;
            build_hierarchy(base.clone(), path, max_reductions)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BagOfPaths {
        shape_id: tree.shape_id.clone(),
        class: None,
        max_length,
        max_reductions,
        hierarchies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{GraphEdge, GraphNode};
    use proptest::prelude::*;

    fn tree(n: usize, edges: &[(usize, usize)]) -> SpanningTree {
        let nodes = (0..n)
            .map(|id| GraphNode {
                id,
                x: id as f64,
                y: (id * id) as f64,
                attr: id as f64 / n as f64,
            })
            .collect();
        let w = 1.0 / edges.len().max(1) as f64;
        let edges = edges
            .iter()
            .map(|&(u, v)| GraphEdge {
                u,
                v,
                weight: w,
                angle: 0.0,
                pixel_chain: Vec::new(),
            })
            .collect();
        SpanningTree::from_parts("t", nodes, edges, 0.0).unwrap()
    }

    #[test]
    fn bag_sizes_of_small_trees() {
        let chain = tree(3, &[(0, 1), (1, 2)]);
        assert_eq!(enumerate_bag(&chain, 2, 2).unwrap().len(), 6);
        let star = tree(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(enumerate_bag(&star, 2, 2).unwrap().len(), 12);
        assert_eq!(enumerate_bag(&star, 1, 2).unwrap().len(), 6);
    }

    #[test]
    fn empty_tree_is_rejected() {
        let single = tree(1, &[]);
        assert_eq!(enumerate_bag(&single, 3, 2), Err(PathError::EmptyTree));
    }

    #[test]
    fn hierarchies_do_not_leak_between_paths() {
        let star = tree(4, &[(0, 1), (0, 2), (0, 3)]);
        let bag = enumerate_bag(&star, 2, 2).unwrap();
        for h in &bag.hierarchies {
            // every original level reads the unmodified tree
            for e in &h.original().edges {
                assert!((e.weight - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bag_json_round_trips() {
        let chain = tree(3, &[(0, 1), (1, 2)]);
        let bag = enumerate_bag(&chain, 2, 2).unwrap();
        let back: BagOfPaths = serde_json::from_str(&bag.to_json()).unwrap();
        assert_eq!(back, bag);
    }

    fn count_by_brute_force(t: &SpanningTree, s: usize) -> usize {
        // ordered pairs (a, b), a != b, whose tree distance is at most s
        let n = t.node_count();
        let mut count = 0;
        for a in 0..n {
            let mut dist = vec![usize::MAX; n];
            dist[a] = 0;
            let mut queue = std::collections::VecDeque::from([a]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in t.adjacent(u) {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            count += dist.iter().filter(|&&d| d >= 1 && d <= s).count();
        }
        count
    }

    proptest! {
        #[test]
        fn bag_size_matches_brute_force(parents in proptest::collection::vec(any::<prop::sample::Index>(), 1..12), s in 1usize..6) {
            let edges: Vec<_> = parents.iter().enumerate().map(|(k, p)| (p.index(k + 1), k + 1)).collect();
            let t = tree(edges.len() + 1, &edges);
            let bag = enumerate_bag(&t, s, 2).unwrap();
            prop_assert_eq!(bag.len(), count_by_brute_force(&t, s));
            for h in &bag.hierarchies {
                prop_assert!(!h.original().is_empty() && h.original().len() <= s);
                let expected = h.original().len().min(2) + 1;
                prop_assert_eq!(h.levels.len(), expected);
            }
        }
    }
}
