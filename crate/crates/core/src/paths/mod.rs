//! Bags of skeletal paths and their edit-operation hierarchies.
//!
//! A path of the spanning tree is simplified by two operations: removing an
//! interior node together with every branch hanging off it, and contracting
//! an edge. Repeatedly applying the cheapest one yields a hierarchy of
//! successively coarser paths.

mod bag;
mod ops;
mod tree;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bag::{enumerate_bag, BagOfPaths, DEFAULT_MAX_LENGTH};
pub use ops::{
    build_hierarchy, contract_edge, node_removal_cost, reduce, remove_node, Contraction, OpKind, OpRecord,
    PathHierarchy,
};
pub use tree::{ReductionTree, TreeEdge, TreeNode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("spanning tree has no edges")]
    EmptyTree,
    #[error("node index {index} is not interior to a path of {len} nodes")]
    NotInterior { index: usize, len: usize },
    #[error("node {node} has degree 2 in the tree; removal is not an admissible reduction")]
    DegreeTwoInTree { node: usize },
    #[error("edge index {index} is out of range for a path with {len} edges")]
    NoSuchEdge { index: usize, len: usize },
    #[error("path of {0} nodes has no admissible reduction")]
    Irreducible(usize),
    #[error("path visits nodes {0:?} that are not a chain of live tree edges")]
    NotAPath(Vec<usize>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Edge attributes carried by a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeAttr {
    pub weight: f64,
    pub angle: f64,
}

/// Snapshot of a path: its node ids and the attributes read off the tree at
/// the time it was taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub node_attrs: Vec<f64>,
    pub edges: Vec<EdgeAttr>,
}

impl Path {
    /// Reads the path `nodes` off `tree`.
    pub fn from_tree(tree: &ReductionTree, nodes: &[usize]) -> Result<Self, PathError> {
        let bad = || PathError::NotAPath(nodes.to_vec());
        if nodes.is_empty() {
            return Err(bad());
        }
        let node_attrs = nodes
            .iter()
            .map(|&n| tree.node(n).map(|v| v.attr).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()?;
        let edges = nodes
            .windows(2)
            .map(|w| {
                let k = tree.edge_between(w[0], w[1]).ok_or_else(bad)?;
                let e = tree.edge(k).expect("edge_between returns live edges");
                Ok(EdgeAttr {
                    weight: e.weight,
                    angle: e.angle,
                })
            })
            .collect::<Result<Vec<_>, PathError>>()?;
        Ok(Self {
            nodes: nodes.to_vec(),
            node_attrs,
            edges,
        })
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    /// True for a single-node path.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> Self {
        let mut p = self.clone();
        p.nodes.reverse();
        p.node_attrs.reverse();
        p.edges.reverse();
        p
    }
}
