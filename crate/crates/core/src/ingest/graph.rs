//! Skeletal graphs: end points and junctions of the skeleton joined by
//! skeleton branches.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::image::{fold_axis_angle, Point, ShapeImage};
use super::skeleton::Skeleton;
use super::IngestError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Distance to the gravity centre, scaled to `[0, 1]`.
    pub attr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    /// Share of the shape boundary that generated this branch.
    pub weight: f64,
    /// Chord orientation relative to the principal axis, in `[0, π)`.
    pub angle: f64,
    /// Skeleton pixels of the branch, endpoints included. Empty for graphs
    /// read from interchange files.
    #[serde(skip)]
    pub pixel_chain: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GraphMeta {
    pub shape_id: String,
    #[serde(default)]
    pub class: Option<String>,
    /// Orientation of the shape's principal axis in `[0, π)`.
    #[serde(default)]
    pub principal_axis: f64,
    /// Set when the skeleton collapsed to a single pixel.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

/// Attributed skeletal graph of one shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletalGraph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub meta: GraphMeta,
}

impl SkeletalGraph {
    /// Node indices adjacent to `node`, one entry per incident edge.
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.u == node {
                    Some(e.v)
                } else if e.v == node {
                    Some(e.u)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Number of incident edge ends; a self-loop counts twice.
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == node) as usize + (e.v == node) as usize)
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for m in self.neighbors(n) {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Number of independent cycles, `|E| - |V| + 1` for a connected graph.
    pub fn cycle_rank(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.nodes.len())
    }

    /// Checks ids and endpoints after deserialization.
    pub fn validate(&self) -> Result<(), IngestError> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.id != i {
                return Err(IngestError::BadGraph(format!("node {i} has id {}", n.id)));
            }
            if !(n.x.is_finite() && n.y.is_finite() && n.attr.is_finite()) {
                return Err(IngestError::BadGraph(format!("node {i} has non-finite fields")));
            }
        }
        for e in &self.edges {
            if e.u >= self.nodes.len() || e.v >= self.nodes.len() {
                return Err(IngestError::BadGraph(format!("edge ({}, {}) out of range", e.u, e.v)));
            }
            if !(e.weight.is_finite() && e.weight >= 0.0 && e.angle.is_finite()) {
                return Err(IngestError::BadGraph(format!(
                    "edge ({}, {}) has bad attributes",
                    e.u, e.v
                )));
            }
        }
        Ok(())
    }
}

/// Orientation of the chord between two points relative to `axis`.
pub fn chord_angle(a: (f64, f64), b: (f64, f64), axis: f64) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    fold_axis_angle(dy.atan2(dx) - axis)
}

/// Builds the skeletal graph. A skeleton of a single pixel yields a
/// one-node graph with no edges and `meta.degenerate` set.
pub fn build_graph(skeleton: &Skeleton, image: &ShapeImage) -> Result<SkeletalGraph, IngestError> {
    if skeleton.is_empty() {
        return Err(IngestError::EmptySkeleton);
    }
    let n = skeleton.len();
    let degree: Vec<usize> = (0..n).map(|i| skeleton.neighbors(i).len()).collect();

    // node id per skeleton pixel; junction pixels are grouped by
    // 8-connectivity into one node
    let mut node_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if degree[i] == 2 || node_of[i] != usize::MAX {
            continue;
        }
        let id = members.len();
        node_of[i] = id;
        let mut group = vec![i];
        if degree[i] >= 3 {
            let mut stack = vec![i];
            while let Some(p) = stack.pop() {
                for q in skeleton.neighbors(p) {
                    if degree[q] >= 3 && node_of[q] == usize::MAX {
                        node_of[q] = id;
                        group.push(q);
                        stack.push(q);
                    }
                }
            }
        }
        group.sort_unstable();
        members.push(group);
    }
    // closed loops without any end or junction get a node at their first pixel
    let mut covered = vec![false; n];
    for i in 0..n {
        if covered[i] {
            continue;
        }
        let mut component = vec![i];
        covered[i] = true;
        let mut k = 0;
        while k < component.len() {
            for q in skeleton.neighbors(component[k]) {
                if !covered[q] {
                    covered[q] = true;
                    component.push(q);
                }
            }
            k += 1;
        }
        if component.iter().all(|&p| node_of[p] == usize::MAX) {
            let first = *component.iter().min().unwrap();
            node_of[first] = members.len();
            members.push(vec![first]);
        }
    }

    // trace branches
    let mut interior_used = vec![false; n];
    let mut direct_pairs = std::collections::BTreeSet::new();
    let mut branches: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for (id, group) in members.iter().enumerate() {
        for &start in group {
            for q in skeleton.neighbors(start) {
                if node_of[q] != usize::MAX {
                    let other = node_of[q];
                    if other != id {
                        let key = (id.min(other), id.max(other));
                        if direct_pairs.insert(key) {
                            branches.push((id, other, vec![start, q]));
                        }
                    }
                    continue;
                }
                if interior_used[q] {
                    continue;
                }
                let mut chain = vec![start, q];
                interior_used[q] = true;
                let mut prev = start;
                let mut cur = q;
                let end = loop {
                    let next = skeleton
                        .neighbors(cur)
                        .into_iter()
                        .find(|&r| r != prev && !(node_of[r] == usize::MAX && interior_used[r]));
                    let Some(next) = next else {
                        // walked back onto our own start through a loop
                        break id;
                    };
                    chain.push(next);
                    if node_of[next] != usize::MAX {
                        break node_of[next];
                    }
                    interior_used[next] = true;
                    prev = cur;
                    cur = next;
                };
                branches.push((id, end, chain));
            }
        }
    }

    // node positions: member pixel closest to the group's centroid
    let positions: Vec<Point> = members
        .iter()
        .map(|group| {
            let cx = group.iter().map(|&p| skeleton.pixels[p].x as f64).sum::<f64>() / group.len() as f64;
            let cy = group.iter().map(|&p| skeleton.pixels[p].y as f64).sum::<f64>() / group.len() as f64;
            let mut best = group[0];
            let mut best_d = f64::INFINITY;
            for &p in group {
                let pt = skeleton.pixels[p];
                let d = (pt.x as f64 - cx).powi(2) + (pt.y as f64 - cy).powi(2);
                if d < best_d {
                    best_d = d;
                    best = p;
                }
            }
            skeleton.pixels[best]
        })
        .collect();

    let (gx, gy) = image.gravity_center();
    let max_dist = image
        .foreground()
        .map(|p| ((p.x as f64 - gx).powi(2) + (p.y as f64 - gy).powi(2)).sqrt())
        .fold(0.0, f64::max);
    let nodes: Vec<GraphNode> = positions
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let d = ((p.x as f64 - gx).powi(2) + (p.y as f64 - gy).powi(2)).sqrt();
            GraphNode {
                id,
                x: p.x as f64,
                y: p.y as f64,
                attr: if max_dist > 0.0 { d / max_dist } else { 0.0 },
            }
        })
        .collect();

    // boundary mass of node pixels is shared equally by the incident branches
    let mut node_degree = vec![0usize; members.len()];
    for (u, v, _) in &branches {
        node_degree[*u] += 1;
        node_degree[*v] += 1;
    }
    let node_mass: Vec<f64> = members
        .iter()
        .map(|g| g.iter().map(|&p| skeleton.boundary_contribution[p] as f64).sum())
        .collect();
    let total = skeleton.boundary_total.max(1) as f64;
    let axis = image.principal_axis();
    let edges = branches
        .into_iter()
        .map(|(u, v, chain)| {
            let interior: f64 = chain
                .iter()
                .filter(|&&p| node_of[p] == usize::MAX)
                .map(|&p| skeleton.boundary_contribution[p] as f64)
                .sum();
            let ends = node_mass[u] / node_degree[u] as f64 + node_mass[v] / node_degree[v] as f64;
            let (a, b) = (&nodes[u], &nodes[v]);
            GraphEdge {
                u,
                v,
                weight: (interior + ends) / total,
                angle: chord_angle((a.x, a.y), (b.x, b.y), axis),
                pixel_chain: chain.into_iter().map(|p| skeleton.pixels[p]).collect(),
            }
        })
        .collect::<Vec<_>>();

    Ok(SkeletalGraph {
        meta: GraphMeta {
            shape_id: image.id.clone(),
            class: image.class_label.clone(),
            principal_axis: axis,
            degenerate: edges.is_empty(),
        },
        nodes,
        edges,
    })
}

/// Skeletonizes a shape and builds its graph.
pub fn graph_from_image(image: &ShapeImage) -> Result<SkeletalGraph, IngestError> {
    let skeleton = super::skeleton::skeletonize(image);
    build_graph(&skeleton, image)
}

/// Edge multiplicities keyed by unordered node pair; handy in tests.
pub fn edge_pairs(graph: &SkeletalGraph) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for e in &graph.edges {
        *out.entry((e.u.min(e.v), e.u.max(e.v))).or_insert(0) += 1;
    }
    out
}
