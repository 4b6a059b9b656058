//! From binary masks to attributed skeletal trees.

use std::fs;
use std::path::Path;

use thiserror::Error;

pub mod graph;
pub mod image;
pub mod skeleton;
pub mod tree;

pub use graph::{build_graph, graph_from_image, GraphEdge, GraphMeta, GraphNode, SkeletalGraph};
pub use image::{load_mask, Point, ShapeImage};
pub use skeleton::{skeletonize, skeletonize_with, Skeleton, SkeletonParams};
pub use tree::{max_spanning_tree, SpanningTree};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {reason}")]
    UnreadableFile { path: String, reason: String },
    #[error("mask has {0} separate foreground components")]
    MultipleComponents(usize),
    #[error("mask has no foreground pixel")]
    EmptyMask,
    #[error("mask is {width}x{height}, need at least 3x3")]
    TooSmall { width: usize, height: usize },
    #[error("mask has {actual} pixels, expected {expected}")]
    MaskSize { expected: usize, actual: usize },
    #[error("skeleton is empty")]
    EmptySkeleton,
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("invalid graph: {0}")]
    BadGraph(String),
}

/// Reads a graph interchange document.
pub fn read_graph(path: &Path) -> Result<SkeletalGraph, IngestError> {
    let text = fs::read_to_string(path).map_err(|e| IngestError::UnreadableFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let graph: SkeletalGraph = serde_json::from_str(&text).map_err(|e| IngestError::UnreadableFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    graph.validate()?;
    Ok(graph)
}

/// Writes a graph interchange document.
pub fn write_graph(path: &Path, graph: &SkeletalGraph) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(graph).map_err(std::io::Error::other)?;
    fs::write(path, text + "\n")
}

/// Loads a shape from either a mask image or a graph JSON document and
/// returns its spanning tree.
pub fn load_tree(path: &Path, class: Option<&str>) -> Result<SpanningTree, IngestError> {
    let graph = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_graph(path)?
    } else {
        let mut image = load_mask(path)?;
        image.class_label = class.map(str::to_string);
        graph_from_image(&image)?
    };
    max_spanning_tree(&graph)
}
