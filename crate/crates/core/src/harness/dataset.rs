//! Loading a manifest into a shared cache of bags of paths, and Gram
//! matrices over it.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DatasetManifest, HarnessError, KernelSelector, RunConfig};
use crate::ingest::{graph_from_image, load_mask, max_spanning_tree, read_graph, SkeletalGraph};
use crate::linalg::eigen_extremes;
use crate::paths::{enumerate_bag, BagOfPaths};
use crate::svm::{GramMatrix, INDEFINITE_TAG};

/// Gram matrices whose smallest eigenvalue falls below this fraction of the
/// largest are tagged as indefinite.
pub const NEGATIVE_EIGEN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedShape {
    pub shape_id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ShapeRecord {
    pub shape_id: String,
    pub class_label: String,
    pub bag: BagOfPaths,
}

/// Skeletal graph of one manifest entry; mask inputs are skeletonized.
pub fn load_graph(path: &Path, shape_id: &str, class: &str) -> Result<SkeletalGraph, HarnessError> {
    let mut graph = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        read_graph(path)?
    } else {
        let mut image = load_mask(path)?;
        image.id = shape_id.to_string();
        graph_from_image(&image.with_class(class))?
    };
    graph.meta.shape_id = shape_id.to_string();
    graph.meta.class = Some(class.to_string());
    Ok(graph)
}

/// Bag of paths of a skeletal graph's maximum spanning tree.
pub fn bag_of_graph(graph: &SkeletalGraph, cfg: &RunConfig) -> Result<BagOfPaths, HarnessError> {
    let tree = max_spanning_tree(graph)?;
    Ok(enumerate_bag(&tree, cfg.max_length, cfg.max_reductions)?.with_class(graph.meta.class.clone()))
}

/// Bags for every loadable shape of a manifest. Shapes that fail are kept
/// aside with the reason instead of aborting the run.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub shapes: Vec<ShapeRecord>,
    pub failed: Vec<FailedShape>,
}

impl Dataset {
    pub fn load(manifest: &DatasetManifest, cfg: &RunConfig) -> Self {
        let results: Vec<_> = manifest
            .entries
            .par_iter()
            .map(|e| {
                load_graph(&e.path, &e.shape_id, &e.class_label)
                    .and_then(|g| bag_of_graph(&g, cfg))
                    .map_err(|err| FailedShape {
                        shape_id: e.shape_id.clone(),
                        reason: err.to_string(),
                    })
            })
            .collect();
        let mut shapes = Vec::new();
        let mut failed = Vec::new();
        for (r, e) in results.into_iter().zip(&manifest.entries) {
            match r {
                Ok(bag) => shapes.push(ShapeRecord {
                    shape_id: e.shape_id.clone(),
                    class_label: e.class_label.clone(),
                    bag,
                }),
                Err(f) => failed.push(f),
            }
        }
        Self {
            name: manifest.name.clone(),
            shapes,
            failed,
        }
    }

    pub fn from_bags(name: impl Into<String>, shapes: Vec<ShapeRecord>) -> Self {
        Self {
            name: name.into(),
            shapes,
            failed: Vec::new(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.shapes.iter().map(|s| s.class_label.clone()).collect()
    }

    /// Gram matrix of `selector` over the loaded shapes. Shapes whose bag
    /// cannot be prepared (e.g. the one-class fit fails) are dropped and
    /// listed in the result.
    pub fn gram(&self, selector: KernelSelector, cfg: &RunConfig) -> Result<GramRun, HarnessError> {
        let kernel = cfg.bag_kernel(selector);
        let prepared: Vec<_> = self.shapes.par_iter().map(|s| kernel.prepare(&s.bag)).collect();
        let mut failed = self.failed.clone();
        let mut kept = Vec::new();
        let mut bags = Vec::new();
        for (s, p) in self.shapes.iter().zip(prepared) {
            match p {
                Ok(p) => {
                    kept.push(s);
                    bags.push(p);
                }
                Err(e) => failed.push(FailedShape {
                    shape_id: s.shape_id.clone(),
                    reason: e.to_string(),
                }),
            }
        }
        let n = bags.len();
        // upper triangle row by row; every entry is computed independently
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| kernel.eval(&bags[i], &bags[j]))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let mut values = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (off, &v) in row.iter().enumerate() {
                let j = i + off;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        let (min_eigenvalue, max_eigenvalue) = eigen_extremes(n, &values);
        let mut gram = GramMatrix::new(kept.iter().map(|s| s.shape_id.clone()).collect(), values)?;
        gram.fingerprint = cfg.fingerprint(Some(selector));
        if !kernel.kind.is_psd() || min_eigenvalue < -NEGATIVE_EIGEN_TOLERANCE * max_eigenvalue.abs() {
            gram.tags.push(INDEFINITE_TAG.to_string());
        }
        Ok(GramRun {
            selector,
            config: cfg.clone(),
            gram,
            labels: kept.iter().map(|s| s.class_label.clone()).collect(),
            min_eigenvalue,
            max_eigenvalue,
            failed,
        })
    }
}

/// A Gram matrix with the metadata written next to it.
#[derive(Debug, Clone)]
pub struct GramRun {
    pub selector: KernelSelector,
    pub config: RunConfig,
    pub gram: GramMatrix,
    pub labels: Vec<String>,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub failed: Vec<FailedShape>,
}

/// JSON document stored beside a Gram CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramSidecar {
    pub kernel: KernelSelector,
    pub fingerprint: String,
    pub config: RunConfig,
    pub size: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub tags: Vec<String>,
    pub failed_shapes: Vec<FailedShape>,
}

impl GramRun {
    pub fn sidecar(&self) -> GramSidecar {
        GramSidecar {
            kernel: self.selector,
            fingerprint: self.gram.fingerprint.clone(),
            config: self.config.clone(),
            size: self.gram.len(),
            min_eigenvalue: self.min_eigenvalue,
            max_eigenvalue: self.max_eigenvalue,
            tags: self.gram.tags.clone(),
            failed_shapes: self.failed.clone(),
        }
    }
}
