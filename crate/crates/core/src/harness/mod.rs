//! Experiment harness: manifests, cached bags, Gram matrices, retrieval and
//! classification runs.

mod classification;
mod config;
mod dataset;
pub mod io;
mod manifest;
mod retrieval;

use thiserror::Error;

pub use classification::{run_classification, training_set, ClassResult, ClassificationReport};
pub use config::{KernelSelector, RunConfig};
pub use dataset::{
    bag_of_graph, load_graph, Dataset, FailedShape, GramRun, GramSidecar, ShapeRecord, NEGATIVE_EIGEN_TOLERANCE,
};
pub use manifest::{DatasetManifest, ManifestEntry};
pub use retrieval::{good_matches, kernel_distance, run_retrieval, ClassMean, RetrievalReport, ShapeMatches};

use crate::ingest::IngestError;
use crate::kernels::KernelError;
use crate::paths::PathError;
use crate::svm::SvmError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Paths(#[from] PathError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Svm(#[from] SvmError),
}
