//! Hierarchical bag-of-paths kernels for skeleton-based shape
//! classification.
//!
//! The pipeline turns a binary shape mask into an attributed skeletal graph
//! ([`ingest`]), takes its maximum spanning tree, enumerates every path of
//! bounded length together with a hierarchy of successive reductions
//! ([`paths`]), compares paths and bags of paths with a family of kernels
//! ([`kernels`]), and feeds the resulting Gram matrices to one-class and
//! binary SVMs ([`svm`]). The [`harness`] module drives retrieval and
//! classification experiments over a dataset manifest.

pub mod harness;
pub mod ingest;
pub mod kernels;
pub mod linalg;
pub mod paths;
pub mod svm;
pub mod synth;
