//! Kernels between paths and between bags of paths.

pub mod bag;
pub mod path;

use thiserror::Error;

pub use path::{angle_gap, d_path2, PathKernel, PathKernelConfig, PathKernelKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("hierarchies built with different reduction depths ({0} vs {1})")]
    MismatchedD(usize, usize),
    #[error("path {index} has a zero self-kernel")]
    ZeroSelfKernel { index: usize },
    #[error("bag of paths is empty")]
    EmptyBag,
    #[error("one-class model has a zero-norm mean vector")]
    DegenerateModel,
    #[error("both one-class arcs are degenerate")]
    ZeroDenominator,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Svm(#[from] crate::svm::SvmError),
}
