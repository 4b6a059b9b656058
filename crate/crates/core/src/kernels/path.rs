//! Kernels between individual paths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::KernelError;
use crate::paths::{EdgeAttr, Path, PathHierarchy};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathKernelConfig {
    pub sigma_vertex: f64,
    pub sigma_edge: f64,
    /// Maximum number of reductions per hierarchy.
    pub max_reductions: usize,
}

impl Default for PathKernelConfig {
    fn default() -> Self {
        Self {
            sigma_vertex: 0.1,
            sigma_edge: 0.1,
            max_reductions: 2,
        }
    }
}

impl PathKernelConfig {
    pub fn validate(&self) -> Result<(), KernelError> {
        for (name, v) in [("sigma_vertex", self.sigma_vertex), ("sigma_edge", self.sigma_edge)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(KernelError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn k_node(&self, a: f64, b: f64) -> f64 {
        let d = a - b;
        (-d * d / (2.0 * self.sigma_vertex * self.sigma_vertex)).exp()
    }

    pub fn k_edge(&self, a: &EdgeAttr, b: &EdgeAttr) -> f64 {
        let dw = a.weight - b.weight;
        let dt = angle_gap(a.angle, b.angle);
        (-(dw * dw + dt * dt) / (2.0 * self.sigma_edge * self.sigma_edge)).exp()
    }

    /// Product kernel over aligned nodes and edges; zero for paths of
    /// different lengths.
    pub fn k_classic(&self, h: &Path, g: &Path) -> f64 {
        if h.len() != g.len() {
            return 0.0;
        }
        let mut k = self.k_node(h.node_attrs[0], g.node_attrs[0]);
        for i in 0..h.len() {
            k *= self.k_edge(&h.edges[i], &g.edges[i]) * self.k_node(h.node_attrs[i + 1], g.node_attrs[i + 1]);
        }
        k
    }

    /// Mean of classic kernels over all pairs of levels of two hierarchies,
    /// divided by `D + 1`. Zero when the original lengths differ by more
    /// than `D`.
    pub fn k_edit(&self, h: &PathHierarchy, g: &PathHierarchy) -> Result<f64, KernelError> {
        if h.max_reductions != g.max_reductions {
            return Err(KernelError::MismatchedD(h.max_reductions, g.max_reductions));
        }
        let d = h.max_reductions;
        if h.original().len().abs_diff(g.original().len()) > d {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        for a in &h.levels {
            for b in &g.levels {
                if a.len() == b.len() {
                    sum += self.k_classic(a, b);
                }
            }
        }
        Ok(sum / (d + 1) as f64)
    }
}

/// Distance between two orientations in `[0, π)`, folded so that `0` and
/// `π - ε` are close.
pub fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(PI - d).max(0.0)
}

/// Squared distance induced by a kernel from its three values.
pub fn d_path2(k_hh: f64, k_gg: f64, k_hg: f64) -> f64 {
    k_hh + k_gg - 2.0 * k_hg
}

/// Which path kernel a bag kernel is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKernelKind {
    Classic,
    Edit,
}

/// A path kernel evaluated on hierarchies: the classic kernel looks only at
/// the original paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathKernel {
    pub kind: PathKernelKind,
    pub config: PathKernelConfig,
}

impl PathKernel {
    pub fn classic(config: PathKernelConfig) -> Self {
        Self {
            kind: PathKernelKind::Classic,
            config,
        }
    }

    pub fn edit(config: PathKernelConfig) -> Self {
        Self {
            kind: PathKernelKind::Edit,
            config,
        }
    }

    pub fn eval(&self, h: &PathHierarchy, g: &PathHierarchy) -> Result<f64, KernelError> {
        match self.kind {
            PathKernelKind::Classic => Ok(self.config.k_classic(h.original(), g.original())),
            PathKernelKind::Edit => self.config.k_edit(h, g),
        }
    }
}
