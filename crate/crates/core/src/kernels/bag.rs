//! Kernels between bags of paths. Every quantity here is built on the
//! normalized path kernel `k(h,h') / √(k(h,h) k(h',h'))`, which puts each
//! path on the unit sphere of the feature space.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{KernelError, PathKernel};
use crate::paths::{BagOfPaths, PathHierarchy};
use crate::svm::{fit_one_class, OneClassModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BagKernelConfig {
    pub nu: f64,
    pub sigma_change: f64,
    pub sigma_matching: f64,
}

impl Default for BagKernelConfig {
    fn default() -> Self {
        Self {
            nu: 0.9,
            sigma_change: 0.3,
            sigma_matching: 1.0,
        }
    }
}

impl BagKernelConfig {
    pub fn validate(&self) -> Result<(), KernelError> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(KernelError::InvalidParameter(format!(
                "nu must lie in (0, 1], got {}",
                self.nu
            )));
        }
        for (name, v) in [
            ("sigma_change", self.sigma_change),
            ("sigma_matching", self.sigma_matching),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(KernelError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `k_ij / √(k_ii k_jj)`.
pub fn normalize(k_ij: f64, k_ii: f64, k_jj: f64) -> Option<f64> {
    (k_ii > 0.0 && k_jj > 0.0).then(|| k_ij / (k_ii * k_jj).sqrt())
}

/// Total order on hierarchies by their attribute values, used to put every
/// bag in a canonical order.
fn compare_hierarchies(a: &PathHierarchy, b: &PathHierarchy) -> Ordering {
    let key = |h: &PathHierarchy| -> Vec<f64> {
        h.levels
            .iter()
            .flat_map(|p| {
                std::iter::once(p.len() as f64)
                    .chain(p.node_attrs.iter().copied())
                    .chain(p.edges.iter().flat_map(|e| [e.weight, e.angle]))
            })
            .collect()
    };
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(&kb) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    ka.len().cmp(&kb.len())
}

/// A bag with its paths in canonical order, their self-kernels and,
/// optionally, the normalized within-bag Gram and one-class model.
#[derive(Debug, Clone)]
pub struct PreparedBag {
    pub shape_id: String,
    pub paths: Vec<PathHierarchy>,
    pub self_kernel: Vec<f64>,
    pub gram: Option<Vec<f64>>,
    pub model: Option<OneClassModel>,
}

impl PreparedBag {
    /// Prepares `bag` for kernel `path`; with `nu` set, also fits the
    /// one-class model on its normalized Gram.
    pub fn new(bag: &BagOfPaths, path: &PathKernel, nu: Option<f64>) -> Result<Self, KernelError> {
        if bag.is_empty() {
            return Err(KernelError::EmptyBag);
        }
        let mut paths = bag.hierarchies.clone();
        paths.sort_by(compare_hierarchies);
        let self_kernel = paths.iter().map(|h| path.eval(h, h)).collect::<Result<Vec<_>, _>>()?;
        if let Some(index) = self_kernel.iter().position(|&k| k <= 0.0) {
            return Err(KernelError::ZeroSelfKernel { index });
        }
        let mut prepared = Self {
            shape_id: bag.shape_id.clone(),
            paths,
            self_kernel,
            gram: None,
            model: None,
        };
        if let Some(nu) = nu {
            let n = prepared.len();
            let gram = cross_gram(&prepared, &prepared, path)?;
            let model = fit_one_class(n, &gram, nu)?;
            prepared.gram = Some(gram);
            prepared.model = Some(model);
        }
        Ok(prepared)
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    fn model(&self) -> Result<&OneClassModel, KernelError> {
        self.model.as_ref().ok_or_else(|| {
            KernelError::InvalidParameter(format!("bag {} was prepared without a one-class model", self.shape_id))
        })
    }
}

/// Normalized path kernel between every path of `a` (rows) and of `b`
/// (columns), row-major.
pub fn cross_gram(a: &PreparedBag, b: &PreparedBag, path: &PathKernel) -> Result<Vec<f64>, KernelError> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for (i, h) in a.paths.iter().enumerate() {
        for (j, g) in b.paths.iter().enumerate() {
            let k = path.eval(h, g)?;
            out.push(normalize(k, a.self_kernel[i], b.self_kernel[j]).ok_or(KernelError::ZeroSelfKernel { index: i })?);
        }
    }
    Ok(out)
}

/// Symmetrized mean of best matches. Not positive definite in general.
pub fn k_max(rows: usize, cols: usize, cross: &[f64]) -> Result<f64, KernelError> {
    if rows == 0 || cols == 0 {
        return Err(KernelError::EmptyBag);
    }
    let row_best: f64 = (0..rows)
        .map(|i| {
            cross[i * cols..(i + 1) * cols]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum::<f64>()
        / rows as f64;
    let col_best: f64 = (0..cols)
        .map(|j| (0..rows).map(|i| cross[i * cols + j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / cols as f64;
    Ok(0.5 * (row_best + col_best))
}

/// Mean of `exp(-d²/(2σ²))` over all path pairs, with `d² = 2 - 2k` for
/// the normalized kernel `k`.
pub fn k_matching(rows: usize, cols: usize, cross: &[f64], sigma: f64) -> Result<f64, KernelError> {
    if rows == 0 || cols == 0 {
        return Err(KernelError::EmptyBag);
    }
    let s2 = 2.0 * sigma * sigma;
    let sum: f64 = cross.iter().map(|&k| (-(2.0 - 2.0 * k) / s2).exp()).sum();
    Ok(sum / (rows * cols) as f64)
}

/// `α1ᵀ K12 α2`.
fn alpha_product(cross: &[f64], a1: &[f64], a2: &[f64]) -> f64 {
    let cols = a2.len();
    a1.iter()
        .enumerate()
        .map(|(i, x)| {
            x * cross[i * cols..(i + 1) * cols]
                .iter()
                .zip(a2)
                .map(|(k, y)| k * y)
                .sum::<f64>()
        })
        .sum()
}

/// Cosines this close to ±1 are snapped to ±1; `arccos` amplifies rounding
/// there by a square root.
pub const COS_SNAP: f64 = 1e-12;

/// Cosine of the angle between the two one-class mean vectors, clamped to
/// `[-1, 1]`.
pub fn mean_vector_cos(cross: &[f64], m1: &OneClassModel, m2: &OneClassModel) -> Result<f64, KernelError> {
    if m1.norm_w <= 0.0 || m2.norm_w <= 0.0 {
        return Err(KernelError::DegenerateModel);
    }
    let cos = alpha_product(cross, &m1.alpha, &m2.alpha) / (m1.norm_w * m2.norm_w);
    Ok(if cos.abs() > 1.0 - COS_SNAP { cos.signum() } else { cos })
}

/// Geodesic distance on the unit sphere between the mean directions.
pub fn d_change(cos: f64) -> f64 {
    cos.clamp(-1.0, 1.0).acos()
}

pub fn k_change(d_change: f64, sigma: f64) -> f64 {
    (-d_change * d_change / (2.0 * sigma * sigma)).exp()
}

/// Angle between the mean vectors relative to the two support arcs.
pub fn d_desobry(cos: f64, m1: &OneClassModel, m2: &OneClassModel) -> Result<f64, KernelError> {
    let arc = |m: &OneClassModel| {
        let r = m.rho / m.norm_w;
        if r >= 1.0 - 1e-12 {
            0.0
        } else {
            r.clamp(-1.0, 1.0).acos()
        }
    };
    let den = arc(m1) + arc(m2);
    if den <= 0.0 {
        return Err(KernelError::ZeroDenominator);
    }
    Ok(d_change(cos) / den)
}

/// `ρ1 ρ2 α1ᵀ K12 α2`.
pub fn k_suard(cross: &[f64], m1: &OneClassModel, m2: &OneClassModel) -> f64 {
    m1.rho * m2.rho * alpha_product(cross, &m1.alpha, &m2.alpha)
}

/// Bag kernel selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BagKernelKind {
    Max,
    Matching,
    Change,
    Suard,
}

impl BagKernelKind {
    /// Whether bags must carry a one-class model.
    pub fn needs_model(self) -> bool {
        matches!(self, Self::Change | Self::Suard)
    }

    /// Whether Gram matrices of this kernel are positive semi-definite in
    /// general.
    pub fn is_psd(self) -> bool {
        !matches!(self, Self::Max)
    }
}

/// A bag kernel on top of a path kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BagKernel {
    pub kind: BagKernelKind,
    pub path: PathKernel,
    pub config: BagKernelConfig,
}

impl BagKernel {
    pub fn prepare(&self, bag: &BagOfPaths) -> Result<PreparedBag, KernelError> {
        PreparedBag::new(bag, &self.path, self.kind.needs_model().then_some(self.config.nu))
    }

    pub fn eval(&self, a: &PreparedBag, b: &PreparedBag) -> Result<f64, KernelError> {
        let cross = cross_gram(a, b, &self.path)?;
        let (r, c) = (a.len(), b.len());
        match self.kind {
            BagKernelKind::Max => k_max(r, c, &cross),
            BagKernelKind::Matching => k_matching(r, c, &cross, self.config.sigma_matching),
            BagKernelKind::Change => {
                let cos = mean_vector_cos(&cross, a.model()?, b.model()?)?;
                Ok(k_change(d_change(cos), self.config.sigma_change))
            }
            BagKernelKind::Suard => Ok(k_suard(&cross, a.model()?, b.model()?)),
        }
    }

    /// Angle between the one-class mean vectors of two bags.
    pub fn d_change(&self, a: &PreparedBag, b: &PreparedBag) -> Result<f64, KernelError> {
        let cross = cross_gram(a, b, &self.path)?;
        Ok(d_change(mean_vector_cos(&cross, a.model()?, b.model()?)?))
    }

    pub fn d_desobry(&self, a: &PreparedBag, b: &PreparedBag) -> Result<f64, KernelError> {
        let cross = cross_gram(a, b, &self.path)?;
        let (m1, m2) = (a.model()?, b.model()?);
        d_desobry(mean_vector_cos(&cross, m1, m2)?, m1, m2)
    }
}

#[cfg(test)]
mod tests;
