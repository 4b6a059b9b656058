//! One-class ν-SVM and binary C-SVM on precomputed Gram matrices.

mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use solver::Problem;

pub const TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 100_000;
/// Tag attached to models trained on a Gram matrix that is not positive
/// semi-definite.
pub const INDEFINITE_TAG: &str = "indefinite-kernel";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("solver did not converge after {iterations} iterations (KKT violation {violation:e})")]
    NonConvergence { iterations: usize, violation: f64 },
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Square kernel matrix over labelled items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub ids: Vec<String>,
    /// Row-major values.
    pub values: Vec<f64>,
    pub fingerprint: String,
    pub tags: Vec<String>,
}

impl GramMatrix {
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Result<Self, SvmError> {
        let n = ids.len();
        if values.len() != n * n {
            return Err(SvmError::DimensionMismatch(format!(
                "{} ids but {} values",
                n,
                values.len()
            )));
        }
        Ok(Self {
            ids,
            values,
            fingerprint: String::new(),
            tags: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn is_indefinite(&self) -> bool {
        self.tags.iter().any(|t| t == INDEFINITE_TAG)
    }

    /// Restriction to `rows × cols`, row-major.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        rows.iter()
            .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j)))
            .collect()
    }

    /// Principal submatrix on `idx`, keeping tags and fingerprint.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            values: self.block(idx, idx),
            fingerprint: self.fingerprint.clone(),
            tags: self.tags.clone(),
        }
    }
}

/// Solution of the one-class problem `min ½αᵀKα`, `0 ≤ α ≤ 1/(νn)`,
/// `Σα = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneClassModel {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub support_ids: Vec<usize>,
    pub norm_w: f64,
    pub nu: f64,
    #[serde(default)]
    pub config_fingerprint: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

impl OneClassModel {
    pub fn upper_bound(&self) -> f64 {
        1.0 / (self.nu * self.alpha.len() as f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("models serialize")
    }
}

/// Dual objective `½αᵀKα`.
pub fn one_class_objective(n: usize, kernel: &[f64], alpha: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += alpha[i] * kernel[i * n + j] * alpha[j];
        }
    }
    0.5 * s
}

/// Fits a one-class ν-SVM on the `n × n` Gram `kernel` (row-major).
pub fn fit_one_class(n: usize, kernel: &[f64], nu: f64) -> Result<OneClassModel, SvmError> {
    if kernel.len() != n * n || n == 0 {
        return Err(SvmError::DimensionMismatch(format!(
            "{} values for n = {n}",
            kernel.len()
        )));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(SvmError::InvalidParameter(format!("nu must lie in (0, 1], got {nu}")));
    }
    let upper = 1.0 / (nu * n as f64);
    // feasible start: fill the first ⌊νn⌋ coefficients, put the rest on the next
    let full = (nu * n as f64).floor() as usize;
    let mut alpha = vec![0.0; n];
    for a in alpha.iter_mut().take(full.min(n)) {
        *a = upper;
    }
    if full < n {
        alpha[full] = 1.0 - full as f64 * upper;
    }
    let problem = Problem {
        n,
        kernel,
        y: vec![1.0; n],
        p: vec![0.0; n],
        c: upper,
        tolerance: TOLERANCE,
        max_iterations: MAX_ITERATIONS,
    };
    let sol = problem.solve(alpha)?;
    let alpha = sol.alpha;
    let g = sol.gradient;
    let support_ids: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    let free: Vec<usize> = support_ids.iter().copied().filter(|&i| alpha[i] < upper).collect();
    let rho = if free.is_empty() {
        support_ids.iter().map(|&i| g[i]).fold(f64::INFINITY, f64::min)
    } else {
        free.iter().map(|&i| g[i]).sum::<f64>() / free.len() as f64
    };
    let w2: f64 = alpha
        .iter()
        .enumerate()
        .map(|(i, a)| {
            a * kernel[i * n..(i + 1) * n]
                .iter()
                .zip(&alpha)
                .map(|(k, b)| k * b)
                .sum::<f64>()
        })
        .sum();
    Ok(OneClassModel {
        alpha,
        rho,
        support_ids,
        norm_w: w2.max(0.0).sqrt(),
        nu,
        config_fingerprint: String::new(),
        tags: if w2 < 0.0 {
            vec![INDEFINITE_TAG.to_string()]
        } else {
            Vec::new()
        },
    })
}

/// Soft-margin binary SVM; `decision(x) = Σ coef_i K(x_i, x) + bias`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    /// `y_i α_i` per training item.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub support_ids: Vec<usize>,
    pub c: f64,
    pub iterations: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

impl BinaryModel {
    /// Decision value from the kernel values between a point and every
    /// training item.
    pub fn decision(&self, kernel_row: &[f64]) -> f64 {
        self.coef.iter().zip(kernel_row).map(|(c, k)| c * k).sum::<f64>() + self.bias
    }

    pub fn predict(&self, kernel_row: &[f64]) -> i8 {
        if self.decision(kernel_row) > 0.0 {
            1
        } else {
            -1
        }
    }
}

/// Fits a C-SVM with labels in `{-1, +1}`.
pub fn fit_binary(gram: &GramMatrix, labels: &[i8], c: f64) -> Result<BinaryModel, SvmError> {
    let n = gram.len();
    if labels.len() != n {
        return Err(SvmError::DimensionMismatch(format!(
            "{} labels for {n} items",
            labels.len()
        )));
    }
    if labels.iter().any(|&l| l != 1 && l != -1) {
        return Err(SvmError::InvalidParameter("labels must be -1 or +1".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(SvmError::InvalidParameter(format!("C must be positive, got {c}")));
    }
    if !(labels.contains(&1) && labels.contains(&-1)) {
        return Err(SvmError::SingleClass);
    }
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let problem = Problem {
        n,
        kernel: &gram.values,
        y: y.clone(),
        p: vec![-1.0; n],
        c,
        tolerance: TOLERANCE,
        max_iterations: MAX_ITERATIONS,
    };
    let sol = problem.solve(vec![0.0; n])?;
    let (alpha, g) = (sol.alpha, sol.gradient);
    let (mut ub, mut lb, mut free_sum, mut free) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for i in 0..n {
        let yg = y[i] * g[i];
        if alpha[i] >= c {
            if y[i] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[i] <= 0.0 {
            if y[i] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        0.5 * (ub + lb)
    };
    Ok(BinaryModel {
        coef: alpha.iter().zip(&y).map(|(a, y)| a * y).collect(),
        bias: -rho,
        support_ids: (0..n).filter(|&i| alpha[i] > 0.0).collect(),
        c,
        iterations: sol.iterations,
        tags: if gram.is_indefinite() {
            vec![INDEFINITE_TAG.to_string()]
        } else {
            Vec::new()
        },
    })
}

/// Default margin-parameter grid.
pub const DEFAULT_C_GRID: [f64; 7] = [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginSelection {
    pub c: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    /// Set when every C produced a false positive; `c` then minimizes the
    /// false positives instead.
    pub no_feasible_c: bool,
    pub model: BinaryModel,
}

/// Picks the C maximizing true positives on the evaluation items subject to
/// no false positives (ties go to the smallest C). `eval_rows` holds, per
/// evaluation item, its kernel values against every training item.
pub fn select_margin_parameter(
    train: &GramMatrix,
    labels: &[i8],
    eval_rows: &[Vec<f64>],
    eval_labels: &[i8],
    grid: &[f64],
) -> Result<MarginSelection, SvmError> {
    if grid.is_empty() {
        return Err(SvmError::InvalidParameter("empty C grid".into()));
    }
    if eval_rows.len() != eval_labels.len() {
        return Err(SvmError::DimensionMismatch(
            "evaluation rows and labels differ in length".into(),
        ));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best: Option<MarginSelection> = None;
    for &c in &sorted {
        let model = fit_binary(train, labels, c)?;
        let (mut tp, mut fp) = (0, 0);
        for (row, &l) in eval_rows.iter().zip(eval_labels) {
            if model.predict(row) == 1 {
                if l == 1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let cand = MarginSelection {
            c,
            true_positives: tp,
            false_positives: fp,
            no_feasible_c: fp > 0,
            model,
        };
        let better = match &best {
            None => true,
            Some(b) => match (b.false_positives == 0, fp == 0) {
                (true, true) => tp > b.true_positives,
                (true, false) => false,
                (false, true) => true,
                (false, false) => fp < b.false_positives || (fp == b.false_positives && tp > b.true_positives),
            },
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("grid is non-empty"))
}
