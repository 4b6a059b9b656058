//! Pairwise (SMO) solver for
//!
//! ```text
//! min ½ αᵀQα + pᵀα   s.t.  yᵀα = const,  0 ≤ α_i ≤ C
//! ```
//!
//! with `Q_ij = y_i y_j K_ij`. The working pair is chosen by maximal
//! violation for the first index and second-order gain for the second.

use super::SvmError;

const TAU: f64 = 1e-12;

pub(crate) struct Problem<'a> {
    pub n: usize,
    /// Row-major kernel matrix.
    pub kernel: &'a [f64],
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub c: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    /// Gradient `Qα + p` at the solution.
    pub gradient: Vec<f64>,
    pub iterations: usize,
}

impl Problem<'_> {
    fn q(&self, i: usize, j: usize) -> f64 {
        self.y[i] * self.y[j] * self.kernel[i * self.n + j]
    }

    fn at_upper(&self, a: f64) -> bool {
        a >= self.c
    }

    fn at_lower(a: f64) -> bool {
        a <= 0.0
    }

    pub fn solve(&self, mut alpha: Vec<f64>) -> Result<Solution, SvmError> {
        let n = self.n;
        let mut g = self.p.clone();
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                for (k, gk) in g.iter_mut().enumerate() {
                    *gk += self.q(k, i) * a;
                }
            }
        }
        let mut iterations = 0;
        loop {
            let (pair, violation) = self.select(&alpha, &g);
            let Some((i, j)) = pair else {
                return Ok(Solution {
                    alpha,
                    gradient: g,
                    iterations,
                });
            };
            if iterations >= self.max_iterations {
                return Err(SvmError::NonConvergence { iterations, violation });
            }
            iterations += 1;
            let (old_i, old_j) = (alpha[i], alpha[j]);
            self.update(&mut alpha, &g, i, j);
            let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
            for (k, gk) in g.iter_mut().enumerate().take(n) {
                *gk += self.q(k, i) * di + self.q(k, j) * dj;
            }
        }
    }

    /// Returns the working pair, or `None` with the final violation once
    /// it drops below tolerance.
    fn select(&self, alpha: &[f64], g: &[f64]) -> (Option<(usize, usize)>, f64) {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_best = None;
        for t in 0..self.n {
            let can = if self.y[t] > 0.0 {
                !self.at_upper(alpha[t])
            } else {
                !Self::at_lower(alpha[t])
            };
            if can && -self.y[t] * g[t] >= gmax {
                gmax = -self.y[t] * g[t];
                i_best = Some(t);
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_best = None;
        let mut best_gain = f64::INFINITY;
        for t in 0..self.n {
            let can = if self.y[t] > 0.0 {
                !Self::at_lower(alpha[t])
            } else {
                !self.at_upper(alpha[t])
            };
            if !can {
                continue;
            }
            let yg = self.y[t] * g[t];
            gmax2 = gmax2.max(yg);
            if let Some(i) = i_best {
                let diff = gmax + yg;
                if diff > 0.0 {
                    let kii = self.kernel[i * self.n + i];
                    let ktt = self.kernel[t * self.n + t];
                    let quad = kii + ktt - 2.0 * self.kernel[i * self.n + t];
                    let gain = -diff * diff / if quad > 0.0 { quad } else { TAU };
                    if gain <= best_gain {
                        best_gain = gain;
                        j_best = Some(t);
                    }
                }
            }
        }
        let violation = (gmax + gmax2).max(0.0);
        match (i_best, j_best) {
            (Some(i), Some(j)) if violation >= self.tolerance => (Some((i, j)), violation),
            _ => (None, if violation.is_finite() { violation } else { 0.0 }),
        }
    }

    fn update(&self, a: &mut [f64], g: &[f64], i: usize, j: usize) {
        let c = self.c;
        let kij = self.kernel[i * self.n + j];
        let quad = self.kernel[i * self.n + i] + self.kernel[j * self.n + j] - 2.0 * kij;
        let quad = if quad > 0.0 { quad } else { TAU };
        if self.y[i] != self.y[j] {
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
    }
}
