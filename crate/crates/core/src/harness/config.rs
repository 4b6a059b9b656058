//! Flat `key = value` run configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::HarnessError;
use crate::kernels::bag::{BagKernel, BagKernelConfig, BagKernelKind};
use crate::kernels::{PathKernel, PathKernelConfig};
use crate::paths::DEFAULT_MAX_LENGTH;
use crate::svm::DEFAULT_C_GRID;

/// Bag kernel and path kernel pairing selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelSelector {
    MaxClassic,
    ChangeClassic,
    /// Change kernel on the edit path kernel.
    New,
    MatchingClassic,
    SuardClassic,
}

impl KernelSelector {
    pub const ALL: [KernelSelector; 5] = [
        Self::MaxClassic,
        Self::ChangeClassic,
        Self::New,
        Self::MatchingClassic,
        Self::SuardClassic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::MaxClassic => "max-classic",
            Self::ChangeClassic => "change-classic",
            Self::New => "new",
            Self::MatchingClassic => "matching-classic",
            Self::SuardClassic => "suard-classic",
        }
    }
}

impl fmt::Display for KernelSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelSelector {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown kernel {s:?}")))
    }
}

/// Every tunable of a run, defaulting to the benchmark settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub sigma_vertex: f64,
    pub sigma_edge: f64,
    /// Maximum reductions per path hierarchy.
    pub max_reductions: usize,
    /// Maximum path length in edges.
    pub max_length: usize,
    pub nu: f64,
    pub sigma_change_new: f64,
    pub sigma_change_classic: f64,
    pub sigma_matching: f64,
    pub c_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sigma_vertex: 0.1,
            sigma_edge: 0.1,
            max_reductions: 2,
            max_length: DEFAULT_MAX_LENGTH,
            nu: 0.9,
            sigma_change_new: 0.3,
            sigma_change_classic: 1.0,
            sigma_matching: 1.0,
            c_grid: DEFAULT_C_GRID.to_vec(),
        }
    }
}

impl RunConfig {
    /// Parses `key = value` lines over the defaults. `#` starts a comment;
    /// `D` and `s` are accepted as aliases of `max_reductions` and
    /// `max_length`.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| HarnessError::Config(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || value.parse::<f64>().map_err(|_| bad("expected a number"));
            let int = || {
                value
                    .parse::<usize>()
                    .map_err(|_| bad("expected a non-negative integer"))
            };
            match key {
                "sigma_vertex" => cfg.sigma_vertex = float()?,
                "sigma_edge" => cfg.sigma_edge = float()?,
                "max_reductions" | "D" => cfg.max_reductions = int()?,
                "max_length" | "s" => cfg.max_length = int()?,
                "nu" => cfg.nu = float()?,
                "sigma_change_new" => cfg.sigma_change_new = float()?,
                "sigma_change_classic" => cfg.sigma_change_classic = float()?,
                "sigma_matching" => cfg.sigma_matching = float()?,
                "c_grid" => {
                    cfg.c_grid = value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| bad("expected comma-separated numbers"))?
                }
                _ => return Err(bad("unknown key")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.path_config().validate()?;
        for k in KernelSelector::ALL {
            self.bag_kernel(k).config.validate()?;
        }
        if self.max_length == 0 {
            return Err(HarnessError::Config("max_length must be at least 1".into()));
        }
        if self.c_grid.is_empty() || self.c_grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(HarnessError::Config("c_grid must hold positive numbers".into()));
        }
        Ok(())
    }

    pub fn path_config(&self) -> PathKernelConfig {
        PathKernelConfig {
            sigma_vertex: self.sigma_vertex,
            sigma_edge: self.sigma_edge,
            max_reductions: self.max_reductions,
        }
    }

    pub fn bag_kernel(&self, selector: KernelSelector) -> BagKernel {
        let path = self.path_config();
        let config = |sigma_change| BagKernelConfig {
            nu: self.nu,
            sigma_change,
            sigma_matching: self.sigma_matching,
        };
        let (kind, path, config) = match selector {
            KernelSelector::MaxClassic => (
                BagKernelKind::Max,
                PathKernel::classic(path),
                config(self.sigma_change_classic),
            ),
            KernelSelector::ChangeClassic => (
                BagKernelKind::Change,
                PathKernel::classic(path),
                config(self.sigma_change_classic),
            ),
            KernelSelector::New => (
                BagKernelKind::Change,
                PathKernel::edit(path),
                config(self.sigma_change_new),
            ),
            KernelSelector::MatchingClassic => (
                BagKernelKind::Matching,
                PathKernel::classic(path),
                config(self.sigma_change_classic),
            ),
            KernelSelector::SuardClassic => (
                BagKernelKind::Suard,
                PathKernel::classic(path),
                config(self.sigma_change_classic),
            ),
        };
        BagKernel { kind, path, config }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    /// Short digest of the resolved configuration and kernel selector.
    pub fn fingerprint(&self, selector: Option<KernelSelector>) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_string(self).expect("configs serialize"));
        if let Some(s) = selector {
            h.update(s.name());
        }
        hex::encode(&h.finalize()[..8])
    }
}
