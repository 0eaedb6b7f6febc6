use std::path::{Path, PathBuf};

use fracflow::decay_lab::{ConvergenceConfig, ForcedConfig, OptimalL2Config, WeakDecayConfig};
use fracflow::kernels::FracParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const OUT_ENV: &str = "FRACFLOW_OUT";
const DEFAULT_OUT: &str = "fracflow-out";

/// Settings read from an experiment config file. Every field is optional;
/// missing ones fall back to the experiment's own fixture.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    /// width of the Gaussian initial datum
    pub initial_width: Option<f64>,
    /// norm index of the convergence experiment
    pub lp: Option<f64>,
    /// forcing integrability q, measured norm r and temporal decay γ
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub gamma: Option<f64>,
    pub optimal_l2: OptimalL2Config,
    pub convergence: ConvergenceConfig,
    pub forced: ForcedConfig,
    pub weak_decay: WeakDecayConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Parameters with the given fixture filling the gaps.
    pub fn params(&self, fallback: (usize, f64, f64)) -> CliResult<FracParams> {
        let (d, beta, alpha) = fallback;
        Ok(FracParams::new(self.alpha.unwrap_or(alpha), self.beta.unwrap_or(beta), self.d.unwrap_or(d))?)
    }
}

/// FRACFLOW_OUT wins over the flag and the config file.
pub fn output_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    flag.or(config).map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}
