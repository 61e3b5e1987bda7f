//! Solver settings, read from a TOML file with every key optional.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::admissibility::CondCMode;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Box bound `N` for the imaginary parts, `N > 1`.
    pub n_box: f64,
    /// Damping `lambda` of the fixed-point iteration.
    pub damping: f64,
    pub eps_fp: f64,
    pub eps_eq: f64,
    pub eps_theta: f64,
    pub t_floor: f64,
    pub multistart: u32,
    /// Random restarts after the continuation schedules are exhausted.
    pub restarts: u32,
    pub seed: u64,
    /// Damped iterations per fixed-point attempt.
    pub max_iter: u32,
    /// Function evaluations per Nelder-Mead start.
    pub nm_max_evals: u32,
    /// Decreasing shifts `b` for chains that are not least generic.
    pub b_schedule: Vec<f64>,
    /// Multiples of `N` used as the large imaginary part `v`.
    pub v_schedule: Vec<f64>,
    /// Opening sizes for the imaginary parts when the fixed point collapses.
    pub split_schedule: Vec<f64>,
    pub cluster_tol: f64,
    pub refine_to: f64,
    pub cond_c: CondCMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_box: 2.0,
            damping: 0.5,
            eps_fp: 1e-10,
            eps_eq: 1e-7,
            eps_theta: 1e-8,
            t_floor: 1e-6,
            multistart: 64,
            restarts: 256,
            seed: 0,
            max_iter: 400,
            nm_max_evals: 600,
            b_schedule: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5],
            v_schedule: vec![10.0, 30.0, 100.0],
            split_schedule: vec![1e-3, 1e-2, 5e-2, 0.2, 0.5],
            cluster_tol: 1e-7,
            refine_to: 1e-12,
            cond_c: CondCMode::HyperbolicOnly,
        }
    }
}

impl SolverConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: SolverConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.n_box > 1.0) {
            return bad(format!("n_box must exceed 1, got {}", self.n_box));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        for (name, v) in [
            ("eps_fp", self.eps_fp),
            ("eps_eq", self.eps_eq),
            ("eps_theta", self.eps_theta),
            ("t_floor", self.t_floor),
            ("cluster_tol", self.cluster_tol),
            ("refine_to", self.refine_to),
        ] {
            if !(v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.b_schedule.iter().any(|b| !(*b > 0.0)) {
            return bad("b_schedule entries must be positive".into());
        }
        if self.v_schedule.is_empty() || self.v_schedule.iter().any(|v| !(*v > 1.0)) {
            return bad("v_schedule must be non-empty with entries above 1".into());
        }
        if self.split_schedule.iter().any(|v| !(*v > 0.0)) {
            return bad("split_schedule entries must be positive".into());
        }
        Ok(())
    }

    /// Short digest of the settings, recorded in catalogs.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = SolverConfig::from_toml_str("seed = 7\nmultistart = 8\ncond_c = \"always\"\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.multistart, 8);
        assert_eq!(cfg.cond_c, CondCMode::Always);
        assert_eq!(cfg.n_box, 2.0);
    }

    #[test]
    fn rejects_bad_values_and_keys() {
        assert!(matches!(SolverConfig::from_toml_str("n_box = 1.0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(SolverConfig::from_toml_str("bogus = 1"), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn hash_tracks_content() {
        let a = SolverConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn toml_round_trip() {
        let a = SolverConfig::default();
        assert_eq!(SolverConfig::from_toml_str(&a.to_toml_string()).unwrap(), a);
    }
}
