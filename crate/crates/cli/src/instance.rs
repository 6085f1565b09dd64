//! Instance files: human-readable JSON with `[re, im]` complex encoding.

use std::path::Path;

use serde::{Deserialize, Serialize};
use swipt_core::linalg::CVector;
use swipt_core::model::{ChannelSet, EnergyTarget, PowerBudget};

use crate::{CliError, Result};

fn one() -> f64 {
    1.0
}

/// On-disk problem instance. `gamma` and `delta` default to 1.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub nt: usize,
    pub h11: Vec<[f64; 2]>,
    pub h12: Vec<[f64; 2]>,
    pub h21: Vec<[f64; 2]>,
    pub h22: Vec<[f64; 2]>,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub p1: f64,
    pub p2: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub delta: f64,
}

/// A validated instance ready for the solvers. Energy targets are supplied
/// per command; the file carries the conversion constants.
#[derive(Debug, Clone)]
pub struct Instance {
    pub channels: ChannelSet,
    pub budget: PowerBudget,
    pub gamma: f64,
    pub delta: f64,
}

impl Instance {
    pub fn target(&self, e1: f64, e2: f64) -> EnergyTarget {
        EnergyTarget::with_conversion(e1, e2, self.gamma, self.delta)
            .expect("validated conversion constants")
    }
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<InstanceFile> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Parse(format!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    pub fn validate(&self) -> Result<Instance> {
        let field = |name: &str, v: &[[f64; 2]]| -> Result<CVector> {
            if v.len() != self.nt {
                return Err(CliError::Parse(format!(
                    "field {name}: expected {} complex entries, got {}",
                    self.nt,
                    v.len()
                )));
            }
            Ok(CVector::from_pairs(
                &v.iter().map(|&[re, im]| (re, im)).collect::<Vec<_>>(),
            ))
        };
        if self.nt == 0 {
            return Err(CliError::Parse("field nt: must be at least 1".into()));
        }
        for (name, value) in [
            ("sigma1_sq", self.sigma1_sq),
            ("sigma2_sq", self.sigma2_sq),
            ("p1", self.p1),
            ("p2", self.p2),
            ("gamma", self.gamma),
            ("delta", self.delta),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(CliError::Parse(format!("field {name}: must be positive, got {value}")));
            }
        }
        let channels = ChannelSet::new(
            field("h11", &self.h11)?,
            field("h12", &self.h12)?,
            field("h21", &self.h21)?,
            field("h22", &self.h22)?,
            self.sigma1_sq,
            self.sigma2_sq,
        )
        .map_err(|e| CliError::Parse(format!("channels: {e}")))?;
        let budget = PowerBudget::new(self.p1, self.p2)
            .map_err(|e| CliError::Parse(format!("budgets: {e}")))?;
        Ok(Instance { channels, budget, gamma: self.gamma, delta: self.delta })
    }

    pub fn load_validated(path: &Path) -> Result<Instance> {
        Self::load(path)?.validate()
    }
}
