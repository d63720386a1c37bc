//! Serializable run configuration shared by the command-line driver and tests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::QuadraticIrrational;
use crate::stability::FamilyCoding;
use crate::word::{Convention, FiniteWord};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ranges {
    pub k_range: Option<(u64, u64)>,
    pub n_range: Option<(u64, u64)>,
    #[serde(rename = "scan_N", alias = "scan_n")]
    pub scan_n: Option<usize>,
    pub k_max: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub density_tol: Option<f64>,
    pub fit_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub format: Option<OutputFormat>,
    pub path: Option<PathBuf>,
}

/// Every field is optional; command-line flags fill or override them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub phi: Option<QuadraticIrrational>,
    pub convention: Option<Convention>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub pattern_set: Option<Vec<FiniteWord>>,
    pub ranges: Ranges,
    pub tolerances: Tolerances,
    pub output: Output,
    pub x0: Option<QuadraticIrrational>,
    pub d: Option<u64>,
    pub samples_per_k: Option<usize>,
    pub horizon: Option<usize>,
    pub m_max: Option<usize>,
    pub stride: Option<usize>,
    pub word: Option<FiniteWord>,
    pub coding: Option<FamilyCoding>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn phi(&self) -> Result<QuadraticIrrational> {
        let phi = self.phi.clone().ok_or_else(|| Error::InvalidArgument("phi is required".into()))?;
        if phi.is_rational() {
            return Err(Error::RationalInput);
        }
        Ok(phi)
    }

    pub fn alpha(&self) -> Result<f64> {
        let a = self.alpha.ok_or_else(|| Error::InvalidArgument("alpha is required".into()))?;
        if !(a > 1.0) {
            return Err(Error::Hypothesis(format!("alpha must exceed 1 for the pair sums to converge, got {a}")));
        }
        Ok(a)
    }

    pub fn lambda(&self) -> Result<f64> {
        let l = self.lambda.unwrap_or(0.0);
        if !(l >= 0.0) {
            return Err(Error::InvalidArgument(format!("lambda must be nonnegative, got {l}")));
        }
        Ok(l)
    }

    pub fn format(&self) -> OutputFormat {
        self.output.format.unwrap_or_default()
    }
}
