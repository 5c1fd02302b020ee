//! JSON run configuration. Every field is optional; command-line flags override it.

use std::path::Path;

use oscint::quadrature::QuadratureConfig;
use serde::Deserialize;

use crate::integrate::IntegrateBlock;
use crate::solve::SolveBlock;
use crate::validate::ValidateBlock;
use crate::Failure;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub quadrature: Option<QuadratureConfig>,
    pub integrate: IntegrateBlock,
    pub solve_free: SolveBlock,
    pub validate: ValidateBlock,
}

impl FileConfig {
    pub fn quadrature(&self) -> Result<QuadratureConfig, Failure> {
        let q = self.quadrature.unwrap_or_default();
        q.validate()?;
        Ok(q)
    }
}

pub fn load(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}
