//! Scenario documents: one JSON object describing a grid, its defects and
//! optionally a dynamics run. Unknown keys are rejected, and parse errors
//! carry the path to the offending key.

use std::fs;
use std::path::Path;

use cartan_core::defects::{DefectConfiguration, DefectSpec};
use cartan_core::dynamics::{
    DisclinationField, DislocationLine, DynamicsParams, ExternalForce, ForceLaw, Vec3,
};
use cartan_core::field_theory::Couplings;
use cartan_core::GridSpec;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Product {
    Fields,
    Charges,
    Residuals,
    Trajectories,
    Events,
}

fn all_products() -> Vec<Product> {
    vec![Product::Fields, Product::Charges, Product::Residuals, Product::Trajectories, Product::Events]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DynamicsBlock {
    pub gamma: f64,
    #[serde(default)]
    pub force_law: ForceLaw,
    /// Uniform force per unit length on every node.
    pub external_force: [f64; 3],
    pub time_step: f64,
    pub steps: usize,
    pub lines: Vec<DislocationLine>,
    /// Defaults to the scenario's wedge disclinations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disclinations: Option<DisclinationField>,
    /// Node separation that triggers reconnection; defaults to twice the
    /// smallest core radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconnection_threshold: Option<f64>,
}

impl DynamicsBlock {
    pub fn params(&self) -> DynamicsParams {
        DynamicsParams {
            gamma: self.gamma,
            force_law: self.force_law,
            external_force: ExternalForce::Uniform(Vec3::from(self.external_force)),
            time_step: self.time_step,
            steps: self.steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec,
    #[serde(default)]
    pub defects: Vec<DefectSpec>,
    #[serde(default)]
    pub couplings: Couplings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsBlock>,
    #[serde(default = "all_products")]
    pub outputs: Vec<Product>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Multiply every grid resolution by `k`.
    pub fn scaled(mut self, k: usize) -> Result<Self, CliError> {
        if k == 0 {
            return Err(CliError::Config("resolution scale must be at least 1".into()));
        }
        self.grid.resolution.iter_mut().for_each(|n| *n *= k);
        Ok(self)
    }

    pub fn configuration(&self) -> Result<DefectConfiguration, CliError> {
        DefectConfiguration::new(self.grid.clone(), self.defects.clone()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn wants(&self, p: Product) -> bool {
        self.outputs.contains(&p)
    }

    pub fn smallest_core_radius(&self) -> Option<f64> {
        self.defects.iter().map(|d| d.core_radius).reduce(f64::min)
    }

    pub fn disclinations(&self) -> Result<DisclinationField, CliError> {
        let cfg = self.configuration()?;
        Ok(match self.dynamics.as_ref().and_then(|d| d.disclinations.clone()) {
            Some(d) => d,
            None => DisclinationField::from_configuration(&cfg),
        })
    }

    /// Every check that does not need computation: grid, defect margins,
    /// couplings and the dynamics block.
    pub fn validate(&self) -> Result<(), CliError> {
        let config = |e: cartan_core::Error| CliError::Config(e.to_string());
        self.grid.validate().map_err(config)?;
        self.configuration()?;
        self.couplings.validate().map_err(config)?;
        if let Some(d) = &self.dynamics {
            if self.grid.dim() != 3 {
                return Err(CliError::Config("dynamics needs a 3D grid".into()));
            }
            d.params().validate().map_err(config)?;
            for l in &d.lines {
                l.validate().map_err(config)?;
            }
            let mut ids: Vec<u64> = d.lines.iter().map(|l| l.id).collect();
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                return Err(CliError::Config("dislocation line ids must be unique".into()));
            }
            if let Some(disc) = &d.disclinations {
                disc.validate().map_err(config)?;
            }
            if let Some(t) = d.reconnection_threshold {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Config("reconnectionThreshold must be positive".into()));
                }
            }
        }
        Ok(())
    }
}
