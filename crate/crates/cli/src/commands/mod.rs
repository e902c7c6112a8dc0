pub mod charges;
pub mod fields;
pub mod simulate;
pub mod verify;

use cartan_core::defects::{build_coframe, build_connection, curvature, torsion, DefectConfiguration};
use cartan_core::forms::{Coframe, ConnectionField, FormField};

use crate::error::CliError;
use crate::scenario::Scenario;

/// The canonical fields of a scenario and their torsion and curvature.
pub struct Geometry {
    pub config: DefectConfiguration,
    pub coframe: Coframe,
    pub connection: ConnectionField,
    pub torsion: FormField,
    pub curvature: FormField,
}

impl Geometry {
    pub fn build(scenario: &Scenario) -> Result<Self, CliError> {
        let config = scenario.configuration()?;
        let coframe = build_coframe(&config)?;
        let connection = build_connection(&config)?;
        let torsion = torsion(&coframe, &connection)?;
        let curvature = curvature(&connection)?;
        Ok(Geometry { config, coframe, connection, torsion, curvature })
    }

    /// Height of the transverse mid-plane.
    pub fn mid_height(&self) -> f64 {
        let z = self.config.grid.extents[2];
        0.5 * (z[0] + z[1])
    }
}
