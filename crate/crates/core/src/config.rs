//! Run configuration: every model parameter group with its default, loaded
//! from a TOML document. Absent keys take defaults; unknown keys are errors.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::choice::ChoiceParams;
use crate::engine::FleetParams;
use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::population::DecayParams;
use crate::scenario::ScenarioPaths;
use crate::transport::{AirTaxiParams, AmtParams, DensityModel};
use crate::trips::TripParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DemandParams {
    /// Daily air-taxi trips a city needs to count as a viable market.
    pub eligibility_threshold: f64,
}

impl Default for DemandParams {
    fn default() -> Self {
        DemandParams {
            eligibility_threshold: 1000.0,
        }
    }
}

/// How sweep densities are applied to cities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDensityMode {
    /// Every city gets the swept density as its own vertiport density.
    Uniform,
    /// The swept value is a reference density scaled per city.
    Reference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepParams {
    pub density_mode: SweepDensityMode,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            density_mode: SweepDensityMode::Uniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub population: DecayParams,
    pub trips: TripParams,
    pub amt: AmtParams,
    pub air_taxi: AirTaxiParams,
    pub density: DensityModel,
    pub choice: ChoiceParams,
    pub fleet: FleetParams,
    pub demand: DemandParams,
    pub sweep: SweepParams,
    pub scenarios: ScenarioPaths,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.population.validate()?;
        self.trips.validate()?;
        self.amt.validate()?;
        self.air_taxi.validate()?;
        self.density.validate()?;
        self.choice.validate()?;
        self.fleet.validate()?;
        let t = self.demand.eligibility_threshold;
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param("demand.eligibility_threshold", t, "a finite value >= 0"));
        }
        self.scenarios.validate()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Effective configuration as a TOML document.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// SHA-256 of the effective configuration document, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_toml_str(&text)
}
