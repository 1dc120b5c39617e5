//! Air-taxi demand forecasting on schematic grid cities.
//!
//! A city is a disk of square cells. Population decays from the center,
//! trips are distributed by a logarithmic trip-length law, and a binary logit
//! splits each origin-destination flow between a ground mode and an air taxi
//! that flies between sunflower-placed vertiports. City results are summed
//! into global demand, aircraft movements and fleet size, for sensitivity
//! sweeps and market scenarios.

pub mod choice;
pub mod cli;
pub mod config;
pub mod data;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod output;
pub mod population;
pub mod scenario;
pub mod sum;
pub mod synthetic;
pub mod transport;
pub mod trips;

pub use config::RunConfig;
pub use error::{Error, Result};
