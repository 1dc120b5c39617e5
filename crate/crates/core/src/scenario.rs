//! Projection of cities through time, market development paths, the
//! price × density sensitivity sweep and the four market scenarios.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SweepDensityMode};
use crate::data::{CityRecord, GrowthTable};
use crate::engine::{CityInputs, CityResult, DensityInput, PreparedCity};
use crate::error::{Error, Result};
use crate::sum;

pub const BASE_YEAR: i32 = 2022;
pub const HORIZON_START: i32 = 2030;
pub const HORIZON_END: i32 = 2050;

/// Population and GDP per capita of a record compounded to `year`. Area is
/// held constant.
pub fn project_city(record: &CityRecord, year: i32, growth: Option<&GrowthTable>) -> Result<CityInputs> {
    if year < BASE_YEAR {
        return Err(Error::Domain(format!(
            "cannot project {} to {year}: the base year is {BASE_YEAR}",
            record.city_id
        )));
    }
    let steps = year - BASE_YEAR;
    let (pop_factor, gdp_factor) = match growth.and_then(|g| g.city(&record.city_id)) {
        None => (
            (1.0 + record.pop_growth_rate).powi(steps),
            (1.0 + record.gdp_growth_rate).powi(steps),
        ),
        Some(rates) => (BASE_YEAR + 1..=year).fold((1.0, 1.0), |(p, g), y| {
            let (gp, gg) = rates
                .get(&y)
                .copied()
                .unwrap_or((record.pop_growth_rate, record.gdp_growth_rate));
            (p * (1.0 + gp), g * (1.0 + gg))
        }),
    };
    Ok(CityInputs {
        city_id: record.city_id.clone(),
        year,
        population: record.population_2022 * pop_factor,
        area_sqkm: record.area_sqkm,
        gdp_per_capita: record.gdp_per_capita_2022 * gdp_factor,
    })
}

fn check_horizon(year: i32) -> Result<f64> {
    if !(HORIZON_START..=HORIZON_END).contains(&year) {
        return Err(Error::Domain(format!(
            "year {year} is outside the scenario horizon {HORIZON_START}..={HORIZON_END}"
        )));
    }
    Ok((year - HORIZON_START) as f64 / (HORIZON_END - HORIZON_START) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    Linear,
    Geometric,
}

/// A quantity anchored at the start and end of the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathAnchors {
    pub start: f64,
    pub end: f64,
    pub interpolation: Interpolation,
}

impl PathAnchors {
    /// Value in `year`; both anchors are returned exactly.
    pub fn value(&self, year: i32) -> Result<f64> {
        let t = check_horizon(year)?;
        Ok(match self.interpolation {
            Interpolation::Linear => (1.0 - t) * self.start + t * self.end,
            Interpolation::Geometric => self.start.powf(1.0 - t) * self.end.powf(t),
        })
    }
}

/// Ticket price and reference density trajectories of one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketPath {
    pub price: PathAnchors,
    pub vd_ref: PathAnchors,
}

pub fn path_value(path: &PathAnchors, year: i32) -> Result<f64> {
    path.value(year)
}

/// Scenario anchors in the configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioPaths {
    pub optimistic_price_2030: f64,
    pub conservative_price_2030: f64,
    /// Fraction by which prices fall between 2030 and 2050.
    pub price_decline_by_2050: f64,
    pub high_density_2030: f64,
    pub high_density_2050: f64,
    pub low_density_2030: f64,
    pub low_density_2050: f64,
    pub density_interpolation: Interpolation,
}

impl Default for ScenarioPaths {
    fn default() -> Self {
        ScenarioPaths {
            optimistic_price_2030: 4.10,
            conservative_price_2030: 5.70,
            price_decline_by_2050: 1.0 / 3.0,
            high_density_2030: 0.002,
            high_density_2050: 0.02,
            low_density_2030: 0.001,
            low_density_2050: 0.01,
            density_interpolation: Interpolation::Geometric,
        }
    }
}

impl ScenarioPaths {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("scenarios.optimistic_price_2030", self.optimistic_price_2030),
            ("scenarios.conservative_price_2030", self.conservative_price_2030),
            ("scenarios.high_density_2030", self.high_density_2030),
            ("scenarios.high_density_2050", self.high_density_2050),
            ("scenarios.low_density_2030", self.low_density_2030),
            ("scenarios.low_density_2050", self.low_density_2050),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, v, "a finite value > 0"));
            }
        }
        let d = self.price_decline_by_2050;
        if !(d.is_finite() && (0.0..1.0).contains(&d)) {
            return Err(Error::param("scenarios.price_decline_by_2050", d, "a value in [0, 1)"));
        }
        Ok(())
    }

    pub fn price_path(&self, level: PriceLevel) -> PathAnchors {
        let start = match level {
            PriceLevel::Optimistic => self.optimistic_price_2030,
            PriceLevel::Conservative => self.conservative_price_2030,
        };
        PathAnchors {
            start,
            end: start * (1.0 - self.price_decline_by_2050),
            interpolation: Interpolation::Linear,
        }
    }

    pub fn density_path(&self, level: DensityLevel) -> PathAnchors {
        let (start, end) = match level {
            DensityLevel::High => (self.high_density_2030, self.high_density_2050),
            DensityLevel::Low => (self.low_density_2030, self.low_density_2050),
        };
        PathAnchors {
            start,
            end,
            interpolation: self.density_interpolation,
        }
    }

    pub fn market_path(&self, name: ScenarioName) -> MarketPath {
        let (density, price) = name.levers();
        MarketPath {
            price: self.price_path(price),
            vd_ref: self.density_path(density),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityLevel {
    High,
    Low,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceLevel {
    Optimistic,
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScenarioName {
    S1,
    S2,
    S3,
    S4,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 4] = [ScenarioName::S1, ScenarioName::S2, ScenarioName::S3, ScenarioName::S4];

    pub fn levers(self) -> (DensityLevel, PriceLevel) {
        match self {
            ScenarioName::S1 => (DensityLevel::High, PriceLevel::Optimistic),
            ScenarioName::S2 => (DensityLevel::Low, PriceLevel::Conservative),
            ScenarioName::S3 => (DensityLevel::High, PriceLevel::Conservative),
            ScenarioName::S4 => (DensityLevel::Low, PriceLevel::Optimistic),
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" => Ok(ScenarioName::S1),
            "S2" => Ok(ScenarioName::S2),
            "S3" => Ok(ScenarioName::S3),
            "S4" => Ok(ScenarioName::S4),
            other => Err(Error::Domain(format!("unknown scenario `{other}` (expected S1..S4)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub years: Vec<i32>,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName) -> Self {
        ScenarioSpec {
            name,
            years: (HORIZON_START..=HORIZON_END).step_by(5).collect(),
        }
    }
}

/// Totals over all cities for one run point, with the per-city breakdown in
/// ascending `city_id` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalResult {
    pub year: i32,
    pub ticket_price_eur_km: f64,
    pub density: DensityInput,
    pub total_daily_trips: f64,
    pub total_daily_movements: f64,
    pub total_daily_flight_hours: f64,
    pub total_fleet: f64,
    pub eligible_city_count: usize,
    pub cities: Vec<CityResult>,
}

impl GlobalResult {
    /// Sums city results in ascending `city_id` order with compensated summation.
    pub fn aggregate(year: i32, ticket_price_eur_km: f64, density: DensityInput, mut cities: Vec<CityResult>) -> Self {
        cities.sort_by(|a, b| a.city_id.cmp(&b.city_id));
        let total = |f: fn(&CityResult) -> f64| sum::sum(cities.iter().map(f));
        GlobalResult {
            year,
            ticket_price_eur_km,
            density,
            total_daily_trips: total(|c| c.daily_air_trips),
            total_daily_movements: total(|c| c.daily_movements),
            total_daily_flight_hours: total(|c| c.daily_flight_hours),
            total_fleet: total(|c| c.fleet_size),
            eligible_city_count: cities.iter().filter(|c| c.eligible).count(),
            cities,
        }
    }
}

fn prepare_all(db: &[CityRecord], year: i32, growth: Option<&GrowthTable>, config: &RunConfig) -> Result<Vec<PreparedCity>> {
    db.par_iter()
        .map(|r| PreparedCity::new(project_city(r, year, growth)?, config))
        .collect()
}

/// Global air-taxi demand over a price × density grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub year: i32,
    pub density_mode: SweepDensityMode,
    pub prices: Vec<f64>,
    pub densities: Vec<f64>,
    /// `points[i][j]` is the result at `prices[i]`, `densities[j]`.
    pub points: Vec<Vec<GlobalResult>>,
}

impl SweepGrid {
    pub fn daily_trips(&self, price_index: usize, density_index: usize) -> f64 {
        self.points[price_index][density_index].total_daily_trips
    }
}

pub fn run_sweep(
    db: &[CityRecord],
    prices: &[f64],
    densities: &[f64],
    year: i32,
    growth: Option<&GrowthTable>,
    config: &RunConfig,
) -> Result<SweepGrid> {
    if prices.is_empty() || densities.is_empty() {
        return Err(Error::Domain("a sweep needs at least one price and one density".into()));
    }
    if let Some(p) = prices.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::param("price", p, "a finite value > 0"));
    }
    if let Some(d) = densities.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::param("density", d, "a finite value > 0"));
    }
    let mode = config.sweep.density_mode;
    let as_input = |vd: f64| match mode {
        SweepDensityMode::Uniform => DensityInput::Uniform(vd),
        SweepDensityMode::Reference => DensityInput::Reference(vd),
    };
    let prepared = prepare_all(db, year, growth, config)?;
    // per city: results laid out price-major
    let per_city: Vec<Vec<CityResult>> = prepared
        .par_iter()
        .map(|city| {
            let mut out = Vec::with_capacity(prices.len() * densities.len());
            for &price in prices {
                for &vd in densities {
                    out.push(city.evaluate(price, as_input(vd), config)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let points = prices
        .iter()
        .enumerate()
        .map(|(i, &price)| {
            densities
                .iter()
                .enumerate()
                .map(|(j, &vd)| {
                    let k = i * densities.len() + j;
                    let cities = per_city.iter().map(|c| c[k].clone()).collect();
                    GlobalResult::aggregate(year, price, as_input(vd), cities)
                })
                .collect()
        })
        .collect();
    Ok(SweepGrid {
        year,
        density_mode: mode,
        prices: prices.to_vec(),
        densities: densities.to_vec(),
        points,
    })
}

/// Runs a market scenario: one global result per requested year.
pub fn run_scenario(
    spec: &ScenarioSpec,
    db: &[CityRecord],
    growth: Option<&GrowthTable>,
    config: &RunConfig,
) -> Result<Vec<GlobalResult>> {
    for &y in &spec.years {
        check_horizon(y)?;
    }
    let path = config.scenarios.market_path(spec.name);
    spec.years
        .iter()
        .map(|&year| {
            let price = path.price.value(year)?;
            let density = DensityInput::Reference(path.vd_ref.value(year)?);
            let cities = prepare_all(db, year, growth, config)?
                .par_iter()
                .map(|c| c.evaluate(price, density, config))
                .collect::<Result<Vec<_>>>()?;
            Ok(GlobalResult::aggregate(year, price, density, cities))
        })
        .collect()
}

/// Years whose eligible-city count fell compared with the previous year.
pub fn eligibility_decreases(series: &[GlobalResult]) -> Vec<i32> {
    series
        .windows(2)
        .filter(|w| w[1].eligible_city_count < w[0].eligible_city_count)
        .map(|w| w[1].year)
        .collect()
}
