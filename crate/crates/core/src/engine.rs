//! Per-city demand pipeline: grid, population, trips, transport options and
//! mode choice, reduced to daily air-taxi trips, movements, flight hours and
//! fleet size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{self, value_of_travel_time};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geometry::{build_grid, key_distance_km, place_vertiports, CityGrid, VertiportNetwork};
use crate::population::{distribute_population, PopulationField};
use crate::sum::NeumaierSum;
use crate::transport::{amt_cost_per_km, vertiport_count, vertiport_density};
use crate::trips::TripDistributor;

/// What counts as flight time when sizing the fleet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlightTimeBasis {
    /// Cruise at the flown distance plus take-off and landing.
    Airborne,
    /// Airborne time plus boarding and deboarding.
    AirborneAndTurnaround,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FleetParams {
    pub seats_per_aircraft: u32,
    pub seat_load_factor: f64,
    pub utilization_per_hour: f64,
    pub flight_time_basis: FlightTimeBasis,
}

impl Default for FleetParams {
    fn default() -> Self {
        FleetParams {
            seats_per_aircraft: 4,
            seat_load_factor: 0.5,
            utilization_per_hour: 0.33,
            flight_time_basis: FlightTimeBasis::Airborne,
        }
    }
}

impl FleetParams {
    pub fn validate(&self) -> Result<()> {
        if self.seats_per_aircraft < 1 {
            return Err(Error::param(
                "fleet.seats_per_aircraft",
                self.seats_per_aircraft,
                "an integer >= 1",
            ));
        }
        let slf = self.seat_load_factor;
        if !(slf.is_finite() && slf > 0.0 && slf <= 1.0) {
            return Err(Error::param("fleet.seat_load_factor", slf, "a value in (0, 1]"));
        }
        let u = self.utilization_per_hour;
        if !(u.is_finite() && u > 0.0) {
            return Err(Error::param("fleet.utilization_per_hour", u, "a value > 0"));
        }
        Ok(())
    }
}

/// Aircraft movements per day for a number of passenger trips.
pub fn movements(daily_trips: f64, fp: &FleetParams) -> f64 {
    daily_trips / (fp.seats_per_aircraft as f64 * fp.seat_load_factor)
}

/// Vehicles needed to fly the given passenger flight hours per day.
pub fn fleet_size(daily_flight_hours: f64, fp: &FleetParams) -> f64 {
    daily_flight_hours / (fp.seats_per_aircraft as f64 * fp.seat_load_factor * fp.utilization_per_hour)
}

/// How the vertiport density of a run is given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityInput {
    /// Reference density, scaled per city by area and GDP.
    Reference(f64),
    /// Density applied to every city as-is.
    Uniform(f64),
}

impl DensityInput {
    pub fn value(&self) -> f64 {
        match *self {
            DensityInput::Reference(v) | DensityInput::Uniform(v) => v,
        }
    }
}

/// A city's inputs for one evaluation year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityInputs {
    pub city_id: String,
    pub year: i32,
    pub population: f64,
    pub area_sqkm: f64,
    pub gdp_per_capita: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityResult {
    pub city_id: String,
    pub year: i32,
    pub ticket_price_eur_km: f64,
    pub vd_city: f64,
    pub vertiport_count: usize,
    pub cell_count: usize,
    pub population: f64,
    pub gdp_per_capita: f64,
    /// All trips that start and end inside the city.
    pub daily_trips: f64,
    pub daily_air_trips: f64,
    pub daily_movements: f64,
    pub daily_flight_hours: f64,
    pub fleet_size: f64,
    pub eligible: bool,
}

impl CityResult {
    /// Whole vehicles needed.
    pub fn fleet_size_ceil(&self) -> f64 {
        self.fleet_size.ceil()
    }
}

/// Price- and density-independent part of a city: grid and population.
#[derive(Debug, Clone)]
pub struct PreparedCity {
    pub inputs: CityInputs,
    pub grid: CityGrid,
    pub field: PopulationField,
}

struct OriginTotals {
    distributed: f64,
    air_trips: f64,
    flight_hours: f64,
}

impl PreparedCity {
    pub fn new(inputs: CityInputs, config: &RunConfig) -> Result<Self> {
        if !(inputs.gdp_per_capita.is_finite() && inputs.gdp_per_capita >= 0.0) {
            return Err(Error::param(
                "gdp_per_capita",
                inputs.gdp_per_capita,
                "a finite value >= 0",
            ));
        }
        let grid = build_grid(inputs.area_sqkm, config.grid)?;
        let field = distribute_population(&grid, inputs.population, &config.population)?;
        Ok(PreparedCity {
            inputs,
            grid,
            field,
        })
    }

    pub fn vd_city(&self, density: DensityInput, config: &RunConfig) -> f64 {
        match density {
            DensityInput::Reference(vd_ref) => vertiport_density(
                self.inputs.area_sqkm,
                self.inputs.gdp_per_capita,
                vd_ref,
                &config.density,
            ),
            DensityInput::Uniform(vd) => vd,
        }
    }

    pub fn network(&self, density: DensityInput, config: &RunConfig) -> Result<VertiportNetwork> {
        let n = vertiport_count(self.inputs.area_sqkm, self.vd_city(density, config));
        place_vertiports(self.grid.radius_km, n)
    }

    pub fn evaluate(&self, ticket_price_per_km: f64, density: DensityInput, config: &RunConfig) -> Result<CityResult> {
        if !(ticket_price_per_km.is_finite() && ticket_price_per_km >= 0.0) {
            return Err(Error::param("ticket_price_per_km", ticket_price_per_km, "a finite value >= 0"));
        }
        if !(density.value().is_finite() && density.value() >= 0.0) {
            return Err(Error::param("vertiport_density", density.value(), "a finite value >= 0"));
        }
        let gdp = self.inputs.gdp_per_capita;
        let vd_city = self.vd_city(density, config);
        let network = self.network(density, config)?;
        let grid = &self.grid;
        let s = grid.cell_edge_km();
        let amt = &config.amt;
        let air = &config.air_taxi;
        let choice_params = &config.choice;

        let vtt = value_of_travel_time(gdp, choice_params);
        let rate = amt_cost_per_km(gdp, amt);
        // Generalized cost of a ground leg over a linear distance.
        let ground_gc = |d: f64| vtt.mul_add(d / amt.speed_kmh, rate * d * amt.detour_factor);

        // Access/egress: each cell uses its nearest vertiport at both ends.
        let (cell_port, cell_leg_gc): (Vec<usize>, Vec<f64>) = (0..grid.len())
            .map(|i| {
                let (v, d) = network.nearest(grid.center_km(i));
                (v, ground_gc(d))
            })
            .unzip();

        let ports = network.positions();
        let n_ports = ports.len();
        let fixed_h = air.takeoff_landing_h() + air.turnaround_h();
        let mut flight_gc = vec![0.0; n_ports * n_ports];
        let mut flight_h = vec![0.0; n_ports * n_ports];
        for a in 0..n_ports {
            for b in 0..n_ports {
                let km = air.flight_km(ports[a], ports[b]);
                let time_h = km / air.cruise_kmh + fixed_h;
                flight_gc[a * n_ports + b] = vtt.mul_add(time_h, ticket_price_per_km * km);
                flight_h[a * n_ports + b] = match config.fleet.flight_time_basis {
                    FlightTimeBasis::Airborne => air.airborne_h(km),
                    FlightTimeBasis::AirborneAndTurnaround => air.airborne_h(km) + air.turnaround_h(),
                };
            }
        }

        let distributor = TripDistributor::new(grid, &self.field, &config.trips)?;
        let amt_gc_by_key: Vec<f64> = (0..=grid.max_pair_key())
            .map(|key| ground_gc(key_distance_km(key, s)))
            .collect();

        let rows: Vec<OriginTotals> = (0..grid.len())
            .into_par_iter()
            .map_init(
                || distributor.scratch(),
                |scratch, o| {
                    let totals = distributor.fill_row(o, scratch);
                    let origin = grid.cells[o];
                    let vo = cell_port[o];
                    let mut distributed = NeumaierSum::new();
                    let mut air_trips = NeumaierSum::new();
                    let mut hours = NeumaierSum::new();
                    distributed.add(totals.intra);
                    for d in 0..grid.len() {
                        if d == o {
                            continue;
                        }
                        let trips = distributor.trips_to(o, d, &totals, scratch);
                        distributed.add(trips);
                        let vd = cell_port[d];
                        if trips == 0.0 || vo == vd {
                            continue;
                        }
                        let key = origin.key_to(&grid.cells[d]) as usize;
                        let pair = vo * n_ports + vd;
                        let gc_air = cell_leg_gc[o] + cell_leg_gc[d] + flight_gc[pair];
                        let share = choice::share_of(gc_air, amt_gc_by_key[key], choice_params);
                        let flown = trips * share;
                        air_trips.add(flown);
                        hours.add(flown * flight_h[pair]);
                    }
                    OriginTotals {
                        distributed: distributed.value(),
                        air_trips: air_trips.value(),
                        flight_hours: hours.value(),
                    }
                },
            )
            .collect();

        let mut distributed = NeumaierSum::new();
        let mut air_trips = NeumaierSum::new();
        let mut hours = NeumaierSum::new();
        for r in &rows {
            distributed.add(r.distributed);
            air_trips.add(r.air_trips);
            hours.add(r.flight_hours);
        }
        let daily_air_trips = air_trips.value();
        let daily_flight_hours = hours.value();
        Ok(CityResult {
            city_id: self.inputs.city_id.clone(),
            year: self.inputs.year,
            ticket_price_eur_km: ticket_price_per_km,
            vd_city,
            vertiport_count: n_ports,
            cell_count: grid.len(),
            population: self.inputs.population,
            gdp_per_capita: gdp,
            daily_trips: distributed.value(),
            daily_air_trips,
            daily_movements: movements(daily_air_trips, &config.fleet),
            daily_flight_hours,
            fleet_size: fleet_size(daily_flight_hours, &config.fleet),
            eligible: daily_air_trips >= config.demand.eligibility_threshold,
        })
    }
}

/// Runs the whole pipeline for one city, ticket price and density.
pub fn city_demand(
    inputs: CityInputs,
    ticket_price_per_km: f64,
    density: DensityInput,
    config: &RunConfig,
) -> Result<CityResult> {
    PreparedCity::new(inputs, config)?.evaluate(ticket_price_per_km, density, config)
}
