//! Result serialization. Floats use Rust's shortest round-trip formatting,
//! so identical inputs produce identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::config::RunConfig;
use crate::engine::CityResult;
use crate::error::{Error, Result};
use crate::scenario::{GlobalResult, SweepGrid};

pub const RESULT_HEADER: [&str; 11] = [
    "run_id",
    "scenario",
    "year",
    "scope",
    "price_eur_km",
    "vd_per_sqkm",
    "daily_trips",
    "daily_movements",
    "daily_flight_hours",
    "fleet_size",
    "eligible",
];

pub const GLOBAL_SCOPE: &str = "GLOBAL";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Flat export record. `scope` is a city id or `GLOBAL`; for `GLOBAL` rows
/// `eligible` holds the number of eligible cities, otherwise 0 or 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub run_id: String,
    pub scenario: String,
    pub year: i32,
    pub scope: String,
    pub price_eur_km: f64,
    pub vd_per_sqkm: f64,
    pub daily_trips: f64,
    pub daily_movements: f64,
    pub daily_flight_hours: f64,
    pub fleet_size: f64,
    pub eligible: u64,
}

impl ResultRow {
    pub fn from_city(run_id: &str, scenario: &str, c: &CityResult) -> Self {
        ResultRow {
            run_id: run_id.to_string(),
            scenario: scenario.to_string(),
            year: c.year,
            scope: c.city_id.clone(),
            price_eur_km: c.ticket_price_eur_km,
            vd_per_sqkm: c.vd_city,
            daily_trips: c.daily_air_trips,
            daily_movements: c.daily_movements,
            daily_flight_hours: c.daily_flight_hours,
            fleet_size: c.fleet_size,
            eligible: c.eligible as u64,
        }
    }

    pub fn from_global(run_id: &str, scenario: &str, g: &GlobalResult) -> Self {
        ResultRow {
            run_id: run_id.to_string(),
            scenario: scenario.to_string(),
            year: g.year,
            scope: GLOBAL_SCOPE.to_string(),
            price_eur_km: g.ticket_price_eur_km,
            vd_per_sqkm: g.density.value(),
            daily_trips: g.total_daily_trips,
            daily_movements: g.total_daily_movements,
            daily_flight_hours: g.total_daily_flight_hours,
            fleet_size: g.total_fleet,
            eligible: g.eligible_city_count as u64,
        }
    }

    fn check(&self) -> Result<()> {
        for (name, v) in [
            ("price_eur_km", self.price_eur_km),
            ("vd_per_sqkm", self.vd_per_sqkm),
            ("daily_trips", self.daily_trips),
            ("daily_movements", self.daily_movements),
            ("daily_flight_hours", self.daily_flight_hours),
            ("fleet_size", self.fleet_size),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!(
                    "result row {} {} has {name} = {v}",
                    self.scope, self.year
                )));
            }
        }
        Ok(())
    }
}

/// GLOBAL row followed by one row per city, for each point of a series.
pub fn rows_for_series(run_id: &str, scenario: &str, series: &[GlobalResult]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for g in series {
        rows.push(ResultRow::from_global(run_id, scenario, g));
        rows.extend(g.cities.iter().map(|c| ResultRow::from_city(run_id, scenario, c)));
    }
    rows
}

/// Identifies a run by its effective configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStamp<'a> {
    pub config: &'a RunConfig,
    pub digest: String,
}

impl<'a> RunStamp<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        RunStamp {
            config,
            digest: config.digest(),
        }
    }

    /// The run id is the full configuration digest.
    pub fn run_id(&self) -> &str {
        &self.digest
    }
}

#[derive(Serialize)]
struct JsonEnvelope<'a, T: Serialize> {
    run_id: &'a str,
    config_digest: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn write_json<W: Write, T: Serialize>(stamp: &RunStamp, body: T, mut writer: W) -> Result<()> {
    let env = JsonEnvelope {
        run_id: stamp.run_id(),
        config_digest: &stamp.digest,
        config: stamp.config,
        body,
    };
    serde_json::to_writer_pretty(&mut writer, &env)?;
    writer
        .write_all(b"\n")
        .map_err(|e| Error::io("<output>", e))
}

fn fmt_f64(v: f64) -> String {
    v.to_string()
}

pub fn write_results<W: Write>(rows: &[ResultRow], stamp: &RunStamp, format: Format, writer: W) -> Result<()> {
    for r in rows {
        r.check()?;
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(RESULT_HEADER)?;
            for r in rows {
                w.write_record([
                    r.run_id.clone(),
                    r.scenario.clone(),
                    r.year.to_string(),
                    r.scope.clone(),
                    fmt_f64(r.price_eur_km),
                    fmt_f64(r.vd_per_sqkm),
                    fmt_f64(r.daily_trips),
                    fmt_f64(r.daily_movements),
                    fmt_f64(r.daily_flight_hours),
                    fmt_f64(r.fleet_size),
                    r.eligible.to_string(),
                ])?;
            }
            w.flush().map_err(|e| Error::io("<output>", e))
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                rows: &'a [ResultRow],
            }
            write_json(stamp, Body { rows }, writer)
        }
    }
}

/// Sweep grid as a table: one row per price, one column per density, cells
/// holding global daily air-taxi trips.
pub fn write_sweep_grid<W: Write>(grid: &SweepGrid, stamp: &RunStamp, format: Format, writer: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            let mut header = vec!["run_id".to_string(), "price_eur_km".to_string()];
            header.extend(grid.densities.iter().map(|d| format!("vd_{}", fmt_f64(*d))));
            w.write_record(&header)?;
            for (i, price) in grid.prices.iter().enumerate() {
                let mut rec = vec![stamp.run_id().to_string(), fmt_f64(*price)];
                rec.extend((0..grid.densities.len()).map(|j| fmt_f64(grid.daily_trips(i, j))));
                w.write_record(&rec)?;
            }
            w.flush().map_err(|e| Error::io("<output>", e))
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                year: i32,
                density_mode: crate::config::SweepDensityMode,
                prices: &'a [f64],
                densities: &'a [f64],
                daily_trips: Vec<Vec<f64>>,
            }
            let daily_trips = (0..grid.prices.len())
                .map(|i| (0..grid.densities.len()).map(|j| grid.daily_trips(i, j)).collect())
                .collect();
            write_json(
                stamp,
                Body {
                    year: grid.year,
                    density_mode: grid.density_mode,
                    prices: &grid.prices,
                    densities: &grid.densities,
                    daily_trips,
                },
                writer,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scope: &str, trips: f64) -> ResultRow {
        ResultRow {
            run_id: "r".into(),
            scenario: "S1".into(),
            year: 2030,
            scope: scope.into(),
            price_eur_km: 4.1,
            vd_per_sqkm: 0.002,
            daily_trips: trips,
            daily_movements: trips / 2.0,
            daily_flight_hours: 0.1,
            fleet_size: 0.30303030303030304,
            eligible: 1,
        }
    }

    fn csv_of(rows: &[ResultRow]) -> String {
        let cfg = RunConfig::default();
        let mut buf = Vec::new();
        write_results(rows, &RunStamp::new(&cfg), Format::Csv, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(csv_of(&[]), format!("{}\n", RESULT_HEADER.join(",")));
    }

    #[test]
    fn float_formatting_is_shortest_round_trip() {
        let text = csv_of(&[row("A", 1000.0)]);
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "r,S1,2030,A,4.1,0.002,1000,500,0.1,0.30303030303030304,1");
        let back: f64 = line.split(',').nth(9).unwrap().parse().unwrap();
        assert_eq!(back, 0.30303030303030304);
    }

    #[test]
    fn rejects_negative_or_non_finite() {
        let cfg = RunConfig::default();
        let stamp = RunStamp::new(&cfg);
        for bad in [-1.0, f64::NAN, f64::INFINITY] {
            let mut buf = Vec::new();
            assert!(write_results(&[row("A", bad)], &stamp, Format::Csv, &mut buf).is_err());
        }
    }

    #[test]
    fn json_embeds_digest_and_config() {
        let cfg = RunConfig::default();
        let stamp = RunStamp::new(&cfg);
        let mut buf = Vec::new();
        write_results(&[row("A", 3.0)], &stamp, Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["config_digest"], cfg.digest());
        assert_eq!(v["run_id"], cfg.digest());
        assert_eq!(v["config"]["choice"]["beta_gc"], -0.25);
        assert_eq!(v["rows"][0]["daily_trips"], 3.0);
    }
}
