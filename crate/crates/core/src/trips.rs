//! Trip generation and distance-class trip distribution.
//!
//! Every origin cell generates `pop · trips_per_person` daily trips. The
//! cumulative trip-length law `y(d) = slope · ln d + intercept` (clamped to
//! `[0, 1]`) gives the share of trips shorter than `d`. For each origin the
//! reachable distance classes are walked in ascending order; the increment of
//! `y` between consecutive classes is the share allocated to that class, split
//! over its destination cells in proportion to their population. Trips longer
//! than the farthest reachable class leave the city and are recorded as
//! discarded.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{key_distance_km, CityGrid};
use crate::population::PopulationField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TripParams {
    pub trips_per_person_per_day: f64,
    pub share_slope: f64,
    pub share_intercept: f64,
}

impl Default for TripParams {
    fn default() -> Self {
        TripParams {
            trips_per_person_per_day: 3.0,
            share_slope: 0.2051,
            share_intercept: 0.0592,
        }
    }
}

impl TripParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.trips_per_person_per_day.is_finite() && self.trips_per_person_per_day > 0.0) {
            return Err(Error::param(
                "trips.trips_per_person_per_day",
                self.trips_per_person_per_day,
                "a finite value > 0",
            ));
        }
        if !(self.share_slope.is_finite() && self.share_slope > 0.0) {
            return Err(Error::param(
                "trips.share_slope",
                self.share_slope,
                "a finite value > 0",
            ));
        }
        if !self.share_intercept.is_finite() {
            return Err(Error::param(
                "trips.share_intercept",
                self.share_intercept,
                "a finite value",
            ));
        }
        Ok(())
    }
}

/// Share of all trips shorter than `d` km (natural log, clamped to `[0, 1]`).
pub fn cumulative_trip_share(d: f64, params: &TripParams) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::param("d", d, "a finite distance > 0"));
    }
    Ok(raw_share(d, params))
}

#[inline]
fn raw_share(d: f64, params: &TripParams) -> f64 {
    params
        .share_slope
        .mul_add(d.ln(), params.share_intercept)
        .clamp(0.0, 1.0)
}

/// Per-origin bookkeeping for one OD row.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowTotals {
    pub generated: f64,
    pub intra: f64,
    pub discarded: f64,
}

/// Reusable per-worker buffers indexed by squared lattice key.
#[derive(Debug, Clone)]
pub struct RowScratch {
    pop_by_key: Vec<f64>,
    trips_by_key: Vec<f64>,
    keys: Vec<u32>,
}

impl RowScratch {
    /// Reachable non-zero keys of the last filled row, ascending.
    pub fn keys(&self) -> &[u32] {
        &self.keys
    }

    /// Trips allocated to a whole distance class in the last filled row.
    pub fn class_trips(&self, key: u32) -> f64 {
        self.trips_by_key[key as usize]
    }

    /// Population of all destinations in a class of the last filled row.
    pub fn class_population(&self, key: u32) -> f64 {
        self.pop_by_key[key as usize]
    }
}

/// Distributes the trips of one origin at a time without materializing the
/// full matrix. Shared by [`OdMatrix::build`] and the demand engine.
#[derive(Debug, Clone)]
pub struct TripDistributor<'a> {
    grid: &'a CityGrid,
    pop: &'a [f64],
    trips_per_person: f64,
    share_by_key: Vec<f64>,
}

impl<'a> TripDistributor<'a> {
    pub fn new(grid: &'a CityGrid, field: &'a PopulationField, params: &TripParams) -> Result<Self> {
        params.validate()?;
        if field.pop.len() != grid.len() {
            return Err(Error::Domain(format!(
                "population field has {} cells, grid has {}",
                field.pop.len(),
                grid.len()
            )));
        }
        let s = grid.cell_edge_km();
        let share_by_key = (0..=grid.max_pair_key())
            .map(|key| raw_share(key_distance_km(key, s), params))
            .collect();
        Ok(TripDistributor {
            grid,
            pop: &field.pop,
            trips_per_person: params.trips_per_person_per_day,
            share_by_key,
        })
    }

    pub fn grid(&self) -> &CityGrid {
        self.grid
    }

    pub fn scratch(&self) -> RowScratch {
        let n = self.share_by_key.len();
        RowScratch {
            pop_by_key: vec![0.0; n],
            trips_by_key: vec![0.0; n],
            keys: Vec::new(),
        }
    }

    /// Fills `scratch` with the class allocation of `origin`.
    pub fn fill_row(&self, origin: usize, scratch: &mut RowScratch) -> RowTotals {
        for &k in &scratch.keys {
            scratch.pop_by_key[k as usize] = 0.0;
            scratch.trips_by_key[k as usize] = 0.0;
        }
        scratch.keys.clear();

        let cells = &self.grid.cells;
        let o = cells[origin];
        for (j, cell) in cells.iter().enumerate() {
            if j == origin {
                continue;
            }
            let key = o.key_to(cell);
            let slot = &mut scratch.pop_by_key[key as usize];
            if *slot == 0.0 {
                scratch.keys.push(key);
            }
            *slot += self.pop[j];
        }
        scratch.keys.sort_unstable();
        scratch.keys.dedup();

        let generated = self.pop[origin] * self.trips_per_person;
        let mut prev = self.share_by_key[0];
        let intra = generated * prev;
        for &key in &scratch.keys {
            if scratch.pop_by_key[key as usize] == 0.0 {
                // nobody to receive trips; the share rolls into the next class
                continue;
            }
            let y = self.share_by_key[key as usize];
            scratch.trips_by_key[key as usize] = generated * (y - prev);
            prev = y;
        }
        RowTotals {
            generated,
            intra,
            discarded: generated * (1.0 - prev),
        }
    }

    /// Trips from the filled origin to `dest`. `totals` and `scratch` must come
    /// from the same `fill_row(origin, ..)` call.
    #[inline]
    pub fn trips_to(&self, origin: usize, dest: usize, totals: &RowTotals, scratch: &RowScratch) -> f64 {
        if origin == dest {
            return totals.intra;
        }
        let key = self.grid.cells[origin].key_to(&self.grid.cells[dest]) as usize;
        let class_pop = scratch.pop_by_key[key];
        if class_pop == 0.0 {
            return 0.0;
        }
        scratch.trips_by_key[key] * (self.pop[dest] / class_pop)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassSlice {
    pub key: u32,
    pub distance_km: f64,
    /// Trips allocated to the whole class.
    pub trips: f64,
    /// Total population of the destinations in the class.
    pub dest_population: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdRow {
    pub totals: RowTotals,
    /// Non-intra classes reachable from the origin, ascending by key.
    pub classes: Vec<ClassSlice>,
}

/// Trip table stored per origin and distance class; a destination's entry is
/// its population-weighted slice of the class.
#[derive(Debug, Clone, PartialEq)]
pub struct OdMatrix {
    grid: CityGrid,
    pop: Vec<f64>,
    rows: Vec<OdRow>,
}

impl OdMatrix {
    pub fn build(grid: &CityGrid, field: &PopulationField, params: &TripParams) -> Result<Self> {
        let dist = TripDistributor::new(grid, field, params)?;
        let s = grid.cell_edge_km();
        let rows = (0..grid.len())
            .into_par_iter()
            .map_init(
                || dist.scratch(),
                |scratch, origin| {
                    let totals = dist.fill_row(origin, scratch);
                    let classes = scratch
                        .keys
                        .iter()
                        .map(|&key| ClassSlice {
                            key,
                            distance_km: key_distance_km(key, s),
                            trips: scratch.class_trips(key),
                            dest_population: scratch.class_population(key),
                        })
                        .collect();
                    OdRow { totals, classes }
                },
            )
            .collect();
        Ok(OdMatrix {
            grid: grid.clone(),
            pop: field.pop.clone(),
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, origin: usize) -> &OdRow {
        &self.rows[origin]
    }

    pub fn discarded(&self, origin: usize) -> f64 {
        self.rows[origin].totals.discarded
    }

    pub fn trips(&self, origin: usize, dest: usize) -> f64 {
        let row = &self.rows[origin];
        if origin == dest {
            return row.totals.intra;
        }
        let key = self.grid.cells[origin].key_to(&self.grid.cells[dest]);
        let slice = &row.classes[row
            .classes
            .binary_search_by_key(&key, |c| c.key)
            .expect("every destination key is a reachable class")];
        if slice.dest_population == 0.0 {
            return 0.0;
        }
        slice.trips * (self.pop[dest] / slice.dest_population)
    }

    /// Row-major dense view: `(origin, dest, trips)`.
    pub fn dense(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |o| (0..n).map(move |d| (o, d, self.trips(o, d))))
    }

    /// Dense matrix as CSV for debugging.
    pub fn write_dense_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["origin_ix", "origin_iy", "dest_ix", "dest_iy", "trips_per_day"])?;
        for (o, d, t) in self.dense() {
            let (a, b) = (self.grid.cells[o], self.grid.cells[d]);
            w.write_record([
                a.ix.to_string(),
                a.iy.to_string(),
                b.ix.to_string(),
                b.iy.to_string(),
                t.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<od csv>", e))?;
        Ok(())
    }
}

/// Convenience wrapper matching the grid-level operation.
pub fn build_od_matrix(grid: &CityGrid, field: &PopulationField, params: &TripParams) -> Result<OdMatrix> {
    OdMatrix::build(grid, field, params)
}
