//! Schematic circular city on a square lattice, exact distance classes and
//! sunflower vertiport layout.
//!
//! Cells are identified by integer lattice coordinates `(ix, iy)`; the center
//! cell is `(0, 0)`. Distances between cells are grouped by the exact integer
//! key `Δix² + Δiy²`, so two cell pairs are "at the same distance" exactly when
//! their keys are equal.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of vertiports in any city.
pub const MIN_VERTIPORTS: usize = 5;

/// Golden angle `π(3 − √5)`, i.e. `2π(1 − 1/φ)`.
pub fn golden_angle() -> f64 {
    PI * (3.0 - 5f64.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub cell_edge_km: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { cell_edge_km: 2.0 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell_edge_km.is_finite() && self.cell_edge_km > 0.0) {
            return Err(Error::param(
                "grid.cell_edge_km",
                self.cell_edge_km,
                "a finite value > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn distance_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.distance(&Point::ORIGIN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub ix: i32,
    pub iy: i32,
}

impl Cell {
    pub fn new(ix: i32, iy: i32) -> Self {
        Cell { ix, iy }
    }

    /// Squared lattice offset to another cell.
    #[inline]
    pub fn key_to(&self, other: &Cell) -> u32 {
        let dx = (self.ix - other.ix).unsigned_abs();
        let dy = (self.iy - other.iy).unsigned_abs();
        dx * dx + dy * dy
    }

    /// Squared lattice offset from the center cell.
    pub fn key_from_center(&self) -> u32 {
        self.key_to(&Cell::new(0, 0))
    }

    pub fn center_km(&self, cell_edge_km: f64) -> Point {
        Point::new(self.ix as f64 * cell_edge_km, self.iy as f64 * cell_edge_km)
    }
}

/// Distance in km represented by a squared lattice key. Key 0 is the
/// intra-cell class at half a cell edge.
#[inline]
pub fn key_distance_km(key: u32, cell_edge_km: f64) -> f64 {
    if key == 0 {
        cell_edge_km / 2.0
    } else {
        cell_edge_km * (key as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityGrid {
    pub spec: GridSpec,
    /// Row-major order: ascending `iy`, then ascending `ix`.
    pub cells: Vec<Cell>,
    pub radius_km: f64,
    pub d_max_km: f64,
}

impl CityGrid {
    pub fn cell_edge_km(&self) -> f64 {
        self.spec.cell_edge_km
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn center_index(&self) -> usize {
        self.cells
            .iter()
            .position(|c| c.ix == 0 && c.iy == 0)
            .expect("grid always contains the center cell")
    }

    pub fn index_of(&self, cell: Cell) -> Option<usize> {
        self.cells.binary_search_by(|c| (c.iy, c.ix).cmp(&(cell.iy, cell.ix))).ok()
    }

    pub fn center_km(&self, index: usize) -> Point {
        self.cells[index].center_km(self.spec.cell_edge_km)
    }

    /// Euclidean distance of a cell center from the center cell.
    pub fn distance_from_center_km(&self, index: usize) -> f64 {
        let key = self.cells[index].key_from_center();
        self.spec.cell_edge_km * (key as f64).sqrt()
    }

    /// Largest squared lattice offset between the center and any cell.
    pub fn max_center_key(&self) -> u32 {
        self.cells.iter().map(Cell::key_from_center).max().unwrap_or(0)
    }

    /// Upper bound on the squared lattice offset between any two cells.
    pub fn max_pair_key(&self) -> u32 {
        // Every cell lies within sqrt(max_center_key) of the center, so any
        // pair is at most twice that apart.
        4 * self.max_center_key()
    }
}

/// Lattice cells whose centers fall inside the circle of the given area.
pub fn build_grid(area_sqkm: f64, spec: GridSpec) -> Result<CityGrid> {
    spec.validate()?;
    if !(area_sqkm.is_finite() && area_sqkm > 0.0) {
        return Err(Error::param("area_sqkm", area_sqkm, "a finite value > 0"));
    }
    let s = spec.cell_edge_km;
    let radius_km = (area_sqkm / PI).sqrt();
    // (radius / s)^2, with a relative slack so lattice points that sit on the
    // boundary up to rounding are counted inside.
    let limit = area_sqkm / (PI * s * s) * (1.0 + 1e-12);
    let reach = limit.sqrt().floor() as i32;

    let mut cells = Vec::new();
    for iy in -reach..=reach {
        for ix in -reach..=reach {
            let key = (ix * ix + iy * iy) as f64;
            if key <= limit {
                cells.push(Cell::new(ix, iy));
            }
        }
    }
    // The center always satisfies 0 <= limit, so tiny cities degrade to the
    // single center cell.
    debug_assert!(!cells.is_empty());

    let max_key = cells.iter().map(Cell::key_from_center).max().unwrap_or(0);
    Ok(CityGrid {
        spec,
        cells,
        radius_km,
        d_max_km: s * (max_key as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceClass {
    pub key: u32,
    pub distance_km: f64,
}

/// All distinct distance classes among cell pairs, ascending, with the
/// intra-cell class first.
pub fn distance_classes(grid: &CityGrid) -> Vec<DistanceClass> {
    let mut keys = BTreeSet::new();
    keys.insert(0u32);
    for (i, a) in grid.cells.iter().enumerate() {
        for b in &grid.cells[i + 1..] {
            keys.insert(a.key_to(b));
        }
    }
    keys.into_iter()
        .map(|key| DistanceClass {
            key,
            distance_km: key_distance_km(key, grid.spec.cell_edge_km),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertiportNetwork {
    positions: Vec<Point>,
}

impl VertiportNetwork {
    /// Wraps explicit positions; all must lie within `radius_km` of the origin.
    pub fn from_positions(radius_km: f64, positions: Vec<Point>) -> Result<Self> {
        if positions.len() < MIN_VERTIPORTS {
            return Err(Error::Domain(format!(
                "a vertiport network needs at least {MIN_VERTIPORTS} vertiports, got {}",
                positions.len()
            )));
        }
        if let Some(p) = positions
            .iter()
            .find(|p| !(p.x.is_finite() && p.y.is_finite()) || p.norm() > radius_km)
        {
            return Err(Error::Domain(format!(
                "vertiport ({}, {}) lies outside the city radius {radius_km} km",
                p.x, p.y
            )));
        }
        Ok(VertiportNetwork { positions })
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn count(&self) -> usize {
        self.positions.len()
    }

    /// Closest vertiport to `point` and its distance; ties go to the lowest index.
    pub fn nearest(&self, point: Point) -> (usize, f64) {
        let mut best = 0;
        let mut best_sq = f64::INFINITY;
        for (i, p) in self.positions.iter().enumerate() {
            let d = p.distance_sq(&point);
            if d < best_sq {
                best = i;
                best_sq = d;
            }
        }
        (best, best_sq.sqrt())
    }
}

/// Sunflower (Vogel) spiral: point `i = 1..=n` at radius `R·sqrt((i − ½)/n)`
/// and angle `i·γ` with γ the golden angle. Index 0 of the result is `i = 1`.
pub fn place_vertiports(radius_km: f64, n: usize) -> Result<VertiportNetwork> {
    if n < MIN_VERTIPORTS {
        return Err(Error::Domain(format!(
            "a city needs at least {MIN_VERTIPORTS} vertiports, got {n}"
        )));
    }
    if !(radius_km.is_finite() && radius_km > 0.0) {
        return Err(Error::param("radius_km", radius_km, "a finite value > 0"));
    }
    let gamma = golden_angle();
    let nf = n as f64;
    let positions = (1..=n)
        .map(|i| {
            let fi = i as f64;
            let r = radius_km * ((fi - 0.5) / nf).sqrt();
            let (sin, cos) = (fi * gamma).sin_cos();
            Point::new(r * cos, r * sin)
        })
        .collect();
    Ok(VertiportNetwork { positions })
}

pub fn nearest_vertiport(point: Point, network: &VertiportNetwork) -> (usize, f64) {
    network.nearest(point)
}
