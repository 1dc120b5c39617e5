//! Monocentric population distribution over the grid cells.
//!
//! Each cell receives a share of the city population proportional to a
//! density factor that decays exponentially from `x·k` at the center cell to
//! `k` at the outermost cell:
//!
//! ```text
//! p(d) = exp((ln(x·k) − ln k) · (d_max − d) / d_max + ln k) = k · x^((d_max − d) / d_max)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CityGrid;
use crate::sum;

/// Which distance divides `(d_max − d)` in the decay exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentDenominator {
    /// `(d_max − d)/d_max`: reproduces the center-to-edge ratio `x`.
    MaxDistance,
    /// `(d_max − d)/d`: the literal printed form; diverges at the center cell.
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayParams {
    /// Center-to-edge density ratio `x`.
    pub center_to_edge_ratio: f64,
    /// Edge reference value `k`.
    pub edge_reference: f64,
    pub exponent_denominator: ExponentDenominator,
}

impl Default for DecayParams {
    fn default() -> Self {
        DecayParams {
            center_to_edge_ratio: 10.0,
            edge_reference: 2.0,
            exponent_denominator: ExponentDenominator::MaxDistance,
        }
    }
}

impl DecayParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_to_edge_ratio.is_finite() && self.center_to_edge_ratio > 1.0) {
            return Err(Error::param(
                "population.center_to_edge_ratio",
                self.center_to_edge_ratio,
                "a finite value > 1",
            ));
        }
        if !(self.edge_reference.is_finite() && self.edge_reference > 0.0) {
            return Err(Error::param(
                "population.edge_reference",
                self.edge_reference,
                "a finite value > 0",
            ));
        }
        Ok(())
    }
}

/// Density factor for a cell at distance `d` from the center.
///
/// A single-cell city (`d_max = 0`) returns 1.
pub fn density_factor(d: f64, d_max: f64, params: &DecayParams) -> Result<f64> {
    if d_max == 0.0 {
        return Ok(1.0);
    }
    if !(d_max.is_finite() && d_max > 0.0) {
        return Err(Error::param("d_max", d_max, "a finite value >= 0"));
    }
    if !(d.is_finite() && d >= 0.0 && d <= d_max) {
        return Err(Error::param("d", d, &format!("a value in [0, {d_max}]")));
    }
    let x = params.center_to_edge_ratio;
    let k = params.edge_reference;
    let denominator = match params.exponent_denominator {
        ExponentDenominator::MaxDistance => d_max,
        ExponentDenominator::Distance => {
            if d == 0.0 {
                return Err(Error::Domain(
                    "density factor with denominator `distance` diverges at the center cell".into(),
                ));
            }
            d
        }
    };
    Ok(((x * k).ln() - k.ln()).mul_add((d_max - d) / denominator, k.ln()).exp())
}

/// Real-valued population per grid cell, aligned with `CityGrid::cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationField {
    pub pop: Vec<f64>,
}

impl PopulationField {
    pub fn total(&self) -> f64 {
        sum::sum(self.pop.iter().copied())
    }
}

pub fn distribute_population(
    grid: &CityGrid,
    total_pop: f64,
    params: &DecayParams,
) -> Result<PopulationField> {
    params.validate()?;
    if !(total_pop.is_finite() && total_pop > 0.0) {
        return Err(Error::param("total_pop", total_pop, "a finite value > 0"));
    }
    // Factors depend on the cell only through its squared lattice key.
    let max_key = grid.max_center_key() as usize;
    let mut by_key = vec![f64::NAN; max_key + 1];
    let mut factors = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let key = grid.cells[i].key_from_center() as usize;
        if by_key[key].is_nan() {
            by_key[key] = density_factor(grid.distance_from_center_km(i), grid.d_max_km, params)?;
        }
        factors.push(by_key[key]);
    }
    let norm = sum::sum(factors.iter().copied());
    Ok(PopulationField {
        pop: factors.into_iter().map(|f| total_pop * (f / norm)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_grid, GridSpec};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(area: f64) -> CityGrid {
        build_grid(area, GridSpec::default()).unwrap()
    }

    #[test]
    fn factor_boundaries() {
        let p = DecayParams::default();
        assert!((density_factor(0.0, 30.0, &p).unwrap() - 20.0).abs() < 1e-12);
        assert!((density_factor(30.0, 30.0, &p).unwrap() - 2.0).abs() < 1e-12);
        assert!((density_factor(15.0, 30.0, &p).unwrap() - 6.324555320336759).abs() < 1e-12);
    }

    #[test]
    fn factor_for_single_cell_city() {
        assert_eq!(density_factor(0.0, 0.0, &DecayParams::default()).unwrap(), 1.0);
    }

    #[test]
    fn factor_rejects_out_of_range_distance() {
        let p = DecayParams::default();
        assert!(density_factor(31.0, 30.0, &p).is_err());
        assert!(density_factor(-1.0, 30.0, &p).is_err());
    }

    #[test]
    fn printed_denominator_diverges_at_center() {
        let p = DecayParams {
            exponent_denominator: ExponentDenominator::Distance,
            ..DecayParams::default()
        };
        assert!(density_factor(0.0, 30.0, &p).is_err());
        // At the edge both forms agree on k.
        assert!((density_factor(30.0, 30.0, &p).unwrap() - 2.0).abs() < 1e-12);
        assert!(distribute_population(&grid(500.0), 1e6, &p).is_err());
    }

    #[test]
    fn single_cell_holds_everything() {
        let field = distribute_population(&grid(0.1), 500_000.0, &DecayParams::default()).unwrap();
        assert_eq!(field.pop, vec![500_000.0]);
    }

    #[test]
    fn five_cell_shares() {
        let g = grid(PI * 4.0);
        let field = distribute_population(&g, 1e6, &DecayParams::default()).unwrap();
        let c = g.center_index();
        assert!((field.pop[c] - 714_285.714_285_714_3).abs() < 1e-6);
        for (i, p) in field.pop.iter().enumerate() {
            if i != c {
                assert!((p - 71_428.571_428_571_43).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        let g = grid(100.0);
        assert!(distribute_population(&g, 0.0, &DecayParams::default()).is_err());
        let bad = DecayParams {
            center_to_edge_ratio: 1.0,
            ..DecayParams::default()
        };
        assert!(distribute_population(&g, 1e6, &bad).is_err());
    }

    proptest! {
        #[test]
        fn conservation_monotonicity_and_ratio(area in 1.0f64..5000.0, total in 5e5f64..4e7) {
            let g = grid(area);
            let field = distribute_population(&g, total, &DecayParams::default()).unwrap();
            prop_assert!((field.total() - total).abs() / total < 1e-9);

            let mut order: Vec<usize> = (0..g.len()).collect();
            order.sort_by_key(|&i| g.cells[i].key_from_center());
            for w in order.windows(2) {
                let (a, b) = (w[0], w[1]);
                let (ka, kb) = (g.cells[a].key_from_center(), g.cells[b].key_from_center());
                if ka < kb {
                    prop_assert!(field.pop[a] > field.pop[b]);
                } else {
                    prop_assert_eq!(field.pop[a], field.pop[b]);
                }
            }
            if g.len() > 1 {
                let far = *order.last().unwrap();
                let ratio = field.pop[g.center_index()] / field.pop[far];
                prop_assert!((ratio - 10.0).abs() < 1e-9);
            }
        }

        #[test]
        fn doubling_population_doubles_cells(area in 1.0f64..2000.0, total in 5e5f64..4e7) {
            let g = grid(area);
            let a = distribute_population(&g, total, &DecayParams::default()).unwrap();
            let b = distribute_population(&g, 2.0 * total, &DecayParams::default()).unwrap();
            for (x, y) in a.pop.iter().zip(&b.pop) {
                prop_assert_eq!(2.0 * x, *y);
            }
        }
    }
}
