//! Door-to-door time and money for the ground mode and the three-leg air-taxi
//! itinerary, plus the city-specific vertiport density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, VertiportNetwork, MIN_VERTIPORTS};

fn check(name: &str, value: f64, ok: bool, expected: &str) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::param(name, value, expected))
    }
}

/// Alternate (ground) mode of transport.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmtParams {
    pub speed_kmh: f64,
    pub detour_factor: f64,
    /// € per km per € of GDP per capita.
    pub cost_slope: f64,
    /// € per km.
    pub cost_intercept: f64,
    pub cost_adjustment: f64,
}

impl Default for AmtParams {
    fn default() -> Self {
        AmtParams {
            speed_kmh: 18.0,
            detour_factor: 1.2,
            cost_slope: 6e-6,
            cost_intercept: 0.0703,
            cost_adjustment: 1.7,
        }
    }
}

impl AmtParams {
    pub fn validate(&self) -> Result<()> {
        check("amt.speed_kmh", self.speed_kmh, self.speed_kmh > 0.0, "a value > 0")?;
        check(
            "amt.detour_factor",
            self.detour_factor,
            self.detour_factor >= 1.0,
            "a value >= 1",
        )?;
        check("amt.cost_slope", self.cost_slope, self.cost_slope >= 0.0, "a value >= 0")?;
        check(
            "amt.cost_intercept",
            self.cost_intercept,
            self.cost_intercept >= 0.0,
            "a value >= 0",
        )?;
        check(
            "amt.cost_adjustment",
            self.cost_adjustment,
            self.cost_adjustment > 0.0,
            "a value > 0",
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AirTaxiParams {
    pub cruise_kmh: f64,
    pub flight_detour: f64,
    pub takeoff_min: f64,
    pub landing_min: f64,
    pub boarding_min: f64,
    pub deboarding_min: f64,
}

impl Default for AirTaxiParams {
    fn default() -> Self {
        AirTaxiParams {
            cruise_kmh: 100.0,
            flight_detour: 1.05,
            takeoff_min: 2.0,
            landing_min: 2.0,
            boarding_min: 3.0,
            deboarding_min: 3.0,
        }
    }
}

impl AirTaxiParams {
    pub fn validate(&self) -> Result<()> {
        check("air_taxi.cruise_kmh", self.cruise_kmh, self.cruise_kmh > 0.0, "a value > 0")?;
        check(
            "air_taxi.flight_detour",
            self.flight_detour,
            self.flight_detour >= 1.0,
            "a value >= 1",
        )?;
        for (name, v) in [
            ("air_taxi.takeoff_min", self.takeoff_min),
            ("air_taxi.landing_min", self.landing_min),
            ("air_taxi.boarding_min", self.boarding_min),
            ("air_taxi.deboarding_min", self.deboarding_min),
        ] {
            check(name, v, v >= 0.0, "a value >= 0")?;
        }
        Ok(())
    }

    /// Take-off plus landing, in hours.
    pub fn takeoff_landing_h(&self) -> f64 {
        (self.takeoff_min + self.landing_min) / 60.0
    }

    /// Boarding plus deboarding, in hours.
    pub fn turnaround_h(&self) -> f64 {
        (self.boarding_min + self.deboarding_min) / 60.0
    }

    /// Flown distance between two vertiports, detour included.
    pub fn flight_km(&self, from: Point, to: Point) -> f64 {
        from.distance(&to) * self.flight_detour
    }

    /// Time in the air for a flown distance: cruise plus take-off and landing.
    pub fn airborne_h(&self, flight_km: f64) -> f64 {
        flight_km / self.cruise_kmh + self.takeoff_landing_h()
    }
}

/// Scaling factor in `[0, 1]` relative to a reference value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingCurve {
    /// `min(1, (v / (knee_fraction · reference))^exponent)`.
    SaturatingPower { knee_fraction: f64, exponent: f64 },
    /// Always 1: the quantity does not scale the density.
    Unity {},
}

impl ScalingCurve {
    pub fn factor(&self, value: f64, reference: f64) -> f64 {
        match *self {
            ScalingCurve::SaturatingPower {
                knee_fraction,
                exponent,
            } => (value / (knee_fraction * reference)).powf(exponent).min(1.0),
            ScalingCurve::Unity {} => 1.0,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if let ScalingCurve::SaturatingPower {
            knee_fraction,
            exponent,
        } = *self
        {
            check(
                &format!("{name}.knee_fraction"),
                knee_fraction,
                knee_fraction > 0.0,
                "a value > 0",
            )?;
            check(
                &format!("{name}.exponent"),
                exponent,
                exponent > 0.0,
                "a value > 0",
            )?;
        }
        Ok(())
    }
}

/// Maps a reference vertiport density to a city-specific one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensityModel {
    pub area_ref_sqkm: f64,
    /// GDP per capita of the reference country, €.
    pub gdp_ref: f64,
    pub area_curve: ScalingCurve,
    pub gdp_curve: ScalingCurve,
}

impl Default for DensityModel {
    fn default() -> Self {
        DensityModel {
            area_ref_sqkm: 3000.0,
            gdp_ref: 65_000.0,
            area_curve: ScalingCurve::SaturatingPower {
                knee_fraction: 0.2,
                exponent: 1.0,
            },
            gdp_curve: ScalingCurve::SaturatingPower {
                knee_fraction: 1.0,
                exponent: 2.0,
            },
        }
    }
}

impl DensityModel {
    pub fn validate(&self) -> Result<()> {
        check(
            "density.area_ref_sqkm",
            self.area_ref_sqkm,
            self.area_ref_sqkm > 0.0,
            "a value > 0",
        )?;
        check("density.gdp_ref", self.gdp_ref, self.gdp_ref > 0.0, "a value > 0")?;
        self.area_curve.validate("density.area_curve")?;
        self.gdp_curve.validate("density.gdp_curve")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOption {
    pub time_h: f64,
    pub cost_eur: f64,
    pub available: bool,
}

impl ModeOption {
    pub fn available(time_h: f64, cost_eur: f64) -> Self {
        ModeOption {
            time_h,
            cost_eur,
            available: true,
        }
    }

    pub fn unavailable() -> Self {
        ModeOption {
            time_h: f64::NAN,
            cost_eur: f64::NAN,
            available: false,
        }
    }
}

/// Ground-mode operating cost per km as an affine function of GDP per capita.
pub fn amt_cost_per_km(gdp_per_capita: f64, params: &AmtParams) -> f64 {
    params.cost_slope.mul_add(gdp_per_capita, params.cost_intercept) * params.cost_adjustment
}

/// Ground-mode trip over a linear distance. Time uses the linear distance,
/// cost the detoured one.
pub fn amt_option(d_linear_km: f64, gdp_per_capita: f64, params: &AmtParams) -> ModeOption {
    let rate = amt_cost_per_km(gdp_per_capita, params);
    ModeOption::available(
        d_linear_km / params.speed_kmh,
        rate * d_linear_km * params.detour_factor,
    )
}

/// City-specific vertiport density (vertiports per sq km).
pub fn vertiport_density(area_sqkm: f64, gdp_per_capita: f64, vd_ref: f64, model: &DensityModel) -> f64 {
    vd_ref
        * model.area_curve.factor(area_sqkm, model.area_ref_sqkm)
        * model.gdp_curve.factor(gdp_per_capita, model.gdp_ref)
}

/// `max(5, round(vd · area))`, halves rounded up.
pub fn vertiport_count(area_sqkm: f64, vd_city: f64) -> usize {
    let n = (vd_city * area_sqkm + 0.5).floor();
    if n.is_finite() && n > MIN_VERTIPORTS as f64 {
        n as usize
    } else {
        MIN_VERTIPORTS
    }
}

/// Pre-carriage to the nearest vertiport, flight, onward carriage from the
/// vertiport nearest to the destination. Unavailable when both ends share a
/// vertiport.
pub fn air_taxi_option(
    origin: Point,
    dest: Point,
    network: &VertiportNetwork,
    air: &AirTaxiParams,
    ticket_price_per_km: f64,
    gdp_per_capita: f64,
    amt: &AmtParams,
) -> ModeOption {
    let (vo, access_km) = network.nearest(origin);
    let (vd, egress_km) = network.nearest(dest);
    if vo == vd {
        return ModeOption::unavailable();
    }
    let positions = network.positions();
    let flight_km = air.flight_km(positions[vo], positions[vd]);
    let access = amt_option(access_km, gdp_per_capita, amt);
    let egress = amt_option(egress_km, gdp_per_capita, amt);
    ModeOption::available(
        access.time_h + egress.time_h + flight_km / air.cruise_kmh + air.takeoff_landing_h() + air.turnaround_h(),
        access.cost_eur + egress.cost_eur + ticket_price_per_km * flight_km,
    )
}
