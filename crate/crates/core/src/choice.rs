//! Value of travel time, generalized cost and the binary logit split between
//! the ground mode and the air taxi.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transport::ModeOption;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChoiceParams {
    /// Utility per € of generalized cost; must be negative.
    pub beta_gc: f64,
    pub beta_amt: f64,
    pub beta_air: f64,
    /// €/h per € of GDP per capita.
    pub vtt_slope: f64,
    /// €/h.
    pub vtt_intercept: f64,
}

impl Default for ChoiceParams {
    fn default() -> Self {
        ChoiceParams {
            beta_gc: -0.25,
            beta_amt: 0.0,
            beta_air: 0.0,
            vtt_slope: 0.0003,
            vtt_intercept: -0.3404,
        }
    }
}

impl ChoiceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_gc.is_finite() && self.beta_gc < 0.0) {
            return Err(Error::param("choice.beta_gc", self.beta_gc, "a finite value < 0"));
        }
        for (name, v) in [
            ("choice.beta_amt", self.beta_amt),
            ("choice.beta_air", self.beta_air),
            ("choice.vtt_slope", self.vtt_slope),
            ("choice.vtt_intercept", self.vtt_intercept),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, v, "a finite value"));
            }
        }
        Ok(())
    }
}

/// Value of travel time in €/h, floored at zero for very low GDP.
pub fn value_of_travel_time(gdp_per_capita: f64, params: &ChoiceParams) -> f64 {
    params
        .vtt_slope
        .mul_add(gdp_per_capita, params.vtt_intercept)
        .max(0.0)
}

/// Monetary cost plus monetized travel time; `None` for an unavailable option.
pub fn generalized_cost(option: &ModeOption, vtt: f64) -> Option<f64> {
    option
        .available
        .then(|| vtt.mul_add(option.time_h, option.cost_eur))
}

/// Logistic probability of choosing the air taxi given the utility gap
/// `U_amt − U_air`. Saturates to 0 or 1 instead of overflowing.
#[inline]
pub fn logistic_share(utility_gap: f64) -> f64 {
    1.0 / (1.0 + utility_gap.exp())
}

/// Air-taxi probability from the two generalized costs.
pub fn air_taxi_share(gc_air: f64, gc_amt: f64, params: &ChoiceParams) -> Result<f64> {
    if !gc_air.is_finite() || !gc_amt.is_finite() {
        return Err(Error::Domain(format!(
            "generalized costs must be finite (air {gc_air}, ground {gc_amt})"
        )));
    }
    Ok(share_of(gc_air, gc_amt, params))
}

#[inline]
pub(crate) fn share_of(gc_air: f64, gc_amt: f64, params: &ChoiceParams) -> f64 {
    let u_air = params.beta_gc.mul_add(gc_air, params.beta_air);
    let u_amt = params.beta_gc.mul_add(gc_amt, params.beta_amt);
    logistic_share(u_amt - u_air)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vtt_values() {
        let p = ChoiceParams::default();
        assert!((value_of_travel_time(50_000.0, &p) - 14.6596).abs() < 1e-9);
        assert_eq!(value_of_travel_time(1134.0, &p), 0.0);
        assert!(value_of_travel_time(1135.0, &p) > 0.0);
        assert_eq!(value_of_travel_time(0.0, &p), 0.0);
    }

    #[test]
    fn gc_values() {
        let opt = ModeOption::available(0.5, 6.80);
        assert!((generalized_cost(&opt, 14.6596).unwrap() - 14.1298).abs() < 1e-12);
        assert_eq!(generalized_cost(&opt, 0.0), Some(6.80));
        let still = ModeOption::available(0.0, 4.2);
        assert_eq!(generalized_cost(&still, 30.0), Some(4.2));
        assert_eq!(generalized_cost(&ModeOption::unavailable(), 10.0), None);
    }

    #[test]
    fn logit_values() {
        let p = ChoiceParams::default();
        assert_eq!(air_taxi_share(12.0, 12.0, &p).unwrap(), 0.5);
        assert!((air_taxi_share(10.0, 20.0, &p).unwrap() - 0.9241418199787566).abs() < 1e-12);
        assert!(air_taxi_share(f64::NAN, 1.0, &p).is_err());
        assert!(air_taxi_share(1.0, f64::INFINITY, &p).is_err());
    }

    #[test]
    fn logit_saturates_without_nan() {
        for gap in [700.0, 710.0, 1e6, -700.0, -710.0, -1e6] {
            let s = logistic_share(gap);
            assert!(s.is_finite() && (0.0..=1.0).contains(&s), "{gap} -> {s}");
        }
        assert_eq!(logistic_share(1e6), 0.0);
        assert_eq!(logistic_share(-1e6), 1.0);
    }

    #[test]
    fn rejects_non_negative_beta() {
        let p = ChoiceParams {
            beta_gc: 0.1,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn translation_invariant(a in -50.0f64..200.0, b in -50.0f64..200.0, c in -100.0f64..100.0) {
            let p = ChoiceParams::default();
            let x = air_taxi_share(a, b, &p).unwrap();
            let y = air_taxi_share(a + c, b + c, &p).unwrap();
            prop_assert!((x - y).abs() < 1e-12);
            let amt_share = 1.0 - x;
            prop_assert_eq!(x + amt_share, 1.0);
        }

        #[test]
        fn monotone_in_costs(a in 0.0f64..100.0, b in 0.0f64..100.0, d in 0.01f64..5.0) {
            let p = ChoiceParams::default();
            let base = air_taxi_share(a, b, &p).unwrap();
            prop_assert!(air_taxi_share(a + d, b, &p).unwrap() < base);
            prop_assert!(air_taxi_share(a, b + d, &p).unwrap() > base);
        }

        #[test]
        fn vanishing_beta_gives_even_split(a in 0.0f64..1000.0, b in 0.0f64..1000.0) {
            let p = ChoiceParams { beta_gc: -1e-12, ..Default::default() };
            prop_assert!((air_taxi_share(a, b, &p).unwrap() - 0.5).abs() < 1e-9);
        }

        #[test]
        fn large_gaps_stay_finite(gap in -700.0f64..700.0) {
            let p = ChoiceParams { beta_gc: -1.0, ..Default::default() };
            let s = air_taxi_share(0.0, gap, &p).unwrap();
            prop_assert!(s.is_finite() && (0.0..=1.0).contains(&s));
        }
    }
}
