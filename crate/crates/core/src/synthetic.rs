//! Seeded synthetic city databases for testing and benchmarking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::CityRecord;

pub const MAX_AREA_SQKM: f64 = 9000.0;
const MIN_AREA_SQKM: f64 = 50.0;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// `n` cities drawn from a fixed seed. Areas span 50–9,000 sq km with the
/// first city pinned at the maximum; GDP per capita spans 2,000–80,000 €;
/// growth rates are non-negative. Identical seeds give identical databases.
pub fn synthetic_database(n: usize, seed: u64) -> Vec<CityRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.max(1).to_string().len();
    (0..n)
        .map(|i| {
            let area = if i == 0 {
                MAX_AREA_SQKM
            } else {
                log_uniform(&mut rng, MIN_AREA_SQKM, MAX_AREA_SQKM)
            };
            let density = log_uniform(&mut rng, 800.0, 9000.0);
            let gdp = log_uniform(&mut rng, 2000.0, 80_000.0);
            CityRecord {
                city_id: format!("C{i:0width$}"),
                name: format!("Synthetic {i}"),
                country: format!("Z{}", i % 37),
                population_2022: (area * density).max(500_000.0).round(),
                area_sqkm: (area * 100.0).round() / 100.0,
                gdp_per_capita_2022: gdp.round(),
                pop_growth_rate: (rng.gen_range(0.0..0.02f64) * 1e4).round() / 1e4,
                gdp_growth_rate: (rng.gen_range(0.0..0.035f64) * 1e4).round() / 1e4,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        let a = synthetic_database(200, 7);
        assert_eq!(a, synthetic_database(200, 7));
        assert_ne!(a, synthetic_database(200, 8));
        assert_eq!(a[0].area_sqkm, MAX_AREA_SQKM);
        assert!(a.iter().all(|r| (MIN_AREA_SQKM..=MAX_AREA_SQKM).contains(&r.area_sqkm)));
        assert!(a.iter().all(|r| (2000.0..=80_000.0).contains(&r.gdp_per_capita_2022)));
        assert!(a.iter().all(|r| r.population_2022 >= 500_000.0));
        assert!(a.iter().all(|r| r.pop_growth_rate >= 0.0 && r.gdp_growth_rate >= 0.0));
        let mut ids: Vec<_> = a.iter().map(|r| r.city_id.clone()).collect();
        ids.dedup();
        assert_eq!(ids.len(), 200);
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }
}
