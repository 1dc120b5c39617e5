use std::path::Path;

use proptest::prelude::*;
use uamcast::data::load_city_database;
use uamcast::engine::{city_demand, movements, CityInputs, DensityInput};
use uamcast::scenario::{eligibility_decreases, run_scenario, run_sweep, ScenarioName, ScenarioSpec};
use uamcast::synthetic::synthetic_database;
use uamcast::RunConfig;

fn sample() -> Vec<uamcast::data::CityRecord> {
    load_city_database(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/cities_sample.csv"))
        .unwrap()
        .records
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn demand_falls_with_price(
        area in 20.0f64..600.0,
        pop in 5e5f64..5e6,
        gdp in 2_000.0f64..80_000.0,
        vd in 0.005f64..0.1,
        p in 1.0f64..8.0,
        dp in 0.05f64..3.0,
    ) {
        let cfg = RunConfig::default();
        let inputs = CityInputs { city_id: "c".into(), year: 2022, population: pop, area_sqkm: area, gdp_per_capita: gdp };
        let cheap = city_demand(inputs.clone(), p, DensityInput::Reference(vd), &cfg).unwrap();
        let dear = city_demand(inputs, p + dp, DensityInput::Reference(vd), &cfg).unwrap();
        prop_assert!(dear.daily_air_trips <= cheap.daily_air_trips);
        prop_assert_eq!(cheap.daily_movements, movements(cheap.daily_air_trips, &cfg.fleet));
        prop_assert!(cheap.daily_air_trips <= cheap.daily_trips);
    }
}

#[test]
fn city_order_does_not_change_results() {
    let cfg = RunConfig::default();
    let db = synthetic_database(30, 11);
    let mut reversed = db.clone();
    reversed.reverse();
    let a = run_sweep(&db, &[3.0, 4.0], &[0.02], 2030, None, &cfg).unwrap();
    let b = run_sweep(&reversed, &[3.0, 4.0], &[0.02], 2030, None, &cfg).unwrap();
    assert_eq!(a, b);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| run_sweep(&db, &[3.0, 4.0], &[0.02], 2030, None, &cfg).unwrap());
    assert_eq!(a, c);
}

#[test]
fn global_totals_equal_city_sums() {
    let cfg = RunConfig::default();
    let g = run_sweep(&sample(), &[2.5], &[0.04], 2022, None, &cfg).unwrap();
    let p = &g.points[0][0];
    let check = |total: f64, f: fn(&uamcast::engine::CityResult) -> f64| {
        let direct: f64 = p.cities.iter().map(f).sum();
        assert!((total - direct).abs() <= 1e-9 * direct.abs());
    };
    check(p.total_daily_trips, |c| c.daily_air_trips);
    check(p.total_daily_movements, |c| c.daily_movements);
    check(p.total_daily_flight_hours, |c| c.daily_flight_hours);
    check(p.total_fleet, |c| c.fleet_size);
    for c in &p.cities {
        assert_eq!(c.daily_movements, movements(c.daily_air_trips, &cfg.fleet));
    }
    assert_eq!(p.eligible_city_count, p.cities.iter().filter(|c| c.eligible).count());
}

#[test]
fn scenario_ordering_on_synthetic_databases() {
    let cfg = RunConfig::default();
    for db in [sample(), synthetic_database(40, 5)] {
        let total = |name| {
            let spec = ScenarioSpec { name, years: vec![2050] };
            run_scenario(&spec, &db, None, &cfg).unwrap()[0].total_daily_trips
        };
        let [s1, s2, s3, s4] = ScenarioName::ALL.map(total);
        assert!(s1 >= s3 && s3 >= s2, "{s1} {s3} {s2}");
        assert!(s1 >= s4 && s4 >= s2, "{s1} {s4} {s2}");
    }
}

#[test]
fn eligibility_trend_is_reported() {
    let cfg = RunConfig::default();
    let series = run_scenario(&ScenarioSpec::new(ScenarioName::S1), &sample(), None, &cfg).unwrap();
    assert_eq!(series.len(), 5);
    let drops = eligibility_decreases(&series);
    if !drops.is_empty() {
        eprintln!("eligible-city count fell in {drops:?}");
    }
    assert!(series.last().unwrap().total_daily_trips > series[0].total_daily_trips);
}
