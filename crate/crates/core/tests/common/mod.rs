//! Reference implementations written directly from the model definitions.
//! They share no code with the library beyond plain data types and are slow
//! on purpose: every quantity is recomputed per pair.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Totals from the standalone Python brute force in `tests/oracles/toy_city.py`.
pub const TOY_DISTRIBUTED_TRIPS: f64 = 725948.7345409726;
pub const TOY_DAILY_AIR_TRIPS: f64 = 73880.25715215236;
pub const TOY_DAILY_FLIGHT_HOURS: f64 = 6287.12092323949;

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Lattice cells whose centers lie in the disk of the given area.
pub fn naive_cells(area: f64, s: f64) -> Vec<(i64, i64)> {
    let r = (area / PI).sqrt();
    let n = (r / s).ceil() as i64 + 1;
    let mut out = Vec::new();
    for iy in -n..=n {
        for ix in -n..=n {
            let d = s * ((ix * ix + iy * iy) as f64).sqrt();
            if d <= r * (1.0 + 1e-12) {
                out.push((ix, iy));
            }
        }
    }
    if out.is_empty() {
        out.push((0, 0));
    }
    out
}

pub fn naive_population(cells: &[(i64, i64)], total: f64, s: f64) -> Vec<f64> {
    let d: Vec<f64> = cells.iter().map(|&(x, y)| s * (x as f64).hypot(y as f64)).collect();
    let d_max = d.iter().cloned().fold(0.0, f64::max);
    let f: Vec<f64> = d
        .iter()
        .map(|&di| if d_max == 0.0 { 1.0 } else { 2.0 * 10f64.powf((d_max - di) / d_max) })
        .collect();
    let norm: f64 = f.iter().sum();
    f.iter().map(|fi| total * fi / norm).collect()
}

pub fn trip_share(d: f64) -> f64 {
    (0.2051 * d.ln() + 0.0592).clamp(0.0, 1.0)
}

fn pair_distance(a: (i64, i64), b: (i64, i64), s: f64) -> f64 {
    if a == b {
        s / 2.0
    } else {
        s * ((a.0 - b.0) as f64).hypot((a.1 - b.1) as f64)
    }
}

/// Dense OD matrix, one distance class at a time, grouping destinations by
/// their rounded distance.
pub fn naive_od(cells: &[(i64, i64)], pop: &[f64], s: f64) -> Vec<Vec<f64>> {
    let n = cells.len();
    // rounding is only used to decide which destinations share a class
    let label = |d: f64| (d * 1e9).round() as i64;
    let mut od = vec![vec![0.0; n]; n];
    for o in 0..n {
        let generated = 3.0 * pop[o];
        let dists: Vec<f64> = (0..n).map(|j| pair_distance(cells[o], cells[j], s)).collect();
        let mut classes: Vec<(i64, f64)> = dists.iter().map(|&d| (label(d), d)).collect();
        classes.sort_by_key(|c| c.0);
        classes.dedup_by_key(|c| c.0);
        for j in 0..n {
            let idx = classes.iter().position(|c| c.0 == label(dists[j])).unwrap();
            let lower = if idx == 0 { 0.0 } else { trip_share(classes[idx - 1].1) };
            let share = trip_share(classes[idx].1) - lower;
            let class_pop: f64 = (0..n)
                .filter(|&k| label(dists[k]) == label(dists[j]))
                .map(|k| pop[k])
                .sum();
            od[o][j] = generated * share * pop[j] / class_pop;
        }
    }
    od
}

pub struct BruteTotals {
    pub distributed_trips: f64,
    pub daily_air_trips: f64,
    pub daily_flight_hours: f64,
}

/// Full pipeline for one city with a fixed vertiport count.
pub fn brute_force_city(area: f64, population: f64, gdp: f64, vertiports: usize, ticket: f64) -> BruteTotals {
    let s = 2.0;
    let cells = naive_cells(area, s);
    let pop = naive_population(&cells, population, s);
    let od = naive_od(&cells, &pop, s);
    let radius = (area / PI).sqrt();
    let golden = PI * (3.0 - 5f64.sqrt());
    let vps: Vec<(f64, f64)> = (1..=vertiports)
        .map(|i| {
            let r = radius * ((i as f64 - 0.5) / vertiports as f64).sqrt();
            let t = i as f64 * golden;
            (r * t.cos(), r * t.sin())
        })
        .collect();
    let nearest = |p: (f64, f64)| {
        let mut best = (0, f64::INFINITY);
        for (k, v) in vps.iter().enumerate() {
            let d = (p.0 - v.0).hypot(p.1 - v.1);
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    };
    let rate = (6e-6 * gdp + 0.0703) * 1.7;
    let vtt = (0.0003 * gdp - 0.3404).max(0.0);
    let mut totals = BruteTotals {
        distributed_trips: 0.0,
        daily_air_trips: 0.0,
        daily_flight_hours: 0.0,
    };
    for (o, &co) in cells.iter().enumerate() {
        for (d, &cd) in cells.iter().enumerate() {
            let trips = od[o][d];
            totals.distributed_trips += trips;
            if o == d {
                continue;
            }
            let dist = pair_distance(co, cd, s);
            let (vo, a) = nearest((co.0 as f64 * s, co.1 as f64 * s));
            let (vd, e) = nearest((cd.0 as f64 * s, cd.1 as f64 * s));
            if vo == vd {
                continue;
            }
            let fly = (vps[vo].0 - vps[vd].0).hypot(vps[vo].1 - vps[vd].1) * 1.05;
            let t_air = a / 18.0 + e / 18.0 + fly / 100.0 + 10.0 / 60.0;
            let c_air = rate * a * 1.2 + rate * e * 1.2 + ticket * fly;
            let gc_air = c_air + vtt * t_air;
            let gc_amt = rate * dist * 1.2 + vtt * dist / 18.0;
            let u_air = -0.25 * gc_air;
            let u_amt = -0.25 * gc_amt;
            let p = u_air.exp() / (u_air.exp() + u_amt.exp());
            totals.daily_air_trips += trips * p;
            totals.daily_flight_hours += trips * p * (fly / 100.0 + 4.0 / 60.0);
        }
    }
    totals
}
