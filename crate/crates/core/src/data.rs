//! City database and optional per-year growth table.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CITY_HEADER: [&str; 8] = [
    "city_id",
    "name",
    "country",
    "population_2022",
    "area_sqkm",
    "gdp_per_capita_2022",
    "pop_growth_rate",
    "gdp_growth_rate",
];

pub const GROWTH_HEADER: [&str; 4] = ["city_id", "year", "pop_growth", "gdp_growth"];

/// Cities below this population are outside the intended database scope.
pub const MIN_SCOPE_POPULATION: f64 = 500_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityRecord {
    pub city_id: String,
    pub name: String,
    pub country: String,
    pub population_2022: f64,
    pub area_sqkm: f64,
    pub gdp_per_capita_2022: f64,
    /// Annual fraction, e.g. 0.01 for 1 %.
    pub pop_growth_rate: f64,
    pub gdp_growth_rate: f64,
}

impl CityRecord {
    /// Row-level validation; returns the problems found.
    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.city_id.trim().is_empty() {
            out.push("city_id must not be empty".to_string());
        }
        if !(self.population_2022.is_finite() && self.population_2022 > 0.0) {
            out.push(format!("population must be positive (got {})", self.population_2022));
        }
        if !(self.area_sqkm.is_finite() && self.area_sqkm > 0.0) {
            out.push(format!("area must be positive (got {})", self.area_sqkm));
        }
        if !(self.gdp_per_capita_2022.is_finite() && self.gdp_per_capita_2022 >= 0.0) {
            out.push(format!(
                "gdp per capita must be non-negative (got {})",
                self.gdp_per_capita_2022
            ));
        }
        for (name, g) in [
            ("pop_growth_rate", self.pop_growth_rate),
            ("gdp_growth_rate", self.gdp_growth_rate),
        ] {
            if !(g.is_finite() && g > -1.0) {
                out.push(format!("{name} must be a finite rate > -1 (got {g})"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CityDatabase {
    pub records: Vec<CityRecord>,
    /// Non-fatal findings, e.g. cities below the population scope.
    pub warnings: Vec<String>,
}

impl CityDatabase {
    pub fn find(&self, city_id: &str) -> Result<&CityRecord> {
        self.records
            .iter()
            .find(|r| r.city_id == city_id)
            .ok_or_else(|| Error::UnknownCity(city_id.to_string()))
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?.clone();
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Load {
            path: path.to_path_buf(),
            issues: vec![format!(
                "line 1: expected header `{}`, found `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )],
        });
    }
    Ok(())
}

fn line_of(pos: Option<&csv::Position>) -> u64 {
    pos.map(|p| p.line()).unwrap_or(0)
}

pub fn load_city_database(path: impl AsRef<Path>) -> Result<CityDatabase> {
    let path = path.as_ref();
    read_city_database(path, open(path)?)
}

/// Parses a city table from any reader; `path` is only used in messages.
pub fn read_city_database(path: &Path, reader: impl Read) -> Result<CityDatabase> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(path, &mut rdr, &CITY_HEADER)?;

    let header = csv::StringRecord::from(CITY_HEADER.to_vec());
    let mut db = CityDatabase::default();
    let mut issues = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                issues.push(format!("line {}: {e}", line_of(e.position())));
                continue;
            }
        };
        let line = line_of(row.position());
        let record: CityRecord = match row.deserialize(Some(&header)) {
            Ok(r) => r,
            Err(e) => {
                issues.push(format!("line {line}: {}", describe_csv_error(&e)));
                continue;
            }
        };
        for p in record.problems() {
            issues.push(format!("{p}, line {line}"));
        }
        if let Some(first) = seen.insert(record.city_id.clone(), line) {
            issues.push(format!(
                "duplicate city_id `{}` on line {line} (first on line {first})",
                record.city_id
            ));
        }
        if record.population_2022 < MIN_SCOPE_POPULATION {
            db.warnings.push(format!(
                "line {line}: city `{}` has population {} below the {} scope",
                record.city_id, record.population_2022, MIN_SCOPE_POPULATION
            ));
        }
        db.records.push(record);
    }
    if issues.is_empty() {
        Ok(db)
    } else {
        Err(Error::Load {
            path: path.to_path_buf(),
            issues,
        })
    }
}

fn describe_csv_error(e: &csv::Error) -> String {
    match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(i) => format!(
                "column `{}`: {}",
                CITY_HEADER.get(i as usize).copied().unwrap_or("?"),
                err.kind()
            ),
            None => err.kind().to_string(),
        },
        _ => e.to_string(),
    }
}

/// Writes records with the canonical header; floats use shortest round-trip text.
pub fn write_city_database<W: Write>(records: &[CityRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CITY_HEADER)?;
    for r in records {
        w.write_record([
            r.city_id.clone(),
            r.name.clone(),
            r.country.clone(),
            r.population_2022.to_string(),
            r.area_sqkm.to_string(),
            r.gdp_per_capita_2022.to_string(),
            r.pop_growth_rate.to_string(),
            r.gdp_growth_rate.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<city csv>", e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
struct GrowthRow {
    year: i32,
    pop_growth: f64,
    gdp_growth: f64,
}

/// Year-specific growth rates overriding a city's constant rates. The rate
/// for year `t` applies to the step from `t − 1` to `t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GrowthTable {
    rates: HashMap<String, BTreeMap<i32, (f64, f64)>>,
}

impl GrowthTable {
    pub fn insert(&mut self, city_id: &str, year: i32, pop_growth: f64, gdp_growth: f64) {
        self.rates
            .entry(city_id.to_string())
            .or_default()
            .insert(year, (pop_growth, gdp_growth));
    }

    pub fn city(&self, city_id: &str) -> Option<&BTreeMap<i32, (f64, f64)>> {
        self.rates.get(city_id)
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }
}

pub fn load_growth_table(path: impl AsRef<Path>) -> Result<GrowthTable> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    check_header(path, &mut rdr, &GROWTH_HEADER)?;
    let mut table = GrowthTable::default();
    let mut issues = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = line_of(row.position());
        let id = row.get(0).unwrap_or_default().to_string();
        let parsed: std::result::Result<GrowthRow, _> = row.deserialize(Some(&csv::StringRecord::from(
            vec!["city_id", "year", "pop_growth", "gdp_growth"],
        )));
        match parsed {
            Ok(g) if g.pop_growth > -1.0 && g.gdp_growth > -1.0 && g.pop_growth.is_finite() && g.gdp_growth.is_finite() => {
                table.insert(&id, g.year, g.pop_growth, g.gdp_growth)
            }
            Ok(_) => issues.push(format!("line {line}: growth rates must be finite and > -1")),
            Err(e) => issues.push(format!("line {line}: {e}")),
        }
    }
    if issues.is_empty() {
        Ok(table)
    } else {
        Err(Error::Load {
            path: path.to_path_buf(),
            issues,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "city_id,name,country,population_2022,area_sqkm,gdp_per_capita_2022,pop_growth_rate,gdp_growth_rate\n";

    fn read(text: &str) -> Result<CityDatabase> {
        read_city_database(Path::new("test.csv"), text.as_bytes())
    }

    #[test]
    fn header_only_is_empty() {
        let db = read(HEADER).unwrap();
        assert!(db.records.is_empty());
    }

    #[test]
    fn negative_area_reports_line() {
        let text = format!("{HEADER}A,Alpha,X,900000,400,30000,0.01,0.02\nB,Beta,X,800000,-5,30000,0.01,0.02\n");
        let err = read(&text).unwrap_err().to_string();
        assert!(err.contains("area must be positive"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn non_numeric_field_reports_column_and_line() {
        let text = format!("{HEADER}A,Alpha,X,lots,400,30000,0.01,0.02\n");
        let err = read(&text).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("population_2022"), "{err}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = format!("{HEADER}A,Alpha,X,900000,400,30000,0.01,0.02\nA,Again,X,900000,400,30000,0.01,0.02\n");
        let err = read(&text).unwrap_err().to_string();
        assert!(err.contains("duplicate city_id `A`"), "{err}");
    }

    #[test]
    fn wrong_header_rejected() {
        let err = read("id,name\nA,B\n").unwrap_err().to_string();
        assert!(err.contains("expected header"), "{err}");
    }

    #[test]
    fn small_city_is_a_warning() {
        let text = format!("{HEADER}A,Alpha,X,300000,400,30000,0.01,0.02\n");
        let db = read(&text).unwrap();
        assert_eq!(db.records.len(), 1);
        assert_eq!(db.warnings.len(), 1);
    }

    #[test]
    fn find_unknown_city() {
        let db = read(HEADER).unwrap();
        assert!(matches!(db.find("nowhere"), Err(Error::UnknownCity(_))));
    }

    #[test]
    fn growth_table_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("growth.csv");
        std::fs::write(&p, "city_id,year,pop_growth,gdp_growth\nA,2023,0.02,0.03\nA,2024,0.01,-0.01\n").unwrap();
        let t = load_growth_table(&p).unwrap();
        assert_eq!(t.city("A").unwrap().get(&2024), Some(&(0.01, -0.01)));
        std::fs::write(&p, "city_id,year,pop_growth,gdp_growth\nA,x,0.02,0.03\n").unwrap();
        assert!(load_growth_table(&p).is_err());
    }

    fn record() -> impl Strategy<Value = CityRecord> {
        (
            "[A-Z]{3}[0-9]{2}",
            "[a-zA-Z ,\"]{1,12}",
            5e5f64..4e7,
            1.0f64..9000.0,
            0.0f64..120_000.0,
            -0.05f64..0.05,
            -0.05f64..0.08,
        )
            .prop_map(|(id, name, pop, area, gdp, gp, gg)| CityRecord {
                city_id: id,
                name: name.trim().to_string() + "ville",
                country: "Freedonia".into(),
                population_2022: pop,
                area_sqkm: area,
                gdp_per_capita_2022: gdp,
                pop_growth_rate: gp,
                gdp_growth_rate: gg,
            })
    }

    proptest! {
        #[test]
        fn write_then_load_reproduces_records(records in proptest::collection::btree_map("[A-Z]{4}", record(), 0..12)) {
            let records: Vec<CityRecord> = records
                .into_iter()
                .map(|(id, r)| CityRecord { city_id: id, ..r })
                .collect();
            let mut buf = Vec::new();
            write_city_database(&records, &mut buf).unwrap();
            let db = read_city_database(Path::new("mem"), buf.as_slice()).unwrap();
            prop_assert_eq!(db.records, records);
        }
    }
}
