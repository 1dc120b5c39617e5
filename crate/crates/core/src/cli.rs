//! Command-line front end. Exit codes: 0 success, 1 data or runtime error,
//! 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{load_config, RunConfig};
use crate::data::{load_city_database, load_growth_table, write_city_database, CityDatabase, GrowthTable};
use crate::engine::{DensityInput, PreparedCity};
use crate::error::{Error, Result};
use crate::output::{rows_for_series, write_results, write_sweep_grid, Format, ResultRow, RunStamp};
use crate::scenario::{
    eligibility_decreases, project_city, run_scenario, run_sweep, ScenarioName, ScenarioSpec, BASE_YEAR,
    HORIZON_END, HORIZON_START,
};
use crate::synthetic::synthetic_database;
use crate::trips::OdMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "uamcast", version, about = "Air-taxi demand and fleet forecasts for grid cities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Worker threads; all cores when absent. Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Also write the effective configuration (TOML) next to the output,
    /// or to standard error when writing to standard output.
    #[arg(long)]
    seed_echo: bool,
    /// Configuration document (TOML); defaults for absent keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optional per-year growth table (city_id,year,pop_growth,gdp_growth).
    #[arg(long)]
    growth: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load the city database and configuration and report problems.
    Validate {
        #[arg(long)]
        cities: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate one city.
    RunCity {
        #[arg(long)]
        cities: PathBuf,
        #[arg(long)]
        city: String,
        #[arg(long, value_parser = parse_year)]
        year: i32,
        /// Ticket price, €/km.
        #[arg(long, value_parser = parse_positive)]
        price: f64,
        /// Reference vertiport density, vertiports per sq km.
        #[arg(long, value_parser = parse_positive)]
        vd: f64,
        /// Use --vd as the city's own density instead of a reference value.
        #[arg(long)]
        uniform_vd: bool,
        /// Write the city's dense origin-destination matrix here.
        #[arg(long)]
        dump_od: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Global demand over a price × density grid.
    Sweep {
        #[arg(long)]
        cities: PathBuf,
        /// start:end:step or a comma list, €/km.
        #[arg(long, default_value = "2.5:6.0:0.5", value_parser = parse_axis)]
        prices: Axis,
        /// start:end:step or a comma list, vertiports per sq km.
        #[arg(long, default_value = "0.01,0.02,0.04", value_parser = parse_axis)]
        densities: Axis,
        #[arg(long, default_value_t = BASE_YEAR, value_parser = parse_year)]
        year: i32,
        /// Emit one result row per city and grid point instead of the price × density table.
        #[arg(long)]
        rows: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Time series for one of the market scenarios S1–S4.
    Scenario {
        #[arg(long)]
        cities: PathBuf,
        #[arg(long, value_parser = parse_scenario)]
        name: ScenarioName,
        #[arg(long, default_value = "2030:2050:5", value_parser = parse_years)]
        years: Years,
        #[command(flatten)]
        common: Common,
    },
    /// Write a seeded synthetic city database.
    Synth {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
struct Axis(Vec<f64>);

#[derive(Debug, Clone)]
struct Years(Vec<i32>);

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("expected a finite value > 0, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_year(s: &str) -> std::result::Result<i32, String> {
    let y: i32 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if y < BASE_YEAR {
        return Err(format!("year {y} precedes the base year {BASE_YEAR}"));
    }
    Ok(y)
}

fn parse_scenario(s: &str) -> std::result::Result<ScenarioName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [start, end, step] => {
            let (start, end, step) = (parse_positive(start)?, parse_positive(end)?, parse_positive(step)?);
            if end < start {
                return Err(format!("range end {end} is below its start {start}"));
            }
            let n = ((end - start) / step + 1e-9).floor() as usize;
            (0..=n).map(|i| step.mul_add(i as f64, start)).collect()
        }
        [_] => s.split(',').map(parse_positive).collect::<std::result::Result<Vec<_>, _>>()?,
        _ => return Err("expected start:end:step or a comma-separated list".into()),
    };
    if values.is_empty() {
        return Err("empty axis".into());
    }
    Ok(Axis(values))
}

fn parse_years(s: &str) -> std::result::Result<Years, String> {
    let int = |t: &str| t.trim().parse::<i32>().map_err(|e| format!("`{t}`: {e}"));
    let years: Vec<i32> = match s.split(':').collect::<Vec<_>>().as_slice() {
        [start, end, step] => {
            let (start, end, step) = (int(start)?, int(end)?, int(step)?);
            if step <= 0 || end < start {
                return Err("expected start:end:step with step > 0 and end >= start".into());
            }
            (start..=end).step_by(step as usize).collect()
        }
        [_] => s.split(',').map(int).collect::<std::result::Result<_, _>>()?,
        _ => return Err("expected start:end:step or a comma-separated list".into()),
    };
    if let Some(y) = years.iter().find(|y| !(HORIZON_START..=HORIZON_END).contains(*y)) {
        return Err(format!("year {y} is outside {HORIZON_START}..={HORIZON_END}"));
    }
    Ok(Years(years))
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

struct Loaded {
    config: RunConfig,
    db: CityDatabase,
    growth: Option<GrowthTable>,
}

fn load(cities: &Path, common: &Common) -> Result<Loaded> {
    let config = match &common.config {
        Some(p) => load_config(p)?,
        None => RunConfig::default(),
    };
    let db = load_city_database(cities)?;
    for w in &db.warnings {
        eprintln!("warning: {w}");
    }
    let growth = common.growth.as_deref().map(load_growth_table).transpose()?;
    Ok(Loaded { config, db, growth })
}

fn with_threads<R: Send>(threads: Option<u16>, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(f),
    }
}

fn format_of(common: &Common) -> Format {
    match common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

/// Writes through a buffered file or standard output, then echoes the config
/// when requested.
fn emit(common: &Common, config: &RunConfig, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &common.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush().map_err(|e| Error::io(path, e))?;
            if common.seed_echo {
                let mut echo = path.as_os_str().to_owned();
                echo.push(".config.toml");
                std::fs::write(&echo, config.to_toml()).map_err(|e| Error::io(PathBuf::from(&echo), e))?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            body(&mut w)?;
            w.flush().map_err(|e| Error::io("<stdout>", e))?;
            if common.seed_echo {
                eprint!("{}", config.to_toml());
            }
        }
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Validate { cities, common } => {
            let l = load(&cities, &common)?;
            let text = format!(
                "cities: {}\nwarnings: {}\ngrowth_table: {}\nconfig_digest: {}\n",
                l.db.records.len(),
                l.db.warnings.len(),
                if l.growth.is_some() { "yes" } else { "no" },
                l.config.digest()
            );
            emit(&common, &l.config, |w| {
                w.write_all(text.as_bytes()).map_err(|e| Error::io("<output>", e))
            })
        }
        Command::RunCity {
            cities,
            city,
            year,
            price,
            vd,
            uniform_vd,
            dump_od,
            common,
        } => {
            let l = load(&cities, &common)?;
            let record = l.db.find(&city)?;
            let inputs = project_city(record, year, l.growth.as_ref())?;
            let density = if uniform_vd {
                DensityInput::Uniform(vd)
            } else {
                DensityInput::Reference(vd)
            };
            let config = &l.config;
            let (result, od) = with_threads(common.threads, || {
                let prepared = PreparedCity::new(inputs, config)?;
                let result = prepared.evaluate(price, density, config)?;
                let od = match dump_od {
                    Some(_) => Some(OdMatrix::build(&prepared.grid, &prepared.field, &config.trips)?),
                    None => None,
                };
                Ok((result, od))
            })?;
            if let (Some(path), Some(od)) = (&dump_od, &od) {
                let file = File::create(path).map_err(|e| Error::io(path, e))?;
                od.write_dense_csv(BufWriter::new(file))?;
            }
            let stamp = RunStamp::new(config);
            let rows = vec![ResultRow::from_city(stamp.run_id(), "city", &result)];
            emit(&common, config, |w| write_results(&rows, &stamp, format_of(&common), w))
        }
        Command::Sweep {
            cities,
            prices,
            densities,
            year,
            rows,
            common,
        } => {
            let l = load(&cities, &common)?;
            let config = &l.config;
            let grid = with_threads(common.threads, || {
                run_sweep(&l.db.records, &prices.0, &densities.0, year, l.growth.as_ref(), config)
            })?;
            let stamp = RunStamp::new(config);
            if rows {
                let series: Vec<_> = grid.points.iter().flatten().cloned().collect();
                let out = rows_for_series(stamp.run_id(), "sweep", &series);
                emit(&common, config, |w| write_results(&out, &stamp, format_of(&common), w))
            } else {
                emit(&common, config, |w| write_sweep_grid(&grid, &stamp, format_of(&common), w))
            }
        }
        Command::Scenario {
            cities,
            name,
            years,
            common,
        } => {
            let l = load(&cities, &common)?;
            let config = &l.config;
            let spec = ScenarioSpec { name, years: years.0 };
            let series = with_threads(common.threads, || {
                run_scenario(&spec, &l.db.records, l.growth.as_ref(), config)
            })?;
            for y in eligibility_decreases(&series) {
                eprintln!("note: eligible-city count decreased in {y}");
            }
            let stamp = RunStamp::new(config);
            let rows = rows_for_series(stamp.run_id(), &name.to_string(), &series);
            emit(&common, config, |w| write_results(&rows, &stamp, format_of(&common), w))
        }
        Command::Synth { count, seed, out } => {
            let records = synthetic_database(count, seed);
            match out {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
                    write_city_database(&records, BufWriter::new(file))
                }
                None => write_city_database(&records, io::stdout().lock()),
            }
        }
    }
}
