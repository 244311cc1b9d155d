use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use pvdiesel_core::dispatch::{
    brute_force_oracle, optimize_horizon_dp, random_instance, schedule_objective, validate_schedule,
};
use pvdiesel_core::io::{
    align_load, load_load_csv, load_weather_csv, parse_config, render_plots, render_summary_table,
    write_dispatch_csv, write_load_csv, write_summary, write_weather_csv, ConfigError, DataError,
};
use pvdiesel_core::scenario::{
    build_case, build_inputs, compare_cases, run_scenario, run_scenarios, BaseCase, OptimizerMode,
    ScenarioConfig, ScenarioError, CASE_IDS,
};
use pvdiesel_core::solar::WeatherRecord;
use pvdiesel_core::synth::{synthesize, SynthParams, DEFAULT_SEED};

const ORACLE_RESOLUTION_KW: f64 = 0.5;

#[derive(Debug, Parser)]
#[command(
    name = "pvdiesel",
    version,
    about = "PV-diesel microgrid dispatch under scheduled blackouts"
)]
struct Cli {
    /// Log configuration defaults and progress.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and write its dispatch table, summary and plots.
    Simulate(RunArgs),
    /// Run Cases 1-3 and write the comparison tables.
    Compare(RunArgs),
    /// Check configuration and data files without optimising.
    Validate(RunArgs),
    /// Write a synthetic weather and load year.
    Synth(SynthArgs),
    /// Check the dynamic programme against exhaustive search on random instances.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weather CSV; a synthetic year is used when omitted.
    #[arg(long, requires = "load")]
    weather: Option<PathBuf>,
    /// Load CSV aligned with the weather file.
    #[arg(long, requires = "weather")]
    load: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Optimiser, overriding the configuration.
    #[arg(long)]
    mode: Option<OptimizerMode>,
    /// Seed of the synthetic year.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Seed of the first instance.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of consecutive seeds to check.
    #[arg(long, default_value_t = 10)]
    instances: u64,
}

/// Failure classes with distinct exit codes.
#[derive(Debug)]
enum Failure {
    /// Oracle disagreement; shares the generic failure code.
    Mismatch(anyhow::Error),
    Data(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Data(_) => 2,
            Failure::Infeasible(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Mismatch(e) | Failure::Data(e) | Failure::Infeasible(e) => e,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let infeasible = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<ScenarioError>(),
                Some(ScenarioError::Infeasible { .. })
            )
        });
        if infeasible {
            Failure::Infeasible(e)
        } else {
            Failure::Data(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    env_logger::Builder::from_env(
        env_logger::Env::default().default_filter_or(if cli.verbose { "info" } else { "warn" }),
    )
    .init();

    let result = match cli.command {
        Command::Simulate(a) => simulate(&a).map_err(Failure::from),
        Command::Compare(a) => compare(&a).map_err(Failure::from),
        Command::Validate(a) => validate(&a).map_err(Failure::from),
        Command::Synth(a) => synth(&a).map_err(Failure::from),
        Command::Oracle(a) => oracle(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

struct Setup {
    scenario: ScenarioConfig,
    base: BaseCase,
    from_config: bool,
}

fn setup(args: &RunArgs) -> Result<Setup> {
    let mut s = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| ConfigError::Io {
                    path: path.display().to_string(),
                    source: e,
                })
                .with_context(|| "reading configuration")?;
            let parsed = parse_config(&text).with_context(|| format!("{}", path.display()))?;
            Setup {
                scenario: parsed.scenario,
                base: parsed.base,
                from_config: true,
            }
        }
        None => {
            let base = BaseCase::default();
            Setup {
                scenario: build_case(3, &base)?,
                base,
                from_config: false,
            }
        }
    };
    if let Some(mode) = args.mode {
        s.scenario.mode = mode;
        s.base.mode = mode;
    }
    Ok(s)
}

fn inputs(args: &RunArgs, latitude: f64, longitude: f64) -> Result<(Vec<WeatherRecord>, Vec<f64>)> {
    match (&args.weather, &args.load) {
        (Some(w), Some(l)) => {
            let weather = load_weather_csv(w)?;
            let load = load_load_csv(l)?;
            let load_kw = align_load(&weather, &load)?;
            Ok((weather, load_kw))
        }
        _ => {
            info!("using synthetic year with seed {}", args.seed);
            let year = synthesize(
                args.seed,
                &SynthParams {
                    latitude,
                    longitude,
                    ..Default::default()
                },
            );
            Ok((year.weather, year.load_kw))
        }
    }
}

fn site(base: &BaseCase) -> (f64, f64) {
    (base.geometry.latitude_deg(), base.geometry.longitude_deg())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| DataError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

fn simulate(args: &RunArgs) -> Result<()> {
    let s = setup(args)?;
    let (lat, lon) = site(&s.base);
    let (weather, load_kw) = inputs(args, lat, lon)?;
    let run = run_scenario(&s.scenario, &weather, &load_kw)?;
    create_dir(&args.out)?;
    write_dispatch_csv(&run.steps, &run.fleet, args.out.join("dispatch.csv"))?;
    let summary = run.summary(&s.scenario.costs);
    write_summary(
        std::slice::from_ref(&summary),
        None,
        args.out.join("summary.csv"),
    )?;
    render_plots(&run.seasonal_sample(), &run.fleet, args.out.join("plots"))?;
    print!("{}", render_summary_table(&[summary], None));
    println!("results written to {}", args.out.display());
    Ok(())
}

fn compare(args: &RunArgs) -> Result<()> {
    let s = setup(args)?;
    if s.from_config {
        info!("cases built from the site, grid, costs and first generator of the configuration");
    }
    let (lat, lon) = site(&s.base);
    let (weather, load_kw) = inputs(args, lat, lon)?;
    let configs = CASE_IDS
        .iter()
        .map(|&id| build_case(id, &s.base))
        .collect::<Result<Vec<_>, _>>()?;
    let runs = run_scenarios(&configs, &weather, &load_kw)
        .into_iter()
        .zip(&configs)
        .map(|(r, c)| r.with_context(|| c.name.clone()))
        .collect::<Result<Vec<_>>>()?;

    create_dir(&args.out)?;
    let summaries: Vec<_> = runs.iter().map(|r| r.summary(&s.base.costs)).collect();
    let report = compare_cases(&summaries)?;
    write_summary(&summaries, Some(&report), args.out.join("summary.csv"))?;
    for (id, run) in CASE_IDS.iter().zip(&runs) {
        write_dispatch_csv(
            &run.steps,
            &run.fleet,
            args.out.join(format!("case{id}_dispatch.csv")),
        )?;
    }
    let last = runs.last().expect("three cases");
    render_plots(&last.seasonal_sample(), &last.fleet, args.out.join("plots"))?;
    print!("{}", render_summary_table(&summaries, Some(&report)));
    println!("results written to {}", args.out.display());
    Ok(())
}

fn validate(args: &RunArgs) -> Result<()> {
    let s = setup(args)?;
    let (lat, lon) = site(&s.base);
    let (weather, load_kw) = inputs(args, lat, lon)?;
    let series = build_inputs(&s.scenario, &weather, &load_kw)?;
    let blackout = series.iter().filter(|x| !x.grid_on).count();
    println!(
        "ok: {} steps of {} h, {} in blackout, fleet of {}",
        series.len(),
        series.first().map_or(0.0, |x| x.dt_hours),
        blackout,
        s.scenario.fleet.len()
    );
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let base = BaseCase::default();
    let year = synthesize(
        args.seed,
        &SynthParams {
            latitude: base.geometry.latitude_deg(),
            longitude: base.geometry.longitude_deg(),
            ..Default::default()
        },
    );
    create_dir(&args.out)?;
    write_weather_csv(&year.weather, args.out.join("weather.csv"))?;
    write_load_csv(&year.weather, &year.load_kw, args.out.join("load.csv"))?;
    println!(
        "wrote {} hours to {}",
        year.weather.len(),
        args.out.display()
    );
    Ok(())
}

fn oracle(args: &OracleArgs) -> Result<(), Failure> {
    let mut mismatches = 0;
    for seed in args.seed..args.seed + args.instances {
        let inst = random_instance(seed);
        let dp = optimize_horizon_dp(&inst.initial, &inst.series, &inst.fleet, &inst.costs);
        let bf = brute_force_oracle(
            &inst.initial,
            &inst.series,
            &inst.fleet,
            &inst.costs,
            ORACLE_RESOLUTION_KW,
        );
        let (dp, bf) = match (dp, bf) {
            (Ok(dp), Ok(bf)) => (dp, bf),
            (Err(_), Err(_)) => {
                println!("seed {seed}: infeasible for both solvers");
                continue;
            }
            (dp, bf) => {
                mismatches += 1;
                println!(
                    "seed {seed}: feasibility disagrees (dp {}, oracle {})",
                    dp.is_ok(),
                    bf.is_ok()
                );
                continue;
            }
        };
        let fuel_a = inst.fleet.iter().map(|g| g.fuel_a).fold(0.0, f64::max);
        let tol = fuel_a
            * inst.costs.fuel_price
            * inst.costs.w1
            * ORACLE_RESOLUTION_KW
            * inst.series.len() as f64
            + 1e-9;
        let dp_obj = schedule_objective(&dp);
        let violations = validate_schedule(&dp, &inst.series, &inst.fleet, &inst.initial);
        let ok = (dp_obj - bf.objective).abs() <= tol && violations.is_empty();
        if !ok {
            mismatches += 1;
        }
        println!(
            "seed {seed}: T={} N={} dp {dp_obj:.6} oracle {:.6} {}",
            inst.series.len(),
            inst.fleet.len(),
            bf.objective,
            if ok { "ok" } else { "MISMATCH" }
        );
    }
    if mismatches > 0 {
        return Err(Failure::Mismatch(anyhow!(
            "{mismatches} of {} instances disagree with the oracle",
            args.instances
        )));
    }
    Ok(())
}
