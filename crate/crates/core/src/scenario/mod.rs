//! Scenario runs: turn weather, load and a configuration into a validated
//! dispatch schedule, and summarise schedules into energy and cost tables.

mod cases;
mod summary;

use chrono::{DateTime, Datelike, Utc};
use thiserror::Error;

use crate::diesel::{validate_fleet, CommitmentState, DieselGenSpec};
use crate::dispatch::{
    optimize_horizon_dp, optimize_series_greedy, validate_schedule, CostParams, DispatchDecision,
    DispatchError, StepInputs, Violation,
};
use crate::error::DomainError;
use crate::grid::{grid_status, GridSchedule};
use crate::solar::{PvSystem, WeatherRecord};

pub use cases::{build_case, BaseCase, GeneratorTemplate, CASE_IDS, PV_TARGET_KWP};
pub use summary::{
    aggregate_cost, aggregate_energy, compare_cases, round_half_up, CaseSummary, ComparisonReport,
    CostSummary, EnergySummary, Reduction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerMode {
    Greedy,
    #[default]
    Dp,
}

impl std::str::FromStr for OptimizerMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(OptimizerMode::Greedy),
            "dp" => Ok(OptimizerMode::Dp),
            other => Err(format!("unknown mode '{other}', expected greedy or dp")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub fleet: Vec<DieselGenSpec>,
    pub pv: Option<PvSystem>,
    pub grid: GridSchedule,
    pub costs: CostParams,
    pub mode: OptimizerMode,
    pub initial_state: CommitmentState,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.fleet.is_empty() {
            return Err(DomainError::Invalid("fleet must not be empty".to_string()));
        }
        validate_fleet(&self.fleet)?;
        if self.initial_state.len() != self.fleet.len() {
            return Err(DomainError::LengthMismatch {
                left: self.initial_state.len(),
                right: self.fleet.len(),
            });
        }
        if let Some(pv) = &self.pv {
            pv.array.validate()?;
            pv.cell.validate()?;
        }
        self.grid.validate()?;
        self.costs.validate()
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("weather has {weather} steps but load has {load}")]
    LengthMismatch { weather: usize, load: usize },
    #[error("empty input series")]
    Empty,
    #[error("infeasible at step {step} ({timestamp}): load {load_kw:.3} kW, PV {pv_kw:.3} kW, grid {}", if *.grid_on { "on" } else { "off" })]
    Infeasible {
        step: usize,
        timestamp: DateTime<Utc>,
        load_kw: f64,
        pv_kw: f64,
        grid_on: bool,
    },
    #[error(transparent)]
    Dispatch(DispatchError),
    #[error("{} constraint violations, first at step {}: {}", .0.len(), .0[0].0, .0[0].1)]
    Violations(Vec<(usize, Violation)>),
    #[error("unknown case {0}, expected 1, 2 or 3")]
    UnknownCase(u8),
}

/// One simulated step with everything needed to re-plot it.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLog {
    pub timestamp: DateTime<Utc>,
    pub inputs: StepInputs,
    pub decision: DispatchDecision,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub name: String,
    pub fleet: Vec<DieselGenSpec>,
    pub has_pv: bool,
    pub dt_hours: f64,
    pub steps: Vec<StepLog>,
}

impl ScenarioRun {
    pub fn schedule(&self) -> Vec<DispatchDecision> {
        self.steps.iter().map(|s| s.decision.clone()).collect()
    }

    pub fn load_energy_mwh(&self) -> f64 {
        self.steps.iter().map(|s| s.inputs.load_kw).sum::<f64>() * self.dt_hours / 1000.0
    }

    pub fn pv_energy_mwh(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.inputs.pv_available_kw)
            .sum::<f64>()
            * self.dt_hours
            / 1000.0
    }

    pub fn energy(&self) -> EnergySummary {
        let schedule: Vec<&DispatchDecision> = self.steps.iter().map(|s| &s.decision).collect();
        aggregate_energy(schedule, self.dt_hours)
    }

    pub fn cost(&self, costs: &CostParams) -> CostSummary {
        let schedule: Vec<&DispatchDecision> = self.steps.iter().map(|s| &s.decision).collect();
        aggregate_cost(schedule, &self.fleet, costs, self.dt_hours)
    }

    pub fn summary(&self, costs: &CostParams) -> CaseSummary {
        CaseSummary {
            name: self.name.clone(),
            has_pv: self.has_pv,
            energy: self.energy(),
            cost: self.cost(costs),
        }
    }

    /// Two consecutive days starting on the 15th of January, April, July
    /// and October, in that order.
    pub fn seasonal_sample(&self) -> Vec<StepLog> {
        self.steps
            .iter()
            .filter(|s| {
                matches!(s.timestamp.month(), 1 | 4 | 7 | 10)
                    && (15..=16).contains(&s.timestamp.day())
            })
            .cloned()
            .collect()
    }
}

/// Uniform step length of a weather series, hours. A single record is
/// taken as one hour.
pub fn series_step_hours(weather: &[WeatherRecord]) -> f64 {
    match weather {
        [a, b, ..] => (b.timestamp - a.timestamp).num_seconds() as f64 / 3600.0,
        _ => 1.0,
    }
}

/// Optimiser inputs for every step.
pub fn build_inputs(
    config: &ScenarioConfig,
    weather: &[WeatherRecord],
    load_kw: &[f64],
) -> Result<Vec<StepInputs>, ScenarioError> {
    if weather.len() != load_kw.len() {
        return Err(ScenarioError::LengthMismatch {
            weather: weather.len(),
            load: load_kw.len(),
        });
    }
    let dt = series_step_hours(weather);
    if dt.is_nan() || dt <= 0.0 {
        return Err(DomainError::Invalid("weather timestamps must increase".to_string()).into());
    }
    weather
        .iter()
        .zip(load_kw)
        .enumerate()
        .map(|(k, (rec, &load))| {
            let pv = config.pv.as_ref().map_or(0.0, |p| p.available_power(rec));
            let grid_on = rec
                .grid_on
                .unwrap_or_else(|| grid_status(k as f64 * dt, &config.grid));
            let inputs = StepInputs {
                load_kw: load,
                pv_available_kw: pv,
                grid_on,
                grid_max_kw: config.grid.max_exchange_kw,
                dt_hours: dt,
            };
            inputs.validate()?;
            Ok(inputs)
        })
        .collect()
}

/// Runs the configured optimiser over the series and validates every
/// decision.
pub fn run_scenario(
    config: &ScenarioConfig,
    weather: &[WeatherRecord],
    load_kw: &[f64],
) -> Result<ScenarioRun, ScenarioError> {
    config.validate()?;
    if weather.is_empty() {
        return Err(ScenarioError::Empty);
    }
    let series = build_inputs(config, weather, load_kw)?;
    let result = match config.mode {
        OptimizerMode::Greedy => {
            optimize_series_greedy(&config.initial_state, &series, &config.fleet, &config.costs)
        }
        OptimizerMode::Dp => {
            optimize_horizon_dp(&config.initial_state, &series, &config.fleet, &config.costs)
        }
    };
    let schedule = result.map_err(|e| match e.step() {
        Some(step) => ScenarioError::Infeasible {
            step,
            timestamp: weather[step].timestamp,
            load_kw: series[step].load_kw,
            pv_kw: series[step].pv_available_kw,
            grid_on: series[step].grid_on,
        },
        None => ScenarioError::Dispatch(e),
    })?;

    let violations = validate_schedule(&schedule, &series, &config.fleet, &config.initial_state);
    if !violations.is_empty() {
        return Err(ScenarioError::Violations(violations));
    }
    let steps = weather
        .iter()
        .zip(series)
        .zip(schedule)
        .map(|((rec, inputs), decision)| StepLog {
            timestamp: rec.timestamp,
            inputs,
            decision,
        })
        .collect();
    Ok(ScenarioRun {
        name: config.name.clone(),
        fleet: config.fleet.clone(),
        has_pv: config.pv.is_some(),
        dt_hours: series_step_hours(weather),
        steps,
    })
}

/// Runs independent scenarios concurrently, one thread each. Results keep
/// the order of `configs`.
pub fn run_scenarios(
    configs: &[ScenarioConfig],
    weather: &[WeatherRecord],
    load_kw: &[f64],
) -> Vec<Result<ScenarioRun, ScenarioError>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_scenario(c, weather, load_kw)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    })
}
