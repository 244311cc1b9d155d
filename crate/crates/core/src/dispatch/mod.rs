//! Optimal operation of the microgrid.
//!
//! The mixed-integer problem at each step is decomposed into an enumeration
//! of binary choices (generator commitment and grid exchange mode) and, for
//! each choice, a small linear program over the continuous power flows that
//! is solved exactly by merit order. Steps are coupled only through start-up
//! and shut-down costs; [`optimize_horizon_dp`] handles that coupling exactly,
//! [`optimize_step_greedy`] myopically.

mod allocation;
mod horizon;
mod oracle;
mod validate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diesel::{CommitmentState, DieselGenSpec, TransitionIndicators};
use crate::error::{check_range, DomainError};
use crate::grid::{grid_capability, GridExchange};

pub use allocation::{continuous_allocation, Allocation};
pub use horizon::{
    optimize_horizon_dp, optimize_series_greedy, optimize_step_greedy, schedule_objective,
};
pub use oracle::{
    brute_force_oracle, random_instance, OracleInstance, OracleSolution, ORACLE_MAX_FLEET,
    ORACLE_MAX_STEPS,
};
pub use validate::{validate_decision, validate_schedule, Violation};

/// Balance tolerance, kW.
pub const BALANCE_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispatchError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("no feasible commitment at step {step}")]
    InfeasibleStep { step: usize },
    #[error("horizon infeasible: no commitment state reachable at step {step}")]
    InfeasibleHorizon { step: usize },
    #[error("empty input series")]
    EmptyHorizon,
    #[error("instance too large for exhaustive search ({steps} steps, {fleet} generators)")]
    OracleTooLarge { steps: usize, fleet: usize },
}

impl DispatchError {
    /// Step index for infeasibility errors.
    pub fn step(&self) -> Option<usize> {
        match self {
            DispatchError::InfeasibleStep { step } | DispatchError::InfeasibleHorizon { step } => {
                Some(*step)
            }
            _ => None,
        }
    }
}

/// Everything the optimiser needs to know about one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInputs {
    pub load_kw: f64,
    pub pv_available_kw: f64,
    pub grid_on: bool,
    pub grid_max_kw: f64,
    pub dt_hours: f64,
}

impl StepInputs {
    pub fn validate(&self) -> Result<(), DomainError> {
        check_range("load_kw", self.load_kw, 0.0, f64::MAX, "finite and >= 0")?;
        check_range(
            "pv_available_kw",
            self.pv_available_kw,
            0.0,
            f64::MAX,
            "finite and >= 0",
        )?;
        check_range(
            "grid_max_kw",
            self.grid_max_kw,
            0.0,
            f64::MAX,
            "finite and >= 0",
        )?;
        check_range(
            "dt_hours",
            self.dt_hours,
            f64::MIN_POSITIVE,
            f64::MAX,
            "> 0",
        )?;
        Ok(())
    }

    pub fn grid_capability(&self) -> f64 {
        grid_capability(self.grid_on, self.grid_max_kw)
    }

    /// With the grid down and load to serve, some generator must form the
    /// network. A de-energised microgrid (no load) needs no forming source.
    pub fn needs_grid_forming(&self) -> bool {
        !self.grid_on && self.load_kw > 0.0
    }
}

/// Prices and objective weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    /// Grid energy price, $/kWh.
    pub grid_price: f64,
    /// Export tariff, $/kWh.
    pub export_price: f64,
    /// Diesel price, $/l.
    pub fuel_price: f64,
    /// Weight on monetary cost.
    pub w1: f64,
    /// Weight on PV utilisation (dispatch plus export credit).
    pub w2: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            grid_price: 0.15,
            export_price: 0.05,
            fuel_price: 1.2,
            w1: 0.5,
            w2: 0.5,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), DomainError> {
        check_range("grid_price", self.grid_price, 0.0, f64::MAX, ">= 0")?;
        check_range("export_price", self.export_price, 0.0, f64::MAX, ">= 0")?;
        check_range("fuel_price", self.fuel_price, 0.0, f64::MAX, ">= 0")?;
        check_range("w1", self.w1, 0.0, f64::MAX, ">= 0")?;
        check_range("w2", self.w2, 0.0, f64::MAX, ">= 0")?;
        if self.w1 + self.w2 <= 0.0 {
            return Err(DomainError::Invalid("w1 + w2 must be > 0".to_string()));
        }
        Ok(())
    }
}

/// Grid exchange mode: the pair of exclusive import/export flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GridMode {
    Import,
    Export,
    Idle,
}

impl GridMode {
    /// Modes in tie-break order.
    pub const ALL: [GridMode; 3] = [GridMode::Import, GridMode::Export, GridMode::Idle];

    pub fn applicable(grid_on: bool) -> &'static [GridMode] {
        if grid_on {
            &Self::ALL
        } else {
            &[GridMode::Idle]
        }
    }

    pub fn import_flag(self) -> bool {
        self == GridMode::Import
    }

    pub fn export_flag(self) -> bool {
        self == GridMode::Export
    }
}

/// Monetary components of one step, $.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub grid: f64,
    pub fuel: f64,
    pub transitions: f64,
    pub om: f64,
    pub export_credit: f64,
}

impl CostBreakdown {
    pub fn diesel(&self) -> f64 {
        self.fuel + self.transitions + self.om
    }

    /// Grid plus diesel cost; the export credit is kept separate.
    pub fn monetary(&self) -> f64 {
        self.grid + self.diesel()
    }
}

/// Physical quantities entering the stage objective.
#[derive(Debug, Clone, Copy)]
pub struct StageFlows<'a> {
    pub state: &'a CommitmentState,
    pub indicators: &'a TransitionIndicators,
    pub grid_import_kw: f64,
    pub export_kw: f64,
    pub pv_dispatch_kw: f64,
    /// Fuel rate per generator, l/h.
    pub fuel_lph: &'a [f64],
}

/// Weighted stage objective and its monetary breakdown. Energy, fuel and
/// O&M terms scale with the step length; start/stop costs are per event.
pub fn stage_cost(
    flows: &StageFlows<'_>,
    costs: &CostParams,
    specs: &[DieselGenSpec],
    dt_hours: f64,
) -> (f64, CostBreakdown) {
    let mut b = CostBreakdown {
        grid: costs.grid_price * flows.grid_import_kw * dt_hours,
        export_credit: costs.export_price * flows.export_kw * dt_hours,
        ..Default::default()
    };
    for (i, spec) in specs.iter().enumerate() {
        b.fuel += costs.fuel_price * flows.fuel_lph[i] * dt_hours;
        if flows.state.is_on(i) {
            b.om += spec.om_cost * dt_hours;
        }
        if flows.indicators.up[i] {
            b.transitions += spec.start_cost;
        }
        if flows.indicators.down[i] {
            b.transitions += spec.stop_cost;
        }
    }
    let j =
        costs.w1 * b.monetary() - costs.w2 * (flows.pv_dispatch_kw * dt_hours + b.export_credit);
    (j, b)
}

/// Fully solved step.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchDecision {
    pub state: CommitmentState,
    pub indicators: TransitionIndicators,
    pub mode: GridMode,
    pub grid_import_kw: f64,
    pub export_kw: f64,
    pub diesel_kw: Vec<f64>,
    pub fuel_lph: Vec<f64>,
    pub pv_dispatch_kw: f64,
    pub curtail_kw: f64,
    /// Weighted objective of the step.
    pub stage_cost: f64,
    pub costs: CostBreakdown,
}

impl DispatchDecision {
    pub fn exchange(&self) -> GridExchange {
        GridExchange {
            import_flag: self.mode.import_flag(),
            export_flag: self.mode.export_flag(),
            import_kw: self.grid_import_kw,
            export_kw: self.export_kw,
        }
    }

    pub fn diesel_total_kw(&self) -> f64 {
        self.diesel_kw.iter().sum()
    }

    /// Assembles a decision from a continuous allocation and prices it.
    pub fn from_allocation(
        state: CommitmentState,
        previous: &CommitmentState,
        alloc: Allocation,
        inputs: &StepInputs,
        specs: &[DieselGenSpec],
        costs: &CostParams,
    ) -> Result<Self, DomainError> {
        let indicators = crate::diesel::transition_indicators(&state, previous)?;
        let fuel_lph = specs
            .iter()
            .enumerate()
            .map(|(i, s)| crate::diesel::fuel_rate(alloc.diesel_kw[i], s, state.is_on(i)))
            .collect::<Result<Vec<_>, _>>()?;
        let (stage_cost, breakdown) = stage_cost(
            &StageFlows {
                state: &state,
                indicators: &indicators,
                grid_import_kw: alloc.grid_import_kw,
                export_kw: alloc.export_kw,
                pv_dispatch_kw: alloc.pv_dispatch_kw,
                fuel_lph: &fuel_lph,
            },
            costs,
            specs,
            inputs.dt_hours,
        );
        Ok(Self {
            state,
            indicators,
            mode: alloc.mode,
            grid_import_kw: alloc.grid_import_kw,
            export_kw: alloc.export_kw,
            diesel_kw: alloc.diesel_kw,
            fuel_lph,
            pv_dispatch_kw: alloc.pv_dispatch_kw,
            curtail_kw: alloc.curtail_kw,
            stage_cost,
            costs: breakdown,
        })
    }
}

/// `candidate` beats `incumbent` by more than round-off. Near-ties keep the
/// incumbent, which was enumerated first.
pub(crate) fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - 1e-12 * incumbent.abs().max(1.0)
}
