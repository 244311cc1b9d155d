use std::fmt;

use crate::diesel::{
    feasible_range, fuel_rate, grid_forming_ok, transition_indicators, CommitmentState,
    DieselGenSpec,
};
use crate::grid::exchange_feasible;

use super::{DispatchDecision, StepInputs, BALANCE_EPS};

/// One broken constraint in a decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PowerBalance { residual: f64 },
    PvSplit { residual: f64 },
    NegativeFlow { what: &'static str, value: f64 },
    Loading { generator: usize, power: f64 },
    FuelMismatch { generator: usize },
    GridForming,
    Exchange,
    ExchangeDuringBlackout,
    IslandedPv,
    Indicators,
    VectorLength,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PowerBalance { residual } => write!(f, "power balance off by {residual} kW"),
            Violation::PvSplit { residual } => write!(f, "PV split off by {residual} kW"),
            Violation::NegativeFlow { what, value } => write!(f, "{what} is negative ({value})"),
            Violation::Loading { generator, power } => {
                write!(
                    f,
                    "generator {generator} loaded at {power} kW outside its range"
                )
            }
            Violation::FuelMismatch { generator } => {
                write!(
                    f,
                    "generator {generator} fuel rate inconsistent with dispatch"
                )
            }
            Violation::GridForming => f.write_str("blackout with load but no generator running"),
            Violation::Exchange => f.write_str("grid exchange infeasible"),
            Violation::ExchangeDuringBlackout => f.write_str("grid exchange during blackout"),
            Violation::IslandedPv => f.write_str("PV dispatched without a grid-forming source"),
            Violation::Indicators => f.write_str("start/stop indicators inconsistent"),
            Violation::VectorLength => f.write_str("per-generator vector length mismatch"),
        }
    }
}

/// Checks every constraint of one decision against its inputs.
pub fn validate_decision(
    d: &DispatchDecision,
    inputs: &StepInputs,
    specs: &[DieselGenSpec],
    previous: &CommitmentState,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = specs.len();
    if d.state.len() != n || d.diesel_kw.len() != n || d.fuel_lph.len() != n {
        out.push(Violation::VectorLength);
        return out;
    }

    let residual = d.grid_import_kw + d.diesel_total_kw() + d.pv_dispatch_kw - inputs.load_kw;
    if residual.abs() > BALANCE_EPS {
        out.push(Violation::PowerBalance { residual });
    }
    let split = d.pv_dispatch_kw + d.export_kw + d.curtail_kw - inputs.pv_available_kw;
    if split.abs() > BALANCE_EPS {
        out.push(Violation::PvSplit { residual: split });
    }
    for (what, value) in [
        ("grid import", d.grid_import_kw),
        ("export", d.export_kw),
        ("PV dispatch", d.pv_dispatch_kw),
        ("curtailment", d.curtail_kw),
    ] {
        if value < -BALANCE_EPS {
            out.push(Violation::NegativeFlow { what, value });
        }
    }

    for (i, spec) in specs.iter().enumerate() {
        let on = d.state.is_on(i);
        if !feasible_range(spec, on).contains(d.diesel_kw[i], BALANCE_EPS) {
            out.push(Violation::Loading {
                generator: i,
                power: d.diesel_kw[i],
            });
        }
        match fuel_rate(d.diesel_kw[i], spec, on) {
            Ok(f) if (f - d.fuel_lph[i]).abs() <= 1e-9 * f.abs().max(1.0) => {}
            _ => out.push(Violation::FuelMismatch { generator: i }),
        }
    }

    if inputs.needs_grid_forming() && !grid_forming_ok(&d.state, inputs.grid_on) {
        out.push(Violation::GridForming);
    }
    let x = d.exchange();
    if !x.is_consistent() || !exchange_feasible(&x, inputs.grid_capability()) {
        out.push(Violation::Exchange);
    }
    if !inputs.grid_on && (d.grid_import_kw != 0.0 || d.export_kw != 0.0 || x.export_flag) {
        out.push(Violation::ExchangeDuringBlackout);
    }
    if !inputs.grid_on && d.state.on_count() == 0 && d.pv_dispatch_kw > 0.0 {
        out.push(Violation::IslandedPv);
    }

    match transition_indicators(&d.state, previous) {
        Ok(t) if t == d.indicators && t.up.iter().zip(&t.down).all(|(u, dn)| !(*u && *dn)) => {}
        _ => out.push(Violation::Indicators),
    }
    out
}

/// Validates a whole schedule, returning `(step, violation)` pairs.
pub fn validate_schedule(
    schedule: &[DispatchDecision],
    series: &[StepInputs],
    specs: &[DieselGenSpec],
    initial: &CommitmentState,
) -> Vec<(usize, Violation)> {
    let mut out = Vec::new();
    let mut previous = *initial;
    for (t, (d, inputs)) in schedule.iter().zip(series).enumerate() {
        out.extend(
            validate_decision(d, inputs, specs, &previous)
                .into_iter()
                .map(|v| (t, v)),
        );
        previous = d.state;
    }
    out
}
