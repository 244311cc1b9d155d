//! Public grid availability under a periodic blackout schedule, and the
//! import/export feasibility rules.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, DomainError};

/// Square-wave schedule: ON for `on_hours` at the start of every
/// `period_hours` cycle, OFF for the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSchedule {
    pub on_hours: f64,
    pub period_hours: f64,
    pub phase_offset_hours: f64,
    /// Maximum import or export power, kW.
    pub max_exchange_kw: f64,
}

impl GridSchedule {
    pub fn validate(&self) -> Result<(), DomainError> {
        check_range(
            "period_hours",
            self.period_hours,
            f64::MIN_POSITIVE,
            f64::MAX,
            "> 0",
        )?;
        check_range(
            "on_hours",
            self.on_hours,
            0.0,
            self.period_hours,
            "in [0, period_hours]",
        )?;
        if !(self.phase_offset_hours >= 0.0 && self.phase_offset_hours < self.period_hours) {
            return Err(DomainError::OutOfRange {
                what: "phase_offset_hours",
                rule: "in [0, period_hours)",
                value: self.phase_offset_hours,
            });
        }
        check_range(
            "max_exchange_kw",
            self.max_exchange_kw,
            f64::MIN_POSITIVE,
            f64::MAX,
            "> 0",
        )?;
        Ok(())
    }
}

/// Grid status at `t` hours after the horizon start. The interval
/// `[0, on_hours)` of each cycle is ON.
pub fn grid_status(t_hours: f64, schedule: &GridSchedule) -> bool {
    let phase = (t_hours + schedule.phase_offset_hours).rem_euclid(schedule.period_hours);
    phase < schedule.on_hours
}

pub fn grid_capability(grid_on: bool, max_exchange_kw: f64) -> f64 {
    if grid_on {
        max_exchange_kw
    } else {
        0.0
    }
}

/// Grid status for `steps` consecutive steps of `dt_hours`.
pub fn status_series(schedule: &GridSchedule, steps: usize, dt_hours: f64) -> Vec<bool> {
    (0..steps)
        .map(|k| grid_status(k as f64 * dt_hours, schedule))
        .collect()
}

/// Import/export decision at one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridExchange {
    pub import_flag: bool,
    pub export_flag: bool,
    pub import_kw: f64,
    pub export_kw: f64,
}

impl GridExchange {
    /// Flag/power consistency: power may flow only with its flag raised.
    pub fn is_consistent(&self) -> bool {
        self.import_kw >= 0.0
            && self.export_kw >= 0.0
            && (self.import_kw == 0.0 || self.import_flag)
            && (self.export_kw == 0.0 || self.export_flag)
    }
}

pub fn exchange_feasible(x: &GridExchange, capability_kw: f64) -> bool {
    const EPS: f64 = 1e-9;
    let imp = if x.import_flag { x.import_kw } else { 0.0 };
    let exp = if x.export_flag { x.export_kw } else { 0.0 };
    !(x.import_flag && x.export_flag) && imp <= capability_kw + EPS && exp <= capability_kw + EPS
}
