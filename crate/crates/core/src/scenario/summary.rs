use crate::diesel::DieselGenSpec;
use crate::dispatch::{CostParams, DispatchDecision};
use crate::error::DomainError;

/// Energy delivered over a run, MWh.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergySummary {
    pub grid_mwh: f64,
    pub diesel_mwh: f64,
    pub pv_mwh: f64,
    pub export_mwh: f64,
    pub curtail_mwh: f64,
}

impl EnergySummary {
    /// Energy supplied to the load.
    pub fn served_mwh(&self) -> f64 {
        self.grid_mwh + self.diesel_mwh + self.pv_mwh
    }
}

/// Monetary totals of a run, k$. `diesel` is fuel plus transitions plus
/// O&M; `total` excludes the export credit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostSummary {
    pub grid: f64,
    pub diesel: f64,
    pub fuel: f64,
    pub transitions: f64,
    pub om: f64,
    pub export_credit: f64,
    pub total: f64,
}

pub fn aggregate_energy<'a>(
    schedule: impl IntoIterator<Item = &'a DispatchDecision>,
    dt_hours: f64,
) -> EnergySummary {
    let mut e = EnergySummary::default();
    for d in schedule {
        e.grid_mwh += d.grid_import_kw;
        e.diesel_mwh += d.diesel_total_kw();
        e.pv_mwh += d.pv_dispatch_kw;
        e.export_mwh += d.export_kw;
        e.curtail_mwh += d.curtail_kw;
    }
    let scale = dt_hours / 1000.0;
    EnergySummary {
        grid_mwh: e.grid_mwh * scale,
        diesel_mwh: e.diesel_mwh * scale,
        pv_mwh: e.pv_mwh * scale,
        export_mwh: e.export_mwh * scale,
        curtail_mwh: e.curtail_mwh * scale,
    }
}

/// Prices a schedule in dollars (no objective weights), reported in k$.
pub fn aggregate_cost<'a>(
    schedule: impl IntoIterator<Item = &'a DispatchDecision>,
    specs: &[DieselGenSpec],
    costs: &CostParams,
    dt_hours: f64,
) -> CostSummary {
    let (mut grid_kwh, mut export_kwh, mut fuel_l, mut transitions, mut om) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    for d in schedule {
        grid_kwh += d.grid_import_kw * dt_hours;
        export_kwh += d.export_kw * dt_hours;
        for (i, spec) in specs.iter().enumerate() {
            fuel_l += d.fuel_lph[i] * dt_hours;
            if d.state.is_on(i) {
                om += spec.om_cost * dt_hours;
            }
            if d.indicators.up[i] {
                transitions += spec.start_cost;
            }
            if d.indicators.down[i] {
                transitions += spec.stop_cost;
            }
        }
    }
    let k = 1e-3;
    let grid = costs.grid_price * grid_kwh * k;
    let fuel = costs.fuel_price * fuel_l * k;
    let transitions = transitions * k;
    let om = om * k;
    let diesel = fuel + transitions + om;
    CostSummary {
        grid,
        diesel,
        fuel,
        transitions,
        om,
        export_credit: costs.export_price * export_kwh * k,
        total: grid + diesel,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSummary {
    pub name: String,
    pub has_pv: bool,
    pub energy: EnergySummary,
    pub cost: CostSummary,
}

/// Cost reduction of `case` relative to `baseline`, percent.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub case: String,
    pub baseline: String,
    pub percent: f64,
}

impl Reduction {
    /// Two decimals, half-up.
    pub fn formatted(&self) -> String {
        format!("{:.2}", round_half_up(self.percent, 2))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub reductions: Vec<Reduction>,
}

impl ComparisonReport {
    pub fn find(&self, case: &str, baseline: &str) -> Option<&Reduction> {
        self.reductions
            .iter()
            .find(|r| r.case == case && r.baseline == baseline)
    }
}

/// Rounds half-up at `decimals` places. A relative nudge of 1e-9 absorbs
/// binary representation error at exact halves.
pub fn round_half_up(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let scaled = x * scale;
    (scaled + 0.5 + 1e-9 * scaled.abs().max(1.0)).floor() / scale
}

/// Pairwise reductions of each case against every earlier one, latest
/// baseline first.
pub fn compare_cases(summaries: &[CaseSummary]) -> Result<ComparisonReport, DomainError> {
    if summaries.len() < 2 {
        return Err(DomainError::Invalid(
            "comparison needs at least two summaries".to_string(),
        ));
    }
    let mut reductions = Vec::new();
    for j in 1..summaries.len() {
        for i in (0..j).rev() {
            let base = summaries[i].cost.total;
            if base == 0.0 {
                return Err(DomainError::Invalid(format!(
                    "{} has zero total cost; reduction undefined",
                    summaries[i].name
                )));
            }
            reductions.push(Reduction {
                case: summaries[j].name.clone(),
                baseline: summaries[i].name.clone(),
                percent: 100.0 * (1.0 - summaries[j].cost.total / base),
            });
        }
    }
    Ok(ComparisonReport { reductions })
}
