use crate::diesel::{CommitmentState, DieselGenSpec, FUEL_NO_LOAD, FUEL_SLOPE, MIN_LOAD_FRAC};
use crate::dispatch::CostParams;
use crate::grid::GridSchedule;
use crate::solar::{size_array, PvCellSpec, PvSystem, SiteGeometry};

use super::{OptimizerMode, ScenarioConfig, ScenarioError};

pub const CASE_IDS: [u8; 3] = [1, 2, 3];
/// PV array rating of cases 2 and 3, kWp.
pub const PV_TARGET_KWP: f64 = 700.0;

/// Generator nameplates per case, kVA.
fn case_ratings_kva(case_id: u8) -> Option<&'static [f64]> {
    match case_id {
        1 | 2 => Some(&[500.0]),
        3 => Some(&[200.0, 150.0, 150.0]),
        _ => None,
    }
}

/// Cost and fuel parameters shared by every generator of a case. O&M is
/// given per kW of rating so that it scales with unit size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorTemplate {
    pub fuel_a: f64,
    pub fuel_b: f64,
    pub start_cost: f64,
    pub stop_cost: f64,
    /// $/h per kW of rating.
    pub om_cost_per_kw: f64,
    pub min_load_frac: f64,
    pub power_factor: f64,
}

impl Default for GeneratorTemplate {
    fn default() -> Self {
        Self {
            fuel_a: FUEL_SLOPE,
            fuel_b: FUEL_NO_LOAD,
            start_cost: 5.0,
            stop_cost: 2.0,
            om_cost_per_kw: 0.01,
            min_load_frac: MIN_LOAD_FRAC,
            power_factor: 1.0,
        }
    }
}

impl GeneratorTemplate {
    pub fn instantiate(&self, id: impl Into<String>, rated_kva: f64) -> DieselGenSpec {
        let rated_kw = rated_kva * self.power_factor;
        DieselGenSpec {
            id: id.into(),
            rated_kw,
            fuel_a: self.fuel_a,
            fuel_b: self.fuel_b,
            start_cost: self.start_cost,
            stop_cost: self.stop_cost,
            om_cost: self.om_cost_per_kw * rated_kw,
            min_load_frac: self.min_load_frac,
        }
    }

    /// Recovers a template from an existing generator.
    pub fn from_spec(spec: &DieselGenSpec, power_factor: f64) -> Self {
        Self {
            fuel_a: spec.fuel_a,
            fuel_b: spec.fuel_b,
            start_cost: spec.start_cost,
            stop_cost: spec.stop_cost,
            om_cost_per_kw: spec.om_cost / spec.rated_kw,
            min_load_frac: spec.min_load_frac,
            power_factor,
        }
    }
}

/// Site, prices and schedule common to the three comparison cases.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseCase {
    pub geometry: SiteGeometry,
    pub cell: PvCellSpec,
    pub cells_per_module: u32,
    pub pv_kwp: f64,
    pub grid: GridSchedule,
    pub costs: CostParams,
    pub mode: OptimizerMode,
    pub generator: GeneratorTemplate,
}

impl Default for BaseCase {
    fn default() -> Self {
        Self {
            geometry: SiteGeometry::from_degrees(31.5, 34.45, 30.0, 0.0, 0.2)
                .expect("valid default geometry"),
            cell: PvCellSpec::default(),
            cells_per_module: 60,
            pv_kwp: PV_TARGET_KWP,
            grid: GridSchedule {
                on_hours: 8.0,
                period_hours: 12.0,
                phase_offset_hours: 0.0,
                max_exchange_kw: 600.0,
            },
            costs: CostParams::default(),
            mode: OptimizerMode::Dp,
            generator: GeneratorTemplate::default(),
        }
    }
}

/// Case 1: a single 500 kVA generator. Case 2: the same plus a 700 kWp
/// array. Case 3: the array with 200, 150 and 150 kVA generators.
pub fn build_case(case_id: u8, base: &BaseCase) -> Result<ScenarioConfig, ScenarioError> {
    let ratings = case_ratings_kva(case_id).ok_or(ScenarioError::UnknownCase(case_id))?;
    let fleet: Vec<DieselGenSpec> = ratings
        .iter()
        .enumerate()
        .map(|(i, &kva)| {
            base.generator
                .instantiate(format!("dg{}_{}kVA", i + 1, kva), kva)
        })
        .collect();
    let pv = if case_id == 1 {
        None
    } else {
        Some(PvSystem {
            array: size_array(base.pv_kwp, &base.cell, base.cells_per_module)?,
            cell: base.cell,
            geometry: base.geometry,
        })
    };
    let initial_state = CommitmentState::all_off(fleet.len());
    Ok(ScenarioConfig {
        name: format!("Case {case_id}"),
        fleet,
        pv,
        grid: base.grid,
        costs: base.costs,
        mode: base.mode,
        initial_state,
    })
}
