use std::cmp::Ordering;

use crate::diesel::{feasible_range, CommitmentState, DieselGenSpec};
use crate::error::DomainError;

use super::{CostParams, GridMode, StepInputs};

/// Continuous power flows for fixed binaries, kW.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub mode: GridMode,
    pub grid_import_kw: f64,
    pub export_kw: f64,
    pub pv_dispatch_kw: f64,
    pub curtail_kw: f64,
    pub diesel_kw: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Source {
    Pv,
    Grid,
    Diesel(usize),
}

/// A block of supply with constant marginal objective per kW.
#[derive(Debug, Clone, Copy)]
struct Segment {
    marginal: f64,
    capacity: f64,
    source: Source,
}

/// Exact optimum of the continuous sub-problem for a fixed commitment and
/// grid mode, or `None` when the binaries admit no balanced allocation.
///
/// Committed generators are pinned at their minimum loading. The residual
/// load is then filled from the cheapest supply segment upwards. PV value is
/// piecewise linear: while surplus would overflow the export limit, each kW
/// dispatched earns `w2`; once it competes with export it earns only
/// `w2 * (1 - export_price)`. Both pieces are convex, so filling in merit
/// order is optimal. Whatever PV is left is exported (export mode, up to the
/// grid limit) and the rest curtailed.
pub fn continuous_allocation(
    state: &CommitmentState,
    mode: GridMode,
    inputs: &StepInputs,
    specs: &[DieselGenSpec],
    costs: &CostParams,
) -> Result<Option<Allocation>, DomainError> {
    inputs.validate()?;
    if state.len() != specs.len() {
        return Err(DomainError::LengthMismatch {
            left: state.len(),
            right: specs.len(),
        });
    }
    if !GridMode::applicable(inputs.grid_on).contains(&mode) {
        return Ok(None);
    }
    let any_on = state.on_count() > 0;
    if inputs.needs_grid_forming() && !any_on {
        return Ok(None);
    }

    let capability = inputs.grid_capability();
    let mut diesel_kw: Vec<f64> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| feasible_range(s, state.is_on(i)).lo)
        .collect();
    let pinned: f64 = diesel_kw.iter().sum();
    let tol = 1e-9 * inputs.load_kw.max(1.0);
    let mut residual = inputs.load_kw - pinned;
    if residual < -tol {
        return Ok(None);
    }
    residual = residual.max(0.0);

    // grid-feeding PV inverter needs a formed network
    let pv_usable = if inputs.grid_on || any_on {
        inputs.pv_available_kw
    } else {
        0.0
    };
    let export_credit = costs.w2 * costs.export_price;
    let exporting = mode == GridMode::Export && export_credit > 0.0;
    let export_room = if exporting {
        capability.min(pv_usable)
    } else {
        0.0
    };

    let dt = inputs.dt_hours;
    let mut segments = vec![
        Segment {
            marginal: -costs.w2 * dt,
            capacity: pv_usable - export_room,
            source: Source::Pv,
        },
        Segment {
            marginal: (export_credit - costs.w2) * dt,
            capacity: export_room,
            source: Source::Pv,
        },
    ];
    if mode == GridMode::Import {
        segments.push(Segment {
            marginal: costs.w1 * costs.grid_price * dt,
            capacity: capability,
            source: Source::Grid,
        });
    }
    for (i, s) in specs.iter().enumerate() {
        if state.is_on(i) {
            segments.push(Segment {
                marginal: costs.w1 * costs.fuel_price * s.fuel_a * dt,
                capacity: s.rated_kw - s.min_kw(),
                source: Source::Diesel(i),
            });
        }
    }
    // stable: equal marginals keep PV, grid, generator-index order
    segments.sort_by(|a, b| {
        a.marginal
            .partial_cmp(&b.marginal)
            .unwrap_or(Ordering::Equal)
    });

    let mut pv_dispatch = 0.0;
    let mut grid_import = 0.0;
    for seg in &segments {
        if residual <= 0.0 {
            break;
        }
        let take = seg.capacity.max(0.0).min(residual);
        residual -= take;
        match seg.source {
            Source::Pv => pv_dispatch += take,
            Source::Grid => grid_import += take,
            Source::Diesel(i) => diesel_kw[i] = (diesel_kw[i] + take).min(specs[i].rated_kw),
        }
    }
    if residual > tol {
        return Ok(None);
    }

    let surplus = (pv_usable - pv_dispatch).max(0.0);
    let export = if exporting {
        surplus.min(capability)
    } else {
        0.0
    };
    let curtail = (inputs.pv_available_kw - pv_dispatch - export).max(0.0);
    Ok(Some(Allocation {
        mode,
        grid_import_kw: grid_import,
        export_kw: export,
        pv_dispatch_kw: pv_dispatch,
        curtail_kw: curtail,
        diesel_kw,
    }))
}
