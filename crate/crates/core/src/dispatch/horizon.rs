use crate::diesel::{transition_cost, validate_fleet, CommitmentState, DieselGenSpec};
use crate::error::DomainError;

use super::{
    continuous_allocation, improves, Allocation, CostParams, DispatchDecision, DispatchError,
    GridMode, StepInputs,
};

/// Best grid mode and continuous allocation for a fixed commitment, with the
/// stage objective excluding start/stop costs.
struct StageOptimum {
    allocation: Allocation,
    value: f64,
}

fn best_stage(
    state: &CommitmentState,
    inputs: &StepInputs,
    specs: &[DieselGenSpec],
    costs: &CostParams,
) -> Result<Option<StageOptimum>, DispatchError> {
    let mut best: Option<StageOptimum> = None;
    for &mode in GridMode::applicable(inputs.grid_on) {
        let Some(allocation) = continuous_allocation(state, mode, inputs, specs, costs)? else {
            continue;
        };
        // price against an unchanged previous state: no transition terms
        let priced = DispatchDecision::from_allocation(
            *state,
            state,
            allocation.clone(),
            inputs,
            specs,
            costs,
        )?;
        if best
            .as_ref()
            .is_none_or(|b| improves(priced.stage_cost, b.value))
        {
            best = Some(StageOptimum {
                allocation,
                value: priced.stage_cost,
            });
        }
    }
    Ok(best)
}

fn check_problem(specs: &[DieselGenSpec], costs: &CostParams) -> Result<(), DomainError> {
    validate_fleet(specs)?;
    costs.validate()
}

/// Per-step minimisation given the previous commitment. Candidates are all
/// commitment states crossed with the applicable grid modes; ties go to the
/// lowest state index, then import, export, idle.
pub fn optimize_step_greedy(
    previous: &CommitmentState,
    inputs: &StepInputs,
    specs: &[DieselGenSpec],
    costs: &CostParams,
) -> Result<DispatchDecision, DispatchError> {
    check_problem(specs, costs)?;
    greedy_step(previous, inputs, specs, costs, 0)
}

fn greedy_step(
    previous: &CommitmentState,
    inputs: &StepInputs,
    specs: &[DieselGenSpec],
    costs: &CostParams,
    step: usize,
) -> Result<DispatchDecision, DispatchError> {
    if previous.len() != specs.len() {
        return Err(DomainError::LengthMismatch {
            left: previous.len(),
            right: specs.len(),
        }
        .into());
    }
    let mut best: Option<(f64, CommitmentState, Allocation)> = None;
    for state in CommitmentState::enumerate(specs.len()) {
        let Some(stage) = best_stage(&state, inputs, specs, costs)? else {
            continue;
        };
        let total = costs.w1 * transition_cost(&state, previous, specs) + stage.value;
        if best.as_ref().is_none_or(|(v, _, _)| improves(total, *v)) {
            best = Some((total, state, stage.allocation));
        }
    }
    let (_, state, allocation) = best.ok_or(DispatchError::InfeasibleStep { step })?;
    Ok(DispatchDecision::from_allocation(
        state, previous, allocation, inputs, specs, costs,
    )?)
}

/// Greedy pass over a series, threading each step's commitment into the next.
pub fn optimize_series_greedy(
    initial: &CommitmentState,
    series: &[StepInputs],
    specs: &[DieselGenSpec],
    costs: &CostParams,
) -> Result<Vec<DispatchDecision>, DispatchError> {
    check_problem(specs, costs)?;
    let mut previous = *initial;
    let mut out = Vec::with_capacity(series.len());
    for (step, inputs) in series.iter().enumerate() {
        let d = greedy_step(&previous, inputs, specs, costs, step)?;
        previous = d.state;
        out.push(d);
    }
    Ok(out)
}

/// Exact minimum of the summed stage objective over the horizon by dynamic
/// programming on commitment states.
///
/// The stage value of a state does not depend on its predecessor, so it is
/// computed once per step and state; predecessors contribute only the
/// weighted start/stop costs.
pub fn optimize_horizon_dp(
    initial: &CommitmentState,
    series: &[StepInputs],
    specs: &[DieselGenSpec],
    costs: &CostParams,
) -> Result<Vec<DispatchDecision>, DispatchError> {
    check_problem(specs, costs)?;
    if series.is_empty() {
        return Err(DispatchError::EmptyHorizon);
    }
    if initial.len() != specs.len() {
        return Err(DomainError::LengthMismatch {
            left: initial.len(),
            right: specs.len(),
        }
        .into());
    }
    let states: Vec<CommitmentState> = CommitmentState::enumerate(specs.len()).collect();
    let n = states.len();
    // transition[p][s]: weighted cost of moving from p to s
    let transition: Vec<Vec<f64>> = states
        .iter()
        .map(|p| {
            states
                .iter()
                .map(|s| costs.w1 * transition_cost(s, p, specs))
                .collect()
        })
        .collect();

    let mut stages: Vec<Vec<Option<StageOptimum>>> = Vec::with_capacity(series.len());
    let mut predecessor: Vec<Vec<usize>> = Vec::with_capacity(series.len());
    let mut value = vec![f64::INFINITY; n];

    for (t, inputs) in series.iter().enumerate() {
        let stage: Vec<Option<StageOptimum>> = states
            .iter()
            .map(|s| best_stage(s, inputs, specs, costs))
            .collect::<Result<_, _>>()?;
        let mut next = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        for (si, s) in states.iter().enumerate() {
            let Some(opt) = &stage[si] else { continue };
            let (arrive, from) = if t == 0 {
                (costs.w1 * transition_cost(s, initial, specs), usize::MAX)
            } else {
                let mut best = (f64::INFINITY, usize::MAX);
                for (pi, v) in value.iter().enumerate() {
                    if !v.is_finite() {
                        continue;
                    }
                    let cand = v + transition[pi][si];
                    if best.1 == usize::MAX || improves(cand, best.0) {
                        best = (cand, pi);
                    }
                }
                best
            };
            if arrive.is_finite() {
                next[si] = arrive + opt.value;
                pred[si] = from;
            }
        }
        if next.iter().all(|v| !v.is_finite()) {
            return Err(DispatchError::InfeasibleHorizon { step: t });
        }
        value = next;
        stages.push(stage);
        predecessor.push(pred);
    }

    let mut end = usize::MAX;
    for (si, v) in value.iter().enumerate() {
        if v.is_finite() && (end == usize::MAX || improves(*v, value[end])) {
            end = si;
        }
    }

    let mut path = vec![0usize; series.len()];
    let mut cur = end;
    for t in (0..series.len()).rev() {
        path[t] = cur;
        cur = predecessor[t][cur];
    }

    let mut previous = *initial;
    let mut out = Vec::with_capacity(series.len());
    for (t, &si) in path.iter().enumerate() {
        let opt = stages[t][si]
            .take()
            .expect("backtracked state has a stage optimum");
        let d = DispatchDecision::from_allocation(
            states[si],
            &previous,
            opt.allocation,
            &series[t],
            specs,
            costs,
        )?;
        previous = d.state;
        out.push(d);
    }
    Ok(out)
}

/// Sum of weighted stage objectives.
pub fn schedule_objective(schedule: &[DispatchDecision]) -> f64 {
    schedule.iter().map(|d| d.stage_cost).sum()
}
