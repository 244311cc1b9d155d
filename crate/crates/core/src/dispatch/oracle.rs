//! Exhaustive reference solver for small instances.
//!
//! Enumerates every commitment sequence and, for each step and state, every
//! grid mode with the continuous flows sampled on a uniform grid. Shares no
//! code with the merit-order allocation or the dynamic programme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diesel::{
    feasible_range, fuel_rate, transition_cost, transition_indicators, validate_fleet,
    CommitmentState, DieselGenSpec,
};

use super::{
    improves, stage_cost, Allocation, CostParams, DispatchDecision, DispatchError, GridMode,
    StageFlows, StepInputs,
};

pub const ORACLE_MAX_STEPS: usize = 8;
pub const ORACLE_MAX_FLEET: usize = 2;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub schedule: Vec<DispatchDecision>,
    pub objective: f64,
    /// Objective of the best sequence with a different commitment path.
    pub runner_up: Option<f64>,
}

impl OracleSolution {
    pub fn states(&self) -> Vec<CommitmentState> {
        self.schedule.iter().map(|d| d.state).collect()
    }
}

/// Grid points `lo, lo + res, ...` followed by `hi`.
fn samples(lo: f64, hi: f64, res: f64) -> Vec<f64> {
    if hi < lo - EPS {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut k = 0u64;
    loop {
        let x = lo + k as f64 * res;
        if x >= hi - EPS {
            break;
        }
        out.push(x);
        k += 1;
    }
    out.push(hi.max(lo));
    out
}

struct Sampled {
    allocation: Allocation,
    value: f64,
}

fn sample_stage(
    state: &CommitmentState,
    inputs: &StepInputs,
    specs: &[DieselGenSpec],
    costs: &CostParams,
    res: f64,
) -> Result<Option<Sampled>, DispatchError> {
    let any_on = state.on_count() > 0;
    if !inputs.grid_on && inputs.load_kw > 0.0 && !any_on {
        return Ok(None);
    }
    let cap = if inputs.grid_on {
        inputs.grid_max_kw
    } else {
        0.0
    };
    let pv_max = if inputs.grid_on || any_on {
        inputs.pv_available_kw
    } else {
        0.0
    };
    let levels: Vec<Vec<f64>> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let r = feasible_range(s, state.is_on(i));
            if state.is_on(i) {
                samples(r.lo, r.hi, res)
            } else {
                vec![0.0]
            }
        })
        .collect();
    // cartesian product of generator levels
    let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
    for lv in &levels {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                lv.iter().map(move |&x| {
                    let mut c = c.clone();
                    c.push(x);
                    c
                })
            })
            .collect();
    }

    let indicators = transition_indicators(state, state)?;
    let mut best: Option<Sampled> = None;
    let mut consider =
        |mode: GridMode, dg: &[f64], pv: f64, g: f64, exp: f64| -> Result<(), DispatchError> {
            let fuel = specs
                .iter()
                .enumerate()
                .map(|(i, s)| fuel_rate(dg[i], s, state.is_on(i)))
                .collect::<Result<Vec<_>, _>>()?;
            let (value, _) = stage_cost(
                &StageFlows {
                    state,
                    indicators: &indicators,
                    grid_import_kw: g,
                    export_kw: exp,
                    pv_dispatch_kw: pv,
                    fuel_lph: &fuel,
                },
                costs,
                specs,
                inputs.dt_hours,
            );
            if best.as_ref().is_none_or(|b| improves(value, b.value)) {
                best = Some(Sampled {
                    allocation: Allocation {
                        mode,
                        grid_import_kw: g,
                        export_kw: exp,
                        pv_dispatch_kw: pv,
                        curtail_kw: (inputs.pv_available_kw - pv - exp).max(0.0),
                        diesel_kw: dg.to_vec(),
                    },
                    value,
                });
            }
            Ok(())
        };

    for &mode in GridMode::applicable(inputs.grid_on) {
        for dg in &combos {
            let rest = inputs.load_kw - dg.iter().sum::<f64>();
            match mode {
                GridMode::Import => {
                    for pv in samples(0.0, pv_max, res) {
                        let g = rest - pv;
                        if g >= -EPS && g <= cap + EPS {
                            consider(mode, dg, pv, g.max(0.0), 0.0)?;
                        }
                    }
                }
                GridMode::Export => {
                    if rest >= -EPS && rest <= pv_max + EPS {
                        let pv = rest.clamp(0.0, pv_max);
                        for exp in samples(0.0, cap.min(pv_max - pv), res) {
                            consider(mode, dg, pv, 0.0, exp)?;
                        }
                    }
                }
                GridMode::Idle => {
                    if rest >= -EPS && rest <= pv_max + EPS {
                        consider(mode, dg, rest.clamp(0.0, pv_max), 0.0, 0.0)?;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Best schedule by exhaustive enumeration, for at most
/// [`ORACLE_MAX_STEPS`] steps and [`ORACLE_MAX_FLEET`] generators.
pub fn brute_force_oracle(
    initial: &CommitmentState,
    series: &[StepInputs],
    specs: &[DieselGenSpec],
    costs: &CostParams,
    resolution_kw: f64,
) -> Result<OracleSolution, DispatchError> {
    if series.len() > ORACLE_MAX_STEPS || specs.len() > ORACLE_MAX_FLEET {
        return Err(DispatchError::OracleTooLarge {
            steps: series.len(),
            fleet: specs.len(),
        });
    }
    if series.is_empty() {
        return Err(DispatchError::EmptyHorizon);
    }
    if resolution_kw.is_nan() || resolution_kw <= 0.0 {
        return Err(crate::DomainError::OutOfRange {
            what: "resolution_kw",
            rule: "> 0",
            value: resolution_kw,
        }
        .into());
    }
    validate_fleet(specs)?;
    costs.validate()?;
    for s in series {
        s.validate()?;
    }

    let states: Vec<CommitmentState> = CommitmentState::enumerate(specs.len()).collect();
    let table: Vec<Vec<Option<Sampled>>> = series
        .iter()
        .map(|inputs| {
            states
                .iter()
                .map(|s| sample_stage(s, inputs, specs, costs, resolution_kw))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;

    let base = states.len();
    let total = base.pow(series.len() as u32);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut runner_up: Option<f64> = None;
    let mut seq = vec![0usize; series.len()];
    for code in 0..total {
        let mut c = code;
        for t in (0..series.len()).rev() {
            seq[t] = c % base;
            c /= base;
        }
        let mut value = 0.0;
        let mut prev = *initial;
        let mut feasible = true;
        for (t, &si) in seq.iter().enumerate() {
            let Some(stage) = &table[t][si] else {
                feasible = false;
                break;
            };
            value += costs.w1 * transition_cost(&states[si], &prev, specs) + stage.value;
            prev = states[si];
        }
        if !feasible {
            continue;
        }
        match &best {
            Some((b, _)) if !improves(value, *b) => {
                if runner_up.is_none_or(|r| value < r) {
                    runner_up = Some(value);
                }
            }
            _ => {
                if let Some((b, _)) = &best {
                    runner_up = Some(runner_up.map_or(*b, |r| r.min(*b)));
                }
                best = Some((value, seq.clone()));
            }
        }
    }

    let (_, path) = best.ok_or(DispatchError::InfeasibleHorizon { step: 0 })?;
    let mut prev = *initial;
    let mut schedule = Vec::with_capacity(series.len());
    for (t, &si) in path.iter().enumerate() {
        let stage = table[t][si].as_ref().expect("feasible path");
        let d = DispatchDecision::from_allocation(
            states[si],
            &prev,
            stage.allocation.clone(),
            &series[t],
            specs,
            costs,
        )?;
        prev = d.state;
        schedule.push(d);
    }
    let objective = schedule.iter().map(|d| d.stage_cost).sum();
    Ok(OracleSolution {
        schedule,
        objective,
        runner_up,
    })
}

/// A small dispatch problem with its inputs.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub initial: CommitmentState,
    pub series: Vec<StepInputs>,
    pub fleet: Vec<DieselGenSpec>,
    pub costs: CostParams,
}

fn lattice(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let lo = (2.0 * lo - 1e-9).ceil();
    let hi = (2.0 * hi + 1e-9).floor();
    rng.gen_range(lo as i64..=hi as i64) as f64 * 0.5
}

/// Seeded random instance with up to six steps and two generators. All
/// powers lie on a 0.5 kW lattice and ratings are multiples of 5 kW, so
/// a 0.5 kW oracle grid contains every allocation vertex. Blackout steps
/// carry enough load to keep some generator above its minimum.
pub fn random_instance(seed: u64) -> OracleInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_dg = rng.gen_range(1..=ORACLE_MAX_FLEET);
    let steps = rng.gen_range(2..=6);
    let fleet: Vec<DieselGenSpec> = (0..n_dg)
        .map(|i| DieselGenSpec {
            start_cost: [0.0, 1.0, 2.0, 5.0, 10.0][rng.gen_range(0..5)],
            stop_cost: [0.0, 0.5, 1.0, 2.0][rng.gen_range(0..4)],
            om_cost: [0.0, 0.1, 0.5][rng.gen_range(0..3)],
            ..DieselGenSpec::new(format!("dg{}", i + 1), 5.0 * rng.gen_range(2..=8) as f64)
        })
        .collect();
    let costs = CostParams {
        grid_price: [0.05, 0.1, 0.15, 0.3, 0.5][rng.gen_range(0..5)],
        export_price: [0.0, 0.02, 0.05, 0.1][rng.gen_range(0..4)],
        fuel_price: [0.8, 1.2, 2.0][rng.gen_range(0..3)],
        w1: [0.25, 0.5, 0.75, 1.0][rng.gen_range(0..4)],
        w2: [0.0, 0.25, 0.5, 1.0][rng.gen_range(0..4)],
    };
    let min_on = fleet
        .iter()
        .map(|g| g.min_kw())
        .fold(f64::INFINITY, f64::min);
    let total_rated: f64 = fleet.iter().map(|g| g.rated_kw).sum();
    let grid_max = 5.0 * rng.gen_range(2..=12) as f64;
    // a contiguous blackout window somewhere in the horizon
    let start = rng.gen_range(0..steps);
    let len = rng.gen_range(0..=steps - start);
    let series = (0..steps)
        .map(|t| {
            let grid_on = !(start..start + len).contains(&t);
            let pv = lattice(&mut rng, 0.0, 30.0);
            let load = if grid_on {
                lattice(&mut rng, 0.0, (grid_max + total_rated).min(80.0))
            } else {
                lattice(&mut rng, min_on, total_rated)
            };
            StepInputs {
                load_kw: load,
                pv_available_kw: pv,
                grid_on,
                grid_max_kw: grid_max,
                dt_hours: 1.0,
            }
        })
        .collect();
    let initial = CommitmentState::from_index(rng.gen_range(0..1u32 << n_dg), n_dg)
        .expect("index within fleet");
    OracleInstance {
        initial,
        series,
        fleet,
        costs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispatch::{optimize_horizon_dp, optimize_step_greedy, schedule_objective};

    fn step(load: f64, pv: f64, grid_on: bool) -> StepInputs {
        StepInputs {
            load_kw: load,
            pv_available_kw: pv,
            grid_on,
            grid_max_kw: 60.0,
            dt_hours: 1.0,
        }
    }

    #[test]
    fn sample_points_include_endpoints() {
        assert_eq!(samples(0.0, 1.0, 0.5), vec![0.0, 0.5, 1.0]);
        assert_eq!(samples(0.0, 0.7, 0.5), vec![0.0, 0.5, 0.7]);
        assert_eq!(samples(2.0, 2.0, 0.5), vec![2.0]);
        assert!(samples(1.0, 0.0, 0.5).is_empty());
    }

    #[test]
    fn guards() {
        let specs = vec![DieselGenSpec::new("g", 10.0); 3];
        let s = [step(1.0, 0.0, true)];
        assert!(matches!(
            brute_force_oracle(
                &CommitmentState::all_off(3),
                &s,
                &specs,
                &CostParams::default(),
                0.5
            ),
            Err(DispatchError::OracleTooLarge { .. })
        ));
        let specs = vec![DieselGenSpec::new("g", 10.0)];
        let long = vec![step(1.0, 0.0, true); 9];
        assert!(matches!(
            brute_force_oracle(
                &CommitmentState::all_off(1),
                &long,
                &specs,
                &CostParams::default(),
                0.5
            ),
            Err(DispatchError::OracleTooLarge { .. })
        ));
    }

    #[test]
    fn one_step_agrees_with_greedy() {
        let specs = vec![DieselGenSpec {
            start_cost: 1.0,
            om_cost: 0.5,
            ..DieselGenSpec::new("g", 40.0)
        }];
        let costs = CostParams::default();
        let init = CommitmentState::all_off(1);
        for s in [
            step(25.0, 10.0, false),
            step(25.0, 10.0, true),
            step(5.0, 80.0, true),
        ] {
            let o = brute_force_oracle(&init, &[s], &specs, &costs, 0.5).unwrap();
            let g = optimize_step_greedy(&init, &s, &specs, &costs).unwrap();
            assert_eq!(o.schedule[0].state, g.state);
            assert!(
                (o.objective - g.stage_cost).abs() < 1e-9,
                "{} vs {}",
                o.objective,
                g.stage_cost
            );
        }
    }

    #[test]
    fn degenerate_costs_reward_all_pv() {
        // zero prices: objective is minus weighted PV use
        let specs = vec![DieselGenSpec::new("g", 20.0)];
        let costs = CostParams {
            grid_price: 0.0,
            export_price: 0.0,
            fuel_price: 0.0,
            w1: 1.0,
            w2: 0.5,
        };
        let series = [step(30.0, 20.0, true), step(10.0, 5.0, true)];
        let init = CommitmentState::all_off(1);
        let o = brute_force_oracle(&init, &series, &specs, &costs, 0.5).unwrap();
        let dp = optimize_horizon_dp(&init, &series, &specs, &costs).unwrap();
        assert!((o.objective - (-0.5 * 25.0)).abs() < 1e-9);
        assert!((schedule_objective(&dp) - o.objective).abs() < 1e-9);
    }
}
