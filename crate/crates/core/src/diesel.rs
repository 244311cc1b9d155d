//! Diesel generator fleet: fuel curve, commitment transitions, minimum
//! loading and the grid-forming requirement during blackouts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_range, DomainError};

/// Slope of the fuel curve, l/kWh.
pub const FUEL_SLOPE: f64 = 0.246;
/// No-load fuel term per kW of rating, l/kWh (per hour of running).
pub const FUEL_NO_LOAD: f64 = 0.08415;
/// Minimum loading as a fraction of rating.
pub const MIN_LOAD_FRAC: f64 = 0.3;
/// Largest fleet the commitment encoding supports.
pub const MAX_FLEET: usize = 16;

/// Absolute tolerance on loading bounds, kW.
const LOADING_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieselGenSpec {
    pub id: String,
    /// Rated active power, kW.
    pub rated_kw: f64,
    pub fuel_a: f64,
    pub fuel_b: f64,
    /// Cost per start, $.
    pub start_cost: f64,
    /// Cost per stop, $.
    pub stop_cost: f64,
    /// Operation and maintenance cost while running, $/h.
    pub om_cost: f64,
    pub min_load_frac: f64,
}

impl DieselGenSpec {
    /// A generator with the default fuel curve, minimum loading and no
    /// start, stop or O&M costs.
    pub fn new(id: impl Into<String>, rated_kw: f64) -> Self {
        Self {
            id: id.into(),
            rated_kw,
            fuel_a: FUEL_SLOPE,
            fuel_b: FUEL_NO_LOAD,
            start_cost: 0.0,
            stop_cost: 0.0,
            om_cost: 0.0,
            min_load_frac: MIN_LOAD_FRAC,
        }
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        check_range(
            "rated_kw",
            self.rated_kw,
            f64::MIN_POSITIVE,
            f64::MAX,
            "> 0",
        )?;
        check_range("fuel_a", self.fuel_a, 0.0, f64::MAX, ">= 0")?;
        check_range("fuel_b", self.fuel_b, 0.0, f64::MAX, ">= 0")?;
        check_range("start_cost", self.start_cost, 0.0, f64::MAX, ">= 0")?;
        check_range("stop_cost", self.stop_cost, 0.0, f64::MAX, ">= 0")?;
        check_range("om_cost", self.om_cost, 0.0, f64::MAX, ">= 0")?;
        check_range(
            "min_load_frac",
            self.min_load_frac,
            f64::MIN_POSITIVE,
            1.0,
            "in (0, 1]",
        )?;
        Ok(())
    }

    pub fn min_kw(&self) -> f64 {
        self.min_load_frac * self.rated_kw
    }
}

pub fn validate_fleet(fleet: &[DieselGenSpec]) -> Result<(), DomainError> {
    if fleet.len() > MAX_FLEET {
        return Err(DomainError::FleetTooLarge(fleet.len()));
    }
    fleet.iter().try_for_each(DieselGenSpec::validate)
}

/// Closed interval of admissible dispatch, kW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64, eps: f64) -> bool {
        x >= self.lo - eps && x <= self.hi + eps
    }
}

pub fn feasible_range(spec: &DieselGenSpec, on: bool) -> Interval {
    if on {
        Interval {
            lo: spec.min_kw(),
            hi: spec.rated_kw,
        }
    } else {
        Interval { lo: 0.0, hi: 0.0 }
    }
}

/// Fuel consumption rate, l/h.
pub fn fuel_rate(power_kw: f64, spec: &DieselGenSpec, on: bool) -> Result<f64, DomainError> {
    let range = feasible_range(spec, on);
    if !range.contains(power_kw, LOADING_EPS) {
        return Err(DomainError::InfeasibleLoading {
            id: spec.id.clone(),
            power: power_kw,
            min: range.lo,
            max: range.hi,
        });
    }
    if on {
        Ok(spec.fuel_a * power_kw + spec.fuel_b * spec.rated_kw)
    } else {
        Ok(0.0)
    }
}

/// ON/OFF status of every generator, stored as a bit mask (bit `i` is
/// generator `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CommitmentState {
    bits: u32,
    len: u8,
}

impl CommitmentState {
    pub fn all_off(len: usize) -> Self {
        assert!(len <= MAX_FLEET, "fleet too large");
        Self {
            bits: 0,
            len: len as u8,
        }
    }

    pub fn from_index(index: u32, len: usize) -> Result<Self, DomainError> {
        if len > MAX_FLEET {
            return Err(DomainError::FleetTooLarge(len));
        }
        if (index as u64) >= (1u64 << len) {
            return Err(DomainError::Invalid(format!(
                "commitment index {index} out of range for {len} generators"
            )));
        }
        Ok(Self {
            bits: index,
            len: len as u8,
        })
    }

    pub fn from_statuses(statuses: &[bool]) -> Result<Self, DomainError> {
        if statuses.len() > MAX_FLEET {
            return Err(DomainError::FleetTooLarge(statuses.len()));
        }
        let bits = statuses
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &on)| acc | ((on as u32) << i));
        Ok(Self {
            bits,
            len: statuses.len() as u8,
        })
    }

    /// Every state of a fleet of `len`, in increasing index order.
    pub fn enumerate(len: usize) -> impl Iterator<Item = CommitmentState> {
        assert!(len <= MAX_FLEET, "fleet too large");
        (0..(1u32 << len)).map(move |bits| CommitmentState {
            bits,
            len: len as u8,
        })
    }

    pub fn index(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_on(&self, i: usize) -> bool {
        i < self.len() && (self.bits >> i) & 1 == 1
    }

    pub fn with(&self, i: usize, on: bool) -> Self {
        assert!(i < self.len(), "generator index out of range");
        let bits = if on {
            self.bits | (1 << i)
        } else {
            self.bits & !(1 << i)
        };
        Self {
            bits,
            len: self.len,
        }
    }

    pub fn on_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn statuses(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.is_on(i)).collect()
    }
}

impl fmt::Display for CommitmentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.is_on(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Start-up and shut-down flags per generator for one step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionIndicators {
    pub up: Vec<bool>,
    pub down: Vec<bool>,
}

impl TransitionIndicators {
    pub fn starts(&self) -> usize {
        self.up.iter().filter(|&&u| u).count()
    }

    pub fn stops(&self) -> usize {
        self.down.iter().filter(|&&d| d).count()
    }
}

pub fn transition_indicators(
    current: &CommitmentState,
    previous: &CommitmentState,
) -> Result<TransitionIndicators, DomainError> {
    if current.len() != previous.len() {
        return Err(DomainError::LengthMismatch {
            left: current.len(),
            right: previous.len(),
        });
    }
    let (up, down) = (0..current.len())
        .map(|i| {
            let (now, before) = (current.is_on(i), previous.is_on(i));
            (now && !before, before && !now)
        })
        .unzip();
    Ok(TransitionIndicators { up, down })
}

/// Start-up plus shut-down cost of moving from `previous` to `current`, $.
pub fn transition_cost(
    current: &CommitmentState,
    previous: &CommitmentState,
    specs: &[DieselGenSpec],
) -> f64 {
    specs
        .iter()
        .enumerate()
        .map(|(i, s)| match (previous.is_on(i), current.is_on(i)) {
            (false, true) => s.start_cost,
            (true, false) => s.stop_cost,
            _ => 0.0,
        })
        .sum()
}

/// Whether the commitment can form the microgrid voltage. With the public
/// grid down, at least one generator has to run.
pub fn grid_forming_ok(state: &CommitmentState, grid_on: bool) -> bool {
    grid_on || state.on_count() >= 1
}

/// Monetary diesel cost of one step, $: fuel, O&M (both scaled by the step
/// length) and start/stop events.
pub fn commitment_cost(
    state: &CommitmentState,
    indicators: &TransitionIndicators,
    fuel_per_dg: &[f64],
    specs: &[DieselGenSpec],
    fuel_price: f64,
    dt_hours: f64,
) -> Result<f64, DomainError> {
    let n = specs.len();
    for len in [
        state.len(),
        indicators.up.len(),
        indicators.down.len(),
        fuel_per_dg.len(),
    ] {
        if len != n {
            return Err(DomainError::LengthMismatch {
                left: len,
                right: n,
            });
        }
    }
    Ok(specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let on = if state.is_on(i) { 1.0 } else { 0.0 };
            fuel_price * fuel_per_dg[i] * dt_hours
                + if indicators.up[i] { s.start_cost } else { 0.0 }
                + if indicators.down[i] { s.stop_cost } else { 0.0 }
                + s.om_cost * on * dt_hours
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gen(rated: f64) -> DieselGenSpec {
        DieselGenSpec::new("g", rated)
    }

    #[test]
    fn fuel_curve_values() {
        assert_eq!(fuel_rate(0.0, &gen(200.0), false).unwrap(), 0.0);
        let f = fuel_rate(100.0, &gen(200.0), true).unwrap();
        assert!((f - 41.43).abs() < 1e-12);
        let f = fuel_rate(45.0, &gen(150.0), true).unwrap();
        assert!((f - 23.6925).abs() < 1e-12);
    }

    #[test]
    fn fuel_outside_range_rejected() {
        assert!(fuel_rate(40.0, &gen(150.0), true).is_err());
        assert!(fuel_rate(151.0, &gen(150.0), true).is_err());
        assert!(fuel_rate(5.0, &gen(150.0), false).is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(
            feasible_range(&gen(200.0), false),
            Interval { lo: 0.0, hi: 0.0 }
        );
        let r = feasible_range(&gen(200.0), true);
        assert!((r.lo - 60.0).abs() < 1e-12 && r.hi == 200.0);
        let r = feasible_range(&gen(150.0), true);
        assert!((r.lo - 45.0).abs() < 1e-12 && r.hi == 150.0);
    }

    #[test]
    fn indicators() {
        let on = CommitmentState::from_statuses(&[true]).unwrap();
        let off = CommitmentState::from_statuses(&[false]).unwrap();
        let t = transition_indicators(&on, &off).unwrap();
        assert_eq!((t.up[0], t.down[0]), (true, false));
        let t = transition_indicators(&off, &on).unwrap();
        assert_eq!((t.up[0], t.down[0]), (false, true));
        let t = transition_indicators(&on, &on).unwrap();
        assert_eq!((t.up[0], t.down[0]), (false, false));
        let two = CommitmentState::all_off(2);
        assert!(transition_indicators(&on, &two).is_err());
    }

    #[test]
    fn grid_forming() {
        let off = CommitmentState::all_off(3);
        assert!(grid_forming_ok(&off, true));
        assert!(!grid_forming_ok(&off, false));
        let mid = CommitmentState::from_statuses(&[false, true, false]).unwrap();
        assert!(grid_forming_ok(&mid, false));
    }

    #[test]
    fn commitment_cost_examples() {
        let off = CommitmentState::all_off(1);
        let ind = transition_indicators(&off, &off).unwrap();
        let spec = DieselGenSpec {
            start_cost: 5.0,
            om_cost: 2.0,
            ..gen(200.0)
        };
        let specs = [spec];
        assert_eq!(
            commitment_cost(&off, &ind, &[0.0], &specs, 1.0, 1.0).unwrap(),
            0.0
        );

        let on = off.with(0, true);
        let ind = transition_indicators(&on, &off).unwrap();
        let c = commitment_cost(&on, &ind, &[41.43], &specs, 1.0, 1.0).unwrap();
        assert!((c - 48.43).abs() < 1e-12);
        let c = commitment_cost(&on, &ind, &[41.43], &specs, 1.0, 0.5).unwrap();
        assert!((c - 26.715).abs() < 1e-12);
        assert!(commitment_cost(&on, &ind, &[41.43, 0.0], &specs, 1.0, 1.0).is_err());
    }

    #[test]
    fn state_encoding() {
        let s = CommitmentState::from_statuses(&[true, false, true]).unwrap();
        assert_eq!(s.index(), 0b101);
        assert_eq!(s.to_string(), "101");
        assert_eq!(CommitmentState::from_index(5, 3).unwrap(), s);
        assert!(CommitmentState::from_index(8, 3).is_err());
        let all: Vec<u32> = CommitmentState::enumerate(2).map(|s| s.index()).collect();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn spec_validation() {
        assert!(gen(0.0).validate().is_err());
        let s = DieselGenSpec {
            min_load_frac: 1.2,
            ..gen(100.0)
        };
        assert!(s.validate().is_err());
        assert!(validate_fleet(&vec![gen(10.0); MAX_FLEET + 1]).is_err());
    }

    proptest! {
        #[test]
        fn fuel_is_affine(rated in 1.0f64..1000.0, a in 0.3f64..1.0, b in 0.3f64..1.0) {
            let g = gen(rated);
            let (pa, pb) = (a * rated, b * rated);
            let diff = fuel_rate(pa, &g, true).unwrap() - fuel_rate(pb, &g, true).unwrap();
            prop_assert!((diff - FUEL_SLOPE * (pa - pb)).abs() <= 1e-9 * rated);
        }

        #[test]
        fn telegraph_identity(seq in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 3), 1..20)) {
            let mut prev = CommitmentState::all_off(3);
            let mut starts = [0i32; 3];
            let mut stops = [0i32; 3];
            let mut path: Vec<CommitmentState> = seq
                .iter()
                .map(|s| CommitmentState::from_statuses(s).unwrap())
                .collect();
            path.push(CommitmentState::all_off(3));
            for cur in path {
                let t = transition_indicators(&cur, &prev).unwrap();
                for i in 0..3 {
                    prop_assert!(!(t.up[i] && t.down[i]));
                    let lhs = t.up[i] as i32 - t.down[i] as i32;
                    let rhs = cur.is_on(i) as i32 - prev.is_on(i) as i32;
                    prop_assert_eq!(lhs, rhs);
                    starts[i] += t.up[i] as i32;
                    stops[i] += t.down[i] as i32;
                }
                prev = cur;
            }
            prop_assert_eq!(starts, stops);
        }

        #[test]
        fn grid_forming_monotone(bits in 0u32..8, extra in 0usize..3, grid_on in any::<bool>()) {
            let s = CommitmentState::from_index(bits, 3).unwrap();
            if grid_forming_ok(&s, grid_on) {
                prop_assert!(grid_forming_ok(&s.with(extra, true), grid_on));
            }
        }
    }
}
