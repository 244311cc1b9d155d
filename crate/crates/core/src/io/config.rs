//! TOML scenario configuration.
//!
//! ```toml
//! schema_version = 1
//!
//! [site]                 # required when [pv] is present
//! latitude = 31.5
//! longitude = 34.45      # default 0
//! tilt = 30.0
//! surface_azimuth = 0.0  # default 0 (south)
//! albedo = 0.2           # default 0.2
//!
//! [pv]                   # optional
//! target_kwp = 700.0     # or series_modules + parallel_modules
//! cells_per_module = 60  # default 60
//! [pv.cell]              # optional, defaults to a generic mono-Si cell
//! voc_stc = 0.64
//! isc_stc = 9.2
//! kv = -0.0021
//! ki = 0.0046
//! rs = 0.005
//! ideality = 1.0         # default 1.0
//! noct = 45.0            # default 45
//!
//! [[fleet]]
//! id = "dg1"             # default dg<N>
//! rated_kva = 500.0
//! power_factor = 1.0     # default 1.0
//! fuel_a = 0.246         # default 0.246 l/kWh
//! fuel_b = 0.08415       # default 0.08415 l/kWh
//! start_cost = 5.0       # default 0
//! stop_cost = 2.0        # default 0
//! om_cost = 5.0          # $/h, default 0
//! min_load_frac = 0.3    # default 0.3
//!
//! [grid]
//! on_hours = 8.0
//! period_hours = 12.0
//! phase_offset_hours = 0.0  # default 0
//! max_exchange_kw = 600.0
//!
//! [costs]
//! grid_price = 0.15      # $/kWh
//! export_price = 0.05    # $/kWh
//! fuel_price = 1.2       # $/l
//!
//! [weights]              # optional
//! w1 = 0.5
//! w2 = 0.5
//!
//! [run]                  # optional
//! name = "scenario"
//! mode = "dp"            # or "greedy"
//! initial_state = [false]
//! ```

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::diesel::{CommitmentState, DieselGenSpec, FUEL_NO_LOAD, FUEL_SLOPE, MIN_LOAD_FRAC};
use crate::dispatch::CostParams;
use crate::grid::GridSchedule;
use crate::scenario::{BaseCase, GeneratorTemplate, OptimizerMode, ScenarioConfig, PV_TARGET_KWP};
use crate::solar::{size_array, PvArraySpec, PvCellSpec, PvSystem, SiteGeometry};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("invalid config: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: Option<u32>,
    site: Option<RawSite>,
    pv: Option<RawPv>,
    fleet: Option<Vec<RawGenerator>>,
    grid: Option<RawGrid>,
    costs: Option<RawCosts>,
    weights: Option<RawWeights>,
    run: Option<RawRun>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSite {
    latitude: Option<f64>,
    longitude: Option<f64>,
    tilt: Option<f64>,
    surface_azimuth: Option<f64>,
    albedo: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPv {
    target_kwp: Option<f64>,
    series_modules: Option<u32>,
    parallel_modules: Option<u32>,
    cells_per_module: Option<u32>,
    cell: Option<RawCell>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    voc_stc: Option<f64>,
    isc_stc: Option<f64>,
    kv: Option<f64>,
    ki: Option<f64>,
    rs: Option<f64>,
    ideality: Option<f64>,
    noct: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    id: Option<String>,
    rated_kva: Option<f64>,
    power_factor: Option<f64>,
    fuel_a: Option<f64>,
    fuel_b: Option<f64>,
    start_cost: Option<f64>,
    stop_cost: Option<f64>,
    om_cost: Option<f64>,
    min_load_frac: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    on_hours: Option<f64>,
    period_hours: Option<f64>,
    phase_offset_hours: Option<f64>,
    max_exchange_kw: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCosts {
    grid_price: Option<f64>,
    export_price: Option<f64>,
    fuel_price: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    w1: Option<f64>,
    w2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    name: Option<String>,
    mode: Option<String>,
    initial_state: Option<Vec<bool>>,
}

/// Result of parsing: the scenario, the base case derived from it for
/// three-case comparisons, and the defaults that were filled in.
#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub scenario: ScenarioConfig,
    pub base: BaseCase,
    pub defaults_applied: Vec<String>,
}

/// Collects missing keys and applied defaults in a single pass.
struct Resolver {
    missing: Vec<String>,
    invalid: Vec<String>,
    defaults: Vec<String>,
}

impl Resolver {
    fn required<T: Copy + Default>(&mut self, v: Option<T>, key: &str) -> T {
        v.unwrap_or_else(|| {
            self.missing.push(key.to_string());
            T::default()
        })
    }

    fn default<T: Copy + std::fmt::Debug>(&mut self, v: Option<T>, key: &str, default: T) -> T {
        v.unwrap_or_else(|| {
            self.defaults.push(format!("{key} = {default:?}"));
            default
        })
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(parse_config(&text)?.scenario)
}

pub fn parse_config(text: &str) -> Result<ParsedConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let mut r = Resolver {
        missing: Vec::new(),
        invalid: Vec::new(),
        defaults: Vec::new(),
    };

    match raw.schema_version {
        None => r.missing.push("schema_version".to_string()),
        Some(SCHEMA_VERSION) => {}
        Some(v) => r.invalid.push(format!(
            "schema_version {v} unsupported (expected {SCHEMA_VERSION})"
        )),
    }

    // site
    let site_geometry = match (&raw.site, &raw.pv) {
        (Some(site), _) => {
            let lat = r.required(site.latitude, "site.latitude");
            let lon = r.default(site.longitude, "site.longitude", 0.0);
            let tilt = r.required(site.tilt, "site.tilt");
            let az = r.default(site.surface_azimuth, "site.surface_azimuth", 0.0);
            let albedo = r.default(site.albedo, "site.albedo", 0.2);
            match SiteGeometry::from_degrees(lat, lon, tilt, az, albedo) {
                Ok(g) => Some(g),
                Err(e) => {
                    r.invalid.push(format!("site: {e}"));
                    None
                }
            }
        }
        (None, Some(_)) => {
            r.missing.push("site".to_string());
            None
        }
        (None, None) => None,
    };

    // pv
    let mut cell_for_base = PvCellSpec::default();
    let mut cells_per_module_base = 60;
    let mut pv_kwp_base = PV_TARGET_KWP;
    let pv = raw.pv.as_ref().and_then(|pv| {
        let cell = match &pv.cell {
            Some(c) => PvCellSpec {
                voc_stc: r.required(c.voc_stc, "pv.cell.voc_stc"),
                isc_stc: r.required(c.isc_stc, "pv.cell.isc_stc"),
                kv: r.required(c.kv, "pv.cell.kv"),
                ki: r.required(c.ki, "pv.cell.ki"),
                rs: r.required(c.rs, "pv.cell.rs"),
                ideality: r.default(c.ideality, "pv.cell.ideality", 1.0),
                noct: r.default(c.noct, "pv.cell.noct", 45.0),
            },
            None => {
                r.defaults
                    .push("pv.cell = generic mono-Si cell".to_string());
                PvCellSpec::default()
            }
        };
        if let Err(e) = cell.validate() {
            r.invalid.push(format!("pv.cell: {e}"));
        }
        let cells = r.default(pv.cells_per_module, "pv.cells_per_module", 60);
        cell_for_base = cell;
        cells_per_module_base = cells;
        let array = match (pv.target_kwp, pv.series_modules, pv.parallel_modules) {
            (Some(kwp), None, None) => {
                pv_kwp_base = kwp;
                size_array(kwp, &cell, cells)
                    .map_err(|e| r.invalid.push(format!("pv.target_kwp: {e}")))
                    .ok()
            }
            (None, Some(s), Some(p)) => {
                let a = PvArraySpec {
                    series_modules: s,
                    parallel_modules: p,
                    cells_per_module: cells,
                };
                a.validate()
                    .map_err(|e| r.invalid.push(format!("pv: {e}")))
                    .ok()
                    .map(|_| a)
            }
            (None, None, None) => {
                r.missing
                    .push("pv.target_kwp (or pv.series_modules + pv.parallel_modules)".to_string());
                None
            }
            _ => {
                r.invalid.push(
                    "pv: give either target_kwp or series_modules + parallel_modules".to_string(),
                );
                None
            }
        };
        Some((array?, cell))
    });

    // fleet
    let mut fleet = Vec::new();
    let mut template = GeneratorTemplate::default();
    match &raw.fleet {
        None => r.missing.push("fleet".to_string()),
        Some(list) if list.is_empty() => r.invalid.push("fleet must not be empty".to_string()),
        Some(list) => {
            for (i, g) in list.iter().enumerate() {
                let key = |k: &str| format!("fleet[{i}].{k}");
                let kva = r.required(g.rated_kva, &key("rated_kva"));
                let pf = r.default(g.power_factor, &key("power_factor"), 1.0);
                let id = g.id.clone().unwrap_or_else(|| {
                    r.defaults.push(format!("{} = \"dg{}\"", key("id"), i + 1));
                    format!("dg{}", i + 1)
                });
                let spec = DieselGenSpec {
                    id,
                    rated_kw: kva * pf,
                    fuel_a: r.default(g.fuel_a, &key("fuel_a"), FUEL_SLOPE),
                    fuel_b: r.default(g.fuel_b, &key("fuel_b"), FUEL_NO_LOAD),
                    start_cost: r.default(g.start_cost, &key("start_cost"), 0.0),
                    stop_cost: r.default(g.stop_cost, &key("stop_cost"), 0.0),
                    om_cost: r.default(g.om_cost, &key("om_cost"), 0.0),
                    min_load_frac: r.default(g.min_load_frac, &key("min_load_frac"), MIN_LOAD_FRAC),
                };
                if !(pf > 0.0 && pf <= 1.0) {
                    r.invalid.push(format!(
                        "{}: must be in (0, 1], got {pf}",
                        key("power_factor")
                    ));
                } else if g.rated_kva.is_some() {
                    if let Err(e) = spec.validate() {
                        r.invalid.push(format!("fleet[{i}]: {e}"));
                    } else if i == 0 {
                        template = GeneratorTemplate::from_spec(&spec, pf);
                    }
                }
                fleet.push(spec);
            }
        }
    }

    // grid
    let grid = match &raw.grid {
        None => {
            r.missing.push("grid".to_string());
            None
        }
        Some(g) => {
            let s = GridSchedule {
                on_hours: r.required(g.on_hours, "grid.on_hours"),
                period_hours: r.required(g.period_hours, "grid.period_hours"),
                phase_offset_hours: r.default(g.phase_offset_hours, "grid.phase_offset_hours", 0.0),
                max_exchange_kw: r.required(g.max_exchange_kw, "grid.max_exchange_kw"),
            };
            if g.on_hours.is_some() && g.period_hours.is_some() && g.max_exchange_kw.is_some() {
                if let Err(e) = s.validate() {
                    r.invalid.push(format!("grid: {e}"));
                }
            }
            Some(s)
        }
    };

    // costs and weights
    let (w1, w2) = match &raw.weights {
        Some(w) => (
            r.default(w.w1, "weights.w1", 0.5),
            r.default(w.w2, "weights.w2", 0.5),
        ),
        None => (
            r.default(None, "weights.w1", 0.5),
            r.default(None, "weights.w2", 0.5),
        ),
    };
    let costs = match &raw.costs {
        None => {
            r.missing.push("costs".to_string());
            None
        }
        Some(c) => {
            let p = CostParams {
                grid_price: r.required(c.grid_price, "costs.grid_price"),
                export_price: r.required(c.export_price, "costs.export_price"),
                fuel_price: r.required(c.fuel_price, "costs.fuel_price"),
                w1,
                w2,
            };
            if let Err(e) = p.validate() {
                r.invalid.push(format!("costs: {e}"));
            }
            Some(p)
        }
    };

    // run
    let run = raw.run.as_ref();
    let name = run.and_then(|x| x.name.clone()).unwrap_or_else(|| {
        r.defaults.push("run.name = \"scenario\"".to_string());
        "scenario".to_string()
    });
    let mode = match run.and_then(|x| x.mode.as_deref()) {
        Some(m) => m.parse::<OptimizerMode>().unwrap_or_else(|e| {
            r.invalid.push(format!("run.mode: {e}"));
            OptimizerMode::Dp
        }),
        None => {
            r.defaults.push("run.mode = \"dp\"".to_string());
            OptimizerMode::Dp
        }
    };
    let initial_state = match run.and_then(|x| x.initial_state.as_ref()) {
        Some(v) if v.len() == fleet.len() => CommitmentState::from_statuses(v)
            .map_err(|e| r.invalid.push(format!("run.initial_state: {e}")))
            .unwrap_or_else(|_| CommitmentState::all_off(0)),
        Some(v) => {
            r.invalid.push(format!(
                "run.initial_state has {} entries for a fleet of {}",
                v.len(),
                fleet.len()
            ));
            CommitmentState::all_off(0)
        }
        None => {
            r.defaults.push("run.initial_state = all off".to_string());
            if fleet.len() <= crate::diesel::MAX_FLEET {
                CommitmentState::all_off(fleet.len())
            } else {
                r.invalid.push(format!(
                    "fleet of {} exceeds the supported maximum",
                    fleet.len()
                ));
                CommitmentState::all_off(0)
            }
        }
    };

    if !r.missing.is_empty() {
        return Err(ConfigError::Missing(r.missing));
    }
    if !r.invalid.is_empty() {
        return Err(ConfigError::Invalid(r.invalid));
    }
    let grid = grid.expect("grid checked");
    let costs = costs.expect("costs checked");
    let pv = match (pv, site_geometry) {
        (Some((array, cell)), Some(geometry)) => Some(PvSystem {
            array,
            cell,
            geometry,
        }),
        _ => None,
    };

    for d in &r.defaults {
        log::info!("config default applied: {d}");
    }

    let scenario = ScenarioConfig {
        name,
        fleet,
        pv,
        grid,
        costs,
        mode,
        initial_state,
    };
    scenario
        .validate()
        .map_err(|e| ConfigError::Invalid(vec![e.to_string()]))?;

    let defaults = BaseCase::default();
    let base = BaseCase {
        geometry: site_geometry.unwrap_or(defaults.geometry),
        cell: cell_for_base,
        cells_per_module: cells_per_module_base,
        pv_kwp: pv_kwp_base,
        grid,
        costs,
        mode,
        generator: template,
    };
    Ok(ParsedConfig {
        scenario,
        base,
        defaults_applied: r.defaults,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MINIMAL: &str = r#"
schema_version = 1

[[fleet]]
rated_kva = 500.0

[grid]
on_hours = 8.0
period_hours = 12.0
max_exchange_kw = 600.0

[costs]
grid_price = 0.15
export_price = 0.05
fuel_price = 1.2
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let p = parse_config(MINIMAL).unwrap();
        let g = &p.scenario.fleet[0];
        assert_eq!(g.rated_kw, 500.0);
        assert_eq!(g.min_load_frac, 0.3);
        assert_eq!(g.fuel_a, 0.246);
        assert_eq!(p.scenario.costs.w1, 0.5);
        assert_eq!(p.scenario.costs.w2, 0.5);
        assert!(p.scenario.pv.is_none());
        assert_eq!(p.scenario.mode, OptimizerMode::Dp);
        for key in [
            "fleet[0].min_load_frac",
            "fleet[0].power_factor",
            "weights.w1",
        ] {
            assert!(
                p.defaults_applied.iter().any(|d| d.starts_with(key)),
                "{key}"
            );
        }
    }

    #[test]
    fn full_config() {
        let text = format!(
            r#"{MINIMAL}
[site]
latitude = 31.5
longitude = 34.45
tilt = 30

[pv]
target_kwp = 700.0

[pv.cell]
voc_stc = 0.64
isc_stc = 9.2
kv = -0.0021
ki = 0.0046
rs = 0.005
noct = 47

[weights]
w1 = 1.0
w2 = 0.2

[run]
name = "study"
mode = "greedy"
initial_state = [true]
"#
        );
        let p = parse_config(&text).unwrap();
        let pv = p.scenario.pv.unwrap();
        assert!((pv.rated_kwp() - 700.0).abs() < 7.0);
        assert_eq!(pv.cell.noct, 47.0);
        assert_eq!(p.scenario.mode, OptimizerMode::Greedy);
        assert!(p.scenario.initial_state.is_on(0));
        assert_eq!(p.scenario.name, "study");
        assert_eq!(p.base.cell.noct, 47.0);
    }

    #[test]
    fn zero_rating_rejected() {
        let text = MINIMAL.replace("rated_kva = 500.0", "rated_kva = 0.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("rated_kw"), "{err}");
    }

    #[test]
    fn on_hours_beyond_period_rejected() {
        let text = MINIMAL.replace("on_hours = 8.0", "on_hours = 13.0");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("on_hours"), "{err}");
    }

    #[test]
    fn unknown_key_is_an_error() {
        let text = MINIMAL.replace("rated_kva = 500.0", "rated_kva = 500.0\nrated_kvaa = 1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(err.to_string().contains("rated_kvaa"), "{err}");
    }

    #[test]
    fn missing_keys_reported_together() {
        let text = "schema_version = 1\n[[fleet]]\nid = \"a\"\n[grid]\non_hours = 1.0\n";
        match parse_config(text).unwrap_err() {
            ConfigError::Missing(keys) => {
                for k in [
                    "fleet[0].rated_kva",
                    "grid.period_hours",
                    "grid.max_exchange_kw",
                    "costs",
                ] {
                    assert!(keys.iter().any(|m| m == k), "{k} not in {keys:?}");
                }
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn pv_without_site() {
        let text = format!("{MINIMAL}\n[pv]\ntarget_kwp = 10.0\n");
        match parse_config(&text).unwrap_err() {
            ConfigError::Missing(keys) => assert!(keys.contains(&"site".to_string())),
            other => panic!("unexpected {other}"),
        }
    }

    proptest! {
        #[test]
        fn never_panics_on_garbage(s in "\\PC{0,200}") {
            let _ = parse_config(&s);
        }

        #[test]
        fn never_panics_on_mutations(pos in 0usize..400, junk in "[a-z0-9=\\[\\]\\. \n\"-]{0,12}") {
            let mut text = MINIMAL.to_string();
            let at = pos.min(text.len());
            let at = (0..=at).rev().find(|&i| text.is_char_boundary(i)).unwrap_or(0);
            text.insert_str(at, &junk);
            let _ = parse_config(&text);
        }
    }
}
