//! Model and optimal dispatch of a grid-connected, battery-less PV-diesel
//! microgrid whose public grid suffers scheduled blackouts.
//!
//! The crate is split along the physical subsystems:
//!
//! - [`solar`]: tilted-plane irradiance and PV array available power
//! - [`diesel`]: fuel curve, commitment transitions, minimum loading
//! - [`grid`]: periodic blackout schedule and exchange feasibility
//! - [`dispatch`]: per-step and horizon optimisation of the weighted objective
//! - [`scenario`]: case construction, yearly runs, energy/cost tables
//! - [`io`]: CSV ingestion, configuration, result files and SVG plots
//! - [`synth`]: seeded synthetic weather and load years

pub mod diesel;
pub mod dispatch;
pub mod error;
pub mod grid;
pub mod io;
pub mod scenario;
pub mod solar;
pub mod synth;

pub use error::DomainError;
