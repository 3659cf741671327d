//! Trim, range prediction and wing mounting-angle optimization for
//! multirotors carrying a fixed lifting wing.
//!
//! The pipeline is `(γ, α)` → pitch and airspeed ([`trim`]) → per-rotor
//! thrust → RPM → torque → ESC current ([`propulsion`]) → endurance and
//! range. [`optimizer`] sweeps the `(γ, α)` grid, [`fitting`] rebuilds the
//! surrogate models from sample tables.

pub mod aero;
pub mod cli;
pub mod config;
pub mod error;
pub mod fitting;
pub mod interval;
pub mod optimizer;
pub mod propulsion;
mod roots;
pub mod trim;

pub use aero::{aero_force, AeroForce, Airframe, Environment, LinearAeroModel};
pub use config::{ConfigError, Flags, RunConfig};
pub use error::{Infeasibility, ModelError, Result, SurrogateVariable};
pub use interval::Interval;
pub use optimizer::{
    apply_alpha_cap, curve_extract, curve_peak, sweep, CellStatus, EndpointConvention, Execution,
    SweepCell, SweepGrid, SweepResult, SweepSummary,
};
pub use propulsion::{
    axial_inflow, esc_current, required_rpm, thrust, torque, EscCurrentModel, OutputUnit,
    PolySurrogate, Term,
};
pub use trim::{pitch_from_mounting, trim_airspeed, Battery, ModelBundle, Regime, TrimPoint};
