use std::fmt;

use thiserror::Error;

/// Which surrogate input left its fitted domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateVariable {
    AxialInflow,
    Rpm,
}

impl fmt::Display for SurrogateVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurrogateVariable::AxialInflow => f.write_str("axial inflow [m/s]"),
            SurrogateVariable::Rpm => f.write_str("rotation speed [RPM]"),
        }
    }
}

/// Reason a force balance or propulsion chain has no admissible solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Infeasibility {
    /// Pitch θ = γ − α is negative; thrust would push the craft backwards.
    NegativePitch { theta: f64 },
    /// Pitch at or beyond vertical.
    PitchBeyondVertical { theta: f64 },
    /// C_D(α) + C_L(α)·tanθ ≤ 0, so no positive airspeed balances drag.
    AeroDenominator { value: f64 },
    /// Zero reference area: a fixed attack angle cannot be trimmed without a wing.
    NoWing,
    /// Required thrust has no root on the increasing branch inside the RPM domain.
    Rpm { thrust: f64, vp: f64 },
    /// The ESC model returned a non-positive current.
    NonPositiveCurrent { current: f64 },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::NegativePitch { theta } => write!(f, "negative pitch {theta}°"),
            Infeasibility::PitchBeyondVertical { theta } => {
                write!(f, "pitch {theta}° at or beyond vertical")
            }
            Infeasibility::AeroDenominator { value } => {
                write!(f, "C_D + C_L·tanθ = {value} is not positive")
            }
            Infeasibility::NoWing => f.write_str("zero reference area"),
            Infeasibility::Rpm { thrust, vp } => write!(
                f,
                "no rotation speed on the increasing branch gives {thrust} N at V_p = {vp} m/s"
            ),
            Infeasibility::NonPositiveCurrent { current } => {
                write!(f, "ESC current {current} A is not positive")
            }
        }
    }
}

/// Errors raised by the physical models, the trim solver and the optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("attack angle {alpha}° outside aero model domain [{min}°, {max}°]")]
    OutOfAeroDomain { alpha: f64, min: f64, max: f64 },

    #[error("{variable} = {value} outside surrogate domain [{min}, {max}]")]
    OutOfSurrogateDomain {
        variable: SurrogateVariable,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("torque {torque} N·m outside ESC model domain [{min}, {max}]")]
    OutOfEscDomain { torque: f64, min: f64, max: f64 },

    #[error("hover-degenerate trim: pitch is zero, so airspeed is zero")]
    HoverDegenerate,

    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),

    #[error("no trim at {airspeed} m/s with mounting angle {gamma}°")]
    NoTrimAtSpeed { gamma: f64, airspeed: f64 },

    #[error("no feasible cell with attack angle at or below {cap}°")]
    EmptyFeasibleSet { cap: f64 },

    #[error("attack angle {alpha}° is not on the sweep grid")]
    AlphaNotOnGrid { alpha: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl ModelError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ModelError::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
