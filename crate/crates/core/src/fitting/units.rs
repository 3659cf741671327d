use std::fmt;
use std::str::FromStr;

use crate::fitting::FitError;

const MPH_TO_M_S: f64 = 0.44704;
const LBF_TO_N: f64 = 4.448_221_615_260_5;
const IN_LBF_TO_N_M: f64 = 0.112_984_829_027_616_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Angle,
    Dimensionless,
    Speed,
    RotationSpeed,
    Force,
    Torque,
    Current,
}

/// Units accepted in sample tables. Values are stored in the SI unit of their quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Degree,
    Dimensionless,
    MetrePerSecond,
    MilePerHour,
    Rpm,
    Newton,
    PoundForce,
    NewtonMetre,
    InchPoundForce,
    Ampere,
}

impl Unit {
    pub fn quantity(self) -> Quantity {
        match self {
            Unit::Degree => Quantity::Angle,
            Unit::Dimensionless => Quantity::Dimensionless,
            Unit::MetrePerSecond | Unit::MilePerHour => Quantity::Speed,
            Unit::Rpm => Quantity::RotationSpeed,
            Unit::Newton | Unit::PoundForce => Quantity::Force,
            Unit::NewtonMetre | Unit::InchPoundForce => Quantity::Torque,
            Unit::Ampere => Quantity::Current,
        }
    }

    /// Unit values are stored in after conversion.
    pub fn si(self) -> Unit {
        match self {
            Unit::MilePerHour => Unit::MetrePerSecond,
            Unit::PoundForce => Unit::Newton,
            Unit::InchPoundForce => Unit::NewtonMetre,
            u => u,
        }
    }

    fn factor(self) -> f64 {
        match self {
            Unit::MilePerHour => MPH_TO_M_S,
            Unit::PoundForce => LBF_TO_N,
            Unit::InchPoundForce => IN_LBF_TO_N_M,
            _ => 1.0,
        }
    }

    pub fn to_si(self, value: f64) -> f64 {
        value * self.factor()
    }

    pub fn from_si(self, value: f64) -> f64 {
        value / self.factor()
    }
}

impl FromStr for Unit {
    type Err = FitError;

    fn from_str(s: &str) -> Result<Self, FitError> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let u = match t.to_ascii_lowercase().as_str() {
            "deg" | "degree" | "degrees" | "°" => Unit::Degree,
            "-" | "1" => Unit::Dimensionless,
            "m/s" => Unit::MetrePerSecond,
            "mph" => Unit::MilePerHour,
            "rpm" => Unit::Rpm,
            "n" => Unit::Newton,
            "lbf" => Unit::PoundForce,
            "n*m" | "n·m" | "nm" | "n.m" | "n-m" => Unit::NewtonMetre,
            "in-lbf" | "in·lbf" | "in*lbf" | "inlbf" => Unit::InchPoundForce,
            "a" => Unit::Ampere,
            _ => return Err(FitError::UnknownUnit(s.to_string())),
        };
        Ok(u)
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::Degree => "deg",
            Unit::Dimensionless => "-",
            Unit::MetrePerSecond => "m/s",
            Unit::MilePerHour => "mph",
            Unit::Rpm => "RPM",
            Unit::Newton => "N",
            Unit::PoundForce => "lbf",
            Unit::NewtonMetre => "N*m",
            Unit::InchPoundForce => "in-lbf",
            Unit::Ampere => "A",
        })
    }
}
