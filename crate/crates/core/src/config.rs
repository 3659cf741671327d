//! JSON run configuration: every model parameter plus grid and behavior flags.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aero::{Airframe, Environment, LinearAeroModel};
use crate::error::ModelError;
use crate::optimizer::{EndpointConvention, SweepGrid};
use crate::propulsion::{EscCurrentModel, OutputUnit, PolySurrogate};
use crate::trim::{Battery, ModelBundle};

/// Shipped defaults. The torque surrogate is a refit of `data/apc_reference_10x4.5.dat`.
pub const DEFAULT_CONFIG_JSON: &str = include_str!("../data/default_config.json");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Multiply rotor thrust by cos(rotor tilt).
    pub apply_tilt_loss: bool,
    /// Grid used when `grid` is absent.
    pub endpoint_convention: EndpointConvention,
    /// Equivalent flat-plate drag area of the wingless airframe, for `compare`.
    pub parasite_drag_area_m2: f64,
    pub compare_mounting_angle_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub airframe: Airframe,
    pub environment: Environment,
    pub aero: LinearAeroModel,
    pub thrust_surrogate: PolySurrogate,
    pub torque_surrogate: PolySurrogate,
    pub esc: EscCurrentModel,
    pub battery: Battery,
    /// Explicit sweep grid; overrides `flags.endpoint_convention`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<SweepGrid>,
    pub flags: Flags,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_json(DEFAULT_CONFIG_JSON).expect("shipped default config is valid")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.bundle().validate()?;
        if self.thrust_surrogate.output_unit() != OutputUnit::Newton {
            return Err(ModelError::invalid("thrust surrogate must output N"));
        }
        if self.torque_surrogate.output_unit() != OutputUnit::NewtonMetre {
            return Err(ModelError::invalid("torque surrogate must output N*m"));
        }
        let f = self.flags.parasite_drag_area_m2;
        if !(f >= 0.0 && f.is_finite()) {
            return Err(ModelError::invalid(format!("parasite drag area {f} must be >= 0")));
        }
        if !self.flags.compare_mounting_angle_deg.is_finite() {
            return Err(ModelError::invalid("compare mounting angle must be finite"));
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        Ok(())
    }

    pub fn bundle(&self) -> ModelBundle {
        ModelBundle {
            airframe: self.airframe,
            environment: self.environment,
            aero: self.aero,
            thrust: self.thrust_surrogate.clone(),
            torque: self.torque_surrogate.clone(),
            esc: self.esc,
            battery: self.battery,
            apply_tilt_loss: self.flags.apply_tilt_loss,
        }
    }

    pub fn effective_grid(&self) -> SweepGrid {
        self.grid
            .unwrap_or_else(|| SweepGrid::standard(self.flags.endpoint_convention))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_published_models() {
        let c = RunConfig::default();
        assert_eq!(c.aero, LinearAeroModel::skywalker_x5());
        assert_eq!(c.thrust_surrogate.terms(), PolySurrogate::published_thrust().terms());
        assert_eq!(c.esc, EscCurrentModel::published());
        assert_eq!(c.airframe, Airframe::default());
        assert_eq!(c.environment, Environment::default());
        assert_eq!(c.battery, Battery::default());
        assert_eq!(c.effective_grid().cell_count().unwrap(), 900);
        assert!(!c.flags.apply_tilt_loss);
        assert_eq!(c.flags.parasite_drag_area_m2, 0.02);
    }

    #[test]
    fn round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_CONFIG_JSON).unwrap();
        v["airframe"]["wingspan_m"] = 1.0.into();
        assert!(matches!(RunConfig::from_json(&v.to_string()), Err(ConfigError::Json(_))));
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_CONFIG_JSON).unwrap();
        v["extra"] = true.into();
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_CONFIG_JSON).unwrap();
        v["airframe"]["mass_kg"] = (-1.0).into();
        assert!(matches!(RunConfig::from_json(&v.to_string()), Err(ConfigError::Model(_))));
        let mut v: serde_json::Value = serde_json::from_str(DEFAULT_CONFIG_JSON).unwrap();
        v["torque_surrogate"]["output_unit"] = "N".into();
        assert!(RunConfig::from_json(&v.to_string()).is_err());
    }
}
