//! Linear wing aerodynamics and the airframe/atmosphere records it needs.
//!
//! All angles are degrees. The coefficient slopes are per degree, so angles
//! are never converted before they reach the linear model; only the trim
//! solver converts to radians for trigonometry.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Lift and drag coefficients affine in attack angle, valid on `[alpha_min, alpha_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearAeroModel {
    #[serde(rename = "lift_slope_per_deg")]
    pub lift_slope: f64,
    pub lift_intercept: f64,
    #[serde(rename = "drag_slope_per_deg")]
    pub drag_slope: f64,
    pub drag_intercept: f64,
    #[serde(rename = "alpha_min_deg")]
    pub alpha_min: f64,
    #[serde(rename = "alpha_max_deg")]
    pub alpha_max: f64,
}

impl LinearAeroModel {
    pub fn new(
        lift_slope: f64,
        lift_intercept: f64,
        drag_slope: f64,
        drag_intercept: f64,
        alpha_min: f64,
        alpha_max: f64,
    ) -> Result<Self> {
        let model = Self {
            lift_slope,
            lift_intercept,
            drag_slope,
            drag_intercept,
            alpha_min,
            alpha_max,
        };
        model.validate()?;
        Ok(model)
    }

    /// Wind-tunnel fit for the Skywalker X5 planform: C_L = 0.08α − 0.24,
    /// C_D = 0.01587α + 0.14 on −8° ≤ α ≤ 18°.
    pub fn skywalker_x5() -> Self {
        Self {
            lift_slope: 0.08,
            lift_intercept: -0.24,
            drag_slope: 0.01587,
            drag_intercept: 0.14,
            alpha_min: -8.0,
            alpha_max: 18.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.lift_slope,
            self.lift_intercept,
            self.drag_slope,
            self.drag_intercept,
            self.alpha_min,
            self.alpha_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(ModelError::invalid("aero model has non-finite parameters"));
        }
        if self.alpha_min >= self.alpha_max {
            return Err(ModelError::invalid(format!(
                "aero domain [{}, {}] is empty",
                self.alpha_min, self.alpha_max
            )));
        }
        // C_D is affine, so positivity at both ends covers the whole domain.
        for alpha in [self.alpha_min, self.alpha_max] {
            let cd = self.drag_slope * alpha + self.drag_intercept;
            if cd <= 0.0 {
                return Err(ModelError::invalid(format!(
                    "drag coefficient {cd} at {alpha}° is not positive"
                )));
            }
        }
        Ok(())
    }

    pub fn check_domain(&self, alpha: f64) -> Result<()> {
        if alpha >= self.alpha_min && alpha <= self.alpha_max {
            Ok(())
        } else {
            Err(ModelError::OutOfAeroDomain {
                alpha,
                min: self.alpha_min,
                max: self.alpha_max,
            })
        }
    }

    pub fn lift_coefficient(&self, alpha: f64) -> Result<f64> {
        self.check_domain(alpha)?;
        Ok(self.lift_slope * alpha + self.lift_intercept)
    }

    pub fn drag_coefficient(&self, alpha: f64) -> Result<f64> {
        self.check_domain(alpha)?;
        Ok(self.drag_slope * alpha + self.drag_intercept)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Airframe {
    #[serde(rename = "mass_kg")]
    pub mass: f64,
    #[serde(rename = "reference_area_m2")]
    pub reference_area: f64,
    pub rotor_count: u32,
    #[serde(rename = "prop_diameter_m")]
    pub prop_diameter: f64,
    /// Fixed arm tilt. Carried as metadata; only used when tilt loss is enabled.
    #[serde(rename = "rotor_tilt_deg")]
    pub rotor_tilt: f64,
    #[serde(rename = "stall_alpha_deg")]
    pub stall_alpha: f64,
    #[serde(rename = "safety_margin_deg")]
    pub safety_margin: f64,
}

impl Default for Airframe {
    /// 2 kg, 850 mm quad with a reshaped X5 wing.
    fn default() -> Self {
        Self {
            mass: 2.0,
            reference_area: 0.30,
            rotor_count: 4,
            prop_diameter: 0.254,
            rotor_tilt: 10.0,
            stall_alpha: 18.0,
            safety_margin: 8.0,
        }
    }
}

impl Airframe {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(ModelError::invalid(format!("mass {} must be > 0", self.mass)));
        }
        if !(self.reference_area >= 0.0 && self.reference_area.is_finite()) {
            return Err(ModelError::invalid(format!(
                "reference area {} must be >= 0",
                self.reference_area
            )));
        }
        if self.rotor_count < 1 {
            return Err(ModelError::invalid("rotor count must be >= 1"));
        }
        if !(self.prop_diameter > 0.0 && self.prop_diameter.is_finite()) {
            return Err(ModelError::invalid(format!(
                "propeller diameter {} must be > 0",
                self.prop_diameter
            )));
        }
        if !self.rotor_tilt.is_finite() {
            return Err(ModelError::invalid("rotor tilt must be finite"));
        }
        if !(self.safety_margin >= 0.0 && self.safety_margin < self.stall_alpha) {
            return Err(ModelError::invalid(format!(
                "safety margin {} must lie in [0, stall {})",
                self.safety_margin, self.stall_alpha
            )));
        }
        Ok(())
    }

    /// Largest attack angle the optimizer may select.
    pub fn alpha_cap(&self) -> f64 {
        self.stall_alpha - self.safety_margin
    }

    pub fn rotors(&self) -> f64 {
        f64::from(self.rotor_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    #[serde(rename = "air_density_kg_m3")]
    pub air_density: f64,
    #[serde(rename = "gravity_m_s2")]
    pub gravity: f64,
}

impl Default for Environment {
    /// ISA sea level.
    fn default() -> Self {
        Self {
            air_density: 1.225,
            gravity: 9.81,
        }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<()> {
        if !(self.air_density > 0.0 && self.air_density.is_finite()) {
            return Err(ModelError::invalid("air density must be > 0"));
        }
        if !(self.gravity > 0.0 && self.gravity.is_finite()) {
            return Err(ModelError::invalid("gravity must be > 0"));
        }
        Ok(())
    }

    pub fn dynamic_pressure(&self, airspeed: f64) -> f64 {
        0.5 * self.air_density * airspeed * airspeed
    }

    pub fn weight(&self, airframe: &Airframe) -> f64 {
        airframe.mass * self.gravity
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroForce {
    pub lift: f64,
    pub drag: f64,
}

/// Wing lift and drag: ½ρV²S·C_{L,D}(α).
pub fn aero_force(
    env: &Environment,
    airframe: &Airframe,
    model: &LinearAeroModel,
    airspeed: f64,
    alpha: f64,
) -> Result<AeroForce> {
    if !(airspeed >= 0.0) {
        return Err(ModelError::invalid(format!("airspeed {airspeed} must be >= 0")));
    }
    let cl = model.lift_coefficient(alpha)?;
    let cd = model.drag_coefficient(alpha)?;
    let qs = env.dynamic_pressure(airspeed) * airframe.reference_area;
    Ok(AeroForce {
        lift: qs * cl,
        drag: qs * cd,
    })
}
