//! Steady forward-flight trim of a lifting-wing multirotor in the vertical plane.
//!
//! Pitch, mounting angle and attack angle are tied by `θ = γ − α`. The two
//! force balances
//!
//! ```text
//! n·T·cosθ + ½ρV²S·C_L(α) = m·g
//! n·T·sinθ − ½ρV²S·C_D(α) = 0
//! ```
//!
//! fix the airspeed in closed form once `(γ, α)` is chosen; the propulsion
//! chain then maps per-rotor thrust to RPM, torque, ESC current, endurance
//! and range. The pitching-moment balance is not a constraint here.

use serde::{Deserialize, Serialize};

use crate::aero::{aero_force, Airframe, Environment, LinearAeroModel};
use crate::error::{Infeasibility, ModelError, Result};
use crate::propulsion::{axial_inflow, EscCurrentModel, PolySurrogate};

/// Segments used to look for the first sign change in `trim_at_speed`.
const PITCH_SCAN_SEGMENTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battery {
    /// Usable charge in ampere-seconds.
    #[serde(rename = "capacity_As")]
    pub capacity: f64,
}

impl Battery {
    pub fn new(capacity: f64) -> Result<Self> {
        let b = Self { capacity };
        b.validate()?;
        Ok(b)
    }

    pub fn from_mah(mah: f64) -> Result<Self> {
        Self::new(mah * 3.6)
    }

    pub fn validate(&self) -> Result<()> {
        if self.capacity > 0.0 && self.capacity.is_finite() {
            Ok(())
        } else {
            Err(ModelError::invalid(format!(
                "battery capacity {} must be > 0",
                self.capacity
            )))
        }
    }
}

impl Default for Battery {
    /// 5000 mAh.
    fn default() -> Self {
        Self { capacity: 18000.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Zero pitch, zero airspeed: rotors carry the full weight.
    Hover,
    Cruise,
}

/// A complete equilibrium: attitude, airspeed, propulsion state, endurance and range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrimPoint {
    #[serde(rename = "gamma_deg")]
    pub gamma: f64,
    #[serde(rename = "alpha_deg")]
    pub alpha: f64,
    #[serde(rename = "theta_deg")]
    pub theta: f64,
    #[serde(rename = "airspeed_m_s")]
    pub airspeed: f64,
    #[serde(rename = "thrust_per_rotor_N")]
    pub thrust_per_rotor: f64,
    pub rpm: f64,
    #[serde(rename = "torque_per_rotor_Nm")]
    pub torque_per_rotor: f64,
    #[serde(rename = "current_per_esc_A")]
    pub current_per_esc: f64,
    #[serde(rename = "total_current_A")]
    pub total_current: f64,
    #[serde(rename = "endurance_s")]
    pub endurance: f64,
    #[serde(rename = "range_m")]
    pub range: f64,
    pub regime: Regime,
}

pub fn pitch_from_mounting(gamma: f64, alpha: f64) -> f64 {
    gamma - alpha
}

/// Airspeed balancing both force equations at `(γ, α)`.
///
/// Eliminating thrust gives `V² = m·g·tanθ / (½ρS·(C_D + C_L·tanθ))`.
pub fn trim_airspeed(
    airframe: &Airframe,
    env: &Environment,
    aero: &LinearAeroModel,
    gamma: f64,
    alpha: f64,
) -> Result<f64> {
    let cl = aero.lift_coefficient(alpha)?;
    let cd = aero.drag_coefficient(alpha)?;
    let theta = pitch_from_mounting(gamma, alpha);
    if theta == 0.0 {
        return Err(ModelError::HoverDegenerate);
    }
    if theta < 0.0 {
        return Err(ModelError::Infeasible(Infeasibility::NegativePitch { theta }));
    }
    if theta >= 90.0 {
        return Err(ModelError::Infeasible(Infeasibility::PitchBeyondVertical { theta }));
    }
    if airframe.reference_area == 0.0 {
        return Err(ModelError::Infeasible(Infeasibility::NoWing));
    }
    let tan = theta.to_radians().tan();
    let denom = cd + cl * tan;
    if denom <= 0.0 {
        return Err(ModelError::Infeasible(Infeasibility::AeroDenominator { value: denom }));
    }
    let weight = env.weight(airframe);
    Ok((weight * tan / (0.5 * env.air_density * airframe.reference_area * denom)).sqrt())
}

/// Airframe, atmosphere and every fitted model needed for a trim solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub airframe: Airframe,
    pub environment: Environment,
    pub aero: LinearAeroModel,
    pub thrust: PolySurrogate,
    pub torque: PolySurrogate,
    pub esc: EscCurrentModel,
    pub battery: Battery,
    /// Multiply effective rotor thrust by cos(rotor tilt).
    pub apply_tilt_loss: bool,
}

impl ModelBundle {
    pub fn validate(&self) -> Result<()> {
        self.airframe.validate()?;
        self.environment.validate()?;
        self.aero.validate()?;
        self.esc.validate()?;
        self.battery.validate()
    }

    pub fn weight(&self) -> f64 {
        self.environment.weight(&self.airframe)
    }

    /// Fraction of rotor thrust acting along the body thrust axis.
    pub fn thrust_factor(&self) -> f64 {
        if self.apply_tilt_loss {
            self.airframe.rotor_tilt.to_radians().cos()
        } else {
            1.0
        }
    }

    pub fn with_capacity(&self, capacity: f64) -> Result<Self> {
        Ok(Self {
            battery: Battery::new(capacity)?,
            ..self.clone()
        })
    }

    /// Trim at mounting angle `γ` and attack angle `α`.
    ///
    /// `γ = α` yields a hover point (V = 0, zero range) rather than an error.
    pub fn solve_trim(&self, gamma: f64, alpha: f64) -> Result<TrimPoint> {
        match trim_airspeed(&self.airframe, &self.environment, &self.aero, gamma, alpha) {
            Ok(v) => {
                let lift = aero_force(&self.environment, &self.airframe, &self.aero, v, alpha)?.lift;
                let theta = pitch_from_mounting(gamma, alpha);
                self.complete(gamma, alpha, theta, v, lift, Regime::Cruise)
            }
            Err(ModelError::HoverDegenerate) => self.complete(gamma, alpha, 0.0, 0.0, 0.0, Regime::Hover),
            Err(e) => Err(e),
        }
    }

    /// Hover with the wing inactive.
    pub fn hover(&self) -> Result<TrimPoint> {
        self.complete(0.0, 0.0, 0.0, 0.0, 0.0, Regime::Hover)
    }

    /// Trim at a prescribed airspeed with the wing mounted at `γ`.
    ///
    /// Solves `sinθ·(m·g − L) − D·cosθ = 0` for the smallest admissible pitch
    /// with `α = γ − θ` inside the aero domain and `0 < θ ≤ γ`.
    pub fn trim_at_speed(&self, gamma: f64, airspeed: f64) -> Result<TrimPoint> {
        let no_trim = ModelError::NoTrimAtSpeed { gamma, airspeed };
        if !(airspeed > 0.0 && airspeed.is_finite()) {
            return Err(no_trim);
        }
        if self.airframe.reference_area == 0.0 {
            // No wing: the body is dragless and flies level.
            let tp = self.wingless_trim_at_speed(0.0, airspeed)?;
            return Ok(TrimPoint {
                gamma,
                alpha: gamma,
                theta: 0.0,
                ..tp
            });
        }

        let aero = &self.aero;
        let lo = (gamma - aero.alpha_max).max(0.0);
        let hi = gamma.min(gamma - aero.alpha_min).min(90.0);
        if !(lo < hi) {
            return Err(no_trim);
        }
        let qs = self.environment.dynamic_pressure(airspeed) * self.airframe.reference_area;
        let weight = self.weight();
        let balance = |theta: f64| {
            let a = gamma - theta;
            let cl = aero.lift_slope * a + aero.lift_intercept;
            let cd = aero.drag_slope * a + aero.drag_intercept;
            let (s, c) = theta.to_radians().sin_cos();
            s * (weight - qs * cl) - qs * cd * c
        };

        let step = (hi - lo) / PITCH_SCAN_SEGMENTS as f64;
        let mut theta = None;
        let mut a = lo;
        let mut fa = balance(a);
        for i in 1..=PITCH_SCAN_SEGMENTS {
            let b = if i == PITCH_SCAN_SEGMENTS { hi } else { lo + step * i as f64 };
            let fb = balance(b);
            if fa == 0.0 && a > 0.0 {
                theta = Some(a);
                break;
            }
            if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
                theta = Some(crate::roots::bisect(balance, a, b));
                break;
            }
            if fb == 0.0 && b > 0.0 {
                theta = Some(b);
                break;
            }
            a = b;
            fa = fb;
        }
        let theta = theta.ok_or(no_trim)?;

        let alpha = gamma - theta;
        let theta = pitch_from_mounting(gamma, alpha);
        let lift = aero_force(&self.environment, &self.airframe, aero, airspeed, alpha)?.lift;
        self.complete(gamma, alpha, theta, airspeed, lift, Regime::Cruise)
    }

    /// Same craft without the wing; the body drag is `½ρV²·f`.
    ///
    /// `T·cosθ = m·g` and `T·sinθ = ½ρV²f` give `θ = atan(½ρV²f / (m·g))`.
    /// The returned point has `gamma = θ` and `alpha = 0`.
    pub fn wingless_trim_at_speed(&self, parasite_drag_area: f64, airspeed: f64) -> Result<TrimPoint> {
        if !(parasite_drag_area >= 0.0 && parasite_drag_area.is_finite()) {
            return Err(ModelError::invalid(format!(
                "parasite drag area {parasite_drag_area} must be >= 0"
            )));
        }
        if !(airspeed >= 0.0 && airspeed.is_finite()) {
            return Err(ModelError::invalid(format!("airspeed {airspeed} must be >= 0")));
        }
        if airspeed == 0.0 {
            return self.hover();
        }
        let drag = self.environment.dynamic_pressure(airspeed) * parasite_drag_area;
        let theta = (drag / self.weight()).atan().to_degrees();
        self.complete(theta, 0.0, theta, airspeed, 0.0, Regime::Cruise)
    }

    /// Propulsion and electrical chain for an attitude whose aero forces are known.
    fn complete(
        &self,
        gamma: f64,
        alpha: f64,
        theta: f64,
        airspeed: f64,
        lift: f64,
        regime: Regime,
    ) -> Result<TrimPoint> {
        let n = self.airframe.rotors();
        let thrust = (self.weight() - lift) / (n * self.thrust_factor() * theta.to_radians().cos());
        let vp = axial_inflow(airspeed, theta);
        if !(thrust > 0.0) {
            return Err(ModelError::Infeasible(Infeasibility::Rpm { thrust, vp }));
        }
        let rpm = crate::propulsion::required_rpm(&self.thrust, thrust, vp)?;
        let torque = crate::propulsion::torque(&self.torque, rpm, vp)?;
        let current = self.esc.current(torque)?;
        if !(current > 0.0) {
            return Err(ModelError::Infeasible(Infeasibility::NonPositiveCurrent { current }));
        }
        let total_current = n * current;
        let endurance = self.battery.capacity / total_current;
        Ok(TrimPoint {
            gamma,
            alpha,
            theta,
            airspeed,
            thrust_per_rotor: thrust,
            rpm,
            torque_per_rotor: torque,
            current_per_esc: current,
            total_current,
            endurance,
            range: airspeed * endurance,
            regime,
        })
    }

    /// Vertical and horizontal force residuals of a winged trim point, in N.
    pub fn force_residuals(&self, tp: &TrimPoint) -> Result<(f64, f64)> {
        let (lift, drag) = if tp.airspeed == 0.0 || self.airframe.reference_area == 0.0 {
            (0.0, 0.0)
        } else {
            let f = aero_force(&self.environment, &self.airframe, &self.aero, tp.airspeed, tp.alpha)?;
            (f.lift, f.drag)
        };
        Ok(self.residuals_with(tp, lift, drag))
    }

    /// Force residuals of a wingless trim point with parasite drag area `f`.
    pub fn wingless_residuals(&self, tp: &TrimPoint, parasite_drag_area: f64) -> (f64, f64) {
        let drag = self.environment.dynamic_pressure(tp.airspeed) * parasite_drag_area;
        self.residuals_with(tp, 0.0, drag)
    }

    fn residuals_with(&self, tp: &TrimPoint, lift: f64, drag: f64) -> (f64, f64) {
        let total = self.airframe.rotors() * tp.thrust_per_rotor * self.thrust_factor();
        let (s, c) = tp.theta.to_radians().sin_cos();
        (total * c + lift - self.weight(), total * s - drag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn bundle() -> ModelBundle {
        RunConfig::default().bundle()
    }

    #[test]
    fn pitch_examples() {
        assert_eq!(pitch_from_mounting(35.0, 10.0), 25.0);
        assert_eq!(pitch_from_mounting(12.5, 12.5), 0.0);
        assert_eq!(pitch_from_mounting(0.0, 0.0), 0.0);
    }

    #[test]
    fn trim_airspeed_errors() {
        let b = bundle();
        let (af, env, aero) = (&b.airframe, &b.environment, &b.aero);
        assert_eq!(trim_airspeed(af, env, aero, 10.0, 10.0), Err(ModelError::HoverDegenerate));
        assert!(matches!(
            trim_airspeed(af, env, aero, 50.0, 0.0),
            Err(ModelError::Infeasible(Infeasibility::AeroDenominator { .. }))
        ));
        assert!(matches!(
            trim_airspeed(af, env, aero, 5.0, 10.0),
            Err(ModelError::Infeasible(Infeasibility::NegativePitch { .. }))
        ));
        assert!(matches!(
            trim_airspeed(af, env, aero, 40.0, 20.0),
            Err(ModelError::OutOfAeroDomain { .. })
        ));
    }

    #[test]
    fn hover_splits_weight() {
        let b = bundle();
        let tp = b.solve_trim(10.0, 10.0).unwrap();
        assert_eq!(tp.regime, Regime::Hover);
        assert_eq!(tp.airspeed, 0.0);
        assert!((tp.thrust_per_rotor - 4.905).abs() < 1e-12);
        assert_eq!(tp.range, 0.0);
        let h = b.hover().unwrap();
        assert_eq!(h.thrust_per_rotor, tp.thrust_per_rotor);
    }

    #[test]
    fn cruise_thrust_cross_check() {
        let b = bundle();
        let tp = b.solve_trim(35.0, 10.0).unwrap();
        assert_eq!(tp.theta, 25.0);
        let f = aero_force(&b.environment, &b.airframe, &b.aero, tp.airspeed, tp.alpha).unwrap();
        let n = b.airframe.rotors();
        let from_drag = f.drag / (n * tp.theta.to_radians().sin());
        assert!((tp.thrust_per_rotor - from_drag).abs() <= 1e-9 * from_drag);
        let (v, h) = b.force_residuals(&tp).unwrap();
        assert!(v.abs() <= 1e-9 * b.weight() && h.abs() <= 1e-9 * b.weight());
    }

    #[test]
    fn tilt_loss_raises_rotor_thrust() {
        let mut b = bundle();
        let plain = b.solve_trim(35.0, 10.0).unwrap();
        b.apply_tilt_loss = true;
        let tilted = b.solve_trim(35.0, 10.0).unwrap();
        assert_eq!(plain.airspeed, tilted.airspeed);
        let ratio = plain.thrust_per_rotor / tilted.thrust_per_rotor;
        assert!((ratio - 10f64.to_radians().cos()).abs() < 1e-12);
        let (v, h) = b.force_residuals(&tilted).unwrap();
        assert!(v.abs() < 1e-9 && h.abs() < 1e-9);
    }

    #[test]
    fn capacity_only_moves_endurance_and_range() {
        let b = bundle();
        let one = b.solve_trim(35.0, 10.0).unwrap();
        let two = b.with_capacity(2.0 * b.battery.capacity).unwrap().solve_trim(35.0, 10.0).unwrap();
        assert_eq!(two.endurance, 2.0 * one.endurance);
        assert_eq!(two.range, 2.0 * one.range);
        assert_eq!(TrimPoint { endurance: 0.0, range: 0.0, ..one }, TrimPoint { endurance: 0.0, range: 0.0, ..two });
    }

    #[test]
    fn trim_at_speed_round_trip() {
        let b = bundle();
        let tp = b.solve_trim(35.0, 10.0).unwrap();
        let back = b.trim_at_speed(35.0, tp.airspeed).unwrap();
        assert!((back.theta - 25.0).abs() < 1e-6);
        assert!((back.alpha - 10.0).abs() < 1e-6);
        assert_eq!(back.gamma - back.alpha, back.theta);
    }

    #[test]
    fn trim_at_zero_speed_fails() {
        let b = bundle();
        assert!(matches!(b.trim_at_speed(35.0, 0.0), Err(ModelError::NoTrimAtSpeed { .. })));
        // Too slow: α would exceed the aero domain.
        assert!(matches!(b.trim_at_speed(35.0, 5.0), Err(ModelError::NoTrimAtSpeed { .. })));
    }

    #[test]
    fn wingless_examples() {
        let b = bundle();
        let hover = b.wingless_trim_at_speed(0.02, 0.0).unwrap();
        assert_eq!(hover.theta, 0.0);
        assert!((hover.thrust_per_rotor - 4.905).abs() < 1e-12);

        let dragless = b.wingless_trim_at_speed(0.0, 12.0).unwrap();
        assert_eq!(dragless.theta, 0.0);
        assert_eq!(dragless.thrust_per_rotor, hover.thrust_per_rotor);

        let tp = b.wingless_trim_at_speed(0.02, 15.0).unwrap();
        let expected = (0.5f64 * 1.225 * 225.0 * 0.02 / 19.62).atan().to_degrees();
        assert!((tp.theta - expected).abs() < 1e-12);
        assert!((tp.theta - 7.996).abs() < 1e-3);
        let (v, h) = b.wingless_residuals(&tp, 0.02);
        assert!(v.abs() < 1e-12 && h.abs() < 1e-12);
    }
}
