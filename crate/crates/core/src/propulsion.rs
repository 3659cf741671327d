//! Propeller thrust/torque surrogates and the ESC current model.
//!
//! Rotation speed `N` is in RPM throughout. The published surrogate
//! magnitudes only give 5–10 N of thrust for `N` in the thousands, which
//! matches RPM-indexed manufacturer tables and a 2 kg quadrotor.

use serde::{Deserialize, Serialize};

use crate::aero::Environment;
use crate::error::{Infeasibility, ModelError, Result, SurrogateVariable};
use crate::interval::Interval;
use crate::roots::{bisect, Univariate};

/// Axial inflow through a disk pitched `pitch` degrees: `V·sin θ`.
pub fn axial_inflow(airspeed: f64, pitch: f64) -> f64 {
    airspeed * pitch.to_radians().sin()
}

/// One monomial `coef · V_p^vp_exp · N^rpm_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub vp_exp: u32,
    pub rpm_exp: u32,
    pub coef: f64,
}

impl Term {
    pub const fn new(vp_exp: u32, rpm_exp: u32, coef: f64) -> Self {
        Self {
            vp_exp,
            rpm_exp,
            coef,
        }
    }

    fn key(&self) -> (u32, u32) {
        (self.vp_exp, self.rpm_exp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputUnit {
    #[serde(rename = "N")]
    Newton,
    #[serde(rename = "N*m")]
    NewtonMetre,
}

/// Bivariate polynomial `f(V_p, N) = Σ c·V_p^i·N^j` with a rectangular validity domain.
///
/// Terms are kept sorted by `(vp_exp, rpm_exp)` so the summation order, and
/// therefore every rounding, does not depend on how the list was supplied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolySurrogateRepr", into = "PolySurrogateRepr")]
pub struct PolySurrogate {
    terms: Vec<Term>,
    vp_domain: Interval,
    rpm_domain: Interval,
    output_unit: OutputUnit,
    provenance: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolySurrogateRepr {
    output_unit: OutputUnit,
    vp_domain_m_s: Interval,
    rpm_domain: Interval,
    terms: Vec<Term>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

impl TryFrom<PolySurrogateRepr> for PolySurrogate {
    type Error = ModelError;

    fn try_from(r: PolySurrogateRepr) -> Result<Self> {
        let s = PolySurrogate::new(r.terms, r.vp_domain_m_s, r.rpm_domain, r.output_unit)?;
        Ok(s.with_provenance(r.provenance))
    }
}

impl From<PolySurrogate> for PolySurrogateRepr {
    fn from(s: PolySurrogate) -> Self {
        Self {
            output_unit: s.output_unit,
            vp_domain_m_s: s.vp_domain,
            rpm_domain: s.rpm_domain,
            terms: s.terms,
            provenance: s.provenance,
        }
    }
}

impl PolySurrogate {
    pub fn new(
        mut terms: Vec<Term>,
        vp_domain: Interval,
        rpm_domain: Interval,
        output_unit: OutputUnit,
    ) -> Result<Self> {
        if terms.is_empty() {
            return Err(ModelError::invalid("surrogate needs at least one term"));
        }
        if terms.iter().any(|t| !t.coef.is_finite()) {
            return Err(ModelError::invalid("surrogate coefficient is not finite"));
        }
        terms.sort_by_key(Term::key);
        if let Some(w) = terms.windows(2).find(|w| w[0].key() == w[1].key()) {
            return Err(ModelError::invalid(format!(
                "duplicate surrogate term V_p^{} N^{}",
                w[0].vp_exp, w[0].rpm_exp
            )));
        }
        if !vp_domain.is_proper() || !rpm_domain.is_proper() {
            return Err(ModelError::invalid("surrogate domain is degenerate"));
        }
        Ok(Self {
            terms,
            vp_domain,
            rpm_domain,
            output_unit,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Option<String>) -> Self {
        self.provenance = provenance;
        self
    }

    /// Propeller thrust fit with the second printed term read as the `V_p`
    /// coefficient, completing the quadratic basis `{1, V_p, N, V_p², V_p·N, N²}`.
    pub fn published_thrust() -> Self {
        Self::new(
            vec![
                Term::new(0, 0, 9.397e-2),
                Term::new(1, 0, 1.652e-3),
                Term::new(0, 1, -4.175e-5),
                Term::new(2, 0, -7.915e-4),
                Term::new(1, 1, -1.159e-5),
                Term::new(0, 2, 1.498e-7),
            ],
            Interval::new(0.0, 20.0),
            Interval::new(2000.0, 10000.0),
            OutputUnit::Newton,
        )
        .expect("published thrust surrogate is well formed")
        .with_provenance(Some(
            "published thrust fit; constant 1.652e-3 read as the V_p coefficient".into(),
        ))
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn vp_domain(&self) -> Interval {
        self.vp_domain
    }

    pub fn rpm_domain(&self) -> Interval {
        self.rpm_domain
    }

    pub fn output_unit(&self) -> OutputUnit {
        self.output_unit
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    /// Replaces the validity domain, e.g. to probe the polynomial at `N = 0`.
    pub fn with_domains(mut self, vp_domain: Interval, rpm_domain: Interval) -> Result<Self> {
        if !vp_domain.is_proper() || !rpm_domain.is_proper() {
            return Err(ModelError::invalid("surrogate domain is degenerate"));
        }
        self.vp_domain = vp_domain;
        self.rpm_domain = rpm_domain;
        Ok(self)
    }

    fn check_vp(&self, vp: f64) -> Result<()> {
        if self.vp_domain.contains(vp) {
            Ok(())
        } else {
            Err(ModelError::OutOfSurrogateDomain {
                variable: SurrogateVariable::AxialInflow,
                value: vp,
                min: self.vp_domain.min,
                max: self.vp_domain.max,
            })
        }
    }

    fn check_rpm(&self, rpm: f64) -> Result<()> {
        if self.rpm_domain.contains(rpm) {
            Ok(())
        } else {
            Err(ModelError::OutOfSurrogateDomain {
                variable: SurrogateVariable::Rpm,
                value: rpm,
                min: self.rpm_domain.min,
                max: self.rpm_domain.max,
            })
        }
    }

    /// Polynomial value without domain checks.
    pub fn eval_unchecked(&self, rpm: f64, vp: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * vp.powi(t.vp_exp as i32) * rpm.powi(t.rpm_exp as i32))
            .sum()
    }

    pub fn eval(&self, rpm: f64, vp: f64) -> Result<f64> {
        self.check_vp(vp)?;
        self.check_rpm(rpm)?;
        Ok(self.eval_unchecked(rpm, vp))
    }

    /// Restriction to fixed `vp` as a polynomial in `N`.
    pub(crate) fn at_inflow(&self, vp: f64) -> Univariate {
        let degree = self.terms.iter().map(|t| t.rpm_exp).max().unwrap_or(0) as usize;
        let mut c = vec![0.0; degree + 1];
        for t in &self.terms {
            c[t.rpm_exp as usize] += t.coef * vp.powi(t.vp_exp as i32);
        }
        Univariate::new(c)
    }

    /// Degree in `N`.
    pub fn rpm_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.rpm_exp).max().unwrap_or(0)
    }

    /// Rotation speed producing `target` at inflow `vp`, on the branch where
    /// output increases with `N`.
    ///
    /// The domain is split at the critical points of `f(·, vp)`; the lowest
    /// root on an increasing segment wins. A root sitting on a critical point
    /// (tangency) does not count.
    pub fn invert(&self, target: f64, vp: f64) -> Result<f64> {
        if !(target > 0.0 && target.is_finite()) {
            return Err(ModelError::invalid(format!(
                "required output {target} must be positive"
            )));
        }
        self.check_vp(vp)?;
        let infeasible = ModelError::Infeasible(Infeasibility::Rpm { thrust: target, vp });

        let mut c = self.at_inflow(vp).coeffs().to_vec();
        c[0] -= target;
        let p = Univariate::new(c);
        if p.degree() == 0 {
            return Err(infeasible);
        }
        let slope = p.derivative();
        let Interval { min: lo, max: hi } = self.rpm_domain;
        let pts = p.monotone_breakpoints(lo, hi);
        let is_critical = |x: f64| x != lo && x != hi;

        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (p.eval(a), p.eval(b));
            let root = if fa < 0.0 && fb > 0.0 {
                Some(bisect(|x| p.eval(x), a, b))
            } else if fa == 0.0 && fb > 0.0 && !is_critical(a) {
                Some(a)
            } else if fb == 0.0 && fa < 0.0 && !is_critical(b) {
                Some(b)
            } else {
                None
            };
            if let Some(n) = root {
                if slope.eval(n) > 0.0 {
                    return Ok(n);
                }
            }
        }
        Err(infeasible)
    }

    /// Closed-form inversion for surrogates at most quadratic in `N`.
    pub fn invert_quadratic(&self, target: f64, vp: f64) -> Result<f64> {
        if self.rpm_degree() > 2 {
            return Err(ModelError::invalid("closed form needs a surrogate quadratic in N"));
        }
        if !(target > 0.0 && target.is_finite()) {
            return Err(ModelError::invalid(format!(
                "required output {target} must be positive"
            )));
        }
        self.check_vp(vp)?;
        let infeasible = ModelError::Infeasible(Infeasibility::Rpm { thrust: target, vp });
        let p = self.at_inflow(vp);
        let get = |j: usize| p.coeffs().get(j).copied().unwrap_or(0.0);
        let (c, b, a) = (get(0) - target, get(1), get(2));

        let n = if a == 0.0 {
            if b <= 0.0 {
                return Err(infeasible);
            }
            -c / b
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc <= 0.0 {
                return Err(infeasible);
            }
            // Root with slope 2aN + b = +sqrt(disc) > 0, written to avoid cancellation.
            let s = disc.sqrt();
            if b <= 0.0 {
                (-b + s) / (2.0 * a)
            } else {
                (2.0 * c) / (-b - s)
            }
        };
        if self.rpm_domain.contains(n) {
            Ok(n)
        } else {
            Err(infeasible)
        }
    }

    fn require_unit(&self, unit: OutputUnit) -> Result<()> {
        if self.output_unit == unit {
            Ok(())
        } else {
            Err(ModelError::invalid(format!(
                "surrogate outputs {:?}, expected {unit:?}",
                self.output_unit
            )))
        }
    }
}

/// Propeller thrust from a thrust surrogate, in N.
pub fn thrust(surrogate: &PolySurrogate, rpm: f64, vp: f64) -> Result<f64> {
    surrogate.require_unit(OutputUnit::Newton)?;
    surrogate.eval(rpm, vp)
}

/// Propeller shaft torque from a torque surrogate, in N·m.
pub fn torque(surrogate: &PolySurrogate, rpm: f64, vp: f64) -> Result<f64> {
    surrogate.require_unit(OutputUnit::NewtonMetre)?;
    surrogate.eval(rpm, vp)
}

/// Rotation speed that makes `surrogate` deliver `thrust_required` at inflow `vp`.
pub fn required_rpm(surrogate: &PolySurrogate, thrust_required: f64, vp: f64) -> Result<f64> {
    surrogate.require_unit(OutputUnit::Newton)?;
    surrogate.invert(thrust_required, vp)
}

/// Nondimensional thrust and torque coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimPoint {
    pub thrust_coefficient: f64,
    pub torque_coefficient: f64,
}

impl NondimPoint {
    pub fn thrust(&self, env: &Environment, rpm: f64, diameter: f64) -> Result<f64> {
        thrust_from_coefficients(self.thrust_coefficient, env, rpm, diameter)
    }

    pub fn torque(&self, env: &Environment, rpm: f64, diameter: f64) -> Result<f64> {
        torque_from_coefficients(self.torque_coefficient, env, rpm, diameter)
    }
}

fn check_rotor(rpm: f64, diameter: f64) -> Result<()> {
    if !(diameter > 0.0) {
        return Err(ModelError::invalid(format!("diameter {diameter} must be > 0")));
    }
    if !(rpm >= 0.0) {
        return Err(ModelError::invalid(format!("rotation speed {rpm} must be >= 0")));
    }
    Ok(())
}

/// `T = C_T·ρ·N²·D⁴/16`.
pub fn thrust_from_coefficients(ct: f64, env: &Environment, rpm: f64, diameter: f64) -> Result<f64> {
    check_rotor(rpm, diameter)?;
    Ok(ct * env.air_density * rpm * rpm * diameter.powi(4) / 16.0)
}

/// `M = C_M·ρ·N²·D⁵/32`.
pub fn torque_from_coefficients(cm: f64, env: &Environment, rpm: f64, diameter: f64) -> Result<f64> {
    check_rotor(rpm, diameter)?;
    Ok(cm * env.air_density * rpm * rpm * diameter.powi(5) / 32.0)
}

/// Per-ESC current as a quadratic in propeller torque.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscCurrentModel {
    #[serde(rename = "quad_A_per_Nm2")]
    pub quad: f64,
    #[serde(rename = "lin_A_per_Nm")]
    pub lin: f64,
    #[serde(rename = "const_A")]
    pub constant: f64,
    #[serde(rename = "torque_domain_Nm")]
    pub torque_domain: Interval,
}

impl EscCurrentModel {
    pub fn new(quad: f64, lin: f64, constant: f64, torque_domain: Interval) -> Result<Self> {
        let m = Self {
            quad,
            lin,
            constant,
            torque_domain,
        };
        m.validate()?;
        Ok(m)
    }

    /// Thrust-stand fit `I = 73.05M² + 12.15M − 0.511`, restricted to
    /// `[0.05, 0.6]` N·m where it is positive.
    pub fn published() -> Self {
        Self {
            quad: 73.05,
            lin: 12.15,
            constant: -0.511,
            torque_domain: Interval::new(0.05, 0.6),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.quad, self.lin, self.constant].iter().all(|v| v.is_finite()) {
            return Err(ModelError::invalid("ESC coefficients must be finite"));
        }
        if !self.torque_domain.is_proper() {
            return Err(ModelError::invalid("ESC torque domain is degenerate"));
        }
        // Derivative is affine, so checking both ends covers the domain.
        for m in [self.torque_domain.min, self.torque_domain.max] {
            if 2.0 * self.quad * m + self.lin <= 0.0 {
                return Err(ModelError::invalid(format!(
                    "ESC model is not increasing at {m} N·m"
                )));
            }
        }
        Ok(())
    }

    pub fn current(&self, torque: f64) -> Result<f64> {
        if !self.torque_domain.contains(torque) {
            return Err(ModelError::OutOfEscDomain {
                torque,
                min: self.torque_domain.min,
                max: self.torque_domain.max,
            });
        }
        Ok(self.quad * torque * torque + self.lin * torque + self.constant)
    }
}

pub fn esc_current(model: &EscCurrentModel, torque: f64) -> Result<f64> {
    model.current(torque)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wide() -> (Interval, Interval) {
        (Interval::new(0.0, 20.0), Interval::new(0.0, 10000.0))
    }

    #[test]
    fn axial_inflow_examples() {
        assert_eq!(axial_inflow(15.0, 0.0), 0.0);
        assert!((axial_inflow(10.0, 90.0) - 10.0).abs() < 1e-14);
        assert!((axial_inflow(15.3, 25.0) - 6.466).abs() < 5e-4);
    }

    #[test]
    fn thrust_examples() {
        let (vp, rpm) = wide();
        let s = PolySurrogate::published_thrust().with_domains(vp, rpm).unwrap();
        assert_eq!(thrust(&s, 0.0, 0.0).unwrap(), 9.397e-2);
        let by_hand = 9.397e-2 - 4.175e-5 * 7000.0 + 1.498e-7 * 7000.0 * 7000.0;
        let t = thrust(&s, 7000.0, 0.0).unwrap();
        assert!((t - by_hand).abs() < 1e-12);
        assert!((t - 7.1419).abs() < 1e-4);

        let c = PolySurrogate::new(vec![Term::new(0, 0, 3.5)], vp, rpm, OutputUnit::Newton)
            .unwrap();
        assert_eq!(thrust(&c, 1234.0, 5.0).unwrap(), 3.5);
    }

    #[test]
    fn torque_monomial() {
        let (vp, rpm) = wide();
        let s = PolySurrogate::new(vec![Term::new(1, 0, 0.25)], vp, rpm, OutputUnit::NewtonMetre)
            .unwrap();
        assert_eq!(torque(&s, 5000.0, 8.0).unwrap(), 2.0);
        // unit mismatch is rejected
        assert!(thrust(&s, 5000.0, 8.0).is_err());
    }

    #[test]
    fn domain_errors() {
        let s = PolySurrogate::published_thrust();
        assert!(matches!(
            s.eval(1000.0, 0.0),
            Err(ModelError::OutOfSurrogateDomain {
                variable: SurrogateVariable::Rpm,
                ..
            })
        ));
        assert!(matches!(
            s.eval(5000.0, 25.0),
            Err(ModelError::OutOfSurrogateDomain {
                variable: SurrogateVariable::AxialInflow,
                ..
            })
        ));
    }

    #[test]
    fn construction_invariants() {
        let (vp, rpm) = wide();
        assert!(PolySurrogate::new(vec![], vp, rpm, OutputUnit::Newton).is_err());
        let dup = vec![Term::new(0, 2, 1.0), Term::new(0, 2, 2.0)];
        assert!(PolySurrogate::new(dup, vp, rpm, OutputUnit::Newton).is_err());
        let one = vec![Term::new(0, 0, 1.0)];
        assert!(PolySurrogate::new(one, Interval::new(1.0, 1.0), rpm, OutputUnit::Newton).is_err());
    }

    #[test]
    fn required_rpm_round_trip() {
        let s = PolySurrogate::published_thrust();
        for vp in [0.0, 3.0, 7.5, 12.0] {
            let t0 = thrust(&s, 7000.0, vp).unwrap();
            let n = required_rpm(&s, t0, vp).unwrap();
            assert!((n - 7000.0).abs() < 1e-6, "vp={vp}: {n}");
            assert!((thrust(&s, n, vp).unwrap() - t0).abs() <= 1e-9);
        }
    }

    #[test]
    fn required_rpm_above_max_is_infeasible() {
        let s = PolySurrogate::published_thrust();
        let tmax = thrust(&s, 10000.0, 0.0).unwrap();
        assert!(matches!(
            required_rpm(&s, tmax + 0.01, 0.0),
            Err(ModelError::Infeasible(Infeasibility::Rpm { .. }))
        ));
        assert!(required_rpm(&s, -1.0, 0.0).is_err());
    }

    #[test]
    fn required_rpm_matches_brute_force_scan() {
        let s = PolySurrogate::published_thrust();
        // Oracle: scan the RPM domain at 0.1 RPM, keep the increasing sign change.
        let f = |n: f64| s.eval_unchecked(n, 0.0) - 4.905;
        let mut scanned = None;
        let mut n = 2000.0;
        while n < 10000.0 {
            let next = n + 0.1;
            if f(n) < 0.0 && f(next) >= 0.0 {
                scanned = Some(0.5 * (n + next));
                break;
            }
            n = next;
        }
        let scanned = scanned.expect("scan finds a root");
        let solved = required_rpm(&s, 4.905, 0.0).unwrap();
        assert!((solved - scanned).abs() <= 0.05 + 1e-9, "{solved} vs {scanned}");
        assert!((solved - 5808.195).abs() < 0.01);
    }

    #[test]
    fn decreasing_branch_root_is_skipped() {
        // T = 1e-7 (N - 4000)² on [2000, 10000]: roots of T = 0.1 at 3000 (decreasing) and 5000.
        let (vp, _) = wide();
        let s = PolySurrogate::new(
            vec![
                Term::new(0, 0, 1.6),
                Term::new(0, 1, -8e-4),
                Term::new(0, 2, 1e-7),
            ],
            vp,
            Interval::new(2000.0, 10000.0),
            OutputUnit::Newton,
        )
        .unwrap();
        let n = required_rpm(&s, 0.1, 0.0).unwrap();
        assert!((n - 5000.0).abs() < 1e-6);
        let q = s.invert_quadratic(0.1, 0.0).unwrap();
        assert!((q - 5000.0).abs() < 1e-6);
    }

    #[test]
    fn tangency_is_infeasible() {
        // T = (N - 4000)², target value at the minimum would be 0; shift so min = 1.
        let (vp, _) = wide();
        let s = PolySurrogate::new(
            vec![
                Term::new(0, 0, 16.0e6 + 1.0),
                Term::new(0, 1, -8000.0),
                Term::new(0, 2, 1.0),
            ],
            vp,
            Interval::new(3000.0, 3500.0),
            OutputUnit::Newton,
        )
        .unwrap();
        // Decreasing on the whole domain: no increasing root.
        assert!(required_rpm(&s, 250001.0, 0.0).is_err());
        // Discriminant exactly zero for target 1.
        assert!(s.invert_quadratic(1.0, 0.0).is_err());
    }

    #[test]
    fn coefficient_form_examples() {
        let env = Environment::default();
        assert_eq!(thrust_from_coefficients(0.0, &env, 5000.0, 0.25).unwrap(), 0.0);
        let t1 = thrust_from_coefficients(0.1, &env, 100.0, 0.2).unwrap();
        assert!((t1 - 0.1225).abs() < 1e-12);
        let t2 = thrust_from_coefficients(0.1, &env, 200.0, 0.2).unwrap();
        assert!((t2 / t1 - 4.0).abs() < 1e-12);

        assert_eq!(torque_from_coefficients(0.0, &env, 5000.0, 0.25).unwrap(), 0.0);
        // 0.1·1.225·10⁴·3.2e-4/32
        let m1 = torque_from_coefficients(0.1, &env, 100.0, 0.2).unwrap();
        assert!((m1 - 0.01225).abs() < 1e-12);
        let m2 = torque_from_coefficients(0.1, &env, 200.0, 0.2).unwrap();
        assert!((m2 / m1 - 4.0).abs() < 1e-12);

        assert!(thrust_from_coefficients(0.1, &env, 100.0, 0.0).is_err());
        let p = NondimPoint {
            thrust_coefficient: 0.1,
            torque_coefficient: 0.1,
        };
        assert_eq!(p.thrust(&env, 100.0, 0.2).unwrap(), t1);
        assert_eq!(p.torque(&env, 100.0, 0.2).unwrap(), m1);
    }

    #[test]
    fn esc_examples() {
        let esc = EscCurrentModel::published();
        assert!((esc.current(0.3).unwrap() - 9.7085).abs() < 1e-12);
        assert!((esc.current(0.1).unwrap() - 1.4345).abs() < 1e-12);
        assert!(matches!(esc.current(0.0), Err(ModelError::OutOfEscDomain { .. })));

        let wide = EscCurrentModel::new(73.05, 12.15, -0.511, Interval::new(0.0, 0.6)).unwrap();
        assert!((wide.current(0.0).unwrap() + 0.511).abs() < 1e-15);

        // decreasing at the low end
        assert!(EscCurrentModel::new(73.05, -12.15, 1.0, Interval::new(0.0, 0.6)).is_err());
    }
}
