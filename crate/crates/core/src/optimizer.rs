//! Exhaustive (γ, α) sweep maximizing range, with the stall safety cap.
//!
//! Each cell is an independent trim solve. With the `parallel` feature the
//! cells are evaluated on a rayon pool; results are always collected by cell
//! index and the argmax is reduced sequentially, so output does not depend on
//! thread count or scheduling.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::trim::{ModelBundle, Regime, TrimPoint};

/// Slack when comparing grid angles against the cap and grid lookups.
const ANGLE_EPS: f64 = 1e-9;
const MAX_CELLS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointConvention {
    /// γ ∈ {1, …, 50}, α ∈ {1, …, 18}: 900 cells.
    #[default]
    OneBased,
    /// γ ∈ {0, …, 50}, α ∈ {0, …, 18}: 969 cells.
    ZeroBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub gamma_min_deg: f64,
    pub gamma_max_deg: f64,
    pub gamma_step_deg: f64,
    pub alpha_min_deg: f64,
    pub alpha_max_deg: f64,
    pub alpha_step_deg: f64,
}

fn axis_len(min: f64, max: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite() && min.is_finite() && max.is_finite()) {
        return Err(ModelError::invalid(format!("grid axis [{min}, {max}] step {step} is invalid")));
    }
    if min > max {
        return Err(ModelError::invalid(format!("grid axis min {min} exceeds max {max}")));
    }
    let n = ((max - min) / step + ANGLE_EPS).floor() + 1.0;
    if n > MAX_CELLS as f64 {
        return Err(ModelError::invalid("grid axis has too many points"));
    }
    Ok(n as usize)
}

impl SweepGrid {
    pub fn new(gamma: (f64, f64, f64), alpha: (f64, f64, f64)) -> Result<Self> {
        let g = Self {
            gamma_min_deg: gamma.0,
            gamma_max_deg: gamma.1,
            gamma_step_deg: gamma.2,
            alpha_min_deg: alpha.0,
            alpha_max_deg: alpha.1,
            alpha_step_deg: alpha.2,
        };
        g.validate()?;
        Ok(g)
    }

    /// 1° grid over γ ≤ 50°, α ≤ 18° under the given endpoint convention.
    pub fn standard(convention: EndpointConvention) -> Self {
        let lo = match convention {
            EndpointConvention::OneBased => 1.0,
            EndpointConvention::ZeroBased => 0.0,
        };
        Self {
            gamma_min_deg: lo,
            gamma_max_deg: 50.0,
            gamma_step_deg: 1.0,
            alpha_min_deg: lo,
            alpha_max_deg: 18.0,
            alpha_step_deg: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.gamma_len()? as u128 * self.alpha_len()? as u128;
        if n > MAX_CELLS as u128 {
            return Err(ModelError::invalid(format!("grid has {n} cells")));
        }
        Ok(())
    }

    pub fn gamma_len(&self) -> Result<usize> {
        axis_len(self.gamma_min_deg, self.gamma_max_deg, self.gamma_step_deg)
    }

    pub fn alpha_len(&self) -> Result<usize> {
        axis_len(self.alpha_min_deg, self.alpha_max_deg, self.alpha_step_deg)
    }

    pub fn cell_count(&self) -> Result<usize> {
        Ok(self.gamma_len()? * self.alpha_len()?)
    }

    pub fn gamma_at(&self, i: usize) -> f64 {
        self.gamma_min_deg + self.gamma_step_deg * i as f64
    }

    pub fn alpha_at(&self, j: usize) -> f64 {
        self.alpha_min_deg + self.alpha_step_deg * j as f64
    }

    pub fn alpha_index(&self, alpha: f64) -> Option<usize> {
        let len = self.alpha_len().ok()?;
        let x = (alpha - self.alpha_min_deg) / self.alpha_step_deg;
        let j = x.round();
        if !(j >= 0.0 && (j as usize) < len) || (x - j).abs() > ANGLE_EPS {
            return None;
        }
        Some(j as usize)
    }
}

/// Outcome class of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Feasible,
    HoverDegenerate,
    AeroInfeasible,
    AeroDomain,
    RpmInfeasible,
    SurrogateDomain,
    EscDomain,
    Other,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Feasible => "ok",
            CellStatus::HoverDegenerate => "hover-degenerate",
            CellStatus::AeroInfeasible => "aero-infeasible",
            CellStatus::AeroDomain => "aero-domain",
            CellStatus::RpmInfeasible => "rpm-infeasible",
            CellStatus::SurrogateDomain => "surrogate-domain",
            CellStatus::EscDomain => "esc-domain",
            CellStatus::Other => "error",
        }
    }

    pub fn from_error(e: &ModelError) -> Self {
        use crate::error::Infeasibility as I;
        match e {
            ModelError::HoverDegenerate => CellStatus::HoverDegenerate,
            ModelError::Infeasible(I::Rpm { .. }) => CellStatus::RpmInfeasible,
            ModelError::Infeasible(I::NonPositiveCurrent { .. }) => CellStatus::EscDomain,
            ModelError::Infeasible(_) => CellStatus::AeroInfeasible,
            ModelError::OutOfAeroDomain { .. } => CellStatus::AeroDomain,
            ModelError::OutOfSurrogateDomain { .. } => CellStatus::SurrogateDomain,
            ModelError::OutOfEscDomain { .. } => CellStatus::EscDomain,
            _ => CellStatus::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub gamma: f64,
    pub alpha: f64,
    pub status: CellStatus,
    /// Present exactly when `status` is `Feasible`.
    pub trim: Option<TrimPoint>,
}

impl SweepCell {
    pub fn range(&self) -> Option<f64> {
        self.trim.as_ref().map(|t| t.range)
    }

    fn evaluate(bundle: &ModelBundle, gamma: f64, alpha: f64) -> Self {
        let (status, trim) = match bundle.solve_trim(gamma, alpha) {
            Ok(tp) if tp.regime == Regime::Hover => (CellStatus::HoverDegenerate, None),
            Ok(tp) => (CellStatus::Feasible, Some(tp)),
            Err(e) => (CellStatus::from_error(&e), None),
        };
        Self {
            gamma,
            alpha,
            status,
            trim,
        }
    }
}

/// How cells are scheduled. Output is identical for every choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Global rayon pool. Sequential without the `parallel` feature.
    #[default]
    Parallel,
    Threads(usize),
}

/// Full grid of trim outcomes with the capped argmax.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub grid: SweepGrid,
    /// Row-major by α: `cells[j * gamma_len + i]` holds `(γ_i, α_j)`.
    pub cells: Vec<SweepCell>,
    pub safety_alpha_cap: f64,
    argmax: usize,
}

impl SweepResult {
    pub fn argmax_index(&self) -> usize {
        self.argmax
    }

    pub fn argmax(&self) -> &SweepCell {
        &self.cells[self.argmax]
    }

    pub fn best(&self) -> &TrimPoint {
        self.cells[self.argmax].trim.as_ref().expect("argmax cell is feasible")
    }

    pub fn gamma_len(&self) -> usize {
        self.grid.gamma_len().expect("validated grid")
    }

    pub fn row(&self, alpha_index: usize) -> &[SweepCell] {
        let n = self.gamma_len();
        &self.cells[alpha_index * n..(alpha_index + 1) * n]
    }

    pub fn feasible_count(&self) -> usize {
        self.cells.iter().filter(|c| c.trim.is_some()).count()
    }

    pub fn summary(&self) -> SweepSummary {
        let tp = self.best();
        SweepSummary {
            gamma_deg: tp.gamma,
            alpha_deg: tp.alpha,
            theta_deg: tp.theta,
            airspeed_m_s: tp.airspeed,
            range_m: tp.range,
            endurance_s: tp.endurance,
            rpm: tp.rpm,
            total_current_a: tp.total_current,
            alpha_cap_deg: self.safety_alpha_cap,
            feasible_cells: self.feasible_count(),
            total_cells: self.cells.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub gamma_deg: f64,
    pub alpha_deg: f64,
    pub theta_deg: f64,
    pub airspeed_m_s: f64,
    pub range_m: f64,
    pub endurance_s: f64,
    pub rpm: f64,
    #[serde(rename = "total_current_A")]
    pub total_current_a: f64,
    pub alpha_cap_deg: f64,
    pub feasible_cells: usize,
    pub total_cells: usize,
}

/// Solves every cell of the grid once, in row-major order by α.
pub fn evaluate_grid(bundle: &ModelBundle, grid: &SweepGrid, exec: Execution) -> Result<Vec<SweepCell>> {
    grid.validate()?;
    let ng = grid.gamma_len()?;
    let total = grid.cell_count()?;
    let eval = |k: usize| SweepCell::evaluate(bundle, grid.gamma_at(k % ng), grid.alpha_at(k / ng));

    match exec {
        Execution::Sequential => Ok((0..total).map(eval).collect()),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            Ok((0..total).into_par_iter().map(eval).collect())
        }
        #[cfg(feature = "parallel")]
        Execution::Threads(jobs) => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| ModelError::invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(|| (0..total).into_par_iter().map(eval).collect()))
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel | Execution::Threads(_) => Ok((0..total).map(eval).collect()),
    }
}

/// Sweep the grid and pick the longest-range cell under the airframe's attack-angle cap.
pub fn sweep(bundle: &ModelBundle, grid: &SweepGrid, exec: Execution) -> Result<SweepResult> {
    bundle.validate()?;
    let cells = evaluate_grid(bundle, grid, exec)?;
    let af = &bundle.airframe;
    capped(*grid, cells, af.stall_alpha, af.safety_margin)
}

fn capped(grid: SweepGrid, cells: Vec<SweepCell>, stall: f64, margin: f64) -> Result<SweepResult> {
    if !(margin >= 0.0 && stall.is_finite()) {
        return Err(ModelError::invalid(format!("safety margin {margin} must be >= 0")));
    }
    let cap = stall - margin;
    if margin >= stall {
        return Err(ModelError::EmptyFeasibleSet { cap });
    }
    let mut best: Option<(usize, f64)> = None;
    for (k, c) in cells.iter().enumerate() {
        let Some(r) = c.range() else { continue };
        if c.alpha > cap + ANGLE_EPS {
            continue;
        }
        let better = match best {
            None => true,
            Some((b, br)) => {
                let bc = &cells[b];
                r > br || (r == br && (c.gamma, c.alpha) < (bc.gamma, bc.alpha))
            }
        };
        if better {
            best = Some((k, r));
        }
    }
    let (argmax, _) = best.ok_or(ModelError::EmptyFeasibleSet { cap })?;
    Ok(SweepResult {
        grid,
        cells,
        safety_alpha_cap: cap,
        argmax,
    })
}

/// Recomputes the argmax over cells with `α ≤ stall − margin`; cells are untouched.
pub fn apply_alpha_cap(result: SweepResult, stall: f64, margin: f64) -> Result<SweepResult> {
    capped(result.grid, result.cells, stall, margin)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub gamma: f64,
    /// `None` for infeasible cells.
    pub range: Option<f64>,
}

/// Range against γ at fixed α, ordered by γ.
pub fn curve_extract(result: &SweepResult, alpha: f64) -> Result<Vec<CurvePoint>> {
    let j = result
        .grid
        .alpha_index(alpha)
        .ok_or(ModelError::AlphaNotOnGrid { alpha })?;
    Ok(result
        .row(j)
        .iter()
        .map(|c| CurvePoint {
            gamma: c.gamma,
            range: c.range(),
        })
        .collect())
}

/// Discrete maximum of one curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePeak {
    pub gamma: f64,
    pub range: f64,
    /// Neither the first nor the last feasible point of the curve.
    pub interior: bool,
}

pub fn curve_peak(curve: &[CurvePoint]) -> Option<CurvePeak> {
    let feasible: Vec<(f64, f64)> = curve.iter().filter_map(|p| p.range.map(|r| (p.gamma, r))).collect();
    let (k, &(gamma, range)) = feasible
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, &(f64, f64))>, (k, p)| match acc {
            Some((_, best)) if best.1 >= p.1 => acc,
            _ => Some((k, p)),
        })?;
    Some(CurvePeak {
        gamma,
        range,
        interior: k > 0 && k + 1 < feasible.len(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const CELL_CSV_HEADER: &str =
    "gamma_deg,alpha_deg,theta_deg,airspeed_m_s,rpm,torque_Nm,current_A,endurance_s,range_m,status";

/// One row per cell. Infeasible cells leave the solver columns empty.
pub fn write_cells_csv<W: Write>(result: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{CELL_CSV_HEADER}")?;
    for c in &result.cells {
        let t = c.trim.as_ref();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            c.gamma,
            c.alpha,
            c.gamma - c.alpha,
            fmt_opt(t.map(|t| t.airspeed)),
            fmt_opt(t.map(|t| t.rpm)),
            fmt_opt(t.map(|t| t.torque_per_rotor)),
            fmt_opt(t.map(|t| t.total_current)),
            fmt_opt(t.map(|t| t.endurance)),
            fmt_opt(t.map(|t| t.range)),
            c.status.as_str(),
        )?;
    }
    Ok(())
}

pub fn write_curve_csv<W: Write>(curve: &[CurvePoint], mut w: W) -> io::Result<()> {
    writeln!(w, "gamma_deg,range_m")?;
    for p in curve {
        writeln!(w, "{},{}", p.gamma, fmt_opt(p.range))?;
    }
    Ok(())
}
