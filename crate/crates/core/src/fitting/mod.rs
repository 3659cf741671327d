//! Least-squares fitting of the aero, propeller and ESC models from sample tables.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aero::LinearAeroModel;
use crate::error::ModelError;
use crate::interval::Interval;
use crate::propulsion::{EscCurrentModel, OutputUnit, PolySurrogate, Term};

mod lstsq;
pub mod table;
pub mod units;

pub use lstsq::least_squares;
pub use table::{parse_propeller_table, Column, ColumnMap, SampleTable, UnitMap};
pub use units::{Quantity, Unit};

/// Quadratic basis used for propeller thrust: {1, V_p, N, V_p², V_p·N, N²}.
pub const THRUST_BASIS: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Full cubic basis used for propeller torque: every V_p^i·N^j with i + j ≤ 3.
pub const TORQUE_BASIS: [(u32, u32); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

#[derive(Debug, Error)]
pub enum FitError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown unit: {0}")]
    UnknownUnit(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("degenerate design: {0}")]
    DegenerateDesign(String),
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("observed values have zero variance")]
    DegenerateVariance,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("fitted model is invalid: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Quality of one least-squares fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Basis function labels, aligned with `coefficients`.
    pub basis: Vec<String>,
    pub coefficients: Vec<f64>,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// Pearson correlation of predicted against observed; absent when the
    /// prediction is constant.
    pub pearson_r: Option<f64>,
    pub max_abs_residual: f64,
    pub sample_count: usize,
}

/// `1 − SS_res/SS_tot`. Negative when the prediction is worse than the mean.
pub fn r_squared(predicted: &[f64], observed: &[f64]) -> Result<f64, FitError> {
    if predicted.len() != observed.len() {
        return Err(FitError::LengthMismatch {
            expected: observed.len(),
            found: predicted.len(),
        });
    }
    if observed.is_empty() {
        return Err(FitError::DegenerateVariance);
    }
    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let ss_tot: f64 = observed.iter().map(|o| (o - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(FitError::DegenerateVariance);
    }
    let ss_res: f64 = predicted.iter().zip(observed).map(|(p, o)| (o - p).powi(2)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    (saa > 0.0 && sbb > 0.0).then(|| (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Fits `observed ≈ Σ c_k·columns[k]` and reports the fit quality.
fn fit_columns(
    labels: Vec<String>,
    columns: &[Vec<f64>],
    observed: &[f64],
) -> Result<FitReport, FitError> {
    let coefficients = least_squares(columns, observed)?;
    let predicted: Vec<f64> = (0..observed.len())
        .map(|i| columns.iter().zip(&coefficients).map(|(c, k)| c[i] * k).sum())
        .collect();
    let max_abs_residual = predicted
        .iter()
        .zip(observed)
        .map(|(p, o)| (p - o).abs())
        .fold(0.0, f64::max);
    Ok(FitReport {
        basis: labels,
        r_squared: r_squared(&predicted, observed)?,
        pearson_r: pearson(&predicted, observed),
        max_abs_residual,
        sample_count: observed.len(),
        coefficients,
    })
}

fn distinct_count(values: &[f64]) -> usize {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn domain_of(values: &[f64], what: &str) -> Result<Interval, FitError> {
    Interval::hull(values)
        .filter(Interval::is_proper)
        .ok_or_else(|| FitError::DegenerateDesign(format!("{what} samples span no interval")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AeroFit {
    pub model: LinearAeroModel,
    pub lift: FitReport,
    pub drag: FitReport,
}

/// Straight-line fits of `cl` and `cd` against `alpha` (degrees); the domain
/// is the sampled α range.
pub fn fit_linear_aero(samples: &SampleTable) -> Result<AeroFit, FitError> {
    let alpha = samples.column("alpha")?;
    let cl = samples.column("cl")?;
    let cd = samples.column("cd")?;
    if distinct_count(alpha) < 2 {
        return Err(FitError::DegenerateDesign("need at least two distinct α values".into()));
    }
    let cols = vec![vec![1.0; alpha.len()], alpha.to_vec()];
    let labels = || vec!["1".to_string(), "alpha".to_string()];
    let lift = fit_columns(labels(), &cols, cl)?;
    let drag = fit_columns(labels(), &cols, cd)?;
    let dom = domain_of(alpha, "alpha")?;
    let model = LinearAeroModel::new(
        lift.coefficients[1],
        lift.coefficients[0],
        drag.coefficients[1],
        drag.coefficients[0],
        dom.min,
        dom.max,
    )?;
    Ok(AeroFit { model, lift, drag })
}

/// Least-squares polynomial in `(vp, rpm)` for column `target` (`thrust` or `torque`).
pub fn fit_poly_surrogate(
    samples: &SampleTable,
    basis: &[(u32, u32)],
    target: &str,
) -> Result<(PolySurrogate, FitReport), FitError> {
    let vp = samples.column("vp")?;
    let rpm = samples.column("rpm")?;
    let observed = samples.column(target)?;
    let unit = match samples.unit(target)? {
        Unit::Newton => OutputUnit::Newton,
        Unit::NewtonMetre => OutputUnit::NewtonMetre,
        u => {
            return Err(FitError::UnknownUnit(format!(
                "`{u}` is neither a force nor a torque unit"
            )))
        }
    };
    if samples.len() < basis.len() {
        return Err(FitError::RankDeficient);
    }
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|&(i, j)| {
            vp.iter()
                .zip(rpm)
                .map(|(v, n)| v.powi(i as i32) * n.powi(j as i32))
                .collect()
        })
        .collect();
    let labels = basis.iter().map(|(i, j)| format!("vp^{i} N^{j}")).collect();
    let report = fit_columns(labels, &cols, observed)?;
    let terms = basis
        .iter()
        .zip(&report.coefficients)
        .map(|(&(i, j), &c)| Term::new(i, j, c))
        .collect();
    let surrogate = PolySurrogate::new(terms, domain_of(vp, "vp")?, domain_of(rpm, "rpm")?, unit)?;
    Ok((surrogate, report))
}

/// Quadratic fit of `current` against `torque`; the domain is the sampled torque range.
pub fn fit_esc_quadratic(samples: &SampleTable) -> Result<(EscCurrentModel, FitReport), FitError> {
    let torque = samples.column("torque")?;
    let current = samples.column("current")?;
    if distinct_count(torque) < 3 {
        return Err(FitError::DegenerateDesign("need at least three distinct torque values".into()));
    }
    let cols = vec![
        vec![1.0; torque.len()],
        torque.to_vec(),
        torque.iter().map(|m| m * m).collect(),
    ];
    let labels = vec!["1".into(), "M".into(), "M^2".into()];
    let report = fit_columns(labels, &cols, current)?;
    let c = &report.coefficients;
    let model = EscCurrentModel::new(c[2], c[1], c[0], domain_of(torque, "torque")?)?;
    Ok((model, report))
}
