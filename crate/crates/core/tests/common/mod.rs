//! Independent oracles shared by the integration tests. None of these call
//! into the solver code paths they check.

#![allow(dead_code)]

use liftwing::{ModelBundle, PolySurrogate, RunConfig};

pub fn default_bundle() -> ModelBundle {
    RunConfig::default().bundle()
}

/// Force balance along the thrust axis eliminated: `(W − L)·sinθ − D·cosθ` as a
/// function of airspeed at fixed `(γ, α)`.
fn speed_balance(b: &ModelBundle, gamma: f64, alpha: f64) -> impl Fn(f64) -> f64 {
    let a = &b.aero;
    let cl = a.lift_slope * alpha + a.lift_intercept;
    let cd = a.drag_slope * alpha + a.drag_intercept;
    let (s, c) = (gamma - alpha).to_radians().sin_cos();
    let w = b.airframe.mass * b.environment.gravity;
    let half_rho_s = 0.5 * b.environment.air_density * b.airframe.reference_area;
    move |v: f64| {
        let q = half_rho_s * v * v;
        (w - q * cl) * s - q * cd * c
    }
}

/// First sign change of the residual on `(0, v_max]` at `step` resolution; the
/// midpoint of the bracketing step.
pub fn scan_trim_speed(b: &ModelBundle, gamma: f64, alpha: f64, v_max: f64, step: f64) -> Option<f64> {
    let f = speed_balance(b, gamma, alpha);
    let n = (v_max / step).ceil() as usize;
    let mut prev = f(step);
    for k in 2..=n {
        let v = k as f64 * step;
        let cur = f(v);
        if (prev > 0.0) != (cur > 0.0) {
            return Some(v - 0.5 * step);
        }
        prev = cur;
    }
    None
}

/// Smallest-θ sign change of `sinθ·(W − L) − D·cosθ` at prescribed airspeed,
/// scanned over θ at `step` degrees.
pub fn scan_trim_pitch(b: &ModelBundle, gamma: f64, airspeed: f64, step: f64) -> Option<f64> {
    let a = &b.aero;
    let w = b.airframe.mass * b.environment.gravity;
    let qs = 0.5 * b.environment.air_density * airspeed * airspeed * b.airframe.reference_area;
    let f = |theta: f64| {
        let alpha = gamma - theta;
        let (s, c) = theta.to_radians().sin_cos();
        s * (w - qs * (a.lift_slope * alpha + a.lift_intercept))
            - qs * (a.drag_slope * alpha + a.drag_intercept) * c
    };
    let lo = (gamma - a.alpha_max).max(0.0);
    let hi = gamma.min(gamma - a.alpha_min);
    let n = ((hi - lo) / step).ceil() as usize;
    let mut prev = f(lo);
    for k in 1..=n {
        let t = (lo + k as f64 * step).min(hi);
        let cur = f(t);
        if prev != 0.0 && (prev > 0.0) != (cur > 0.0) {
            return Some(t - 0.5 * step);
        }
        prev = cur;
    }
    None
}

/// Plain bisection to `tol` on a bracket with a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    assert!((flo > 0.0) != (f(hi) > 0.0), "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lowest RPM where thrust crosses `target` going up, found by a 1 RPM scan
/// over the domain followed by bisection.
pub fn rpm_oracle(s: &PolySurrogate, target: f64, vp: f64) -> Option<f64> {
    let f = |n: f64| s.eval_unchecked(n, vp) - target;
    let dom = s.rpm_domain();
    let mut n = dom.min;
    let mut prev = f(n);
    while n < dom.max {
        let next = (n + 1.0).min(dom.max);
        let cur = f(next);
        if prev < 0.0 && cur >= 0.0 {
            return Some(bisect(f, n, next, 1e-9));
        }
        if prev == 0.0 && cur > 0.0 {
            return Some(n);
        }
        n = next;
        prev = cur;
    }
    None
}

/// Term-by-term evaluation straight from `Σ c·V_p^i·N^j`, summed in the given order.
pub fn eval_terms(terms: &[(u32, u32, f64)], rpm: f64, vp: f64) -> f64 {
    terms
        .iter()
        .map(|&(i, j, c)| c * vp.powi(i as i32) * rpm.powi(j as i32))
        .sum()
}

/// Least squares through the normal equations `XᵀX c = Xᵀy`, solved by
/// Gaussian elimination with partial pivoting.
pub fn normal_equations(columns: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = columns.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = columns[i].iter().zip(&columns[j]).map(|(p, q)| p * q).sum();
        }
        a[i][n] = columns[i].iter().zip(y).map(|(p, q)| p * q).sum();
    }
    for k in 0..n {
        let p = (k..n)
            .max_by(|&r, &s| a[r][k].abs().total_cmp(&a[s][k].abs()))
            .unwrap();
        a.swap(k, p);
        for r in k + 1..n {
            let f = a[r][k] / a[k][k];
            for c in k..=n {
                a[r][c] -= f * a[k][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (a[k][n] - s) / a[k][k];
    }
    x
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
