use crate::fitting::FitError;

/// Relative threshold on |R_kk| (columns are unit-normalized) below which the
/// design is treated as rank deficient.
const RANK_TOL: f64 = 1e-11;

/// Least-squares solution of `X·c ≈ y` by Householder QR.
///
/// `columns` holds the design matrix column by column. Each column is scaled
/// to unit norm before factorization and the scaling is undone on the
/// solution, which keeps monomial bases over wide ranges (N up to 10⁴, N³
/// terms) well conditioned.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>, FitError> {
    let n = columns.len();
    let m = y.len();
    if n == 0 {
        return Err(FitError::DegenerateDesign("empty basis".into()));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != m) {
        return Err(FitError::LengthMismatch {
            expected: m,
            found: c.len(),
        });
    }
    if m < n {
        return Err(FitError::RankDeficient);
    }

    let mut scale = Vec::with_capacity(n);
    let mut a: Vec<Vec<f64>> = Vec::with_capacity(n);
    for c in columns {
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(FitError::RankDeficient);
        }
        scale.push(norm);
        a.push(c.iter().map(|v| v / norm).collect());
    }
    let mut b = y.to_vec();
    let mut diag = vec![0.0; n];

    for k in 0..n {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= RANK_TOL {
            return Err(FitError::RankDeficient);
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= f * vi;
            }
        };
        for col in a.iter_mut().skip(k + 1) {
            reflect(&mut col[k..]);
        }
        reflect(&mut b[k..]);
    }

    // Back substitution on R (upper triangle of `a`, diagonal in `diag`).
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[j][k] * x[j]).sum();
        x[k] = (b[k] - s) / diag[k];
    }
    Ok(x.into_iter().zip(scale).map(|(xi, s)| xi / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..5).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let c = least_squares(&[vec![1.0; 5], x], &y).unwrap();
        assert!((c[0] + 1.0).abs() < 1e-13 && (c[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn collinear_columns_are_rejected() {
        let x = vec![1.0, 2.0, 3.0];
        let twice: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!(matches!(
            least_squares(&[x, twice], &[1.0, 2.0, 3.0]),
            Err(FitError::RankDeficient)
        ));
        assert!(matches!(
            least_squares(&[vec![0.0; 3]], &[1.0, 2.0, 3.0]),
            Err(FitError::RankDeficient)
        ));
    }

    #[test]
    fn underdetermined_is_rejected() {
        assert!(matches!(
            least_squares(&[vec![1.0], vec![2.0]], &[1.0]),
            Err(FitError::RankDeficient)
        ));
    }
}
