//! Bracketed root refinement and real-root isolation for small polynomials.

/// Bisects `f` on `[a, b]` until the midpoint no longer separates the
/// endpoints. `f(a)` and `f(b)` must have opposite signs.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut fb_abs = fb.abs();
    for _ in 0..256 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb_abs = fm.abs();
        }
    }
    if fa.abs() <= fb_abs {
        a
    } else {
        b
    }
}

/// Dense polynomial `Σ c[j]·x^j`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Univariate {
    coeffs: Vec<f64>,
}

impl Univariate {
    pub(crate) fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub(crate) fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub(crate) fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub(crate) fn derivative(&self) -> Self {
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| j as f64 * c)
            .collect();
        Self::new(d)
    }

    /// Points splitting `[lo, hi]` into segments on which the polynomial is
    /// monotone: `lo`, the interior critical points in ascending order, `hi`.
    pub(crate) fn monotone_breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo];
        if self.degree() >= 2 {
            pts.extend(
                self.derivative()
                    .roots_in(lo, hi)
                    .into_iter()
                    .filter(|&x| x > lo && x < hi),
            );
        }
        pts.push(hi);
        pts
    }

    /// Real roots in `[lo, hi]`, ascending. A constant polynomial has none.
    pub(crate) fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let pts = self.monotone_breakpoints(lo, hi);
        let mut roots: Vec<f64> = Vec::new();
        let push = |r: f64, roots: &mut Vec<f64>| {
            if roots.last() != Some(&r) {
                roots.push(r);
            }
        };
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            if fa == 0.0 {
                push(a, &mut roots);
            }
            if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
                push(bisect(|x| self.eval(x), a, b), &mut roots);
            }
        }
        if self.eval(hi) == 0.0 {
            push(hi, &mut roots);
        }
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cubic_roots_are_isolated() {
        // (x-1)(x-2)(x-3) = x³ - 6x² + 11x - 6
        let p = Univariate::new(vec![-6.0, 11.0, -6.0, 1.0]);
        let r = p.roots_in(0.0, 4.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(p.roots_in(1.5, 1.9), Vec::<f64>::new());
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Univariate::new(vec![1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.eval(3.0), 7.0);
        assert_eq!(Univariate::new(vec![]).degree(), 0);
    }
}
