//! Order-independent reductions and small fitting helpers.

use serde::Serialize;

/// Pairwise (cascade) summation. The association order depends only on the
/// length of the slice, so results are reproducible bit for bit.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise reduction of arbitrary items with an associative `combine`.
pub fn pairwise_reduce<T: Clone>(items: &[T], combine: &impl Fn(&T, &T) -> T) -> Option<T> {
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        n => {
            let (l, r) = items.split_at(n / 2);
            let l = pairwise_reduce(l, combine)?;
            let r = pairwise_reduce(r, combine)?;
            Some(combine(&l, &r))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Estimate {
    /// |mean − target| in units of stderr.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }

    pub fn within_sigma(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }

    pub fn relative_error(&self, target: f64) -> f64 {
        (self.mean / target - 1.0).abs()
    }

    pub fn scale(self, factor: f64) -> Estimate {
        Estimate { mean: self.mean * factor, stderr: self.stderr * factor.abs(), n: self.n }
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> Estimate {
    let n = values.len();
    if n == 0 {
        return Estimate { mean: f64::NAN, stderr: f64::NAN, n };
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return Estimate { mean, stderr: f64::INFINITY, n };
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    Estimate { mean, stderr: (var / n as f64).sqrt(), n }
}

/// Ordinary least-squares line y = intercept + slope x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residual scatter.
    pub slope_stderr: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len(), "fit needs paired samples");
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxx: Vec<f64> = x.iter().map(|v| (v - mx) * (v - mx)).collect();
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx = pairwise_sum(&sxx);
    let slope = pairwise_sum(&sxy) / sxx;
    let intercept = my - slope * mx;
    let resid: Vec<f64> = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).collect();
    let slope_stderr = if x.len() > 2 { (pairwise_sum(&resid) / (n - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    LineFit { slope, intercept, slope_stderr }
}

/// Least-squares parabola y = c0 + c1 x + c2 x².
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Standard error of c1 from the residual scatter.
    pub c1_stderr: f64,
}

pub fn quadratic_fit(x: &[f64], y: &[f64]) -> QuadraticFit {
    assert_eq!(x.len(), y.len(), "fit needs paired samples");
    assert!(x.len() >= 3, "parabola needs three points");
    // scale x to O(1) so the normal equations stay well conditioned
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let design = nalgebra::DMatrix::from_fn(x.len(), 3, |i, j| (x[i] / scale).powi(j as i32));
    let rhs = nalgebra::DVector::from_column_slice(y);
    let normal = design.transpose() * &design;
    let inv = normal.clone().try_inverse().expect("distinct abscissae");
    let coef = &inv * design.transpose() * &rhs;
    let resid = &rhs - &design * &coef;
    let dof = x.len() as f64 - 3.0;
    let var = if dof > 0.0 { resid.norm_squared() / dof } else { f64::INFINITY };
    QuadraticFit {
        c0: coef[0],
        c1: coef[1] / scale,
        c2: coef[2] / (scale * scale),
        c1_stderr: (var * inv[(1, 1)]).sqrt() / scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn pairwise_reduce_is_deterministic() {
        let v: Vec<f64> = (0..777).map(|i| (i as f64).sin()).collect();
        let a = pairwise_reduce(&v, &|a, b| a + b).unwrap();
        let b = pairwise_reduce(&v, &|a, b| a + b).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a - v.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn mean_and_stderr() {
        let e = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = linear_fit(&x, &y);
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!((f.intercept - 1.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-12);
    }

    #[test]
    fn exact_parabola() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 1e-3).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 + 5.0 * t - 300.0 * t * t).collect();
        let f = quadratic_fit(&x, &y);
        assert!((f.c1 - 5.0).abs() < 1e-9);
        assert!((f.c2 + 300.0).abs() < 1e-6);
    }
}
