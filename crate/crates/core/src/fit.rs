//! Ordinary least squares on a line.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_FIT_POINTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Half-width of the 95% confidence interval on the slope.
    pub slope_ci95: T,
    pub points: usize,
}

impl<T: Real> LinearFit<T> {
    pub fn interval(&self) -> (T, T) {
        (self.slope - self.slope_ci95, self.slope + self.slope_ci95)
    }
}

/// Fits `y = slope·x + intercept`. Needs [`MIN_FIT_POINTS`] finite pairs
/// and at least two distinct abscissae.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x.to_f64_lossy(), y.to_f64_lossy()))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let n = pts.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::FitDegenerate { need: MIN_FIT_POINTS, got: n });
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::FitDegenerate { need: MIN_FIT_POINTS, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let q = StudentsT::new(0.0, 1.0, nf - 2.0).map(|d| d.inverse_cdf(0.975)).unwrap_or(1.96);
    Ok(LinearFit { slope: T::lit(slope), intercept: T::lit(intercept), slope_ci95: T::lit(q * se), points: n })
}

/// Fits `log y` against `log x` (any common base gives the same slope).
pub fn log_log_fit<T: Real>(xs: &[T], ys: &[T]) -> Result<LinearFit<T>> {
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let t: Vec<f64> = (0..8).map(|i| 10f64 * 2f64.powi(i)).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
        let f = log_log_fit(&t, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!(f.slope_ci95 < 1e-10);
    }

    #[test]
    fn too_few_points() {
        let e = linear_fit(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert_eq!(e, Error::FitDegenerate { need: 4, got: 3 });
    }
}
