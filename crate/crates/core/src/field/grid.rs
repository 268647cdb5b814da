use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radial discretization of ℝ³ shared by every field built on it.
///
/// Physical nodes are `r_j = j·dr`, `j = 1..=n`, with `dr = r_max/(n+1)`, and
/// frequency nodes are `ρ_m = π m / r_max`, `m = 1..=n`. With this pairing
/// `ρ_m r_j = π m j/(n+1)` and the radial transform is an exact type-I
/// discrete sine transform, evaluated through one FFT of length `2(n+1)`.
/// There is no zero-frequency node: `ρ_1 = π/r_max`.
pub struct RadialGrid<T: Real> {
    n: usize,
    r_max: T,
    dr: T,
    drho: T,
    r: Vec<T>,
    rho: Vec<T>,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for RadialGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("n", &self.n)
            .field("r_max", &self.r_max)
            .finish()
    }
}

impl<T: Real> PartialEq for RadialGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.r_max == other.r_max
    }
}

impl<T: Real> RadialGrid<T> {
    pub fn new(n: usize, r_max: T) -> Result<Arc<Self>> {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("n={n} must be a power of two ≥ 64")));
        }
        if !(r_max > T::zero() && r_max.is_finite()) {
            return Err(Error::Grid(format!("r_max={r_max} must be positive")));
        }
        let dr = r_max / T::of_usize(n + 1);
        let drho = T::PI() / r_max;
        let r = (1..=n).map(|j| T::of_usize(j) * dr).collect();
        let rho = (1..=n).map(|m| T::of_usize(m) * drho).collect();
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Ok(Arc::new(Self { n, r_max, dr, drho, r, rho, fft }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn dr(&self) -> T {
        self.dr
    }

    pub fn drho(&self) -> T {
        self.drho
    }

    pub fn r(&self) -> &[T] {
        &self.r
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    pub fn rho_max(&self) -> T {
        self.rho[self.n - 1]
    }

    /// Number of leading frequency modes kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> usize {
        2 * self.n / 3
    }

    /// `y_m = Σ_j x_j sin(π j m/(n+1))`. The matrix is symmetric, so the
    /// same routine maps frequency data back to physical nodes.
    pub fn sine_sum(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let len = 2 * (n + 1);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
        for (j, &v) in x.iter().enumerate() {
            buf[j + 1] = v;
            buf[len - j - 1] = -v;
        }
        self.fft.process(&mut buf);
        // FFT of the odd extension is -2i times the sine sum
        let half = T::lit(0.5);
        buf[1..=n]
            .iter()
            .map(|b| Complex::new(-b.im * half, b.re * half))
            .collect()
    }

    /// `c_j = Σ_m a_m cos(π m j/(n+1))`.
    pub fn cosine_sum(&self, a: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let len = 2 * (n + 1);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
        for (m, &v) in a.iter().enumerate() {
            buf[m + 1] = v;
            buf[len - m - 1] = v;
        }
        self.fft.process(&mut buf);
        let half = T::lit(0.5);
        buf[1..=n].iter().map(|b| b * half).collect()
    }
}
