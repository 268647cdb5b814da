use num_complex::Complex;
use rayon::prelude::*;

use super::quadrature::{oscillatory_integral_est, Phase, QuadResult, MIN_TOL};
use crate::error::Result;
use crate::field::chi;
use crate::fit::{log_log_fit, LinearFit, MIN_FIT_POINTS};
use crate::scalar::Real;
use crate::symbol::SymbolSpec;
use crate::Error;

/// Support of `χ₀`.
pub const CHI0_SUPPORT: (f64, f64) = (0.625, 1.6);
pub const KERNEL_TOL: f64 = 1e-10;
/// Points on which a usable sample must sit above the quadrature noise.
const USABLE_MARGIN: f64 = 10.0;

/// `ψ(ρ) = t·ω(2^kρ) + x·ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpec<T> {
    pub symbol: SymbolSpec<T>,
    pub k: i32,
    pub t: T,
    pub x: T,
}

impl<T: Real> Phase<T> for PhaseSpec<T> {
    fn value(&self, rho: T) -> T {
        self.t * self.symbol.omega(T::pow2(self.k) * rho) + self.x * rho
    }
    fn d1(&self, rho: T) -> T {
        let s = T::pow2(self.k);
        self.t * s * self.symbol.omega1(s * rho) + self.x
    }
    fn d2(&self, rho: T) -> T {
        let s = T::pow2(self.k);
        self.t * s * s * self.symbol.omega2(s * rho)
    }
}

fn chi0_sq<T: Real>(rho: T) -> T {
    let c = chi(0, rho);
    c * c
}

fn support<T: Real>() -> (T, T) {
    (T::lit(CHI0_SUPPORT.0), T::lit(CHI0_SUPPORT.1))
}

/// `K(t,x) = ∫ e^{itω(2^kρ)+ixρ} χ₀²(ρ) dρ` with its error estimate.
pub fn kernel_k_est<T: Real>(spec: &SymbolSpec<T>, k: i32, t: T, x: T, tol: T) -> Result<QuadResult<T>> {
    let phase = PhaseSpec { symbol: *spec, k, t, x };
    oscillatory_integral_est(&phase, &chi0_sq, support(), tol)
}

/// `K(t,x)` to tolerance `1e−10`.
pub fn kernel_k<T: Real>(spec: &SymbolSpec<T>, k: i32, t: T, x: T) -> Result<Complex<T>> {
    Ok(kernel_k_est(spec, k, t, x, T::lit(KERNEL_TOL))?.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSample<T> {
    pub k: i32,
    pub t: T,
    pub x_grid: Vec<T>,
    pub values: Vec<Complex<T>>,
    pub sup_abs: T,
    /// Largest quadrature noise floor over the window.
    pub floor: T,
}

impl<T: Real> KernelSample<T> {
    pub fn usable(&self) -> bool {
        self.sup_abs > T::lit(USABLE_MARGIN) * self.floor
    }
}

/// Evaluates `K(t, ·)` on `x_grid` at the scan tolerance.
pub fn kernel_sample<T: Real>(spec: &SymbolSpec<T>, k: i32, t: T, x_grid: Vec<T>) -> Result<KernelSample<T>> {
    let est: Vec<QuadResult<T>> = x_grid
        .par_iter()
        .map(|&x| kernel_k_est(spec, k, t, x, T::lit(MIN_TOL)))
        .collect::<Result<_>>()?;
    let values: Vec<Complex<T>> = est.iter().map(|e| e.value).collect();
    let sup_abs = values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let floor = est.iter().map(|e| e.noise_floor()).fold(T::zero(), T::max);
    Ok(KernelSample { k, t, x_grid, values, sup_abs, floor })
}

/// Which `x` the two scans sweep at each `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowPolicy<T> {
    /// Stationary points `ρ*` are placed across `[lo, hi] ⊂ supp χ₀`.
    pub rho_star: (T, T),
    pub points: usize,
    /// Far window is `|x| ≤ far_fraction·|t|·2^{kα}`.
    pub far_fraction: T,
}

impl<T: Real> Default for WindowPolicy<T> {
    fn default() -> Self {
        Self { rho_star: (T::lit(0.75), T::lit(1.35)), points: 33, far_fraction: T::lit(0.01) }
    }
}

impl<T: Real> WindowPolicy<T> {
    /// `x = −t·2^k·ω′(2^kρ*)` for `ρ*` spread over the window.
    pub fn stationary_x(&self, spec: &SymbolSpec<T>, k: i32, t: T) -> Vec<T> {
        let s = T::pow2(k);
        let (lo, hi) = self.rho_star;
        let n = self.points.max(1);
        (0..n)
            .map(|i| {
                let f = if n == 1 { T::lit(0.5) } else { T::of_usize(i) / T::of_usize(n - 1) };
                let rho = lo + (hi - lo) * f;
                -t * s * spec.omega1(s * rho)
            })
            .collect()
    }

    pub fn far_x(&self, t: T, k: i32, alpha: T) -> Vec<T> {
        let half = self.far_fraction * t.abs() * T::lit(2.0).powf(T::of_i32(k) * alpha);
        let n = self.points.max(2);
        (0..n)
            .map(|i| -half + (half + half) * T::of_usize(i) / T::of_usize(n - 1))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct DecayScan<T> {
    pub k: i32,
    pub alpha: T,
    pub stationary: Vec<KernelSample<T>>,
    pub far: Vec<KernelSample<T>>,
    pub stationary_fit: Result<LinearFit<T>>,
    pub far_fit: Result<LinearFit<T>>,
}

fn fit_usable<T: Real>(rows: &[KernelSample<T>]) -> Result<LinearFit<T>> {
    let (t, y): (Vec<T>, Vec<T>) = rows.iter().filter(|r| r.usable()).map(|r| (r.t, r.sup_abs)).unzip();
    if t.len() < MIN_FIT_POINTS {
        return Err(Error::FitDegenerate { need: MIN_FIT_POINTS, got: t.len() });
    }
    log_log_fit(&t, &y)
}

/// Slopes of `sup_x|K(t,x)|` against `t` in the stationary window and in the
/// far window. Far-window samples lost in quadrature noise are dropped
/// before fitting.
pub fn kernel_decay_scan<T: Real>(
    spec: &SymbolSpec<T>,
    k: i32,
    t_list: &[T],
    policy: &WindowPolicy<T>,
) -> Result<DecayScan<T>> {
    if t_list.len() < 8 {
        return Err(Error::TooFewSamples { need: 8, got: t_list.len() });
    }
    if t_list.iter().any(|t| !(*t > T::zero())) {
        return Err(Error::Domain("times must be positive".into()));
    }
    let ratio = t_list[1] / t_list[0];
    let geometric = t_list
        .windows(2)
        .all(|w| ((w[1] / w[0]) / ratio - T::one()).abs() < T::lit(1e-6));
    if !geometric || ratio <= T::one() {
        return Err(Error::Precondition("t_list must be increasing and geometric".into()));
    }
    let alpha = spec.stated_classification(k).0 .0;
    let stationary: Vec<KernelSample<T>> = t_list
        .iter()
        .map(|&t| kernel_sample(spec, k, t, policy.stationary_x(spec, k, t)))
        .collect::<Result<_>>()?;
    let far: Vec<KernelSample<T>> = t_list
        .iter()
        .map(|&t| kernel_sample(spec, k, t, policy.far_x(t, k, alpha)))
        .collect::<Result<_>>()?;
    let stationary_fit = fit_usable(&stationary);
    let far_fit = fit_usable(&far);
    Ok(DecayScan { k, alpha, stationary, far, stationary_fit, far_fit })
}

/// `n` geometric points from `lo` to `hi`.
pub fn geometric_times<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let q = (hi / lo).ln() / T::of_usize(n.max(2) - 1);
    (0..n).map(|i| lo * (q * T::of_usize(i)).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscint::{oscillatory_integral, Flat};
    use crate::symbol::SymbolKind;

    #[test]
    fn origin_is_mass_of_chi0_sq() {
        let g = SymbolSpec::<f64>::gp();
        let k = kernel_k(&g, 0, 0.0, 0.0).unwrap();
        let m = oscillatory_integral(&Flat, &chi0_sq, support(), 1e-12).unwrap();
        assert!(k.re > 0.0 && k.im.abs() < 1e-14);
        assert!((k.re - m.re).abs() < 1e-12);
    }

    #[test]
    fn reflection_is_conjugation() {
        let g = SymbolSpec::<f64>::gp();
        for (t, x) in [(3.0, 1.5), (40.0, -120.0), (0.7, 9.0)] {
            let a = kernel_k(&g, 1, t, x).unwrap();
            let b = kernel_k(&g, 1, -t, -x).unwrap();
            assert!((a - b.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn schrodinger_stationary_slope() {
        let s = SymbolSpec::<f64>::new(SymbolKind::Schrodinger, &[2.0]).unwrap();
        let t = geometric_times(10.0, 1000.0, 8);
        let scan = kernel_decay_scan(&s, 0, &t, &WindowPolicy::default()).unwrap();
        let f = scan.stationary_fit.unwrap();
        assert!((f.slope + 0.5).abs() < 0.05, "{}", f.slope);
    }

    #[test]
    fn scan_preconditions() {
        let g = SymbolSpec::<f64>::gp();
        let p = WindowPolicy::default();
        assert!(kernel_decay_scan(&g, 0, &[1.0, 2.0, 4.0], &p).is_err());
        let bad: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        assert!(kernel_decay_scan(&g, 0, &bad, &p).is_err());
    }
}
