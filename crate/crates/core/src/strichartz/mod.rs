//! Dyadic Strichartz constants: exact predictions from the piecewise laws,
//! and measurements of the free GP flow on band-localized data.

mod measure;
mod predict;

pub use measure::{
    default_window, grid_for_band, measure_constant, measure_constant_on, MixedNormResult, Profile, TimePolicy,
    DEFAULT_SAMPLES, MAX_POINTS, TAIL_LIMIT, WINDOW_CAP,
};
pub use predict::{predict_constant, predict_gp_general, Exponent, Law, Regime, StrichartzPrediction};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::Result;
use crate::fit::{linear_fit, LinearFit};
use crate::scalar::Real;

pub const SLOPE_TOL: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `k ≥ 0`
    High,
    /// `k < 0`
    Low,
}

#[derive(Clone, Debug)]
pub struct ScanCell<T> {
    pub k: i32,
    pub q: Exponent,
    pub r: Exponent,
    pub result: Result<MixedNormResult<T>>,
}

#[derive(Clone, Debug)]
pub struct SlopeCheck<T> {
    pub q: Exponent,
    pub r: Exponent,
    pub side: Side,
    pub ks: Vec<i32>,
    /// Least-squares slope of `log₂ measured` against `k`.
    pub fit: Result<LinearFit<T>>,
    /// `θ` for this side, if every cell sits in one regime.
    pub theta: Option<f64>,
    /// `max ratio / min ratio` over the sweep.
    pub ratio_spread: T,
}

impl<T: Real> SlopeCheck<T> {
    pub fn passes(&self, tol: T) -> bool {
        match (&self.fit, self.theta) {
            (Ok(f), Some(th)) => (f.slope - T::lit(th)).abs() <= tol,
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanReport<T> {
    pub cells: Vec<ScanCell<T>>,
    pub slopes: Vec<SlopeCheck<T>>,
}

/// Measures every `(k, q, r)` cell in parallel and fits `log₂ measured`
/// against `k` per `(q, r)`, separately over `k ≥ 0` and `k < 0`. Failed
/// cells stay in the table and are left out of the fits.
pub fn scan<T: Real>(ks: &[i32], qr: &[(Exponent, Exponent)], profile: Profile, policy: &TimePolicy<T>) -> ScanReport<T> {
    let jobs: Vec<(i32, Exponent, Exponent)> = qr.iter().flat_map(|&(q, r)| ks.iter().map(move |&k| (k, q, r))).collect();
    let cells: Vec<ScanCell<T>> = jobs
        .par_iter()
        .map(|&(k, q, r)| ScanCell { k, q, r, result: measure_constant(k, q, r, profile, policy) })
        .collect();
    let mut slopes = Vec::new();
    for &(q, r) in qr {
        for side in [Side::High, Side::Low] {
            let on_side = |k: i32| (k >= 0) == (side == Side::High);
            let rows: Vec<&MixedNormResult<T>> = cells
                .iter()
                .filter(|c| c.q == q && c.r == r && on_side(c.k))
                .filter_map(|c| c.result.as_ref().ok())
                .collect();
            if rows.is_empty() {
                continue;
            }
            let ks: Vec<i32> = rows.iter().map(|m| m.k).collect();
            let x: Vec<T> = ks.iter().map(|&k| T::of_i32(k)).collect();
            let y: Vec<T> = rows.iter().map(|m| m.measured.log2()).collect();
            let fit = linear_fit(&x, &y);
            let thetas: Vec<Ratio<i64>> = ks
                .iter()
                .filter_map(|&k| predict_constant::<Ratio<i64>>(Law::Gp, k, q, r, 3).ok().map(|p| p.theta))
                .collect();
            let theta = match thetas.split_first() {
                Some((first, rest)) if thetas.len() == ks.len() && rest.iter().all(|t| t == first) => first.to_f64(),
                _ => None,
            };
            let lo = rows.iter().map(|m| m.ratio).fold(T::infinity(), T::min);
            let hi = rows.iter().map(|m| m.ratio).fold(T::zero(), T::max);
            slopes.push(SlopeCheck { q, r, side, ks, fit, theta, ratio_spread: hi / lo });
        }
    }
    ScanReport { cells, slopes }
}
