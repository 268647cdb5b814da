use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use num_rational::Ratio;

use super::predict::{predict_constant, Exponent, Law, StrichartzPrediction};
use crate::error::{Error, Result};
use crate::field::{chi, norm, time_norm, Multiplier, NormKind, NormSpec, RadialField, RadialGrid, SPHERE_FACTOR_SQ};
use crate::fit::log_log_fit;
use crate::scalar::Real;
use crate::symbol::SymbolSpec;

/// Largest grid a measurement may allocate.
pub const MAX_POINTS: usize = 1 << 17;
pub const MIN_POINTS: usize = 1024;
/// `T = 2^{10}·2^{−min(αk, 2k)}`, capped here.
pub const WINDOW_CAP: f64 = 1e4;
pub const DEFAULT_SAMPLES: usize = 512;
/// Tail share of the time integral above which a result is flagged.
pub const TAIL_LIMIT: f64 = 0.05;
/// Grid must reach this multiple of the band's outer edge `1.6·2^k`.
const SPECTRAL_MARGIN: f64 = 4.0;
const BAND_EDGE: f64 = 1.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Profile {
    /// `φ̂ = χ_k`
    BandIndicator,
    /// `φ̂ = χ_k·exp(−(ρ−2^k)²/(2σ²))`, `σ = 2^k/4`
    BandGaussian,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::BandIndicator => "band_indicator",
            Profile::BandGaussian => "band_gaussian",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "band_indicator" => Ok(Profile::BandIndicator),
            "band_gaussian" => Ok(Profile::BandGaussian),
            _ => Err(Error::Domain(format!("unknown profile `{s}`"))),
        }
    }
}

impl Profile {
    pub fn spectrum<T: Real>(&self, k: i32, rho: T) -> T {
        let c = chi(k, rho);
        match self {
            Profile::BandIndicator => c,
            Profile::BandGaussian => {
                let s = T::pow2(k);
                let z = (rho - s) / (s / T::lit(4.0));
                c * (-z * z / T::lit(2.0)).exp()
            }
        }
    }
}

/// Window and sampling for one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimePolicy<T> {
    /// Overrides the default window.
    pub window: Option<T>,
    /// Total samples; a quarter are linear, the rest log-spaced.
    pub samples: usize,
}

impl<T: Real> Default for TimePolicy<T> {
    fn default() -> Self {
        Self { window: None, samples: DEFAULT_SAMPLES }
    }
}

/// `2^{10}·2^{−min(αk, 2k)}`, capped at `10⁴`.
pub fn default_window<T: Real>(k: i32) -> T {
    let (alpha, _) = Law::<f64>::gp_exponents(k);
    let e = (alpha * k as f64).min(2.0 * k as f64);
    T::lit((1024.0 * (-e).exp2()).min(WINDOW_CAP))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedNormResult<T> {
    pub k: i32,
    pub q: Exponent,
    pub r: Exponent,
    pub window: T,
    pub profile: Profile,
    pub measured: T,
    pub predicted: T,
    pub ratio: T,
    /// Extrapolated share of the time integral beyond the window.
    pub tail_fraction: T,
    pub tail_flag: bool,
    pub grid_points: usize,
    pub samples: usize,
}

/// Smallest grid holding the band's spectrum and the wave front at `T`.
pub fn grid_for_band<T: Real>(k: i32, window: T) -> Result<(usize, T)> {
    let gp = SymbolSpec::<T>::gp();
    let edge = T::lit(BAND_EDGE) * T::pow2(k);
    let v_max = gp.omega1(edge);
    let r_max = T::lit(1.1) * v_max * window + T::lit(64.0) * T::pow2(-k);
    let need = (T::lit(SPECTRAL_MARGIN) * edge * r_max / T::PI()).to_f64_lossy();
    let n = (need.ceil() as usize).max(MIN_POINTS).next_power_of_two();
    if n > MAX_POINTS {
        return Err(Error::Grid(format!("band k={k} over window {window} needs n={n} > {MAX_POINTS}")));
    }
    Ok((n, r_max))
}

/// `128·(samples/512)` linear points up to `t_lin`, then log-spaced to `T`.
fn sample_times<T: Real>(k: i32, window: T, samples: usize) -> Vec<T> {
    let lin = samples / 4;
    let log = samples - lin;
    let t_lin = T::lit((-2.0 * k as f64).exp2()).min(window / T::lit(16.0));
    let mut t: Vec<T> = (0..lin).map(|i| t_lin * T::of_usize(i) / T::of_usize(lin)).collect();
    let q = (window / t_lin).ln() / T::of_usize(log - 1);
    t.extend((0..log).map(|i| t_lin * (q * T::of_usize(i)).exp()));
    t
}

/// `∫_T^∞` of a power law fitted to the last quarter of the samples;
/// infinite when the fitted decay is not integrable.
fn tail_estimate<T: Real>(times: &[T], f: &[T]) -> T {
    let m = (times.len() / 4).max(8).min(times.len());
    let ts = &times[times.len() - m..];
    let fs = &f[f.len() - m..];
    if fs.iter().any(|v| !(*v > T::zero())) {
        return T::zero();
    }
    match log_log_fit(ts, fs) {
        Ok(fit) if fit.slope < -T::one() => {
            let tt = *times.last().unwrap();
            *f.last().unwrap() * tt / (-fit.slope - T::one())
        }
        _ => T::infinity(),
    }
}

/// Measures `‖e^{−itH}φ‖_{L_t^qL_x^rL_σ²} / ‖φ‖_{L²}` for the band-`k`
/// profile on an automatically sized grid.
pub fn measure_constant<T: Real>(k: i32, q: Exponent, r: Exponent, profile: Profile, policy: &TimePolicy<T>) -> Result<MixedNormResult<T>> {
    let window = policy.window.unwrap_or_else(|| default_window(k));
    let (n, r_max) = grid_for_band(k, window)?;
    let grid = RadialGrid::new(n, r_max)?;
    measure_constant_on(&grid, k, q, r, profile, window, policy.samples)
}

/// As [`measure_constant`] on a caller-supplied grid.
///
/// `t ↦ ‖e^{−itH}φ‖` is even for real `φ̂`, so the time integral over `ℝ`
/// is twice the one over `[0, T]` plus the extrapolated tail.
pub fn measure_constant_on<T: Real>(
    grid: &Arc<RadialGrid<T>>,
    k: i32,
    q: Exponent,
    r: Exponent,
    profile: Profile,
    window: T,
    samples: usize,
) -> Result<MixedNormResult<T>> {
    if T::pow2(k + 1) > grid.rho_max() / T::lit(2.0) {
        return Err(Error::UnresolvedBand { k });
    }
    if samples < 32 {
        return Err(Error::TooFewSamples { need: 32, got: samples });
    }
    if !(window > T::zero()) {
        return Err(Error::Domain("window must be positive".into()));
    }
    let prediction: StrichartzPrediction<Ratio<i64>> = predict_constant(Law::Gp, k, q, r, 3)?;
    let phi = RadialField::from_spectrum(grid, |rho| Complex::new(profile.spectrum(k, rho), T::zero()));
    let l2 = phi.l2_norm_spectral();
    if !(l2 > T::zero()) {
        return Err(Error::UnresolvedBand { k });
    }
    let phi = phi.scale(l2.recip());
    let rr = T::lit(r.to_f64());
    let spec = NormSpec::new(NormKind::LebesgueSphere { r: rr })?;
    // exact radial reduction (4π)^{1/2−1/r}‖f‖_{L^r}, so that (∞, 2) is unitarity
    let reduce = T::lit(SPHERE_FACTOR_SQ).powf(-rr.recip());
    let times = sample_times(k, window, samples);
    let values: Vec<T> = times
        .iter()
        .map(|&t| Ok(norm(&phi.apply(Multiplier::Propagator(t)), &spec)? * reduce))
        .collect::<Result<_>>()?;
    let (measured, tail_fraction) = if q.is_infinite() {
        (values.iter().copied().fold(T::zero(), T::max), T::zero())
    } else {
        let qq = T::lit(q.to_f64());
        let body = time_norm(&times, &values, qq)?.powf(qq);
        let fq: Vec<T> = values.iter().map(|v| v.powf(qq)).collect();
        let tail = tail_estimate(&times, &fq);
        let total = body + if tail.is_finite() { tail } else { T::zero() };
        let frac = if tail.is_finite() { tail / (body + tail) } else { T::one() };
        ((T::lit(2.0) * total).powf(qq.recip()), frac)
    };
    let predicted = T::lit(prediction.constant());
    Ok(MixedNormResult {
        k,
        q,
        r,
        window,
        profile,
        measured,
        predicted,
        ratio: measured / predicted,
        tail_fraction,
        tail_flag: tail_fraction > T::lit(TAIL_LIMIT),
        grid_points: grid.n(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Exponent {
        s.parse().unwrap()
    }

    #[test]
    fn unitarity_line_is_one() {
        for k in [-2, 0, 3] {
            let m = measure_constant::<f64>(k, Exponent::INFINITY, e("2"), Profile::BandGaussian, &TimePolicy::default()).unwrap();
            assert!((m.measured - 1.0).abs() < 1e-12, "k={k}: {}", m.measured);
            assert!((m.ratio - 1.0).abs() < 1e-12);
            assert!(!m.tail_flag);
        }
    }

    #[test]
    fn unresolved_band_rejected() {
        let g = RadialGrid::<f64>::new(256, 50.0).unwrap();
        let err = measure_constant_on(&g, 4, e("2"), e("5"), Profile::BandIndicator, 1.0, 128).unwrap_err();
        assert_eq!(err, Error::UnresolvedBand { k: 4 });
    }

    #[test]
    fn window_policy() {
        assert_eq!(default_window::<f64>(0), 1024.0);
        assert_eq!(default_window::<f64>(3), 16.0);
        assert_eq!(default_window::<f64>(-1), 4096.0);
        assert_eq!(default_window::<f64>(-4), 1e4);
    }
}
