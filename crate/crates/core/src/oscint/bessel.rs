use std::fmt;

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::quadrature::{oscillatory_integral, Flat, FnPhase, MIN_TOL};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Catalog range.
pub const NU_MAX: f64 = 200.0;
pub const R_MAX: f64 = 1e5;
/// `ντ + r sinh τ` at which the exponential tail of Schläfli's integral is cut.
const TAIL_EXPONENT: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BesselMethod {
    Series,
    Schlafli,
    /// Hankel's large-argument expansion.
    Asymptotic,
}

impl fmt::Display for BesselMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BesselMethod::Series => "series",
            BesselMethod::Schlafli => "schlafli",
            BesselMethod::Asymptotic => "asymptotic",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselEval<T> {
    pub nu: T,
    pub r: T,
    pub value: T,
    pub method: BesselMethod,
}

fn check_range<T: Real>(nu: T, r: T) -> Result<()> {
    if !(nu >= T::zero() && nu <= T::lit(NU_MAX)) {
        return Err(Error::Domain(format!("order {nu} outside [0, {NU_MAX}]")));
    }
    if !(r >= T::zero() && r <= T::lit(R_MAX)) {
        return Err(Error::Domain(format!("argument {r} outside [0, {R_MAX:e}]")));
    }
    Ok(())
}

/// `Σ (−1)^m (r/2)^{2m+ν} / (m! Γ(m+ν+1))`, each term formed in log space.
fn series<T: Real>(nu: T, r: T) -> T {
    if r == T::zero() {
        return if nu == T::zero() { T::one() } else { T::zero() };
    }
    let l2 = (r / T::lit(2.0)).ln();
    let mut log_term = nu * l2 - T::lit(ln_gamma(nu.to_f64_lossy() + 1.0));
    let mut sum = T::zero();
    let mut peak = T::neg_infinity();
    let mut m = 0usize;
    loop {
        let term = log_term.exp();
        sum = if m.is_multiple_of(2) { sum + term } else { sum - term };
        peak = peak.max(log_term);
        let mf = T::of_usize(m + 1);
        log_term = log_term + l2 + l2 - mf.ln() - (mf + nu).ln();
        m += 1;
        // terms decrease once m(m+ν) > (r/2)²
        let past = mf * (mf + nu) > (r * r / T::lit(4.0));
        if past && log_term < peak + T::epsilon().ln() - T::lit(2.0) {
            break;
        }
        if m > 10_000 {
            break;
        }
    }
    sum
}

/// `J_ν^M(r) = (1/2π)∫_{−π}^{π} e^{i(r sin x − νx)} dx` (real part) and
/// `J_ν^E(r) = (sin νπ/π)∫₀^∞ e^{−ντ − r sinh τ} dτ`.
pub fn schlafli_parts<T: Real>(nu: T, r: T) -> Result<(T, T)> {
    check_range(nu, r)?;
    if r <= T::zero() {
        return Err(Error::Domain("Schläfli's integral needs r > 0".into()));
    }
    let phase = FnPhase { f: move |x: T| r * x.sin() - nu * x, df: move |x: T| r * x.cos() - nu, d2f: move |x: T| -r * x.sin() };
    let pi = T::PI();
    let m = oscillatory_integral(&phase, &|_| T::one(), (-pi, pi), T::lit(MIN_TOL))?.re / (pi + pi);
    let s = (nu * pi).sin();
    let e = if s.abs() < T::epsilon() * nu.max(T::one()) {
        T::zero()
    } else {
        let tau_max = (T::lit(TAIL_EXPONENT) / r).asinh();
        let amp = move |tau: T| (-nu * tau - r * tau.sinh()).exp();
        s / pi * oscillatory_integral(&Flat, &amp, (T::zero(), tau_max), T::lit(MIN_TOL))?.re
    };
    Ok((m, e))
}

fn hankel<T: Real>(nu: T, r: T) -> Result<T> {
    let mu = T::lit(4.0) * nu * nu;
    let eight_r = T::lit(8.0) * r;
    let mut p = T::zero();
    let mut q = T::zero();
    let mut term = T::one();
    let mut last = T::infinity();
    let mut k = 0usize;
    loop {
        let mag = term.abs();
        if mag > last {
            break;
        }
        match k % 4 {
            0 => p = p + term,
            1 => q = q + term,
            2 => p = p - term,
            _ => q = q - term,
        }
        if mag < T::epsilon() * T::lit(1e-2) {
            last = mag;
            break;
        }
        last = mag;
        let odd = T::of_usize(2 * k + 1);
        term = term * (mu - odd * odd) / (T::of_usize(k + 1) * eight_r);
        k += 1;
        if k > 200 {
            break;
        }
    }
    if last > T::lit(1e-12) {
        return Err(Error::Domain(format!("Hankel expansion does not converge at ν={nu}, r={r}")));
    }
    let chi = r - (nu / T::lit(2.0) + T::lit(0.25)) * T::PI();
    Ok((T::lit(2.0) / (T::PI() * r)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// `J_ν(r)` by a named method.
pub fn bessel_j_with<T: Real>(nu: T, r: T, method: BesselMethod) -> Result<BesselEval<T>> {
    check_range(nu, r)?;
    let value = match method {
        BesselMethod::Series => series(nu, r),
        BesselMethod::Schlafli => {
            let (m, e) = schlafli_parts(nu, r)?;
            m - e
        }
        BesselMethod::Asymptotic => {
            if r <= T::zero() {
                return Err(Error::Domain("asymptotic expansion needs r > 0".into()));
            }
            hankel(nu, r)?
        }
    };
    if !value.is_finite() {
        return Err(Error::NonFinite(format!("J_{nu}({r})")));
    }
    Ok(BesselEval { nu, r, value, method })
}

/// `J_ν(r)`: power series for `r ≤ max(10, ν/2)`, Schläfli's integral beyond.
pub fn bessel_j<T: Real>(nu: T, r: T) -> Result<BesselEval<T>> {
    let method = if r <= T::lit(10.0).max(nu / T::lit(2.0)) { BesselMethod::Series } else { BesselMethod::Schlafli };
    bessel_j_with(nu, r, method)
}

/// `J_ν′(r) = νJ_ν(r)/r − J_{ν+1}(r)`.
pub fn bessel_jp<T: Real>(nu: T, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Domain("derivative recurrence needs r > 0".into()));
    }
    let j = bessel_j(nu, r)?.value;
    let j1 = bessel_j_with(nu + T::one(), r, pick(nu + T::one(), r))?.value;
    Ok(nu * j / r - j1)
}

fn pick<T: Real>(nu: T, r: T) -> BesselMethod {
    // ν+1 may leave the catalog at ν = 200; the method choice is unaffected
    if r <= T::lit(10.0).max(nu / T::lit(2.0)) {
        BesselMethod::Series
    } else {
        BesselMethod::Schlafli
    }
}

/// `r^{−1/3}(1 + r^{−1/3}|r−ν|)^{−1/4}`.
pub fn uniform_envelope<T: Real>(nu: T, r: T) -> T {
    let c = r.cbrt().recip();
    c * (T::one() + c * (r - nu).abs()).powf(T::lit(-0.25))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeRow<T> {
    pub nu: T,
    pub r: T,
    pub j: T,
    pub jp: T,
    pub envelope: T,
    /// `(|J_ν| + |J_ν′|)/envelope`
    pub ratio: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeReport<T> {
    pub rows: Vec<EnvelopeRow<T>>,
    pub sup_ratio: T,
    pub argmax: (T, T),
}

/// Sup over the grid of `(|J_ν| + |J_ν′|)` against the uniform decay envelope.
pub fn bessel_uniform_decay_check<T: Real>(nu_list: &[T], r_grid: &[T]) -> Result<EnvelopeReport<T>> {
    let cells: Vec<(T, T)> = nu_list.iter().flat_map(|&nu| r_grid.iter().map(move |&r| (nu, r))).collect();
    let rows: Vec<EnvelopeRow<T>> = cells
        .par_iter()
        .map(|&(nu, r)| {
            let j = bessel_j(nu, r)?.value;
            let jp = bessel_jp(nu, r)?;
            let envelope = uniform_envelope(nu, r);
            Ok(EnvelopeRow { nu, r, j, jp, envelope, ratio: (j.abs() + jp.abs()) / envelope })
        })
        .collect::<Result<_>>()?;
    let (sup_ratio, argmax) = rows
        .iter()
        .fold((T::zero(), (T::zero(), T::zero())), |acc, row| if row.ratio > acc.0 { (row.ratio, (row.nu, row.r)) } else { acc });
    Ok(EnvelopeReport { rows, sup_ratio, argmax })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticDecomp<T> {
    pub nu: T,
    pub r: T,
    /// `θ(r) = (r²−ν²)^{1/2} − ν arccos(ν/r) − π/4`
    pub theta: T,
    /// `(2π)^{−1/2}(e^{iθ} + e^{−iθ})/(r²−ν²)^{1/4}`
    pub main: T,
    /// `J_ν(r) − main`
    pub h: T,
    /// `(ν²/(r²−ν²)^{7/4} + 1/r) on [ν+ν^{1/3}, 2ν]`, `1/r` beyond.
    pub envelope: T,
}

impl<T: Real> AsymptoticDecomp<T> {
    pub fn ratio(&self) -> T {
        self.h.abs() / self.envelope
    }
}

/// Splits `J_ν(r)` for `ν > 10`, `r > ν + ν^{1/3}` into the oscillatory main
/// term and the remainder `h(ν, r)`.
pub fn bessel_asymptotic_decomp<T: Real>(nu: T, r: T) -> Result<AsymptoticDecomp<T>> {
    if !(nu > T::lit(10.0)) {
        return Err(Error::Domain(format!("order {nu} must exceed 10")));
    }
    if !(r > nu + nu.cbrt()) {
        return Err(Error::Domain(format!("argument {r} must exceed ν + ν^(1/3)")));
    }
    let d2 = r * r - nu * nu;
    let theta = d2.sqrt() - nu * (nu / r).acos() - T::FRAC_PI_4();
    let main = (T::lit(2.0) / T::PI()).sqrt() * theta.cos() / d2.powf(T::lit(0.25));
    let j = bessel_j(nu, r)?.value;
    let envelope = if r <= nu + nu {
        nu * nu / d2.powf(T::lit(1.75)) + r.recip()
    } else {
        r.recip()
    };
    Ok(AsymptoticDecomp { nu, r, theta, main, h: j - main, envelope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_origin() {
        let e = bessel_j(0.0f64, 0.0).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.method, BesselMethod::Series);
        assert_eq!(bessel_j(2.5f64, 0.0).unwrap().value, 0.0);
    }

    #[test]
    fn half_integer_closed_form() {
        for r in [1.0f64, 10.0, 100.0] {
            let exact = (2.0 / (std::f64::consts::PI * r)).sqrt() * r.sin();
            let v = bessel_j(0.5, r).unwrap().value;
            assert!((v - exact).abs() < 1e-10, "r={r}: {v} vs {exact}");
        }
    }

    #[test]
    fn series_and_schlafli_agree() {
        let a = bessel_j_with(5.0f64, 12.0, BesselMethod::Series).unwrap().value;
        let b = bessel_j_with(5.0f64, 12.0, BesselMethod::Schlafli).unwrap().value;
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        // non-integer order exercises the exponential tail
        let a = bessel_j_with(2.3f64, 7.5, BesselMethod::Series).unwrap().value;
        let b = bessel_j_with(2.3f64, 7.5, BesselMethod::Schlafli).unwrap().value;
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn hankel_agrees_far_out() {
        let a = bessel_j_with(11.0f64, 800.0, BesselMethod::Asymptotic).unwrap().value;
        let b = bessel_j_with(11.0f64, 800.0, BesselMethod::Schlafli).unwrap().value;
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn out_of_range() {
        assert!(bessel_j(250.0f64, 1.0).is_err());
        assert!(bessel_j(1.0f64, 2e5).is_err());
        assert!(bessel_j(-1.0f64, 1.0).is_err());
    }

    #[test]
    fn turning_point_envelope() {
        let e = uniform_envelope(50.0f64, 50.0);
        assert!((e - 50f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        let rep = bessel_uniform_decay_check(&[50.0f64], &[50.0]).unwrap();
        assert!(rep.sup_ratio.is_finite() && rep.sup_ratio < 3.0);
    }

    #[test]
    fn amplitude_bound_past_twice_order() {
        for nu in [5.0f64, 20.0] {
            for i in 0..40 {
                let r = 2.0 * nu * 1.1f64.powi(i);
                let j = bessel_j(nu, r).unwrap().value;
                assert!(j.abs() <= 3.0 / r.sqrt());
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = bessel_asymptotic_decomp(20.0f64, 100.0).unwrap();
        assert!(d.h.abs() * 100.0 <= 5.0);
        let nu = 50.0f64;
        let d = bessel_asymptotic_decomp(nu, nu + 2.0 * nu.cbrt()).unwrap();
        assert!(d.ratio() <= 5.0, "{}", d.ratio());
        assert!(bessel_asymptotic_decomp(5.0f64, 100.0).is_err());
        assert!(bessel_asymptotic_decomp(20.0f64, 21.0).is_err());
    }
}
