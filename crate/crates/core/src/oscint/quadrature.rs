use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Nodes per panel.
pub const GL_ORDER: usize = 24;
/// Smallest tolerance accepted by [`oscillatory_integral`].
pub const MIN_TOL: f64 = 1e-12;
/// Panel phase budget at level 0: `|ψ′|·w ≤ 4π`, two wavelengths per panel.
const PHASE_BUDGET: f64 = 4.0 * std::f64::consts::PI;
const BASE_PANELS: usize = 8;
const MAX_LEVEL: u32 = 6;
const ROOT_SCAN: usize = 512;

/// Real phase with its first two derivatives.
pub trait Phase<T> {
    fn value(&self, x: T) -> T;
    fn d1(&self, x: T) -> T;
    fn d2(&self, x: T) -> T;
}

/// Phase assembled from closures for `ψ`, `ψ′`, `ψ″`.
pub struct FnPhase<F, G, H> {
    pub f: F,
    pub df: G,
    pub d2f: H,
}

impl<T, F, G, H> Phase<T> for FnPhase<F, G, H>
where
    F: Fn(T) -> T,
    G: Fn(T) -> T,
    H: Fn(T) -> T,
{
    fn value(&self, x: T) -> T {
        (self.f)(x)
    }
    fn d1(&self, x: T) -> T {
        (self.df)(x)
    }
    fn d2(&self, x: T) -> T {
        (self.d2f)(x)
    }
}

/// `λ·φ`.
pub struct Scaled<'a, T, P: ?Sized> {
    pub lambda: T,
    pub phase: &'a P,
}

impl<T: Real, P: Phase<T> + ?Sized> Phase<T> for Scaled<'_, T, P> {
    fn value(&self, x: T) -> T {
        self.lambda * self.phase.value(x)
    }
    fn d1(&self, x: T) -> T {
        self.lambda * self.phase.d1(x)
    }
    fn d2(&self, x: T) -> T {
        self.lambda * self.phase.d2(x)
    }
}

/// The zero phase.
pub struct Flat;

impl<T: Real> Phase<T> for Flat {
    fn value(&self, _: T) -> T {
        T::zero()
    }
    fn d1(&self, _: T) -> T {
        T::zero()
    }
    fn d2(&self, _: T) -> T {
        T::zero()
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Result of an adaptive evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    /// `|S_L − S_{L+1}|` between the last two levels.
    pub error: T,
    /// `∫|amp|`, the scale of rounding noise.
    pub l1: T,
    pub panels: usize,
}

impl<T: Real> QuadResult<T> {
    /// Magnitude below which the value is indistinguishable from noise.
    pub fn noise_floor(&self) -> T {
        let eps = T::epsilon() * T::lit(64.0) * T::of_usize(self.panels).sqrt();
        self.error + eps * self.l1
    }
}

/// Zeros of `ψ′` inside `(a, b)`, located by a scan and bisection.
pub fn stationary_points<T: Real, P: Phase<T> + ?Sized>(phase: &P, a: T, b: T) -> Vec<T> {
    let n = ROOT_SCAN;
    let h = (b - a) / T::of_usize(n);
    let mut out = Vec::new();
    let mut xl = a;
    let mut fl = phase.d1(a);
    for i in 1..=n {
        let xr = if i == n { b } else { a + h * T::of_usize(i) };
        let fr = phase.d1(xr);
        if fl == T::zero() && i > 1 {
            out.push(xl);
        } else if fl * fr < T::zero() {
            let (mut lo, mut hi, mut flo) = (xl, xr, fl);
            for _ in 0..80 {
                let mid = (lo + hi) / T::lit(2.0);
                let fm = phase.d1(mid);
                if fm * flo <= T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push((lo + hi) / T::lit(2.0));
        }
        xl = xr;
        fl = fr;
    }
    out
}

fn panel_sum<T: Real, P, A>(phase: &P, amp: &A, lo: T, hi: T, rule: &(Vec<f64>, Vec<f64>)) -> (Complex<T>, T)
where
    P: Phase<T> + ?Sized,
    A: Fn(T) -> T + ?Sized,
{
    let half = (hi - lo) / T::lit(2.0);
    let mid = (hi + lo) / T::lit(2.0);
    let mut s = Complex::new(T::zero(), T::zero());
    let mut l1 = T::zero();
    for (&x, &w) in rule.0.iter().zip(&rule.1) {
        let y = mid + half * T::lit(x);
        let a = amp(y) * T::lit(w);
        if a != T::zero() {
            s = s + Complex::from_polar(a, phase.value(y));
            l1 = l1 + a.abs();
        }
    }
    (s * half, l1 * half)
}

fn level_sum<T: Real, P, A>(phase: &P, amp: &A, breaks: &[T], level: u32) -> (Complex<T>, T, usize)
where
    P: Phase<T> + ?Sized,
    A: Fn(T) -> T + ?Sized,
{
    let rule = default_rule();
    let refine = T::of_usize(1usize << (2 * level));
    let budget = T::lit(PHASE_BUDGET) / refine;
    let per = T::of_usize(BASE_PANELS) * refine;
    let (a, b) = (breaks[0], breaks[breaks.len() - 1]);
    let w_max = (b - a) / per;
    let mut total = Complex::new(T::zero(), T::zero());
    let mut l1 = T::zero();
    let mut panels = 0;
    for seg in breaks.windows(2) {
        let (c, d) = (seg[0], seg[1]);
        let seg_max = w_max.min((d - c) / T::lit(2.0));
        let mut x = c;
        while x < d {
            let s = phase.d1(x).abs();
            let mut w = if s > T::zero() { (budget / s).min(seg_max) } else { seg_max };
            // the slope may grow across the panel
            for _ in 0..60 {
                let e = (x + w).min(d);
                if phase.d1(e).abs() * (e - x) <= budget || w <= T::epsilon() * (d - c) {
                    break;
                }
                w = w / T::lit(2.0);
            }
            let e = if d - (x + w) < w * T::lit(1e-3) { d } else { (x + w).min(d) };
            let (v, m) = panel_sum(phase, amp, x, e, rule);
            total = total + v;
            l1 = l1 + m;
            panels += 1;
            x = e;
        }
    }
    (total, l1, panels)
}

/// `∫_a^b e^{iψ(x)} amp(x) dx` with its refinement error estimate.
///
/// Each level sizes panels so that `|ψ′|·w ≤ 4π/4^L`, splits at the zeros of
/// `ψ′`, and applies a 24-point Gauss–Legendre rule per panel. The value at
/// level `L+1` (four times more panels) is accepted once it differs from
/// level `L` by at most `tol`.
pub fn oscillatory_integral_est<T, P, A>(phase: &P, amp: &A, interval: (T, T), tol: T) -> Result<QuadResult<T>>
where
    T: Real,
    P: Phase<T> + ?Sized,
    A: Fn(T) -> T + ?Sized,
{
    let (a, b) = interval;
    if !(tol.to_f64_lossy() >= MIN_TOL) {
        return Err(Error::Domain(format!("tol {tol} below {MIN_TOL:e}")));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("interval endpoints must be finite".into()));
    }
    if a == b {
        return Ok(QuadResult { value: Complex::new(T::zero(), T::zero()), error: T::zero(), l1: T::zero(), panels: 0 });
    }
    if b < a {
        let r = oscillatory_integral_est(phase, amp, (b, a), tol)?;
        return Ok(QuadResult { value: -r.value, ..r });
    }
    let mut breaks = vec![a];
    breaks.extend(stationary_points(phase, a, b));
    breaks.push(b);
    let (mut prev, _, _) = level_sum(phase, amp, &breaks, 0);
    let mut change = T::infinity();
    for level in 1..=MAX_LEVEL {
        let (next, l1, panels) = level_sum(phase, amp, &breaks, level);
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(Error::NonFinite("oscillatory integral".into()));
        }
        change = (next - prev).norm();
        if change <= tol {
            return Ok(QuadResult { value: next, error: change, l1, panels });
        }
        prev = next;
    }
    Err(Error::RefinementStall { change: change.to_f64_lossy(), tol: tol.to_f64_lossy() })
}

/// `∫_a^b e^{iψ(x)} amp(x) dx` to within `tol` of a 4×-refined estimate.
pub fn oscillatory_integral<T, P, A>(phase: &P, amp: &A, interval: (T, T), tol: T) -> Result<Complex<T>>
where
    T: Real,
    P: Phase<T> + ?Sized,
    A: Fn(T) -> T + ?Sized,
{
    Ok(oscillatory_integral_est(phase, amp, interval, tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(l: f64) -> FnPhase<impl Fn(f64) -> f64, impl Fn(f64) -> f64, impl Fn(f64) -> f64> {
        FnPhase { f: move |x: f64| l * x * x, df: move |x: f64| 2.0 * l * x, d2f: move |_| 2.0 * l }
    }

    #[test]
    fn rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(46)).sum();
        assert!((m - 2.0 / 47.0).abs() < 1e-14);
    }

    #[test]
    fn flat_unit() {
        let v = oscillatory_integral(&Flat, &|_: f64| 1.0, (0.0, 1.0), 1e-12).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn fresnel_against_brute_force() {
        let l = 100.0;
        let v = oscillatory_integral(&quad(l), &|_| 1.0, (0.0, 1.0), 1e-12).unwrap();
        // composite Simpson on a very fine grid
        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let mut s = Complex::new(0.0, 0.0);
        for i in 0..=n {
            let x = i as f64 * h;
            let c = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += Complex::from_polar(c, l * x * x);
        }
        s *= h / 3.0;
        assert!((v - s).norm() < 1e-8, "{v} vs {s}");
    }

    #[test]
    fn conjugation_symmetry() {
        let amp = |x: f64| (1.0 + x * x).recip();
        let p = quad(37.0);
        let m = Scaled { lambda: -1.0, phase: &p };
        let a = oscillatory_integral(&p, &amp, (-1.0, 2.0), 1e-12).unwrap();
        let b = oscillatory_integral(&m, &amp, (-1.0, 2.0), 1e-12).unwrap();
        assert!((a - b.conj()).norm() < 1e-13);
    }

    #[test]
    fn rejects_tiny_tol() {
        assert!(oscillatory_integral(&Flat, &|_: f64| 1.0, (0.0, 1.0), 1e-14).is_err());
    }

    #[test]
    fn halving_tol_is_self_consistent() {
        let p = quad(250.0);
        let amp = |x: f64| (-x * x).exp();
        let a = oscillatory_integral_est(&p, &amp, (-2.0, 3.0), 1e-8).unwrap();
        let b = oscillatory_integral_est(&p, &amp, (-2.0, 3.0), 5e-9).unwrap();
        assert!((a.value - b.value).norm() <= 1e-8);
    }

    #[test]
    fn finds_stationary_points() {
        let p = FnPhase { f: |x: f64| x.sin(), df: |x: f64| x.cos(), d2f: |x: f64| -x.sin() };
        let s = stationary_points(&p, -4.0, 4.0);
        assert_eq!(s.len(), 2);
        assert!((s[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}
