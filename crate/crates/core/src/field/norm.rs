//! Lebesgue, Sobolev and mixed space-time norms of radial fields.

use super::{Multiplier, RadialField};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `|S²| = 4π`; radial `L_x^r L_σ²` norms carry the factor `|S²|^{1/2}`.
pub const SPHERE_FACTOR_SQ: f64 = 4.0 * std::f64::consts::PI;

/// Minimum number of time samples accepted by the time integrals.
pub const MIN_TIME_SAMPLES: usize = 16;

const TAIL_FRACTION: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormKind<T> {
    /// `L^r(ℝ³)`; `r = ∞` allowed.
    Lebesgue { r: T },
    /// `L_x^r L_σ²`
    LebesgueSphere { r: T },
    /// `H^s = ⟨∇⟩^{-s}L²`
    Sobolev { s: T },
    /// `Ḣ^s = |∇|^{-s}L²`
    HomogSobolev { s: T },
    /// `H^s_p = ⟨∇⟩^{-s}L^p`
    SobolevLp { s: T, p: T },
    /// `Ḣ^s_p = |∇|^{-s}L^p`
    HomogSobolevLp { s: T, p: T },
    /// `L_t^q L_x^r`, optionally with the sphere factor.
    MixedLqLr { q: T, r: T, sphere: bool },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec<T> {
    pub kind: NormKind<T>,
    /// Time window for mixed norms.
    pub window: Option<(T, T)>,
}

fn valid_exponent<T: Real>(x: T) -> bool {
    x >= T::one() && !x.is_nan()
}

impl<T: Real> NormSpec<T> {
    pub fn new(kind: NormKind<T>) -> Result<Self> {
        Self::with_window(kind, None)
    }

    pub fn with_window(kind: NormKind<T>, window: Option<(T, T)>) -> Result<Self> {
        let ok = match kind {
            NormKind::Lebesgue { r } | NormKind::LebesgueSphere { r } => valid_exponent(r),
            NormKind::Sobolev { s } | NormKind::HomogSobolev { s } => s.is_finite(),
            NormKind::SobolevLp { s, p } | NormKind::HomogSobolevLp { s, p } => {
                s.is_finite() && valid_exponent(p)
            }
            NormKind::MixedLqLr { q, r, .. } => valid_exponent(q) && valid_exponent(r),
        };
        if !ok {
            return Err(Error::Domain(format!("invalid exponents in {kind:?}")));
        }
        let mixed = matches!(kind, NormKind::MixedLqLr { .. });
        match window {
            Some((a, b)) if !(b > a && a.is_finite() && b.is_finite()) => {
                return Err(Error::Domain("window must satisfy a < b".into()))
            }
            None if mixed => return Err(Error::Domain("mixed norm needs a time window".into())),
            Some(_) if !mixed => return Err(Error::Domain("window given for a spatial norm".into())),
            _ => {}
        }
        Ok(Self { kind, window })
    }
}

pub(crate) fn lebesgue<T: Real>(f: &RadialField<T>, r: T) -> T {
    let f = f.to_physical();
    if r.is_infinite() {
        return f.max_abs();
    }
    let g = f.grid();
    let s = f
        .data()
        .iter()
        .zip(g.r())
        .fold(T::zero(), |acc, (v, &x)| acc + v.norm().powf(r) * x * x);
    (T::lit(SPHERE_FACTOR_SQ) * s * g.dr()).powf(T::one() / r)
}

/// Spatial norm of `f`. Mixed kinds treat `f` as constant over the window.
pub fn norm<T: Real>(f: &RadialField<T>, spec: &NormSpec<T>) -> Result<T> {
    Ok(norm_checked(f, spec)?.0)
}

/// As [`norm`], also reporting whether the outermost sample exceeds
/// `1e-8` of the maximum (the profile is not decayed at `r_max`).
pub fn norm_checked<T: Real>(f: &RadialField<T>, spec: &NormSpec<T>) -> Result<(T, bool)> {
    let weighted = |m: Multiplier<T>| f.apply(m).to_physical();
    let (v, probe) = match spec.kind {
        NormKind::Lebesgue { r } => (lebesgue(f, r), f.to_physical()),
        NormKind::LebesgueSphere { r } => {
            (T::lit(SPHERE_FACTOR_SQ).sqrt() * lebesgue(f, r), f.to_physical())
        }
        NormKind::Sobolev { s } => {
            let w = weighted(Multiplier::HsWeight(s));
            (w.l2_norm_spectral(), w)
        }
        NormKind::HomogSobolev { s } => {
            let w = f.map_spectrum_real(|p| p.powf(s)).to_physical();
            (w.l2_norm_spectral(), w)
        }
        NormKind::SobolevLp { s, p } => {
            let w = weighted(Multiplier::HsWeight(s));
            (lebesgue(&w, p), w)
        }
        NormKind::HomogSobolevLp { s, p } => {
            let w = f.map_spectrum_real(|x| x.powf(s)).to_physical();
            (lebesgue(&w, p), w)
        }
        NormKind::MixedLqLr { q, r, sphere } => {
            let (a, b) = spec.window.expect("validated");
            let mut x = lebesgue(f, r);
            if sphere {
                x = x * T::lit(SPHERE_FACTOR_SQ).sqrt();
            }
            let t = if q.is_infinite() { T::one() } else { (b - a).powf(T::one() / q) };
            (x * t, f.to_physical())
        }
    };
    let last = probe.data().last().map(|z| z.norm()).unwrap_or(T::zero());
    let tail = last > T::lit(TAIL_FRACTION) * probe.max_abs();
    Ok((v, tail))
}

/// `‖v‖_{L^q(times)}` by the trapezoid rule; `q = ∞` is the maximum.
pub fn time_norm<T: Real>(times: &[T], values: &[T], q: T) -> Result<T> {
    if times.len() != values.len() {
        return Err(Error::Domain("times and values differ in length".into()));
    }
    if times.len() < MIN_TIME_SAMPLES {
        return Err(Error::TooFewSamples { need: MIN_TIME_SAMPLES, got: times.len() });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("times must be strictly increasing".into()));
    }
    if q.is_infinite() {
        return Ok(values.iter().fold(T::zero(), |m, &v| m.max(v)));
    }
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for i in 1..times.len() {
        acc = acc + (times[i] - times[i - 1]) * (values[i].powf(q) + values[i - 1].powf(q)) * half;
    }
    Ok(acc.powf(T::one() / q))
}

/// `‖u‖_{L_t^q L_x^r}` for samples uniformly spaced over `window`, endpoints included.
pub fn mixed_spacetime_norm<T: Real>(
    trajectory: &[RadialField<T>],
    q: T,
    r: T,
    window: (T, T),
) -> Result<T> {
    let n = trajectory.len();
    if n < MIN_TIME_SAMPLES {
        return Err(Error::TooFewSamples { need: MIN_TIME_SAMPLES, got: n });
    }
    if !(valid_exponent(q) && valid_exponent(r)) {
        return Err(Error::Domain(format!("invalid exponents q={q}, r={r}")));
    }
    let (a, b) = window;
    let dt = (b - a) / T::of_usize(n - 1);
    let times: Vec<T> = (0..n).map(|i| a + dt * T::of_usize(i)).collect();
    let vals: Vec<T> = trajectory.iter().map(|f| lebesgue(f, r)).collect();
    time_norm(&times, &vals, q)
}

/// Resolution spaces used for the normal-form variables and the nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// `L^∞L² ∩ L^{5/2}L⁵ ∩ L³L³ ∩ D⁻¹(L^∞L² ∩ L³L³)`
    X,
    /// `L^∞L³ ∩ L^{5/2}L⁵ ∩ L³L⁶ ∩ D⁻¹(L^∞L² ∩ L³L³)`
    Y,
    /// `L⁵L¹⁰ ∩ D⁻¹(L^∞L² ∩ L³L³)`
    Z,
    /// `L^{3/2}H¹_{3/2} + (L¹L² ∩ L^{3/2}Ḣ¹_{3/2})`, bounded above by the
    /// smaller of the two trivial splittings `F + 0` and `0 + F`.
    N,
}

fn sum_of<T: Real>(
    times: &[T],
    plain: &[RadialField<T>],
    plain_qr: &[(f64, f64)],
    deriv: &[RadialField<T>],
    deriv_qr: &[(f64, f64)],
) -> Result<T> {
    let mut acc = T::zero();
    for (fields, list) in [(plain, plain_qr), (deriv, deriv_qr)] {
        for &(q, r) in list {
            let vals: Vec<T> = fields.iter().map(|f| lebesgue(f, T::lit(r))).collect();
            acc = acc + time_norm(times, &vals, T::lit(q))?;
        }
    }
    Ok(acc)
}

/// Norm of a sampled trajectory in one of the [`Resolution`] spaces;
/// intersections are normed by the sum of their components.
pub fn resolution_norm<T: Real>(space: Resolution, times: &[T], traj: &[RadialField<T>]) -> Result<T> {
    let inf = f64::INFINITY;
    let d: Vec<_> = traj.iter().map(|f| f.apply(Multiplier::D).to_physical()).collect();
    let dpart = [(inf, 2.0), (3.0, 3.0)];
    match space {
        Resolution::X => sum_of(times, traj, &[(inf, 2.0), (2.5, 5.0), (3.0, 3.0)], &d, &dpart),
        Resolution::Y => sum_of(times, traj, &[(inf, 3.0), (2.5, 5.0), (3.0, 6.0)], &d, &dpart),
        Resolution::Z => sum_of(times, traj, &[(5.0, 10.0)], &d, &dpart),
        Resolution::N => {
            let w: Vec<_> = traj
                .iter()
                .map(|f| f.apply(Multiplier::HsWeight(T::one())).to_physical())
                .collect();
            let first = sum_of(times, &w, &[(1.5, 1.5)], &[], &[])?;
            let second = sum_of(times, traj, &[(1.0, 2.0)], &d, &[(1.5, 1.5)])?;
            Ok(first.min(second))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{RadialGrid, Rep};
    use std::f64::consts::PI;

    fn gaussian() -> RadialField<f64> {
        let g = RadialGrid::<f64>::new(1024, 30.0).unwrap();
        RadialField::from_real_fn(&g, |r| (-r * r / 2.0).exp())
    }

    #[test]
    fn lebesgue_norms_of_gaussian() {
        let f = gaussian();
        let l2 = norm(&f, &NormSpec::new(NormKind::Lebesgue { r: 2.0 }).unwrap()).unwrap();
        assert!((l2 - PI.powf(0.75)).abs() < 1e-12);
        // ∫e^{-r²/2·p} = (2π/p)^{3/2}
        let l4 = norm(&f, &NormSpec::new(NormKind::Lebesgue { r: 4.0 }).unwrap()).unwrap();
        assert!((l4 - (2.0 * PI / 4.0).powf(1.5).powf(0.25)).abs() < 1e-12);
        let linf = norm(&f, &NormSpec::new(NormKind::Lebesgue { r: f64::INFINITY }).unwrap()).unwrap();
        assert!((linf - (-f.grid().r()[0].powi(2) / 2.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn sobolev_h1_of_gaussian() {
        // ‖∇f‖² = (3/2)π^{3/2}
        let f = gaussian();
        let h1 = norm(&f, &NormSpec::new(NormKind::Sobolev { s: 1.0 }).unwrap()).unwrap();
        let exact = (PI.powf(1.5) * 2.5).sqrt();
        assert!((h1 - exact).abs() < 1e-10);
        let dh1 = norm(&f, &NormSpec::new(NormKind::HomogSobolev { s: 1.0 }).unwrap()).unwrap();
        assert!((dh1 - (PI.powf(1.5) * 1.5).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn spec_validation() {
        assert!(NormSpec::new(NormKind::Lebesgue { r: 0.5 }).is_err());
        assert!(NormSpec::new(NormKind::MixedLqLr { q: 2.0, r: 2.0, sphere: false }).is_err());
        assert!(NormSpec::with_window(NormKind::Lebesgue { r: 2.0 }, Some((0.0, 1.0))).is_err());
        assert!(NormSpec::with_window(
            NormKind::MixedLqLr { q: 2.0, r: 2.0, sphere: false },
            Some((1.0, 0.0))
        )
        .is_err());
    }

    #[test]
    fn constant_trajectory_norms() {
        let f = gaussian();
        let traj = vec![f.clone(); 33];
        let l5 = lebesgue(&f, 5.0);
        let v = mixed_spacetime_norm(&traj, 2.0, 5.0, (0.0, 4.0)).unwrap();
        assert!((v - 2.0 * l5).abs() < 1e-12);
        let w = mixed_spacetime_norm(&traj, f64::INFINITY, 2.0, (0.0, 4.0)).unwrap();
        assert!((w - f.l2_norm()).abs() < 1e-15);
        let spec = NormSpec::with_window(
            NormKind::MixedLqLr { q: f64::INFINITY, r: 2.0, sphere: false },
            Some((0.0, 4.0)),
        )
        .unwrap();
        assert!((norm(&f, &spec).unwrap() - f.l2_norm()).abs() < 1e-15);
    }

    #[test]
    fn too_few_time_samples() {
        let f = gaussian();
        let traj = vec![f; 15];
        assert!(matches!(
            mixed_spacetime_norm(&traj, 2.0, 2.0, (0.0, 1.0)),
            Err(Error::TooFewSamples { need: 16, got: 15 })
        ));
    }

    #[test]
    fn tail_flag() {
        let g = RadialGrid::<f64>::new(256, 10.0).unwrap();
        let slow = RadialField::from_real_fn(&g, |r| 1.0 / (1.0 + r));
        let spec = NormSpec::new(NormKind::Lebesgue { r: 2.0 }).unwrap();
        assert!(norm_checked(&slow, &spec).unwrap().1);
        let fast = RadialField::from_real_fn(&g, |r| (-r * r).exp());
        assert!(!norm_checked(&fast, &spec).unwrap().1);
        let _ = RadialField::<f64>::zeros(&g, Rep::Physical);
    }

    #[test]
    fn resolution_norms_are_positive_and_ordered() {
        let f = gaussian().scale(0.1);
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let traj: Vec<_> = times.iter().map(|&t| f.apply(Multiplier::Propagator(t))).collect();
        for s in [Resolution::X, Resolution::Y, Resolution::Z, Resolution::N] {
            let v = resolution_norm(s, &times, &traj).unwrap();
            assert!(v.is_finite() && v > 0.0, "{s:?}");
        }
    }
}
