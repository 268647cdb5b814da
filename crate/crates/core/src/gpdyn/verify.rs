use num_complex::Complex;

use super::{
    evolve_with, linear_variable, total_nonlinearity, transform_t, transform_t_variant, GPState, MState, Scheme,
    SignConvention,
};
use crate::error::{Error, Result};
use crate::field::{Multiplier, RadialField};
use crate::scalar::{Exact, Real};

/// Keeps `|dt|·H(ρ_max)` of the reference RK4 micro-steps at or below this.
const MICRO_STEP_STIFFNESS: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MDerivationReport<T> {
    pub h: T,
    /// `‖ẇ_h + iΣN‖ / ‖ΣN‖`
    pub residual: T,
    pub rhs_norm: T,
}

/// Centered difference of `w(t) = e^{itH}T(u(t))` at `t = 0`, with `u(±h)`
/// from sub-stepped RK4 on the full system.
fn interaction_derivative<T: Real>(state: &GPState<T>, h: T) -> Result<RadialField<T>> {
    let p = state.grid().rho_max();
    let hmax = p * (T::lit(2.0) + p * p).sqrt();
    let nsub = (h * hmax / T::lit(MICRO_STEP_STIFFNESS)).ceil().to_f64_lossy().max(1.0) as usize;
    let dt = h / T::of_usize(nsub);
    let plus = evolve_with(state, dt, nsub, Scheme::Rk4Full, |_, _| {})?;
    let minus = evolve_with(state, -dt, nsub, Scheme::Rk4Full, |_, _| {})?;
    let wp = transform_t(&plus).m.apply(Multiplier::Propagator(-h));
    let wm = transform_t(&minus).m.apply(Multiplier::Propagator(h));
    Ok((&wp - &wm).scale(T::one() / (h + h)))
}

/// Residuals of `i∂ₜm − Hm = ΣN` for several conventions over a list of
/// differencing steps; `out[c][j]` belongs to `convs[c]` and `hs[j]`.
pub fn verify_m_derivation_multi<T: Real>(
    state: &GPState<T>,
    convs: &[SignConvention],
    hs: &[T],
) -> Result<Vec<Vec<MDerivationReport<T>>>> {
    let m = transform_t(state);
    let rhs: Vec<RadialField<T>> = convs
        .iter()
        .map(|c| total_nonlinearity(&m, state, c))
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::with_capacity(hs.len()); convs.len()];
    let i = Complex::new(T::zero(), T::one());
    for &h in hs {
        let d = interaction_derivative(state, h)?;
        for (c, n) in rhs.iter().enumerate() {
            let rhs_norm = n.l2_norm_spectral();
            let abs = (&d + &n.scale_complex(i)).l2_norm_spectral();
            let residual = if rhs_norm > T::zero() { abs / rhs_norm } else { abs };
            out[c].push(MDerivationReport { h, residual, rhs_norm });
        }
    }
    Ok(out)
}

/// Relative residual of the m-equation at differencing step `h`. With the
/// right convention it decays like `h²`; with a wrong one it plateaus.
pub fn verify_m_derivation<T: Real>(state: &GPState<T>, conv: &SignConvention, h: T) -> Result<MDerivationReport<T>> {
    Ok(verify_m_derivation_multi(state, std::slice::from_ref(conv), &[h])?.remove(0).remove(0))
}

/// Richardson ratios `res(h_j)/res(h_{j+1})`.
pub fn richardson_ratios<T: Real>(reports: &[MDerivationReport<T>]) -> Vec<T> {
    reports.windows(2).map(|w| w[0].residual / w[1].residual).collect()
}

/// Tries all sixteen conventions and returns the single one whose residual
/// shows second-order decay (every ratio within `4 ± 0.5`) over `hs`
/// (successive halvings).
pub fn select_sign_convention<T: Real>(state: &GPState<T>, hs: &[T]) -> Result<SignConvention> {
    let all = SignConvention::all();
    let res = verify_m_derivation_multi(state, &all, hs)?;
    let winners: Vec<SignConvention> = all
        .iter()
        .zip(&res)
        .filter(|(_, r)| {
            richardson_ratios(r)
                .iter()
                .all(|&q| (q - T::lit(4.0)).abs() <= T::lit(0.5))
        })
        .map(|(c, _)| *c)
        .collect();
    match winners.as_slice() {
        [one] => Ok(*one),
        _ => Err(Error::Precondition(format!(
            "{} conventions show second-order decay, expected exactly one",
            winners.len()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuinticReport<E> {
    /// Quintic coefficient reached through the critical cubic term after substitution.
    pub n3_path: E,
    /// Quintic coefficient of the critical quintic term.
    pub n5_path: E,
    pub sum: E,
}

/// Zero-frequency limit of `ü₂ = (2−Δ)(Δu₂ + u₂((2+Δ)/(2−Δ))(u₂²/(2−Δ))²) − ½u₂⁵`
/// at constant amplitude `c`, evaluated with `Δ → 0` in exact arithmetic when `E` allows.
pub fn verify_quintic_cancellation<E: Exact>(c: E) -> Result<QuinticReport<E>> {
    if c < E::int(0) || c > E::int(1) {
        return Err(Error::Domain(format!("amplitude {c:?} outside [0, 1]")));
    }
    let two = E::int(2);
    let lap = E::int(0);
    let a = two - lap;
    let b = two + lap;
    let w = c * c / a;
    let n3_path = a * (c * (b / a) * w * w);
    let n5_path = -(c * c * c * c * c) / two;
    Ok(QuinticReport { n3_path, n5_path, sum: n3_path + n5_path })
}

/// Which transform defines the profile `s(t) = e^{itH}·(transformed u)(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// `u₁ + (2u₁²+u₂²)/(2−Δ) + iUu₂`
    NormalForm,
    /// `u₁ + (2−Δ)⁻¹u₂² + iUu₂`
    Variant,
    /// `u₁ + iUu₂`
    Linear,
}

impl ProfileKind {
    fn apply<T: Real>(&self, s: &GPState<T>) -> MState<T> {
        match self {
            ProfileKind::NormalForm => transform_t(s),
            ProfileKind::Variant => transform_t_variant(s),
            ProfileKind::Linear => linear_variable(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProfileSeries<T> {
    pub kind: ProfileKind,
    /// `‖s(t_i) − s(t_j)‖_{H¹}`
    pub distances: Vec<Vec<T>>,
    /// `sup_{i,j ≥ i₀} ‖s(t_i) − s(t_j)‖_{H¹}` for `i₀ = 0..len−1`.
    pub cauchy: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct ScatteringReport<T> {
    pub times: Vec<T>,
    pub profiles: Vec<ProfileSeries<T>>,
    /// `‖(2−Δ)⁻¹u₁²(t)‖_{H¹}`
    pub u1sq_decay: Vec<T>,
    /// `‖m(t₀)‖_{H¹}` for the normal-form transform.
    pub m0_h1: T,
}

impl<T: Real> ScatteringReport<T> {
    pub fn profile(&self, kind: ProfileKind) -> Option<&ProfileSeries<T>> {
        self.profiles.iter().find(|p| p.kind == kind)
    }
}

/// Pulls each sampled state back by the free flow and measures how far the
/// resulting profiles are from one another.
pub fn scattering_profile<T: Real>(trajectory: &[GPState<T>], kinds: &[ProfileKind]) -> Result<ScatteringReport<T>> {
    if trajectory.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: trajectory.len() });
    }
    let times: Vec<T> = trajectory.iter().map(|s| s.t).collect();
    let n = trajectory.len();
    let mut profiles = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let s: Vec<RadialField<T>> = trajectory
            .iter()
            .map(|st| kind.apply(st).m.apply(Multiplier::Propagator(-st.t)))
            .collect();
        let mut d = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = (&s[i] - &s[j]).h1_norm();
                d[i][j] = x;
                d[j][i] = x;
            }
        }
        // sup over i, j ≥ i₀, accumulated from the end
        let mut cauchy = vec![T::zero(); n - 1];
        let mut acc = T::zero();
        for i0 in (0..n - 1).rev() {
            for &x in &d[i0][i0 + 1..n] {
                acc = acc.max(x);
            }
            cauchy[i0] = acc;
        }
        profiles.push(ProfileSeries { kind, distances: d, cauchy });
    }
    let u1sq_decay = trajectory
        .iter()
        .map(|s| s.u1.product(&s.u1).apply(Multiplier::Inv2mD).h1_norm())
        .collect();
    let m0_h1 = transform_t(&trajectory[0]).m.h1_norm();
    Ok(ScatteringReport { times, profiles, u1sq_decay, m0_h1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RadialGrid;
    use crate::gpdyn::{evolve, random_state, Scale, FROZEN};
    use num_rational::Ratio;

    #[test]
    fn quintic_cancels_exactly() {
        let r = verify_quintic_cancellation(Ratio::<i64>::from_integer(1)).unwrap();
        assert_eq!(r.n3_path, Ratio::new(1, 2));
        assert_eq!(r.n5_path, Ratio::new(-1, 2));
        assert_eq!(r.sum, Ratio::from_integer(0));
        let z = verify_quintic_cancellation(0.0f64).unwrap();
        assert_eq!(z.sum, 0.0);
        let h = verify_quintic_cancellation(Ratio::<i64>::new(1, 3)).unwrap();
        assert_eq!(h.n3_path, Ratio::new(1, 486));
        assert!(verify_quintic_cancellation(2.0f64).is_err());
    }

    #[test]
    fn zero_state_has_zero_residual() {
        let g = RadialGrid::<f64>::new(128, 20.0).unwrap();
        let r = verify_m_derivation(&GPState::zero(&g), &FROZEN, 0.01).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn linear_profile_is_constant() {
        let g = RadialGrid::<f64>::new(256, 40.0).unwrap();
        let s = random_state(&g, 1, 0, Scale::Sup(0.01));
        let traj = evolve(&s, 0.5, 20, Scheme::Linear, 1).unwrap();
        let rep = scattering_profile(&traj, &[ProfileKind::Linear]).unwrap();
        let p = rep.profile(ProfileKind::Linear).unwrap();
        assert!(p.cauchy[0] <= 1e-12 * rep.m0_h1, "{}", p.cauchy[0]);
        assert!(p.cauchy.windows(2).all(|w| w[1] <= w[0]));
    }
}
