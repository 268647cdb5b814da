use num_complex::Complex;

use super::GPState;
use crate::error::{Error, Result};
use crate::field::{norm, RadialField, Rep};
use crate::scalar::Real;

/// Any sample exceeding this magnitude aborts the evolution.
pub const BLOW_UP: f64 = 1e6;

/// RK4 is stable on the imaginary axis up to `|λ dt| = 2√2`.
const RK4_IMAG_LIMIT: f64 = 2.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Half pointwise nonlinear step, exact linear step, half nonlinear step.
    Strang,
    /// Classical RK4 on the full right-hand side.
    Rk4Full,
    /// Exact linear flow only.
    Linear,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Scheme::Strang),
            "rk4_full" | "rk4" => Ok(Scheme::Rk4Full),
            "linear" => Ok(Scheme::Linear),
            _ => Err(Error::Domain(format!("unknown scheme {s}"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Strang => "strang",
            Scheme::Rk4Full => "rk4_full",
            Scheme::Linear => "linear",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport<T> {
    pub e_total: T,
    /// `∫|∇u|²`
    pub e_kinetic: T,
    /// `∫(|u|² + 2 Re u)²/2`
    pub e_potential: T,
    /// `‖u‖_{L²}`
    pub l2_mass: T,
}

/// `E(u) = ∫|∇u|² + (|u|² + 2u₁)²/2`. Gradient term on the frequency side,
/// quartic term by the trapezoid rule.
pub fn energy<T: Real>(state: &GPState<T>) -> EnergyReport<T> {
    let grad2 = |f: &RadialField<T>| {
        let g = f.map_spectrum_real(|p| p).l2_norm_spectral();
        g * g
    };
    let e_kinetic = grad2(&state.u1) + grad2(&state.u2);
    let g = state.grid();
    let u1 = state.u1.to_physical();
    let u2 = state.u2.to_physical();
    let half = T::lit(0.5);
    let s = u1
        .data()
        .iter()
        .zip(u2.data())
        .zip(g.r())
        .fold(T::zero(), |acc, ((a, b), &r)| {
            let q = a.re * a.re + b.re * b.re + a.re + a.re;
            acc + q * q * half * r * r
        });
    let e_potential = T::lit(norm::SPHERE_FACTOR_SQ) * g.dr() * s;
    EnergyReport {
        e_total: e_kinetic + e_potential,
        e_kinetic,
        e_potential,
        l2_mass: state.l2_norm(),
    }
}

/// Exact linear flow: `v = u₁ + iUu₂ ↦ e^{−iτH}v`, applied as a rotation of
/// `(û₁, Uû₂)` in each mode.
pub fn linear_propagator<T: Real>(state: &GPState<T>, tau: T) -> GPState<T> {
    let a = state.u1.to_frequency();
    let b = state.u2.to_frequency();
    let two = T::lit(2.0);
    let mut na = Vec::with_capacity(a.data().len());
    let mut nb = Vec::with_capacity(a.data().len());
    for ((x, y), &p) in a.data().iter().zip(b.data()).zip(state.grid().rho()) {
        let q = (two + p * p).sqrt();
        let u = p / q;
        let (s, c) = (tau * p * q).sin_cos();
        na.push(*x * c + *y * (u * s));
        nb.push(*y * c - *x * (s / u));
    }
    let g = state.grid();
    let u1 = RadialField::from_data(g, Rep::Frequency, na).expect("same grid").to_physical();
    let u2 = RadialField::from_data(g, Rep::Frequency, nb).expect("same grid").to_physical();
    GPState { t: state.t + tau, u1, u2 }
}

/// Right side of the pointwise part: `(2u₁+|u|²)u₂`, `−(3u₁²+u₂²+|u|²u₁)`.
fn pointwise<T: Real>(a: T, b: T) -> (T, T) {
    let s = a * a + b * b;
    let two = T::lit(2.0);
    ((two * a + s) * b, -(T::lit(3.0) * a * a + b * b + s * a))
}

fn nonlinear_substep<T: Real>(state: &GPState<T>, h: T) -> GPState<T> {
    let u1 = state.u1.to_physical();
    let u2 = state.u2.to_physical();
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let two = T::lit(2.0);
    let (mut o1, mut o2) = (Vec::with_capacity(u1.data().len()), Vec::with_capacity(u1.data().len()));
    for (x, y) in u1.data().iter().zip(u2.data()) {
        let (a, b) = (x.re, y.re);
        let k1 = pointwise(a, b);
        let k2 = pointwise(a + half * h * k1.0, b + half * h * k1.1);
        let k3 = pointwise(a + half * h * k2.0, b + half * h * k2.1);
        let k4 = pointwise(a + h * k3.0, b + h * k3.1);
        let na = a + h * sixth * (k1.0 + two * k2.0 + two * k3.0 + k4.0);
        let nb = b + h * sixth * (k1.1 + two * k2.1 + two * k3.1 + k4.1);
        o1.push(Complex::new(na, T::zero()));
        o2.push(Complex::new(nb, T::zero()));
    }
    let g = state.grid();
    GPState {
        t: state.t,
        u1: RadialField::from_data(g, Rep::Physical, o1).expect("same grid"),
        u2: RadialField::from_data(g, Rep::Physical, o2).expect("same grid"),
    }
}

/// Full right side of the GP system, both components physical.
fn rhs<T: Real>(s: &GPState<T>) -> (RadialField<T>, RadialField<T>) {
    let two = T::lit(2.0);
    let lin1 = s.u2.map_spectrum_real(|p| p * p).to_physical();
    let lin2 = s.u1.map_spectrum_real(|p| -(two + p * p)).to_physical();
    let u1 = s.u1.to_physical();
    let u2 = s.u2.to_physical();
    let mut d1 = lin1.into_data();
    let mut d2 = lin2.into_data();
    for j in 0..d1.len() {
        let (n1, n2) = pointwise(u1.data()[j].re, u2.data()[j].re);
        d1[j] = Complex::new(d1[j].re + n1, T::zero());
        d2[j] = Complex::new(d2[j].re + n2, T::zero());
    }
    let g = s.grid();
    (
        RadialField::from_data(g, Rep::Physical, d1).expect("same grid"),
        RadialField::from_data(g, Rep::Physical, d2).expect("same grid"),
    )
}

fn rk4_step<T: Real>(s: &GPState<T>, dt: T) -> GPState<T> {
    let half = T::lit(0.5);
    let stage = |base: &GPState<T>, k: &(RadialField<T>, RadialField<T>), h: T| GPState {
        t: base.t + h,
        u1: &base.u1 + &k.0.scale(h),
        u2: &base.u2 + &k.1.scale(h),
    };
    let k1 = rhs(s);
    let k2 = rhs(&stage(s, &k1, half * dt));
    let k3 = rhs(&stage(s, &k2, half * dt));
    let k4 = rhs(&stage(s, &k3, dt));
    let w = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let comb = |a: &RadialField<T>, b: &RadialField<T>, c: &RadialField<T>, d: &RadialField<T>| {
        (&(&(a + &b.scale(two)) + &c.scale(two)) + d).scale(w)
    };
    GPState {
        t: s.t + dt,
        u1: &s.u1 + &comb(&k1.0, &k2.0, &k3.0, &k4.0),
        u2: &s.u2 + &comb(&k1.1, &k2.1, &k3.1, &k4.1),
    }
}

fn step<T: Real>(s: &GPState<T>, dt: T, scheme: Scheme) -> GPState<T> {
    match scheme {
        Scheme::Strang => {
            let h = dt * T::lit(0.5);
            let a = nonlinear_substep(s, h);
            let b = linear_propagator(&a, dt);
            nonlinear_substep(&b, h)
        }
        Scheme::Rk4Full => rk4_step(s, dt),
        Scheme::Linear => linear_propagator(s, dt),
    }
}

/// Steps `state` forward, calling `observe(step, state)` after the initial
/// state (step 0) and after every step.
pub fn evolve_with<T: Real>(
    state: &GPState<T>,
    dt: T,
    steps: usize,
    scheme: Scheme,
    mut observe: impl FnMut(usize, &GPState<T>),
) -> Result<GPState<T>> {
    if !dt.is_finite() {
        return Err(Error::Domain("dt must be finite".into()));
    }
    if scheme == Scheme::Rk4Full {
        let p = state.grid().rho_max();
        let hmax = p * (T::lit(2.0) + p * p).sqrt();
        if dt.abs() * hmax > T::lit(RK4_IMAG_LIMIT) {
            return Err(Error::Precondition(format!(
                "rk4_full unstable: |dt|·H(ρ_max) = {} > {RK4_IMAG_LIMIT}",
                dt.abs() * hmax
            )));
        }
    }
    let mut s = GPState { t: state.t, u1: state.u1.to_physical(), u2: state.u2.to_physical() };
    observe(0, &s);
    let limit = T::lit(BLOW_UP);
    let s0 = s.clone();
    for i in 1..=steps {
        // the free flow is closed-form in t; stepping it would only accumulate rounding
        s = if scheme == Scheme::Linear { linear_propagator(&s0, dt * T::of_usize(i)) } else { step(&s, dt, scheme) };
        let big = s.u1.max_abs().max(s.u2.max_abs());
        if !(big <= limit && s.u1.is_finite() && s.u2.is_finite()) {
            return Err(Error::BlowUp { step: i });
        }
        observe(i, &s);
    }
    Ok(s)
}

/// Evolves and records the state every `every` steps (and at step 0).
pub fn evolve<T: Real>(
    state: &GPState<T>,
    dt: T,
    steps: usize,
    scheme: Scheme,
    every: usize,
) -> Result<Vec<GPState<T>>> {
    let every = every.max(1);
    let mut out = Vec::with_capacity(steps / every + 1);
    evolve_with(state, dt, steps, scheme, |i, s| {
        if i % every == 0 {
            out.push(s.clone());
        }
    })?;
    Ok(out)
}

/// Smallest `C ≥ 0` with `‖u(t)‖ ≤ ‖u(0)‖e^{Ct}` over the samples.
pub fn fit_mass_growth<T: Real>(times: &[T], masses: &[T]) -> T {
    let (t0, m0) = match (times.first(), masses.first()) {
        (Some(&t), Some(&m)) if m > T::zero() => (t, m),
        _ => return T::zero(),
    };
    times
        .iter()
        .zip(masses)
        .filter(|(&t, _)| t > t0)
        .fold(T::zero(), |c, (&t, &m)| c.max((m / m0).ln() / (t - t0)))
}
