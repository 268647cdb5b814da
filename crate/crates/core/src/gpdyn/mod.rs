//! Gross–Pitaevskii dynamics for `u = ψ − 1` and its normal form.

mod convention;
mod evolve;
mod random;
mod verify;

use num_complex::Complex;
use std::sync::Arc;

pub use convention::{SignConvention, ALTERNATE, C_N5C_CHOICES, FROZEN};
pub use evolve::{energy, evolve, evolve_with, fit_mass_growth, linear_propagator, EnergyReport, Scheme, BLOW_UP};
pub use random::{random_state, Scale};
pub use verify::{
    richardson_ratios, scattering_profile, select_sign_convention, verify_m_derivation, verify_m_derivation_multi,
    verify_quintic_cancellation, MDerivationReport, ProfileKind, ProfileSeries, QuinticReport, ScatteringReport,
};

use crate::error::{Error, Result};
use crate::field::{Amplification, Multiplier, RadialField, RadialGrid, Rep};
use crate::scalar::Real;

/// Small-ball radius (in H¹) inside which the normal form is inverted.
pub const DELTA_T: f64 = 0.1;

/// `(u₁, u₂)` at time `t`; both stored as physical fields with zero imaginary part.
#[derive(Clone, Debug)]
pub struct GPState<T: Real> {
    pub t: T,
    pub u1: RadialField<T>,
    pub u2: RadialField<T>,
}

/// The normal-form variable `m = m₁ + i m₂` at time `t`.
#[derive(Clone, Debug)]
pub struct MState<T: Real> {
    pub t: T,
    pub m: RadialField<T>,
}

impl<T: Real> GPState<T> {
    pub fn new(t: T, u1: RadialField<T>, u2: RadialField<T>) -> Result<Self> {
        u1.check_grid(&u2)?;
        Ok(Self { t, u1: u1.to_physical().re(), u2: u2.to_physical().re() })
    }

    pub fn zero(grid: &Arc<RadialGrid<T>>) -> Self {
        let z = RadialField::zeros(grid, Rep::Physical);
        Self { t: T::zero(), u1: z.clone(), u2: z }
    }

    /// Splits a complex `u` into real and imaginary parts.
    pub fn from_complex(t: T, u: &RadialField<T>) -> Self {
        let p = u.to_physical();
        Self { t, u1: p.re(), u2: p.im() }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        self.u1.grid()
    }

    /// `u = u₁ + i u₂`
    pub fn u(&self) -> RadialField<T> {
        &self.u1 + &self.u2.times_i()
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { t: self.t, u1: self.u1.scale(c), u2: self.u2.scale(c) }
    }

    pub fn h1_norm(&self) -> T {
        let a = self.u1.h1_norm();
        let b = self.u2.h1_norm();
        (a * a + b * b).sqrt()
    }

    pub fn l2_norm(&self) -> T {
        self.u().l2_norm()
    }

    /// Largest imaginary part of `u₁`, `u₂` relative to their size.
    pub fn imag_leak(&self) -> T {
        let leak = |f: &RadialField<T>| {
            let p = f.to_physical();
            let im = p.data().iter().fold(T::zero(), |m, v| m.max(v.im.abs()));
            im / p.max_abs().max(T::min_positive_value())
        };
        leak(&self.u1).max(leak(&self.u2))
    }
}

impl<T: Real> MState<T> {
    pub fn m1(&self) -> RadialField<T> {
        self.m.to_physical().re()
    }

    pub fn m2(&self) -> RadialField<T> {
        self.m.to_physical().im()
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        self.m.grid()
    }
}

/// Product rule used when assembling nonlinear terms.
#[derive(Clone, Copy)]
pub(crate) struct Products {
    pub dealias: bool,
}

impl Products {
    pub fn mul<T: Real>(&self, a: &RadialField<T>, b: &RadialField<T>) -> RadialField<T> {
        if self.dealias {
            a.product_dealiased(b)
        } else {
            a.product(b)
        }
    }

    pub fn mul3<T: Real>(&self, a: &RadialField<T>, b: &RadialField<T>, c: &RadialField<T>) -> RadialField<T> {
        self.mul(&self.mul(a, b), c)
    }
}

const EXACT: Products = Products { dealias: false };
const DEALIASED: Products = Products { dealias: true };

fn inv2md<T: Real>(f: &RadialField<T>) -> RadialField<T> {
    f.apply(Multiplier::Inv2mD)
}

/// `(2 + Δ)/(2 − Δ)` has symbol `(2 − ρ²)/(2 + ρ²)`.
fn two_plus_over_two_minus<T: Real>(f: &RadialField<T>) -> RadialField<T> {
    let two = T::lit(2.0);
    f.map_spectrum_real(|p| (two - p * p) / (two + p * p))
}

fn r_with<T: Real>(s: &GPState<T>, pr: Products) -> RadialField<T> {
    let a = pr.mul(&s.u1, &s.u1).to_frequency();
    let b = pr.mul(&s.u2, &s.u2).to_frequency();
    let two = T::lit(2.0);
    let pa = a.map_spectrum_real(|p| -(two - p * p) / (two * (two + p * p)));
    let pb = b.map_spectrum_real(|p| p * p / (two * (two + p * p)));
    (&pa + &pb).to_physical()
}

/// `R = −Δu₂²/(2(2−Δ)) − (2+Δ)u₁²/(2(2−Δ))`, evaluated in frequency space.
pub fn compute_r<T: Real>(state: &GPState<T>) -> RadialField<T> {
    r_with(state, EXACT)
}

/// The other closed form of `R`, `|u|²/2 − (2u₁² + u₂²)/(2−Δ)`.
pub fn compute_r_direct<T: Real>(state: &GPState<T>) -> RadialField<T> {
    let a = state.u1.product(&state.u1);
    let b = state.u2.product(&state.u2);
    let half = (&a + &b).scale(T::lit(0.5));
    let q = inv2md(&(&a.scale(T::lit(2.0)) + &b));
    (&half - &q).to_physical()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum N31Form {
    /// `2(Ru₂ + (2/(2−Δ))[((2u₁²+u₂²)/(2−Δ))Δu₂])`
    Defining,
    /// The rearrangement with two derivatives on every `u₂³` term.
    Expanded,
}

fn n31_with<T: Real>(s: &GPState<T>, form: N31Form, pr: Products) -> RadialField<T> {
    let (u1, u2) = (&s.u1, &s.u2);
    let two = T::lit(2.0);
    let lap_u2 = u2.laplacian().to_physical();
    match form {
        N31Form::Defining => {
            let r = r_with(s, pr);
            let q = inv2md(&(&pr.mul(u1, u1).scale(two) + &pr.mul(u2, u2))).to_physical();
            let inner = inv2md(&pr.mul(&q, &lap_u2)).scale(two);
            (&pr.mul(&r, u2) + &inner).scale(two).to_physical()
        }
        N31Form::Expanded => {
            let du2 = u2.radial_derivative();
            let w = inv2md(&pr.mul(u2, u2));
            let lw = w.laplacian().to_physical();
            let dlw = lw.radial_derivative();
            let a = &(&pr.mul3(u2, &du2, &du2).scale(-two) + &pr.mul(&lw, &lap_u2).scale(T::lit(3.0)))
                + &pr.mul(&dlw, &du2).scale(two);
            let t1 = inv2md(&a);
            let q1 = inv2md(&pr.mul(u1, u1).scale(two)).to_physical();
            let t2 = inv2md(&pr.mul(&q1, &lap_u2)).scale(T::lit(4.0));
            let t3 = pr.mul(&two_plus_over_two_minus(&pr.mul(u1, u1)).to_physical(), u2);
            (&(&t1 + &t2) - &t3).to_physical()
        }
    }
}

/// The cubic term `N₃¹(u)` in either of its two algebraically equal forms.
pub fn compute_n31<T: Real>(state: &GPState<T>, form: N31Form) -> RadialField<T> {
    n31_with(state, form, EXACT)
}

/// `N_order(m, u)`, pseudospectral with the 2/3 rule on every product.
pub fn compute_nonlinearity<T: Real>(
    order: u8,
    m: &MState<T>,
    u: &GPState<T>,
    conv: &SignConvention,
) -> Result<RadialField<T>> {
    m.m.check_grid(&u.u1)?;
    let pr = DEALIASED;
    let (u1, u2) = (&u.u1, &u.u2);
    let m1 = m.m1();
    let two = T::lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    // (2i/(2−Δ))[·]
    let i2 = |f: &RadialField<T>| inv2md(f).scale_complex(i * two);
    let out = match order {
        2 => {
            let a = pr.mul(&m1, &m1).apply(Multiplier::U);
            let lap_u2 = u2.laplacian().to_physical();
            let b = &pr.mul(&m1, &lap_u2).scale(T::lit(-3.0)) - &pr.mul(&m1.radial_derivative(), &u2.radial_derivative()).scale(two);
            &a + &i2(&b)
        }
        3 => {
            let r = r_with(u, pr);
            let a = pr.mul(&m1, &r).scale(two).apply(Multiplier::U);
            let n31 = n31_with(u, N31Form::Defining, pr).times_i();
            let b = &pr.mul3(u1, &m1, u2).scale(T::lit(4.0))
                + &pr.mul3(&m1, &m1, u2).scale(T::lit(conv.s_n3 as f64));
            &(&a + &n31) + &i2(&b)
        }
        4 => {
            let r = r_with(u, pr);
            let abs2 = &pr.mul(u1, u1) + &pr.mul(u2, u2);
            let a = (&pr.mul(&r, &r) - &pr.mul(&abs2, &abs2).scale(T::lit(0.25))).apply(Multiplier::U);
            let b = &pr.mul3(u1, &r, u2).scale(T::lit(4.0))
                + &pr.mul3(u2, &m1, &r).scale(T::lit(2.0 * conv.s_n4 as f64));
            &a + &i2(&b)
        }
        5 => {
            let r = r_with(u, pr);
            let abs2 = &pr.mul(u1, u1) + &pr.mul(u2, u2);
            let b = &pr.mul3(u2, &r, &r).scale(-two)
                + &pr.mul3(u2, &abs2, &abs2).scale(T::lit(conv.c_n5c));
            inv2md(&b).scale_complex(i * T::lit(conv.s_n5 as f64))
        }
        _ => return Err(Error::Domain(format!("nonlinearity order {order} not in 2..=5"))),
    };
    Ok(out.to_physical())
}

/// `Σ_{j=2}^{5} N_j(m, u)`
pub fn total_nonlinearity<T: Real>(m: &MState<T>, u: &GPState<T>, conv: &SignConvention) -> Result<RadialField<T>> {
    let mut acc = compute_nonlinearity(2, m, u, conv)?;
    for order in 3..=5 {
        acc = &acc + &compute_nonlinearity(order, m, u, conv)?;
    }
    Ok(acc)
}

/// `m = u₁ + (2u₁² + u₂²)/(2−Δ) + iUu₂`
pub fn transform_t<T: Real>(state: &GPState<T>) -> MState<T> {
    let (u1, u2) = (&state.u1, &state.u2);
    let q = inv2md(&(&u1.product(u1).scale(T::lit(2.0)) + &u2.product(u2)));
    let m = &(u1 + &q) + &u2.apply(Multiplier::U).times_i();
    MState { t: state.t, m: m.to_physical() }
}

/// The scattering variable of the radial theorem, `u₁ + (2−Δ)⁻¹u₂² + iUu₂`.
pub fn transform_t_variant<T: Real>(state: &GPState<T>) -> MState<T> {
    let (u1, u2) = (&state.u1, &state.u2);
    let m = &(u1 + &inv2md(&u2.product(u2))) + &u2.apply(Multiplier::U).times_i();
    MState { t: state.t, m: m.to_physical() }
}

/// The diagonal variable `v = u₁ + iUu₂` of the linear flow.
pub fn linear_variable<T: Real>(state: &GPState<T>) -> MState<T> {
    let m = &state.u1 + &state.u2.apply(Multiplier::U).times_i();
    MState { t: state.t, m: m.to_physical() }
}

/// Result of [`inverse_t`].
#[derive(Clone, Debug)]
pub struct Inverted<T: Real> {
    pub state: GPState<T>,
    pub iterations: usize,
    /// Set when `U⁻¹m₂` amplified low-frequency content.
    pub amplification: Option<Amplification<T>>,
}

/// Inverts [`transform_t`]: `u₂ = U⁻¹m₂`, then `u₁ ← m₁ − (2u₁² + u₂²)/(2−Δ)` from `u₁ = m₁`
/// until successive iterates differ by at most `tol` in H¹.
pub fn inverse_t<T: Real>(m: &MState<T>, tol: T, max_iter: usize) -> Result<Inverted<T>> {
    let m1 = m.m1();
    let (u2, amplification) = m.m2().apply_checked(Multiplier::UInv);
    let u2 = u2.to_physical().re();
    let u2sq = u2.product(&u2);
    let mut u1 = m1.clone();
    let mut last = T::infinity();
    let mut growth = 0;
    for it in 1..=max_iter {
        let next = (&m1 - &inv2md(&(&u1.product(&u1).scale(T::lit(2.0)) + &u2sq))).to_physical().re();
        let upd = (&next - &u1).h1_norm();
        u1 = next;
        if !upd.is_finite() || upd > T::lit(1e6) {
            return Err(Error::NonContraction { iterations: it, last_update: upd.to_f64_lossy() });
        }
        if upd <= tol {
            let state = GPState { t: m.t, u1, u2 };
            return Ok(Inverted { state, iterations: it, amplification });
        }
        growth = if upd >= last { growth + 1 } else { 0 };
        if growth >= 5 {
            return Err(Error::NonContraction { iterations: it, last_update: upd.to_f64_lossy() });
        }
        last = upd;
    }
    Err(Error::NonContraction { iterations: max_iter, last_update: last.to_f64_lossy() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<RadialGrid<f64>> {
        RadialGrid::<f64>::new(512, 40.0).unwrap()
    }

    fn state(amp: f64) -> GPState<f64> {
        random_state(&grid(), 7, 0, Scale::Sup(amp))
    }

    #[test]
    fn zero_state_gives_zero_everything() {
        let z = GPState::zero(&grid());
        assert_eq!(compute_r(&z).max_abs(), 0.0);
        assert_eq!(compute_n31(&z, N31Form::Expanded).max_abs(), 0.0);
        let m = transform_t(&z);
        assert_eq!(m.m.max_abs(), 0.0);
        for order in 2..=5 {
            assert_eq!(compute_nonlinearity(order, &m, &z, &FROZEN).unwrap().max_abs(), 0.0);
        }
        let inv = inverse_t(&m, 1e-14, 10).unwrap();
        assert_eq!(inv.state.h1_norm(), 0.0);
    }

    #[test]
    fn r_closed_forms_agree() {
        let s = state(0.3);
        let a = compute_r(&s);
        let b = compute_r_direct(&s);
        assert!(a.rel_l2_distance(&b) < 1e-10);
    }

    #[test]
    fn n31_forms_agree() {
        let s = state(0.3);
        let a = compute_n31(&s, N31Form::Defining);
        let b = compute_n31(&s, N31Form::Expanded);
        assert!(a.rel_l2_distance(&b) < 1e-9, "{}", a.rel_l2_distance(&b));
    }

    #[test]
    fn n2_without_u2_is_u_of_m1_squared() {
        let s = state(0.2);
        let s = GPState { u2: RadialField::zeros(s.grid(), Rep::Physical), ..s };
        let m = transform_t(&s);
        let n2 = compute_nonlinearity(2, &m, &s, &FROZEN).unwrap();
        let m1 = m.m1();
        let expect = m1.product_dealiased(&m1).apply(Multiplier::U);
        assert!(n2.rel_l2_distance(&expect) < 1e-13);
    }

    #[test]
    fn transform_restrictions_and_bound() {
        let s = state(0.2);
        let s0 = GPState { u2: RadialField::zeros(s.grid(), Rep::Physical), ..s.clone() };
        let m = transform_t(&s0);
        assert!(m.m2().max_abs() < 1e-15);
        let (u1, u2) = (&s.u1, &s.u2);
        let m = transform_t(&s);
        let lin = &(u1 + &u2.apply(Multiplier::U).times_i());
        let lhs = (&m.m - lin).l2_norm();
        let rhs = (&u1.product(u1).scale(2.0) + &u2.product(u2)).l2_norm() / 2.0;
        assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn inverse_round_trip_and_divergence() {
        let s = random_state(&grid(), 3, 1, Scale::H1(0.05));
        let back = inverse_t(&transform_t(&s), 1e-14, 200).unwrap().state;
        let err = (&back.u() - &s.u()).h1_norm();
        assert!(err < 1e-10, "{err}");
        let bump = RadialField::from_real_fn(s.grid(), |r| (-r * r / 2.0).exp());
        let big = MState { t: 0.0, m: bump.scale(10.0 / bump.h1_norm()) };
        assert!(matches!(inverse_t(&big, 1e-12, 200), Err(Error::NonContraction { .. })));
    }

    #[test]
    fn bad_order_is_rejected() {
        let z = GPState::zero(&grid());
        assert!(compute_nonlinearity(6, &transform_t(&z), &z, &FROZEN).is_err());
    }
}
