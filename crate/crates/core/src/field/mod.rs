//! Radial complex fields on ℝ³ and their spectral calculus.

mod grid;
pub mod io;
mod multiplier;
pub mod norm;

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex;

pub use grid::RadialGrid;
pub use multiplier::{band_range, chi, chi_le, eta, Amplification, Multiplier, RHO_CUT, UINV_MASS_FRACTION};
pub use norm::{
    mixed_spacetime_norm, norm, norm_checked, resolution_norm, time_norm, NormKind, NormSpec, Resolution,
    SPHERE_FACTOR_SQ,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rep {
    Physical,
    Frequency,
}

/// Samples of a radial function, either `f(r_j)` or `f̂(ρ_m)`.
#[derive(Clone, Debug)]
pub struct RadialField<T: Real> {
    grid: Arc<RadialGrid<T>>,
    rep: Rep,
    data: Vec<Complex<T>>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

impl<T: Real> RadialField<T> {
    pub fn from_data(grid: &Arc<RadialGrid<T>>, rep: Rep, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != grid.n() {
            return Err(Error::Grid(format!(
                "expected {} samples, got {}",
                grid.n(),
                data.len()
            )));
        }
        Ok(Self { grid: grid.clone(), rep, data })
    }

    pub fn zeros(grid: &Arc<RadialGrid<T>>, rep: Rep) -> Self {
        Self { grid: grid.clone(), rep, data: vec![zero(); grid.n()] }
    }

    pub fn from_fn(grid: &Arc<RadialGrid<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let data = grid.r().iter().map(|&r| f(r)).collect();
        Self { grid: grid.clone(), rep: Rep::Physical, data }
    }

    pub fn from_real_fn(grid: &Arc<RadialGrid<T>>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, |r| Complex::new(f(r), T::zero()))
    }

    /// Builds a field from its frequency profile `f̂(ρ)`.
    pub fn from_spectrum(grid: &Arc<RadialGrid<T>>, f: impl Fn(T) -> Complex<T>) -> Self {
        let data = grid.rho().iter().map(|&p| f(p)).collect();
        Self { grid: grid.clone(), rep: Rep::Frequency, data }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<T>> {
        &self.grid
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `f̂(ρ) = (4π/ρ)∫ f(r) sin(ρr) r dr`, discretized as a type-I DST.
    pub fn forward(&self) -> Result<Self> {
        if self.rep != Rep::Physical {
            return Err(Error::Representation { expected: "physical" });
        }
        let g = &self.grid;
        let weighted: Vec<_> = self.data.iter().zip(g.r()).map(|(f, &r)| f * r).collect();
        let s = g.sine_sum(&weighted);
        let c = T::lit(4.0) * T::PI() * g.dr();
        let data = s.iter().zip(g.rho()).map(|(v, &p)| v * (c / p)).collect();
        Ok(Self { grid: g.clone(), rep: Rep::Frequency, data })
    }

    /// Exact discrete inverse of [`forward`](Self::forward).
    pub fn inverse(&self) -> Result<Self> {
        if self.rep != Rep::Frequency {
            return Err(Error::Representation { expected: "frequency" });
        }
        let g = &self.grid;
        let weighted: Vec<_> = self.data.iter().zip(g.rho()).map(|(f, &p)| f * p).collect();
        let s = g.sine_sum(&weighted);
        let c = g.drho() / (T::lit(2.0) * T::PI() * T::PI());
        let data = s.iter().zip(g.r()).map(|(v, &r)| v * (c / r)).collect();
        Ok(Self { grid: g.clone(), rep: Rep::Physical, data })
    }

    pub fn to_physical(&self) -> Self {
        match self.rep {
            Rep::Physical => self.clone(),
            Rep::Frequency => self.inverse().expect("rep checked"),
        }
    }

    pub fn to_frequency(&self) -> Self {
        match self.rep {
            Rep::Frequency => self.clone(),
            Rep::Physical => self.forward().expect("rep checked"),
        }
    }

    pub fn to_rep(&self, rep: Rep) -> Self {
        match rep {
            Rep::Physical => self.to_physical(),
            Rep::Frequency => self.to_frequency(),
        }
    }

    /// Multiplies the spectrum by `m(ρ)`; the result keeps the input's representation.
    pub fn map_spectrum(&self, m: impl Fn(T) -> Complex<T>) -> Self {
        let mut f = self.to_frequency();
        for (v, &p) in f.data.iter_mut().zip(self.grid.rho()) {
            *v = *v * m(p);
        }
        f.to_rep(self.rep)
    }

    /// Real-symbol variant of [`map_spectrum`](Self::map_spectrum).
    pub fn map_spectrum_real(&self, m: impl Fn(T) -> T) -> Self {
        self.map_spectrum(|p| Complex::new(m(p), T::zero()))
    }

    /// Pointwise map in physical space; returns a physical field.
    pub fn map_physical(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let mut out = self.to_physical();
        for v in out.data.iter_mut() {
            *v = f(*v);
        }
        out
    }

    /// Zeroes every mode above the 2/3 cutoff.
    pub fn dealias(&self) -> Self {
        let mut f = self.to_frequency();
        let cut = self.grid.dealias_cutoff();
        for v in f.data[cut..].iter_mut() {
            *v = zero();
        }
        f.to_rep(self.rep)
    }

    /// Physical-space product. Not dealiased.
    pub fn product(&self, other: &Self) -> Self {
        assert!(self.same_grid(other), "grid mismatch");
        let a = self.to_physical();
        let b = other.to_physical();
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
        Self { grid: self.grid.clone(), rep: Rep::Physical, data }
    }

    /// Product with the 2/3 rule applied to both factors and the result.
    pub fn product_dealiased(&self, other: &Self) -> Self {
        self.dealias().product(&other.dealias()).dealias().to_physical()
    }

    pub fn scale(&self, c: T) -> Self {
        self.scale_complex(Complex::new(c, T::zero()))
    }

    pub fn scale_complex(&self, c: Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            rep: self.rep,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn times_i(&self) -> Self {
        self.scale_complex(Complex::new(T::zero(), T::one()))
    }

    pub fn conj(&self) -> Self {
        // the radial transform has a real kernel, so conjugation commutes with it
        Self {
            grid: self.grid.clone(),
            rep: self.rep,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn re(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            rep: self.rep,
            data: self.data.iter().map(|v| Complex::new(v.re, T::zero())).collect(),
        }
    }

    pub fn im(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            rep: self.rep,
            data: self.data.iter().map(|v| Complex::new(v.im, T::zero())).collect(),
        }
    }

    /// `∂_r f` at the physical nodes, from `f = g/r` with `g` a sine series.
    pub fn radial_derivative(&self) -> Self {
        let g = &self.grid;
        let fhat = self.to_frequency();
        let f = self.to_physical();
        let w: Vec<_> = fhat.data.iter().zip(g.rho()).map(|(v, &p)| v * (p * p)).collect();
        let c = g.cosine_sum(&w);
        let s = g.drho() / (T::lit(2.0) * T::PI() * T::PI());
        let data = c
            .iter()
            .zip(&f.data)
            .zip(g.r())
            .map(|((gp, fv), &r)| (gp * s - fv) / r)
            .collect();
        Self { grid: g.clone(), rep: Rep::Physical, data }
    }

    pub fn laplacian(&self) -> Self {
        self.map_spectrum_real(|p| -p * p)
    }

    /// `|∇f| = |∂_r f|` as a physical field.
    pub fn grad_mag(&self) -> Self {
        self.radial_derivative().map_physical(|v| Complex::new(v.norm(), T::zero()))
    }

    /// `∇f·∇g = ∂_r f ∂_r g` for radial functions.
    pub fn grad_dot(&self, other: &Self) -> Self {
        self.radial_derivative().product(&other.radial_derivative())
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `‖f‖_{L²(ℝ³)}` from physical samples.
    pub fn l2_norm(&self) -> T {
        norm::lebesgue(&self.to_physical(), T::lit(2.0))
    }

    /// `‖f‖_{L²}` evaluated on the frequency side, `(2π)^{-3}∫|f̂|²dξ`.
    pub fn l2_norm_spectral(&self) -> T {
        let f = self.to_frequency();
        let g = &self.grid;
        let s = f
            .data
            .iter()
            .zip(g.rho())
            .fold(T::zero(), |acc, (v, &p)| acc + v.norm_sqr() * p * p);
        let two_pi = T::lit(2.0) * T::PI();
        (T::lit(4.0) * T::PI() * s * g.drho() / (two_pi * two_pi * two_pi)).sqrt()
    }

    /// `‖⟨∇⟩^s f‖_{L²}` evaluated on the frequency side.
    pub fn hs_norm(&self, s: T) -> T {
        self.map_spectrum_real(|p| (T::one() + p * p).powf(s / T::lit(2.0)))
            .l2_norm_spectral()
    }

    pub fn h1_norm(&self) -> T {
        self.hs_norm(T::one())
    }

    /// Relative L² distance `‖self − other‖/‖other‖`, or the absolute one when `other = 0`.
    pub fn rel_l2_distance(&self, other: &Self) -> T {
        let d = (self - other).l2_norm_spectral();
        let b = other.l2_norm_spectral();
        if b > T::zero() {
            d / b
        } else {
            d
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert!(self.same_grid(other), "grid mismatch");
        let b = other.to_rep(self.rep);
        let data = self.data.iter().zip(&b.data).map(|(&x, &y)| op(x, y)).collect();
        Self { grid: self.grid.clone(), rep: self.rep, data }
    }
}

impl<T: Real> Add for &RadialField<T> {
    type Output = RadialField<T>;
    fn add(self, rhs: Self) -> RadialField<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &RadialField<T> {
    type Output = RadialField<T>;
    fn sub(self, rhs: Self) -> RadialField<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Add for RadialField<T> {
    type Output = RadialField<T>;
    fn add(self, rhs: Self) -> RadialField<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for RadialField<T> {
    type Output = RadialField<T>;
    fn sub(self, rhs: Self) -> RadialField<T> {
        &self - &rhs
    }
}

impl<T: Real> Neg for &RadialField<T> {
    type Output = RadialField<T>;
    fn neg(self) -> RadialField<T> {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for &RadialField<T> {
    type Output = RadialField<T>;
    fn mul(self, c: T) -> RadialField<T> {
        self.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(n: usize, r_max: f64) -> RadialField<f64> {
        let g = RadialGrid::<f64>::new(n, r_max).unwrap();
        RadialField::from_real_fn(&g, |r| (-r * r / 2.0).exp())
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        let f = gaussian(1024, 30.0);
        let fh = f.forward().unwrap();
        let exact = RadialField::from_spectrum(f.grid(), |p| {
            Complex::new((2.0 * PI).powf(1.5) * (-p * p / 2.0).exp(), 0.0)
        });
        let err = (&fh - &exact).l2_norm_spectral() / exact.l2_norm_spectral();
        assert!(err < 1e-8, "{err}");
        assert!(fh.data().iter().all(|v| v.im.abs() < 1e-14));
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = RadialGrid::<f64>::new(256, 20.0).unwrap();
        let f = RadialField::from_fn(&g, |r| {
            Complex::new((1.0 + r) * (-r * r / 3.0).exp(), (r * 0.7).sin() * (-r).exp())
        });
        let back = f.forward().unwrap().inverse().unwrap();
        assert!(back.rel_l2_distance(&f) < 1e-12);
        let a = f.l2_norm();
        let b = f.l2_norm_spectral();
        assert!((a - b).abs() / a < 1e-12);
    }

    #[test]
    fn gaussian_l2_norm() {
        let f = gaussian(1024, 30.0);
        assert!((f.l2_norm() - PI.powf(0.75)).abs() < 1e-10);
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = RadialGrid::<f64>::new(64, 10.0).unwrap();
        let z = RadialField::zeros(&g, Rep::Physical);
        assert_eq!(z.forward().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn derivative_and_laplacian_of_gaussian() {
        let f = gaussian(1024, 30.0);
        let d = f.radial_derivative();
        let l = f.laplacian().to_physical();
        for (i, &r) in f.grid().r().iter().enumerate().take(300) {
            let e = (-r * r / 2.0).exp();
            assert!((d.data()[i].re + r * e).abs() < 1e-9, "r={r}");
            assert!((l.data()[i].re - (r * r - 3.0) * e).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn wrong_representation_is_an_error() {
        let f = gaussian(64, 10.0);
        assert!(f.inverse().is_err());
        assert!(f.forward().unwrap().forward().is_err());
    }

    #[test]
    fn f32_round_trip() {
        let g = RadialGrid::<f32>::new(128, 15.0).unwrap();
        let f = RadialField::from_real_fn(&g, |r| (-r * r / 2.0).exp());
        let back = f.forward().unwrap().inverse().unwrap();
        assert!(back.rel_l2_distance(&f) < 1e-5);
    }
}
