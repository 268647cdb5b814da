use num_complex::Complex;

use super::RadialField;
use crate::scalar::Real;

/// Frequencies below this are treated as "near zero" by the `U⁻¹` check.
pub const RHO_CUT: f64 = 0.1;
/// Fraction of L² mass below [`RHO_CUT`] that triggers the amplification flag.
pub const UINV_MASS_FRACTION: f64 = 1e-3;

const ETA_FLAT: f64 = 1.25;
const ETA_EDGE: f64 = 1.6;

fn smooth_step<T: Real>(t: T) -> T {
    // C^∞ step built from exp(-1/t)
    let psi = |s: T| if s > T::zero() { (-T::one() / s).exp() } else { T::zero() };
    if t <= T::zero() {
        return T::zero();
    }
    if t >= T::one() {
        return T::one();
    }
    let a = psi(t);
    a / (a + psi(T::one() - t))
}

/// Even smooth bump: `η ≡ 1` on `|ξ| ≤ 5/4`, `η = 0` for `|ξ| ≥ 8/5`, decreasing in between.
pub fn eta<T: Real>(x: T) -> T {
    let x = x.abs();
    let a = T::lit(ETA_FLAT);
    let b = T::lit(ETA_EDGE);
    T::one() - smooth_step((x - a) / (b - a))
}

/// `χ_k(ξ) = η(ξ/2^k) − η(ξ/2^{k−1})`.
pub fn chi<T: Real>(k: i32, x: T) -> T {
    eta(x / T::pow2(k)) - eta(x / T::pow2(k - 1))
}

/// `χ_{≤k}(ξ) = η(ξ/2^k)`.
pub fn chi_le<T: Real>(k: i32, x: T) -> T {
    eta(x / T::pow2(k))
}

/// Bands `k` whose `χ_k` support meets `[lo, hi]`.
pub fn band_range<T: Real>(lo: T, hi: T) -> std::ops::RangeInclusive<i32> {
    let lo = lo.to_f64_lossy();
    let hi = hi.to_f64_lossy();
    let kmin = (lo / ETA_EDGE).log2().floor() as i32;
    let kmax = (hi / (ETA_FLAT / 2.0)).log2().ceil() as i32;
    kmin..=kmax
}

/// Diagonal Fourier multipliers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Multiplier<T> {
    /// `ρ/√(2+ρ²)`
    U,
    UInv,
    /// `ρ√(2+ρ²)`
    H,
    /// `1/(2+ρ²)`
    Inv2mD,
    Pk(i32),
    PLeK(i32),
    /// `|∇|`
    D,
    Laplacian,
    /// `(1+ρ²)^{s/2}`
    HsWeight(T),
    /// `e^{−iτH}`
    Propagator(T),
}

impl<T: Real> Multiplier<T> {
    pub fn symbol(&self, p: T) -> Complex<T> {
        let two = T::lit(2.0);
        let re = |x: T| Complex::new(x, T::zero());
        match *self {
            Multiplier::U => re(p / (two + p * p).sqrt()),
            Multiplier::UInv => re((two + p * p).sqrt() / p),
            Multiplier::H => re(p * (two + p * p).sqrt()),
            Multiplier::Inv2mD => re(T::one() / (two + p * p)),
            Multiplier::Pk(k) => re(chi(k, p)),
            Multiplier::PLeK(k) => re(chi_le(k, p)),
            Multiplier::D => re(p),
            Multiplier::Laplacian => re(-p * p),
            Multiplier::HsWeight(s) => re((T::one() + p * p).powf(s / two)),
            Multiplier::Propagator(tau) => {
                let ph = -tau * p * (two + p * p).sqrt();
                Complex::new(ph.cos(), ph.sin())
            }
        }
    }
}

/// Report attached to `U⁻¹` when low frequencies carry noticeable mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplification<T> {
    pub low_mass_fraction: T,
    /// Largest `1/U(ρ)` over the flagged modes.
    pub factor: T,
}

impl<T: Real> RadialField<T> {
    pub fn apply(&self, m: Multiplier<T>) -> Self {
        self.map_spectrum(|p| m.symbol(p))
    }

    /// Like [`apply`](Self::apply), additionally flagging low-frequency
    /// amplification for `U⁻¹`.
    pub fn apply_checked(&self, m: Multiplier<T>) -> (Self, Option<Amplification<T>>) {
        let out = self.apply(m);
        if m != Multiplier::UInv {
            return (out, None);
        }
        let f = self.to_frequency();
        let cut = T::lit(RHO_CUT);
        let mut low = T::zero();
        let mut total = T::zero();
        let mut factor = T::zero();
        for (v, &p) in f.data().iter().zip(self.grid().rho()) {
            let w = v.norm_sqr() * p * p;
            total = total + w;
            if p < cut {
                low = low + w;
                if w > T::zero() {
                    factor = factor.max(m.symbol(p).re);
                }
            }
        }
        let frac = if total > T::zero() { low / total } else { T::zero() };
        let flag = (frac > T::lit(UINV_MASS_FRACTION))
            .then_some(Amplification { low_mass_fraction: frac, factor });
        (out, flag)
    }
}
