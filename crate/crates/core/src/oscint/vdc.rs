use super::quadrature::{oscillatory_integral, Phase, Scaled};
use crate::error::{Error, Result};
use crate::scalar::Real;

const CHECK_POINTS: usize = 1024;
const VDC_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct VdcReport<T> {
    pub k_order: u32,
    pub lambdas: Vec<T>,
    /// `|∫e^{iλφ}ψ|`
    pub integrals: Vec<T>,
    /// `λ^{−1/k}[|ψ(b)| + ∫|ψ′|]`
    pub bounds: Vec<T>,
    pub ratios: Vec<T>,
    pub max_ratio: T,
}

fn check_grid<T: Real>(a: T, b: T) -> impl Iterator<Item = T> {
    let h = (b - a) / T::of_usize(CHECK_POINTS);
    (0..=CHECK_POINTS).map(move |i| a + h * T::of_usize(i))
}

/// Van der Corput: compares `|∫_a^b e^{iλφ}ψ|` with `λ^{−1/k}[|ψ(b)| + ∫|ψ′|]`
/// over a sweep of `λ`.
///
/// `|φ^{(k)}| ≥ 1` is checked on a 1025-point grid, and for `k = 1` also the
/// monotonicity of `φ′`. The variation `∫|ψ′|` is the total variation of
/// `ψ` sampled on the same grid.
pub fn vdc_check<T, P, A>(phase: &P, amp: &A, interval: (T, T), k_order: u32, lambdas: &[T]) -> Result<VdcReport<T>>
where
    T: Real,
    P: Phase<T> + ?Sized,
    A: Fn(T) -> T + ?Sized,
{
    let (a, b) = interval;
    if !(b > a) {
        return Err(Error::Domain("empty interval".into()));
    }
    let deriv = |x: T| match k_order {
        1 => Ok(phase.d1(x)),
        2 => Ok(phase.d2(x)),
        _ => Err(Error::Domain(format!("k_order {k_order} not in {{1, 2}}"))),
    };
    for x in check_grid(a, b) {
        let d = deriv(x)?;
        if !(d.abs() >= T::one()) {
            return Err(Error::Precondition(format!("|φ^({k_order})({x})| = {} < 1", d.abs())));
        }
    }
    if k_order == 1 {
        let d: Vec<T> = check_grid(a, b).map(|x| phase.d1(x)).collect();
        let up = d.windows(2).all(|w| w[1] >= w[0]);
        let down = d.windows(2).all(|w| w[1] <= w[0]);
        if !(up || down) {
            return Err(Error::Precondition("φ′ is not monotonic".into()));
        }
    }
    let samples: Vec<T> = check_grid(a, b).map(amp).collect();
    let variation = samples.windows(2).fold(T::zero(), |s, w| s + (w[1] - w[0]).abs());
    let base = amp(b).abs() + variation;
    let mut integrals = Vec::with_capacity(lambdas.len());
    let mut bounds = Vec::with_capacity(lambdas.len());
    let mut ratios = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(lambda > T::zero()) {
            return Err(Error::Domain(format!("λ = {lambda} must be positive")));
        }
        let scaled = Scaled { lambda, phase };
        let v = oscillatory_integral(&scaled, amp, interval, T::lit(VDC_TOL))?.norm();
        let bound = lambda.powf(-T::one() / T::of_usize(k_order as usize)) * base;
        integrals.push(v);
        bounds.push(bound);
        ratios.push(v / bound);
    }
    let max_ratio = ratios.iter().copied().fold(T::zero(), T::max);
    Ok(VdcReport { k_order, lambdas: lambdas.to_vec(), integrals, bounds, ratios, max_ratio })
}
