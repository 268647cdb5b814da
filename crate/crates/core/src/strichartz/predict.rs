use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Exact;

/// A Lebesgue exponent `p ∈ [1, ∞]`, stored exactly as `1/p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exponent {
    inv: Ratio<i64>,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent { inv: Ratio::new_raw(0, 1) };

    pub fn of(p: i64) -> Result<Self> {
        Self::ratio(p, 1)
    }

    /// `p = num/den`.
    pub fn ratio(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < den {
            return Err(Error::Domain(format!("exponent {num}/{den} outside [1, ∞]")));
        }
        Ok(Self { inv: Ratio::new(den, num) })
    }

    /// `1/p`.
    pub fn inv(&self) -> Ratio<i64> {
        self.inv
    }

    pub fn is_infinite(&self) -> bool {
        self.inv.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.inv.recip().to_f64().unwrap_or(f64::NAN)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            return f.write_str("inf");
        }
        let p = self.inv.recip();
        if p.is_integer() {
            write!(f, "{}", p.numer())
        } else {
            write!(f, "{}/{}", p.numer(), p.denom())
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "∞" | "infinity") {
            return Ok(Self::INFINITY);
        }
        let bad = || Error::Domain(format!("cannot parse exponent `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => Self::ratio(n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => Self::of(s.parse().map_err(|_| bad())?),
        }
    }
}

/// Which dispersion law supplies the exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Law<E> {
    /// The table specialized to `ω(r) = r(2+r²)^{1/2}` in three dimensions.
    Gp,
    /// The general law for a symbol with exponents `(α, β)` on the band.
    General { alpha: E, beta: E },
}

impl<E: Exact> Law<E> {
    /// `(α, β)` of the GP symbol: `(2, 2)` for `k ≥ 0`, `(1, 3)` for `k < 0`.
    pub fn gp_exponents(k: i32) -> (E, E) {
        if k >= 0 {
            (E::int(2), E::int(2))
        } else {
            (E::int(1), E::int(3))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `(q, r) = (∞, 2)`: unitarity.
    Trivial,
    /// `k ≥ 0`, `2/5 < q(1/2−1/r) ≤ 1`.
    GpHigh,
    /// `k < 0`, `1/2 < q(1/2−1/r) ≤ 1`.
    GpLowDispersive,
    /// `k < 0`, `2/5 < q(1/2−1/r) < 1/2`.
    GpLowInterpolated,
    /// `k < 0`, `q(1/2−1/r) = 1/2`.
    GpLowBorderline,
    /// `1/(d−1) < q(1/2−1/r) ≤ 1`: exponent `d/2 − d/r − α/q`.
    Dispersive,
    /// `2/(2d−1) < q(1/2−1/r) < 1/(d−1)`: exponent `θ_k(q,r)`.
    Interpolated,
    /// `q(1/2−1/r) = 1/(d−1)`: `θ_k(q,r)` with a logarithmic factor.
    Borderline,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrichartzPrediction<E> {
    pub k: i32,
    pub q: Exponent,
    pub r: Exponent,
    pub d: i64,
    pub regime: Regime,
    /// The constant is `⟨a⟩^{2/q}·2^{kθ}`, `a` being [`Self::log_argument`].
    pub theta: E,
    pub log_factor: bool,
    pub log_argument: E,
}

impl<E: Exact + ToPrimitive> StrichartzPrediction<E> {
    /// `log₂ C = kθ + (2/q)·log₂⟨a⟩` with `⟨a⟩ = (2+a²)^{1/2}`.
    pub fn log2_constant(&self) -> f64 {
        let theta = self.theta.to_f64().unwrap_or(f64::NAN);
        let mut c = self.k as f64 * theta;
        if self.log_factor {
            let a = self.log_argument.to_f64().unwrap_or(f64::NAN);
            let q_inv = self.q.inv().to_f64().unwrap_or(f64::NAN);
            c += 2.0 * q_inv * (0.5 * (2.0 + a * a).log2());
        }
        c
    }

    pub fn constant(&self) -> f64 {
        self.log2_constant().exp2()
    }
}

fn cast<E: Exact>(x: Ratio<i64>) -> E {
    E::ratio(*x.numer(), *x.denom())
}

/// Predicted dyadic constant `C_k(q, r)` for `‖e^{−itω(D)}P_kφ‖_{L_t^qL_x^rL_σ²}`.
///
/// Regimes are selected on `s = q(1/2 − 1/r)` with exact comparisons; `s`
/// above 1 (unreachable by interpolating with `L_t^∞L_x^2`) or at most
/// `2/(2d−1)` has no estimate.
pub fn predict_constant<E: Exact>(law: Law<E>, k: i32, q: Exponent, r: Exponent, d: i64) -> Result<StrichartzPrediction<E>> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension {d} < 2")));
    }
    if matches!(law, Law::Gp) && d != 3 {
        return Err(Error::Domain("the GP table is three-dimensional".into()));
    }
    let half = Ratio::new(1, 2);
    let qi = q.inv();
    let ri = r.inv();
    if qi > half || ri > half {
        return Err(Error::Domain(format!("need q, r ≥ 2, got q={q}, r={r}")));
    }
    let base = |regime, theta| StrichartzPrediction {
        k,
        q,
        r,
        d,
        regime,
        theta,
        log_factor: false,
        log_argument: E::int(0),
    };
    let gap = half - ri;
    if qi.is_zero() {
        // s = ∞·gap: finite only on the unitarity line
        return if gap.is_zero() { Ok(base(Regime::Trivial, E::int(0))) } else { Err(Error::NoEstimate) };
    }
    // s compared to a/b as gap·b vs a·qi
    let cmp = |a: i64, b: i64| (gap * Ratio::from_integer(b)).cmp(&(qi * Ratio::from_integer(a)));
    use std::cmp::Ordering::*;
    if cmp(1, 1) == Greater {
        return Err(Error::NoEstimate);
    }
    let dd = Ratio::from_integer(d);
    match law {
        Law::Gp => {
            if cmp(2, 5) != Greater {
                return Err(Error::NoEstimate);
            }
            let theta = |c: i64, rc: i64, qc: i64| {
                cast::<E>(Ratio::new(c, 2) - Ratio::from_integer(rc) * ri - Ratio::from_integer(qc) * qi)
            };
            if k >= 0 {
                return Ok(base(Regime::GpHigh, theta(3, 3, 2)));
            }
            match cmp(1, 2) {
                Greater => Ok(base(Regime::GpLowDispersive, theta(3, 3, 1))),
                Less => Ok(base(Regime::GpLowInterpolated, theta(7, 7, 3))),
                Equal => {
                    let mut p = base(Regime::GpLowBorderline, cast(qi / Ratio::from_integer(2)));
                    p.log_factor = true;
                    p.log_argument = E::int(k as i64);
                    Ok(p)
                }
            }
        }
        Law::General { alpha, beta } => {
            let lower = cmp(2, 2 * d - 1);
            if lower != Greater {
                return Err(Error::NoEstimate);
            }
            let d_e: E = cast(dd);
            let dm1: E = cast(dd - Ratio::from_integer(1));
            let qe: E = cast(qi);
            let re: E = cast(ri);
            let two = E::int(2);
            let dispersive = d_e / two - d_e * re - alpha * qe;
            let theta = d_e / two - d_e * re - beta * qe - (alpha - beta) * (dm1 / two - dm1 * re);
            match cmp(1, d - 1) {
                Greater => Ok(base(Regime::Dispersive, dispersive)),
                Less => Ok(base(Regime::Interpolated, theta)),
                Equal => {
                    let mut p = base(Regime::Borderline, theta);
                    p.log_factor = true;
                    p.log_argument = E::int(k as i64) * (alpha - beta);
                    Ok(p)
                }
            }
        }
    }
}

/// The general law with the GP exponents for the sign of `k`.
pub fn predict_gp_general<E: Exact>(k: i32, q: Exponent, r: Exponent) -> Result<StrichartzPrediction<E>> {
    let (alpha, beta) = Law::<E>::gp_exponents(k);
    predict_constant(Law::General { alpha, beta }, k, q, r, 3)
}
