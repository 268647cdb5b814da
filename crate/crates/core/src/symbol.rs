//! Radial dispersion relations and the dyadic-band conditions.
//!
//! A [`SymbolSpec`] is one of a small catalog of dispersion relations
//! `ω(r)` together with closed forms for `ω'`, `ω''` and `ω'''`.
//! [`classify_band`] decides, on a geometric sample of the band
//! `I_k = (2^{k-1}, 2^{k+1})`, whether the lower bounds
//!
//! * H1: `|ω'(r)| ≳ 2^{k(α-1)}`
//! * H2: H1, `|ω''(r)| ≳ 2^{k(β-2)}`, `|ω''/ω'| ≲ 2^{-k}`, `β ≤ α` for
//!   `k ≥ 0` (`β ≥ α` for `k < 0`) and finitely many sign changes of `ω'''`
//! * H3: `ω'(r) ω''(r) > 0`
//!
//! hold for a candidate pair `(α, β)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower threshold applied to every measured implied constant.
pub const C_MIN: f64 = 1.0 / 16.0;
/// Upper threshold for `2^k |ω''/ω'|`.
pub const C_RATIO_MAX: f64 = 16.0;
/// Default number of geometric samples per band.
pub const DEFAULT_GRID_POINTS: usize = 256;
/// Upper bound on sign changes of `ω'''` accepted as "finitely many".
pub const MAX_SIGN_CHANGES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// `ω(r) = r (2 + r²)^{1/2}`, the Bogoliubov dispersion of the GP equation.
    Gp,
    /// `ω(r) = r^a`.
    Schrodinger,
    /// `ω(r) = (1 + r²)^{1/2}`.
    KleinGordon,
    /// `ω(r) = (1 + r⁴)^{1/2}`.
    Beam,
    /// `ω(r) = r² + ε r⁴`.
    FourthOrder,
}

impl SymbolKind {
    pub const ALL: [SymbolKind; 5] = [
        SymbolKind::Gp,
        SymbolKind::Schrodinger,
        SymbolKind::KleinGordon,
        SymbolKind::Beam,
        SymbolKind::FourthOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SymbolKind::Gp => "gp",
            SymbolKind::Schrodinger => "schrodinger",
            SymbolKind::KleinGordon => "klein_gordon",
            SymbolKind::Beam => "beam",
            SymbolKind::FourthOrder => "fourth_order",
        }
    }
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymbolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SymbolKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }
}

/// A catalog dispersion relation with its first three derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSpec<T> {
    pub kind: SymbolKind,
    /// Power `a` for Schrödinger, coefficient `ε` for fourth order, unused otherwise.
    pub param: T,
}

/// Looks up a catalog entry by name.
///
/// `schrodinger` takes one parameter `a > 0` (default 2), `fourth_order`
/// takes `ε ≥ 0` (default 0); the other entries take none.
pub fn catalog_lookup<T: Real>(name: &str, params: &[T]) -> Result<SymbolSpec<T>> {
    let kind: SymbolKind = name.parse()?;
    SymbolSpec::new(kind, params)
}

impl<T: Real> SymbolSpec<T> {
    pub fn new(kind: SymbolKind, params: &[T]) -> Result<Self> {
        let expected = match kind {
            SymbolKind::Schrodinger | SymbolKind::FourthOrder => 1,
            _ => 0,
        };
        if params.len() > expected {
            return Err(Error::Domain(format!(
                "{kind} takes {expected} parameter(s), got {}",
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("{kind}: non-finite parameter")));
        }
        let param = match kind {
            SymbolKind::Schrodinger => {
                let a = params.first().copied().unwrap_or_else(|| T::lit(2.0));
                if a <= T::zero() {
                    return Err(Error::Domain(format!("schrodinger power a={a} must be > 0")));
                }
                a
            }
            SymbolKind::FourthOrder => {
                let eps = params.first().copied().unwrap_or_else(T::zero);
                if eps < T::zero() {
                    return Err(Error::Domain(format!("fourth_order ε={eps} must be ≥ 0")));
                }
                eps
            }
            _ => T::zero(),
        };
        Ok(Self { kind, param })
    }

    pub fn gp() -> Self {
        Self { kind: SymbolKind::Gp, param: T::zero() }
    }

    pub fn omega(&self, r: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        match self.kind {
            SymbolKind::Gp => r * (two + r * r).sqrt(),
            SymbolKind::Schrodinger => r.powf(self.param),
            SymbolKind::KleinGordon => (one + r * r).sqrt(),
            SymbolKind::Beam => (one + r.powi(4)).sqrt(),
            SymbolKind::FourthOrder => r * r + self.param * r.powi(4),
        }
    }

    pub fn omega1(&self, r: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        match self.kind {
            SymbolKind::Gp => (two + two * r * r) / (two + r * r).sqrt(),
            SymbolKind::Schrodinger => self.param * r.powf(self.param - one),
            SymbolKind::KleinGordon => r / (one + r * r).sqrt(),
            SymbolKind::Beam => two * r.powi(3) / (one + r.powi(4)).sqrt(),
            SymbolKind::FourthOrder => two * r + T::lit(4.0) * self.param * r.powi(3),
        }
    }

    pub fn omega2(&self, r: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        let three_halves = T::lit(1.5);
        match self.kind {
            SymbolKind::Gp => {
                (T::lit(6.0) * r + two * r.powi(3)) / (two + r * r).powf(three_halves)
            }
            SymbolKind::Schrodinger => {
                let a = self.param;
                a * (a - one) * r.powf(a - two)
            }
            SymbolKind::KleinGordon => (one + r * r).powf(-three_halves),
            SymbolKind::Beam => {
                (T::lit(6.0) * r * r + two * r.powi(6)) / (one + r.powi(4)).powf(three_halves)
            }
            SymbolKind::FourthOrder => two + T::lit(12.0) * self.param * r * r,
        }
    }

    pub fn omega3(&self, r: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        let five_halves = T::lit(2.5);
        match self.kind {
            SymbolKind::Gp => T::lit(12.0) / (two + r * r).powf(five_halves),
            SymbolKind::Schrodinger => {
                let a = self.param;
                a * (a - one) * (a - two) * r.powf(a - T::lit(3.0))
            }
            SymbolKind::KleinGordon => -T::lit(3.0) * r * (one + r * r).powf(-five_halves),
            SymbolKind::Beam => {
                T::lit(12.0) * r * (one - r.powi(4)) / (one + r.powi(4)).powf(five_halves)
            }
            SymbolKind::FourthOrder => T::lit(24.0) * self.param * r,
        }
    }

    /// The `(α, β)` pair assigned to band `k` by the catalog examples, and
    /// the flags `(H1, H2, H3)` they are claimed to satisfy.
    pub fn stated_classification(&self, k: i32) -> ((T, T), (bool, bool, bool)) {
        let a = self.param;
        let pair = |x: f64, y: f64| (T::lit(x), T::lit(y));
        match self.kind {
            SymbolKind::Gp if k >= 0 => (pair(2.0, 2.0), (true, true, true)),
            SymbolKind::Gp => (pair(1.0, 3.0), (true, true, true)),
            SymbolKind::Schrodinger if a > T::one() => ((a, a), (true, true, true)),
            SymbolKind::Schrodinger if a == T::one() => ((a, a), (true, false, false)),
            SymbolKind::Schrodinger => ((a, a), (true, true, false)),
            SymbolKind::KleinGordon if k >= 0 => (pair(1.0, -1.0), (true, true, true)),
            SymbolKind::KleinGordon => (pair(2.0, 2.0), (true, true, true)),
            SymbolKind::Beam if k >= 0 => (pair(2.0, 2.0), (true, true, true)),
            SymbolKind::Beam => (pair(4.0, 4.0), (true, true, true)),
            SymbolKind::FourthOrder => (pair(2.0, 2.0), (true, true, true)),
        }
    }
}

/// The dyadic frequency band `I_k = (2^{k-1}, 2^{k+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicBand {
    pub k: i32,
}

impl DyadicBand {
    pub fn new(k: i32) -> Self {
        Self { k }
    }

    pub fn interval<T: Real>(&self) -> (T, T) {
        (T::pow2(self.k - 1), T::pow2(self.k + 1))
    }

    /// `points` geometric samples strictly inside the band.
    pub fn geometric_grid<T: Real>(&self, points: usize) -> Vec<T> {
        let (lo, _) = self.interval::<T>();
        let four = T::lit(4.0);
        let n = T::of_usize(points);
        (0..points)
            .map(|i| lo * four.powf((T::of_usize(i) + T::lit(0.5)) / n))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicClassification<T> {
    pub k: i32,
    pub alpha: T,
    pub beta: T,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    /// `min |ω'| / 2^{k(α-1)}` over the samples.
    pub c_lower_1: T,
    /// `min |ω''| / 2^{k(β-2)}` over the samples.
    pub c_lower_2: T,
    /// `max 2^k |ω''| / |ω'|` over the samples.
    pub ratio_bound: T,
    pub sign_changes_omega3: usize,
}

pub fn classify_band<T: Real>(
    spec: &SymbolSpec<T>,
    band: DyadicBand,
    alpha: T,
    beta: T,
    grid_points: usize,
) -> Result<DyadicClassification<T>> {
    if grid_points < 64 {
        return Err(Error::Domain(format!("grid_points={grid_points} < 64")));
    }
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Domain("alpha and beta must be finite".into()));
    }
    let k = band.k;
    let two_k = T::pow2(k);
    let scale1 = two_k.powf(alpha - T::one());
    let scale2 = two_k.powf(beta - T::lit(2.0));

    let mut c1 = T::infinity();
    let mut c2 = T::infinity();
    let mut ratio = T::zero();
    let mut h3 = true;
    let mut sign_changes = 0usize;
    let mut last_sign: Option<bool> = None;

    for r in band.geometric_grid::<T>(grid_points) {
        let d1 = spec.omega1(r);
        let d2 = spec.omega2(r);
        let d3 = spec.omega3(r);
        if !(d1.is_finite() && d2.is_finite() && d3.is_finite()) {
            return Err(Error::NonFinite(format!("{} derivative at r={r}", spec.kind)));
        }
        c1 = c1.min(d1.abs() / scale1);
        c2 = c2.min(d2.abs() / scale2);
        ratio = ratio.max(if d1 == T::zero() {
            T::infinity()
        } else {
            two_k * d2.abs() / d1.abs()
        });
        if d1 * d2 <= T::zero() {
            h3 = false;
        }
        if d3 != T::zero() {
            let s = d3 > T::zero();
            if last_sign.is_some_and(|p| p != s) {
                sign_changes += 1;
            }
            last_sign = Some(s);
        }
    }

    let c_min = T::lit(C_MIN);
    let ordered = if k >= 0 { beta <= alpha } else { beta >= alpha };
    let h1 = c1 >= c_min;
    let h2 = h1
        && c2 >= c_min
        && ratio <= T::lit(C_RATIO_MAX)
        && ordered
        && sign_changes <= MAX_SIGN_CHANGES;

    Ok(DyadicClassification {
        k,
        alpha,
        beta,
        h1,
        h2,
        h3,
        c_lower_1: c1,
        c_lower_2: c2,
        ratio_bound: ratio,
        sign_changes_omega3: sign_changes,
    })
}

/// Exponents proposed from log-log slopes of `|ω'|` and `|ω''|` over a band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSuggestion<T> {
    pub alpha: T,
    /// `None` when `ω''` vanishes somewhere in the band, so H2 is unattainable.
    pub beta: Option<T>,
}

fn quarter_round<T: Real>(x: T) -> T {
    (x * T::lit(4.0)).round() / T::lit(4.0)
}

fn log_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::of_usize(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (sxy, sxx) = xs.iter().zip(ys).fold((T::zero(), T::zero()), |(sxy, sxx), (&x, &y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    sxy / sxx
}

/// Least-squares slopes of `log|ω'|` and `log|ω''|` against `log r`, shifted
/// to `α` and `β` and rounded to quarter integers. `β` is clamped to respect
/// the H2 ordering (`β ≤ α` for `k ≥ 0`, `β ≥ α` for `k < 0`). When the
/// rounded pair does not classify, the nearest quarter-integer pair within
/// ±2 that does is returned instead. `β` is `None` when `ω''` vanishes.
pub fn suggest_exponents<T: Real>(
    spec: &SymbolSpec<T>,
    band: DyadicBand,
) -> Result<ExponentSuggestion<T>> {
    let rs = band.geometric_grid::<T>(DEFAULT_GRID_POINTS);
    let logr: Vec<T> = rs.iter().map(|r| r.ln()).collect();
    let d1: Vec<T> = rs.iter().map(|&r| spec.omega1(r).abs()).collect();
    if d1.iter().any(|&v| v == T::zero() || !v.is_finite()) {
        return Err(Error::DegenerateBand { k: band.k, reason: "ω' vanishes".into() });
    }
    let slope1 = log_slope(&logr, &d1.iter().map(|v| v.ln()).collect::<Vec<_>>()) + T::one();

    let d2: Vec<T> = rs.iter().map(|&r| spec.omega2(r).abs()).collect();
    let slope2 = if d2.iter().any(|&v| v <= T::epsilon() || !v.is_finite()) {
        None
    } else {
        Some(log_slope(&logr, &d2.iter().map(|v| v.ln()).collect::<Vec<_>>()) + T::lit(2.0))
    };

    // Near a crossover between two power laws the rounded slope can carry a
    // parameter-dependent constant; step outward to the nearest quarter that
    // classifies, falling back to plain rounding.
    let quarters = |x: T| {
        let base = quarter_round(x);
        let q = T::lit(0.25);
        let mut v = vec![base];
        for i in 1..=8 {
            let d = q * T::of_usize(i);
            let (lo, hi) = (base - d, base + d);
            if (x - lo).abs() <= (hi - x).abs() {
                v.extend([lo, hi]);
            } else {
                v.extend([hi, lo]);
            }
        }
        v
    };
    let order = |b: T, a: T| if band.k >= 0 { b.min(a) } else { b.max(a) };
    let passes = |a: T, b: Option<T>| {
        classify_band(spec, band, a, b.unwrap_or(a), DEFAULT_GRID_POINTS)
            .map(|c| c.h1 && (b.is_none() || c.h2))
            .unwrap_or(false)
    };
    for a in quarters(slope1) {
        match slope2 {
            None if passes(a, None) => return Ok(ExponentSuggestion { alpha: a, beta: None }),
            None => {}
            Some(s2) => {
                for b in quarters(s2) {
                    let b = order(b, a);
                    if passes(a, Some(b)) {
                        return Ok(ExponentSuggestion { alpha: a, beta: Some(b) });
                    }
                }
            }
        }
    }
    let alpha = quarter_round(slope1);
    let beta = slope2.map(|s| order(quarter_round(s), alpha));
    Ok(ExponentSuggestion { alpha, beta })
}
