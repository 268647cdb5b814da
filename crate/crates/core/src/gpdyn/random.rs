use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GPState;
use crate::field::{RadialField, RadialGrid};
use crate::scalar::Real;

const TERMS: usize = 3;

/// How a random state is normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scale<T> {
    /// `‖u‖_{H¹}` equals the value.
    H1(T),
    /// `max(‖u₁‖_∞, ‖u₂‖_∞)` equals the value.
    Sup(T),
}

/// Smooth, effectively band-limited radial state: each component is
/// `Σ aᵢ(1 + bᵢr²)exp(−r²/(2wᵢ²))` with `wᵢ ∈ [1, 2.5]`.
///
/// Draws come from ChaCha8 seeded with `seed`, on stream `trial`, so every
/// trial of a suite is reproducible on its own.
pub fn random_state<T: Real>(grid: &Arc<RadialGrid<T>>, seed: u64, trial: u64, scale: Scale<T>) -> GPState<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut component = || {
        let terms: Vec<(f64, f64, f64)> = (0..TERMS)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3), rng.gen_range(1.0..2.5)))
            .collect();
        RadialField::from_real_fn(grid, move |r| {
            let r = r.to_f64_lossy();
            let v: f64 = terms
                .iter()
                .map(|&(a, b, w)| a * (1.0 + b * r * r) * (-r * r / (2.0 * w * w)).exp())
                .sum();
            T::lit(v)
        })
    };
    let u1 = component();
    let u2 = component();
    let s = GPState { t: T::zero(), u1, u2 };
    let size = match scale {
        Scale::H1(_) => s.h1_norm(),
        Scale::Sup(_) => s.u1.max_abs().max(s.u2.max_abs()),
    };
    let target = match scale {
        Scale::H1(x) | Scale::Sup(x) => x,
    };
    s.scaled(target / size)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_normalized() {
        let g = RadialGrid::<f64>::new(256, 30.0).unwrap();
        let a = random_state(&g, 5, 2, Scale::H1(0.05));
        let b = random_state(&g, 5, 2, Scale::H1(0.05));
        let c = random_state(&g, 5, 3, Scale::H1(0.05));
        assert_eq!(a.u1.data(), b.u1.data());
        assert_ne!(a.u1.data(), c.u1.data());
        assert!((a.h1_norm() - 0.05).abs() < 1e-15);
        let d = random_state(&g, 5, 2, Scale::Sup(0.3));
        assert!((d.u1.max_abs().max(d.u2.max_abs()) - 0.3).abs() < 1e-15);
    }
}
