use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;

use gplab_core::field::{chi, Multiplier, RadialField, RadialGrid};
use gplab_core::fit::linear_fit;
use gplab_core::gpdyn::{linear_propagator, linear_variable, transform_t, verify_quintic_cancellation, GPState};
use gplab_core::oscint::{bessel_j, kernel_k, oscillatory_integral, FnPhase, Scaled};
use gplab_core::strichartz::{predict_constant, predict_gp_general, Exponent, Law};
use gplab_core::symbol::SymbolSpec;

type Q = Ratio<i64>;

fn grid() -> Arc<RadialGrid<f64>> {
    RadialGrid::new(256, 30.0).unwrap()
}

/// Sum of up to three Gaussian bumps with a polynomial factor.
fn bumps() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -0.3..0.3f64, 0.8..3.0f64), 1..4)
}

fn field_of(terms: &[(f64, f64, f64)]) -> RadialField<f64> {
    let terms = terms.to_vec();
    RadialField::from_real_fn(&grid(), move |r| {
        terms.iter().map(|&(a, b, w)| a * (1.0 + b * r * r) * (-r * r / (2.0 * w * w)).exp()).sum()
    })
}

fn exponent() -> impl Strategy<Value = Exponent> {
    // p = num/den ∈ [2, 40]
    (1i64..=20, 2i64..=40).prop_filter_map("p ≥ 2", |(den, num)| {
        if num >= 2 * den {
            Exponent::ratio(num, den).ok()
        } else {
            None
        }
    })
}

fn multiplier() -> impl Strategy<Value = Multiplier<f64>> {
    prop_oneof![
        Just(Multiplier::U),
        Just(Multiplier::H),
        Just(Multiplier::Inv2mD),
        Just(Multiplier::D),
        Just(Multiplier::Laplacian),
        (-3i32..3).prop_map(Multiplier::Pk),
        (-3i32..3).prop_map(Multiplier::PLeK),
        (-1.0..2.0f64).prop_map(Multiplier::HsWeight),
        (-2.0..2.0f64).prop_map(Multiplier::Propagator),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_and_round_trip(t in bumps()) {
        let f = field_of(&t);
        let a = f.l2_norm();
        let b = f.l2_norm_spectral();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{a} vs {b}");
        let back = f.to_frequency().to_physical();
        prop_assert!(back.rel_l2_distance(&f) < 1e-13);
    }

    #[test]
    fn multipliers_commute(t in bumps(), a in multiplier(), b in multiplier()) {
        let f = field_of(&t);
        let ab = f.apply(a).apply(b);
        let ba = f.apply(b).apply(a);
        // rounding is relative to the operator norms, not to the output
        let sup = |m: Multiplier<f64>| grid().rho().iter().map(|&p| m.symbol(p).norm()).fold(0.0f64, f64::max);
        let scale = sup(a) * sup(b) * f.l2_norm_spectral();
        prop_assert!((&ab - &ba).l2_norm_spectral() <= 1e-13 * scale);
    }

    #[test]
    fn bands_are_a_partition(rho in 1e-3..1e3f64, j in -8i32..8, k in -8i32..8) {
        let total: f64 = (-20..=20).map(|k| chi(k, rho)).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        if (j - k).abs() >= 2 {
            prop_assert_eq!(chi(j, rho) * chi(k, rho), 0.0);
        }
    }

    #[test]
    fn gp_multiplier_bounds(rho in 1e-6..1e4f64) {
        let h = Multiplier::<f64>::H.symbol(rho).re;
        let u = Multiplier::<f64>::U.symbol(rho).re;
        prop_assert!(h / rho >= 2f64.sqrt() * (1.0 - 1e-15));
        prop_assert!(h / rho >= rho);
        prop_assert!(u > 0.0 && u < 1.0);
        let ui = Multiplier::<f64>::UInv.symbol(rho).re;
        prop_assert!((u * ui - 1.0).abs() < 1e-14);
    }

    #[test]
    fn free_flow_is_a_unitary_group(t1 in bumps(), t2 in bumps(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let s = GPState::new(0.0, field_of(&t1), field_of(&t2)).unwrap();
        let once = linear_propagator(&s, a + b);
        let twice = linear_propagator(&linear_propagator(&s, a), b);
        prop_assert!(once.u().rel_l2_distance(&twice.u()) < 1e-12);
        let v0 = linear_variable(&s).m.l2_norm_spectral();
        let v1 = linear_variable(&once).m.l2_norm_spectral();
        prop_assert!((v1 - v0).abs() <= 1e-12 * v0);
    }

    #[test]
    fn transform_of_real_data_has_no_imaginary_part(t in bumps()) {
        let s = GPState::new(0.0, field_of(&t), RadialField::zeros(&grid(), gplab_core::field::Rep::Physical)).unwrap();
        let m = transform_t(&s);
        prop_assert!(m.m2().max_abs() <= 1e-13 * m.m1().max_abs());
    }

    #[test]
    fn exponent_display_parse(p in exponent()) {
        let back: Exponent = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn general_law_reproduces_gp_table(k in -8i32..=8, q in exponent(), r in exponent()) {
        let gp = predict_constant::<Q>(Law::Gp, k, q, r, 3);
        let gen = predict_gp_general::<Q>(k, q, r);
        match (gp, gen) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.theta, b.theta);
                if k < 0 {
                    prop_assert_eq!(a.log_factor, b.log_factor);
                }
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "one law has an estimate: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn theta_is_affine_in_inverse_q(k in -8i32..=8, r in exponent(), a in 1i64..20, b in 1i64..20) {
        // 1/q ∈ {a/40, (a+b)/80, b/40}: the middle one is the midpoint
        let q = |num: i64, den: i64| Exponent::ratio(den, num);
        let (Ok(q1), Ok(q2), Ok(q3)) = (q(a, 40), q(a + b, 80), q(b, 40)) else { return Ok(()) };
        let p: Vec<_> = [q1, q2, q3].iter().map(|&q| predict_constant::<Q>(Law::Gp, k, q, r, 3)).collect();
        if let [Ok(x), Ok(y), Ok(z)] = p.as_slice() {
            if x.regime == y.regime && y.regime == z.regime && !y.log_factor {
                prop_assert_eq!(x.theta + z.theta, y.theta * Ratio::from_integer(2));
            }
        }
    }

    #[test]
    fn quintic_cancels_for_every_amplitude(n in 0i64..=64) {
        let r = verify_quintic_cancellation(Ratio::new(n, 64)).unwrap();
        prop_assert_eq!(r.sum, Ratio::from_integer(0));
    }

    #[test]
    fn line_fit_is_exact(m in -5.0..5.0f64, c in -5.0..5.0f64, n in 4usize..40) {
        let x: Vec<f64> = (0..n).map(|i| i as f64 * 0.37 - 2.0).collect();
        let y: Vec<f64> = x.iter().map(|x| m * x + c).collect();
        let f = linear_fit(&x, &y).unwrap();
        prop_assert!((f.slope - m).abs() < 1e-10 && (f.intercept - c).abs() < 1e-10);
    }

    #[test]
    fn bessel_three_term_recurrence(nu in 1.0..40.0f64, r in 0.5..2000.0f64) {
        let lo = bessel_j(nu - 1.0, r).unwrap().value;
        let mid = bessel_j(nu, r).unwrap().value;
        let hi = bessel_j(nu + 1.0, r).unwrap().value;
        let scale = lo.abs().max(hi.abs()).max(mid.abs() * nu / r).max(1e-12);
        prop_assert!((lo + hi - 2.0 * nu / r * mid).abs() <= 1e-8 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_reflection_is_conjugation(k in -3i32..=3, t in 0.1..50.0f64, x in -200.0..200.0f64) {
        let gp = SymbolSpec::<f64>::gp();
        let a = kernel_k(&gp, k, t, x).unwrap();
        let b = kernel_k(&gp, k, -t, -x).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-9);
    }

    #[test]
    fn reversing_the_phase_conjugates(lambda in 1.0..300.0f64, c in -1.0..1.0f64) {
        let phase = FnPhase { f: move |x: f64| x * x * x / 3.0 + c * x, df: move |x: f64| x * x + c, d2f: |x: f64| 2.0 * x };
        let amp = |x: f64| (-(x * x)).exp();
        let fwd = oscillatory_integral(&Scaled { lambda, phase: &phase }, &amp, (-2.0, 2.0), 1e-11).unwrap();
        let rev = oscillatory_integral(&Scaled { lambda: -lambda, phase: &phase }, &amp, (-2.0, 2.0), 1e-11).unwrap();
        prop_assert!((fwd - rev.conj()).norm() < 1e-9);
        // |∫e^{iψ}a| ≤ ∫a = √π·erf(2)
        prop_assert!(fwd.norm() <= 1.7726);
    }
}
