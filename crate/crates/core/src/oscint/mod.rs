//! Oscillatory integrals: the dispersive kernel of a band-localized flow,
//! van der Corput checks, and Bessel functions of real order.

mod bessel;
mod kernel;
mod quadrature;
mod vdc;

pub use bessel::{
    bessel_asymptotic_decomp, bessel_j, bessel_j_with, bessel_jp, bessel_uniform_decay_check, schlafli_parts,
    uniform_envelope, AsymptoticDecomp, BesselEval, BesselMethod, EnvelopeReport, EnvelopeRow, NU_MAX, R_MAX,
};
pub use kernel::{
    geometric_times, kernel_decay_scan, kernel_k, kernel_k_est, kernel_sample, DecayScan, KernelSample, PhaseSpec,
    WindowPolicy, CHI0_SUPPORT, KERNEL_TOL,
};
pub use quadrature::{
    gauss_legendre, oscillatory_integral, oscillatory_integral_est, stationary_points, Flat, FnPhase, Phase,
    QuadResult, Scaled, GL_ORDER, MIN_TOL,
};
pub use vdc::{vdc_check, VdcReport};
