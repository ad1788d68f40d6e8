//! Sum-max stable laws: joint limits of rescaled partial sums and partial
//! maxima of i.i.d. nonnegative/real pairs.
//!
//! The crate provides
//!
//! - [`measures`]: the (β, α, C, K, ω) parametrization and exact Lévy-measure
//!   rectangle masses, including the scaling law t·η = t^E η;
//! - [`special`]: Γ, incomplete gamma with negative first argument, the
//!   normal tail, and adaptive quadrature on (0, ∞);
//! - [`exponent`]: the C-L exponent Ψ(s, y), the transform exp(−Ψ), closed
//!   forms for the worked examples, and the general extreme-value case;
//! - [`sampler`]: seeded, splittable random streams and constructive
//!   sampling of pairs attracted to a given law;
//! - [`empirical`]: reproducible parallel Monte Carlo estimates of C-L
//!   transforms, rescaled tail measures, and domain-of-attraction
//!   convergence reports.

// Validation deliberately uses `!(x > 0.0)`-style comparisons: they reject
// NaN along with out-of-range values, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod empirical;
pub mod exponent;
pub mod measures;
pub mod sampler;
pub mod special;

pub use empirical::{
    convergence_report, convergence_report_with_target, empirical_cl, empirical_cl_sum_max,
    rescaled_tail_estimate, truncated_mean_diagnostic, ConvergencePlan, ConvergenceReport,
    EmpiricalCL, Tolerances,
};
pub use exponent::{
    cl_transform, evaluate_grid, grid_csv, independence_residual, marginal_max_exponent,
    marginal_sum_exponent, psi, psi_complete_dependence, psi_frechet_mix_closed, psi_general,
    psi_normal_mix, EvalError, EvalPoint, ExtremeValueTarget,
};
pub use measures::{
    atom_slice_mass, eta_upper_mass, omega_tail, rect_mass, scale_levy_rect, Atom,
    LevyRepresentation, MeasureError, MixingMeasure, ScalingExponent, SumMaxStableParams,
};
pub use sampler::{
    sample_compound_poisson, sample_frechet, sample_one_sided_stable, sample_pair,
    sample_sum_max, PairSample, PairSampler, RandomStream, StableSampler, SumMaxSampler,
};
pub use special::{
    gamma_fn, integrate_0_inf, upper_incomplete_gamma, QuadratureResult, QuadratureTarget,
    SpecialError,
};

/// Render a float with 17 significant digits (round-trip exact for f64);
/// infinities are spelled `inf` / `-inf` to match the CLI sentinel.
pub fn format_float17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}
