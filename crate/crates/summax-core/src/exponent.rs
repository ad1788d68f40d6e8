//! Evaluation of the C-L exponent Ψ(s, y) and transform exp(−Ψ) of sum-max
//! stable laws.
//!
//! For the α-Fréchet case,
//!
//! ```text
//! Ψ(s, y) = K Γ(1−β) s^β + y^{−α} (C + ∫_0^∞ e^{−s t y^{α/β}} ω(t^{−β/α}, ∞) K β t^{−β−1} dt)
//! ```
//!
//! with Ψ = +∞ for y ≤ 0. Atomic ω collapses the integral into incomplete
//! gamma terms; continuous ω is integrated adaptively after the substitution
//! u = t^{−β/α}. General extreme-value max marginals reduce to the 1-Fréchet
//! case through y ↦ 1/(−log F_A(y)).

use thiserror::Error;

use crate::measures::{MeasureError, SumMaxStableParams};
use crate::special::{
    exp_weighted_tail, gamma_fn, integrate_0_inf, QuadratureTarget, SpecialError,
};

/// Errors from exponent evaluation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid evaluation point: {0}")]
    InvalidPoint(&'static str),
    #[error("invalid extreme-value target: {0}")]
    InvalidTarget(&'static str),
    #[error("general-case evaluation requires params with alpha = 1")]
    GeneralCaseAlpha,
    #[error("quadrature failed at (s = {s}, y = {y}): {source}")]
    Quadrature {
        s: f64,
        y: f64,
        source: SpecialError,
    },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// A point (s, y) of the transform domain: s ≥ 0 finite, y real or +∞.
///
/// `y = f64::INFINITY` means "max coordinate unconstrained" and selects the
/// Laplace marginal; any y ≤ 0 is below the Fréchet left endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPoint {
    pub s: f64,
    pub y: f64,
}

impl EvalPoint {
    pub fn new(s: f64, y: f64) -> Result<Self, EvalError> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(EvalError::InvalidPoint("s must be finite and >= 0"));
        }
        if y.is_nan() {
            return Err(EvalError::InvalidPoint("y must not be NaN"));
        }
        Ok(Self { s, y })
    }
}

/// K Γ(1−β) s^β, the Laplace exponent of the sum marginal.
pub fn marginal_sum_exponent(params: &SumMaxStableParams, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    let beta = params.beta();
    params.k() * gamma_fn(1.0 - beta).expect("1-beta in (0,1)") * s.powf(beta)
}

/// (C + K m_α) y^{−α}, i.e. −log of the α-Fréchet max-marginal CDF.
pub fn marginal_max_exponent(params: &SumMaxStableParams, y: f64) -> f64 {
    if y <= 0.0 {
        f64::INFINITY
    } else {
        params.frechet_marginal_scale() * y.powf(-params.alpha())
    }
}

/// The C-L exponent Ψ(s, y) for the α-Fréchet case. Returns +∞ for y ≤ 0.
pub fn psi(params: &SumMaxStableParams, p: &EvalPoint) -> Result<f64, EvalError> {
    let (s, y) = (p.s, p.y);
    if y <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if y.is_infinite() {
        return Ok(marginal_sum_exponent(params, s));
    }
    if s == 0.0 {
        return Ok(marginal_max_exponent(params, y));
    }
    let beta = params.beta();
    let alpha = params.alpha();
    let k = params.k();
    let lambda = s * y.powf(alpha / beta);
    let mix = if let Some(atoms) = params.omega().atoms() {
        // Tail indicator flips at t_j = u_j^{−α/β}; each atom contributes
        // w_j ∫_{t_j}^∞ e^{−λt} β t^{−β−1} dt = w_j β λ^β Γ(−β, λ t_j).
        let mut acc = 0.0;
        for a in atoms {
            if a.u > 0.0 {
                let tj = a.u.powf(-alpha / beta);
                acc += a.w
                    * exp_weighted_tail(beta, lambda, tj).map_err(|source| {
                        EvalError::Quadrature { s, y, source }
                    })?;
            }
        }
        k * acc
    } else {
        // u = t^{−β/α} turns the integral into K α ∫_0^∞ e^{−λ u^{−α/β}} ω(u,∞) u^{α−1} du.
        let omega = params.omega().clone();
        let exponent = alpha / beta;
        let mut hints = omega.quartile_hints();
        let scale_pt = lambda.powf(beta / alpha);
        hints.push(scale_pt);
        hints.push(1.0 / scale_pt);
        let integrand = move |u: f64| {
            let damp = (-lambda * u.powf(-exponent)).exp();
            if damp == 0.0 {
                return 0.0;
            }
            damp * omega.tail(u) * u.powf(alpha - 1.0)
        };
        let quad = integrate_0_inf(integrand, &hints, QuadratureTarget::tight())
            .map_err(|source| EvalError::Quadrature { s, y, source })?;
        k * alpha * quad.value
    };
    Ok(marginal_sum_exponent(params, s) + y.powf(-alpha) * (params.c() + mix))
}

/// exp(−Ψ(s, y)) ∈ [0, 1]; 0 below the left endpoint, 1 at (0, ∞).
pub fn cl_transform(params: &SumMaxStableParams, p: &EvalPoint) -> Result<f64, EvalError> {
    Ok((-psi(params, p)?).exp())
}

/// Complete-dependence exponent (α = β, ω = ε₁, K = 1/Γ(1−β), C = 0):
///
/// ```text
/// Ψ(s, y) = s^β + y^{−β} / Γ(1−β) · ∫_1^∞ e^{−sty} β t^{−β−1} dt
/// ```
pub fn psi_complete_dependence(beta: f64, s: f64, y: f64) -> Result<f64, EvalError> {
    check_example_domain(beta, s, y)?;
    if y.is_infinite() {
        return Ok(s.powf(beta));
    }
    let k = 1.0 / gamma_fn(1.0 - beta).expect("1-beta in (0,1)");
    let tail = exp_weighted_tail(beta, s * y, 1.0)
        .map_err(|source| EvalError::Quadrature { s, y, source })?;
    Ok(s.powf(beta) + y.powf(-beta) * k * tail)
}

/// Normal-mixing exponent (α = 2β, ω standard normal, K = 1/Γ(1−β), C = 0),
/// evaluated on the original t-scale:
///
/// ```text
/// Ψ(s, y) = s^β + y^{−2β} ∫_0^∞ e^{−sty²} N_{0,t}(1, ∞) β/Γ(1−β) t^{−β−1} dt
/// ```
///
/// with N_{0,t}(1, ∞) = 1 − Φ(t^{−1/2}). This is an independent route from
/// the generic u-substituted evaluation and is used to cross-check it.
pub fn psi_normal_mix(beta: f64, s: f64, y: f64) -> Result<f64, EvalError> {
    check_example_domain(beta, s, y)?;
    if y.is_infinite() {
        return Ok(s.powf(beta));
    }
    let k = 1.0 / gamma_fn(1.0 - beta).expect("1-beta in (0,1)");
    let rate = s * y * y;
    let mut hints = vec![0.2, 1.0, 5.0];
    if rate > 0.0 {
        hints.push(1.0 / rate);
    }
    let integrand = move |t: f64| {
        let tail = crate::special::normal_tail(t.powf(-0.5));
        if tail == 0.0 {
            return 0.0;
        }
        (-rate * t).exp() * tail * beta * t.powf(-beta - 1.0)
    };
    let quad = integrate_0_inf(integrand, &hints, QuadratureTarget::tight())
        .map_err(|source| EvalError::Quadrature { s, y, source })?;
    Ok(s.powf(beta) + y.powf(-2.0 * beta) * k * quad.value)
}

/// Fréchet-mixing closed form: Ψ(s, y) = (s + C₁ y^{−γ})^β.
pub fn psi_frechet_mix_closed(
    beta: f64,
    gamma: f64,
    c1: f64,
    s: f64,
    y: f64,
) -> Result<f64, EvalError> {
    check_example_domain(beta, s, y)?;
    if !(gamma > 0.0) || !(c1 > 0.0) {
        return Err(EvalError::InvalidPoint("gamma and C1 must be positive"));
    }
    if y.is_infinite() {
        return Ok(s.powf(beta));
    }
    Ok((s + c1 * y.powf(-gamma)).powf(beta))
}

fn check_example_domain(beta: f64, s: f64, y: f64) -> Result<(), EvalError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(EvalError::InvalidPoint("beta must lie in (0, 1)"));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(EvalError::InvalidPoint("s must be finite and >= 0"));
    }
    if !(y > 0.0) {
        return Err(EvalError::InvalidPoint("y must be positive"));
    }
    Ok(())
}

/// Target extreme-value family for the general (non-Fréchet) max marginal,
/// carrying its CDF F_A, support endpoints, and Γ(y) = 1/(−log F_A(y)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtremeValueTarget {
    Frechet { alpha: f64, scale: f64 },
    Gumbel { location: f64, scale: f64 },
    ReversedWeibull { alpha: f64, right_endpoint: f64, scale: f64 },
}

impl ExtremeValueTarget {
    pub fn frechet(alpha: f64, scale: f64) -> Result<Self, EvalError> {
        if !(alpha > 0.0) || !(scale > 0.0) {
            return Err(EvalError::InvalidTarget("frechet needs alpha, scale > 0"));
        }
        Ok(Self::Frechet { alpha, scale })
    }

    pub fn gumbel(location: f64, scale: f64) -> Result<Self, EvalError> {
        if !(scale > 0.0) || !location.is_finite() {
            return Err(EvalError::InvalidTarget("gumbel needs scale > 0"));
        }
        Ok(Self::Gumbel { location, scale })
    }

    pub fn reversed_weibull(
        alpha: f64,
        right_endpoint: f64,
        scale: f64,
    ) -> Result<Self, EvalError> {
        if !(alpha > 0.0) || !(scale > 0.0) || !right_endpoint.is_finite() {
            return Err(EvalError::InvalidTarget(
                "reversed weibull needs alpha, scale > 0 and a finite right endpoint",
            ));
        }
        Ok(Self::ReversedWeibull {
            alpha,
            right_endpoint,
            scale,
        })
    }

    /// Left endpoint x₀ of F_A.
    pub fn left_endpoint(&self) -> f64 {
        match self {
            Self::Frechet { .. } => 0.0,
            Self::Gumbel { .. } | Self::ReversedWeibull { .. } => f64::NEG_INFINITY,
        }
    }

    /// Right endpoint x₁ of F_A.
    pub fn right_endpoint(&self) -> f64 {
        match self {
            Self::ReversedWeibull { right_endpoint, .. } => *right_endpoint,
            _ => f64::INFINITY,
        }
    }

    /// The distribution function F_A(y).
    pub fn cdf(&self, y: f64) -> f64 {
        match self {
            Self::Frechet { alpha, scale } => {
                if y <= 0.0 {
                    0.0
                } else {
                    (-(y / scale).powf(-alpha)).exp()
                }
            }
            Self::Gumbel { location, scale } => (-(-(y - location) / scale).exp()).exp(),
            Self::ReversedWeibull {
                alpha,
                right_endpoint,
                scale,
            } => {
                if y >= *right_endpoint {
                    1.0
                } else {
                    (-((right_endpoint - y) / scale).powf(*alpha)).exp()
                }
            }
        }
    }

    /// Γ(y) = 1/(−log F_A(y)), the reduction to the 1-Fréchet scale.
    pub fn gamma_transform(&self, y: f64) -> f64 {
        match self {
            Self::Frechet { alpha, scale } => {
                if y <= 0.0 {
                    0.0
                } else {
                    (y / scale).powf(*alpha)
                }
            }
            Self::Gumbel { location, scale } => ((y - location) / scale).exp(),
            Self::ReversedWeibull {
                alpha,
                right_endpoint,
                scale,
            } => {
                if y >= *right_endpoint {
                    f64::INFINITY
                } else {
                    ((right_endpoint - y) / scale).powf(-alpha)
                }
            }
        }
    }
}

/// General-case exponent Ψ(s, y) = Ψ̃(s, Γ(y)): the 1-Fréchet exponent of
/// `params` (which must have α = 1) composed with the target's Γ transform.
///
/// Ψ = +∞ for y ≤ x₀; for y ≥ x₁ the max constraint is vacuous and the sum
/// marginal K Γ(1−β) s^β is returned.
pub fn psi_general(
    params: &SumMaxStableParams,
    target: &ExtremeValueTarget,
    s: f64,
    y: f64,
) -> Result<f64, EvalError> {
    if params.alpha() != 1.0 {
        return Err(EvalError::GeneralCaseAlpha);
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(EvalError::InvalidPoint("s must be finite and >= 0"));
    }
    if y <= target.left_endpoint() {
        return Ok(f64::INFINITY);
    }
    if y >= target.right_endpoint() {
        return Ok(marginal_sum_exponent(params, s));
    }
    let gy = target.gamma_transform(y);
    psi(params, &EvalPoint { s, y: gy })
}

/// Departure from additivity of the exponent:
///
/// ```text
/// Ψ(s, ∞) + Ψ(0, y) − Ψ(s, y) ≥ 0,
/// ```
///
/// identically zero iff the sum and max components are independent (C > 0
/// with ω carrying no positive mass) and strictly positive somewhere
/// otherwise. Since e^{−st} and 1{x ≤ y} are both decreasing, this family's
/// positive association makes the transform super-multiplicative, so the
/// difference is taken in the orientation that keeps it nonnegative.
pub fn independence_residual(
    params: &SumMaxStableParams,
    s: f64,
    y: f64,
) -> Result<f64, EvalError> {
    if !(y > 0.0) {
        return Err(EvalError::InvalidPoint("y must be positive"));
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    let joint = psi(params, &EvalPoint { s, y })?;
    Ok(marginal_sum_exponent(params, s) + marginal_max_exponent(params, y) - joint)
}

/// One row of a grid evaluation.
#[derive(Debug, Clone, Copy)]
pub struct GridRow {
    pub s: f64,
    pub y: f64,
    pub psi: f64,
    pub cl: f64,
}

/// Evaluate Ψ and exp(−Ψ) over a grid, y varying slowest.
pub fn evaluate_grid(
    params: &SumMaxStableParams,
    s_grid: &[f64],
    y_grid: &[f64],
) -> Result<Vec<GridRow>, EvalError> {
    let mut rows = Vec::with_capacity(s_grid.len() * y_grid.len());
    for &y in y_grid {
        for &s in s_grid {
            let p = EvalPoint::new(s, y)?;
            let psi_v = psi(params, &p)?;
            rows.push(GridRow {
                s,
                y,
                psi: psi_v,
                cl: (-psi_v).exp(),
            });
        }
    }
    Ok(rows)
}

/// CSV rendering of a grid evaluation: header `s,y,psi,cl`, floats with 17
/// significant digits, infinities spelled `inf`.
pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from("s,y,psi,cl\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::format_float17(r.s),
            crate::format_float17(r.y),
            crate::format_float17(r.psi),
            crate::format_float17(r.cl)
        ));
    }
    out
}
