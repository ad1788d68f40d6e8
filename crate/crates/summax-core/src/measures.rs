//! Parametrization of sum-max stable laws and exact evaluation of their
//! Lévy measures on rectangles.
//!
//! A law is described by (β, α, C, K, ω): β ∈ (0, 1) the sum index, α > 0
//! the max index, C ≥ 0 the scale of the independent Fréchet part, K > 0
//! the scale of the dependent part, and ω a mixing probability measure.
//! The Lévy measure is
//!
//! ```text
//! η(dt, dx) = ε₀(dt) C α x^{−α−1} dx + 1{t>0} (t^{β/α} ω)(dx) K β t^{−β−1} dt
//! ```
//!
//! and rectangle masses η((r,∞) × (x,∞)) are the canonical evaluation API;
//! densities are never exposed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::{
    gamma_fn, integrate_0_inf, normal_tail, QuadratureTarget, SpecialError,
};

/// Errors from parameter validation and Lévy-measure evaluation.
#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("invalid mixing measure: {0}")]
    InvalidMixing(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("moment condition violated: need alpha < gamma, got alpha = {alpha}, gamma = {gamma}")]
    MomentDiverges { alpha: f64, gamma: f64 },
    #[error("degenerate max marginal: C = 0 and omega has no mass on (0, inf)")]
    DegenerateMax,
    #[error("rectangle must be bounded away from the origin")]
    RectangleAtOrigin,
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// One atom of a discrete mixing measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub u: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum MixingKind {
    PointMass { u: f64 },
    Discrete { atoms: Vec<Atom> },
    Frechet { gamma: f64, scale: f64 },
    StdNormal,
}

/// Mixing measure ω: the conditional law of the max-coordinate jump given
/// the waiting time, up to the dilation t^{β/α}.
///
/// Restricted to four analytically tractable families; an arbitrary ω via a
/// user-supplied tail function is a documented extension point, not v1.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMeasure {
    kind: MixingKind,
}

/// Borrowed view of a [`MixingMeasure`]'s family and parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MixingView<'a> {
    PointMass(f64),
    Discrete(&'a [Atom]),
    Frechet { gamma: f64, scale: f64 },
    StdNormal,
}

// Quartiles of the standard normal restricted to (0, ∞), i.e. Φ⁻¹ of
// 0.625, 0.75, 0.875. Used only as quadrature breakpoint hints.
const STD_NORMAL_POSITIVE_QUARTILES: [f64; 3] = [
    0.31863936396437516,
    0.6744897501960817,
    1.150349380376008,
];

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl MixingMeasure {
    /// ω = ε_u, a single atom at u ≥ 0.
    ///
    /// An atom exactly at 0 sits on the boundary of the positive half-line:
    /// it contributes to no open rectangle (x > 0) and is admissible only in
    /// the independence configuration with C > 0.
    pub fn point_mass(u: f64) -> Result<Self, MeasureError> {
        if !u.is_finite() || u < 0.0 {
            return Err(MeasureError::InvalidMixing("point mass requires u >= 0"));
        }
        Ok(Self {
            kind: MixingKind::PointMass { u },
        })
    }

    /// Finitely many atoms (u_j, w_j) with strictly positive weights summing
    /// to 1 within 1e-12. Atom positions may be negative.
    pub fn discrete(atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::InvalidMixing("discrete measure needs atoms"));
        }
        let mut total = 0.0;
        for a in &atoms {
            if !a.u.is_finite() || !a.w.is_finite() || a.w <= 0.0 {
                return Err(MeasureError::InvalidMixing(
                    "atoms need finite u and strictly positive w",
                ));
            }
            total += a.w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(MeasureError::InvalidMixing("weights must sum to 1"));
        }
        Ok(Self {
            kind: MixingKind::Discrete { atoms },
        })
    }

    /// γ-Fréchet mixing with CDF exp(−scale · z^{−γ}) on z > 0.
    pub fn frechet(gamma: f64, scale: f64) -> Result<Self, MeasureError> {
        if !(gamma > 0.0) || !gamma.is_finite() || !(scale > 0.0) || !scale.is_finite() {
            return Err(MeasureError::InvalidMixing(
                "frechet mixing requires gamma > 0 and scale > 0",
            ));
        }
        Ok(Self {
            kind: MixingKind::Frechet { gamma, scale },
        })
    }

    /// Standard normal mixing; negative mass never enters positive rectangles.
    pub fn std_normal() -> Self {
        Self {
            kind: MixingKind::StdNormal,
        }
    }

    pub(crate) fn kind(&self) -> &MixingKind {
        &self.kind
    }

    /// Read-only structural view, for rendering and dispatch.
    pub fn view(&self) -> MixingView<'_> {
        match &self.kind {
            MixingKind::PointMass { u } => MixingView::PointMass(*u),
            MixingKind::Discrete { atoms } => MixingView::Discrete(atoms),
            MixingKind::Frechet { gamma, scale } => MixingView::Frechet {
                gamma: *gamma,
                scale: *scale,
            },
            MixingKind::StdNormal => MixingView::StdNormal,
        }
    }

    /// ω((z, ∞)). Right-continuous and nonincreasing in z; callers use z > 0.
    pub fn tail(&self, z: f64) -> f64 {
        match &self.kind {
            MixingKind::PointMass { u } => {
                if *u > z {
                    1.0
                } else {
                    0.0
                }
            }
            MixingKind::Discrete { atoms } => {
                atoms.iter().filter(|a| a.u > z).map(|a| a.w).sum()
            }
            MixingKind::Frechet { gamma, scale } => {
                if z <= 0.0 {
                    1.0
                } else {
                    -(-scale * z.powf(-gamma)).exp_m1()
                }
            }
            MixingKind::StdNormal => normal_tail(z),
        }
    }

    /// ω((0, ∞)).
    pub fn positive_mass(&self) -> f64 {
        match &self.kind {
            MixingKind::PointMass { u } => {
                if *u > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            MixingKind::Discrete { atoms } => {
                atoms.iter().filter(|a| a.u > 0.0).map(|a| a.w).sum()
            }
            MixingKind::Frechet { .. } => 1.0,
            MixingKind::StdNormal => 0.5,
        }
    }

    /// ∫_0^∞ u^α ω(du), or `None` when it diverges (Fréchet with α ≥ γ).
    pub fn alpha_moment(&self, alpha: f64) -> Option<f64> {
        match &self.kind {
            MixingKind::PointMass { u } => {
                Some(if *u > 0.0 { u.powf(alpha) } else { 0.0 })
            }
            MixingKind::Discrete { atoms } => Some(
                atoms
                    .iter()
                    .filter(|a| a.u > 0.0)
                    .map(|a| a.w * a.u.powf(alpha))
                    .sum(),
            ),
            MixingKind::Frechet { gamma, scale } => {
                if alpha < *gamma {
                    let g = gamma_fn(1.0 - alpha / gamma).expect("argument in (0,1)");
                    Some(scale.powf(alpha / gamma) * g)
                } else {
                    None
                }
            }
            MixingKind::StdNormal => {
                // ∫_0^∞ u^α φ(u) du = 2^{α/2−1} Γ((α+1)/2) / √π.
                let g = gamma_fn((alpha + 1.0) / 2.0).expect("positive argument");
                Some(2.0f64.powf(alpha / 2.0 - 1.0) * g / std::f64::consts::PI.sqrt())
            }
        }
    }

    /// Atoms as (position, weight) pairs when ω is atomic.
    pub fn atoms(&self) -> Option<Vec<Atom>> {
        match &self.kind {
            MixingKind::PointMass { u } => Some(vec![Atom { u: *u, w: 1.0 }]),
            MixingKind::Discrete { atoms } => Some(atoms.clone()),
            _ => None,
        }
    }

    /// Density on (0, ∞) when ω is continuous.
    pub fn density(&self, u: f64) -> Option<f64> {
        match &self.kind {
            MixingKind::Frechet { gamma, scale } => Some(if u <= 0.0 {
                0.0
            } else {
                gamma * scale * u.powf(-gamma - 1.0) * (-scale * u.powf(-gamma)).exp()
            }),
            MixingKind::StdNormal => Some(FRAC_1_SQRT_2PI * (-0.5 * u * u).exp()),
            _ => None,
        }
    }

    /// Breakpoint hints for quadrature over u ∈ (0, ∞): the quartiles of the
    /// mass on the positive half-line.
    pub fn quartile_hints(&self) -> Vec<f64> {
        match &self.kind {
            MixingKind::PointMass { u } => vec![*u],
            MixingKind::Discrete { atoms } => {
                atoms.iter().map(|a| a.u).filter(|u| *u > 0.0).collect()
            }
            MixingKind::Frechet { gamma, scale } => [0.25f64, 0.5, 0.75]
                .iter()
                .map(|p| (scale / -p.ln()).powf(1.0 / gamma))
                .collect(),
            MixingKind::StdNormal => STD_NORMAL_POSITIVE_QUARTILES.to_vec(),
        }
    }
}

/// ω((z, ∞)) for z > 0.
pub fn omega_tail(omega: &MixingMeasure, z: f64) -> f64 {
    debug_assert!(z > 0.0, "omega_tail is specified for z > 0");
    omega.tail(z)
}

/// The (β, α, C, K, ω) parametrization of a sum-max stable law.
///
/// Construction enforces 0 < β < 1, α > 0, K > 0, C ≥ 0, the moment
/// condition ∫_0^∞ x^α ω(dx) < ∞, and non-degeneracy of the max marginal
/// (C > 0 or ω((0,∞)) > 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SumMaxStableParams {
    beta: f64,
    alpha: f64,
    c: f64,
    k: f64,
    omega: MixingMeasure,
    alpha_moment: f64,
}

impl SumMaxStableParams {
    pub fn new(
        beta: f64,
        alpha: f64,
        c: f64,
        k: f64,
        omega: MixingMeasure,
    ) -> Result<Self, MeasureError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(MeasureError::InvalidParams("beta must lie in (0, 1)"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(MeasureError::InvalidParams("alpha must be positive"));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(MeasureError::InvalidParams("K must be positive"));
        }
        if !(c >= 0.0) || !c.is_finite() {
            return Err(MeasureError::InvalidParams("C must be nonnegative"));
        }
        let alpha_moment = match &omega.kind {
            MixingKind::Frechet { gamma, .. } => omega
                .alpha_moment(alpha)
                .ok_or(MeasureError::MomentDiverges {
                    alpha,
                    gamma: *gamma,
                })?,
            _ => omega.alpha_moment(alpha).expect("finite for these families"),
        };
        if c == 0.0 && omega.positive_mass() == 0.0 {
            return Err(MeasureError::DegenerateMax);
        }
        Ok(Self {
            beta,
            alpha,
            c,
            k,
            omega,
            alpha_moment,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn omega(&self) -> &MixingMeasure {
        &self.omega
    }

    /// Cached ∫_0^∞ u^α ω(du).
    pub fn alpha_moment(&self) -> f64 {
        self.alpha_moment
    }

    /// Scale of the α-Fréchet max marginal: C + K·m_α, so that
    /// P(A ≤ y) = exp(−(C + K·m_α) y^{−α}).
    pub fn frechet_marginal_scale(&self) -> f64 {
        self.c + self.k * self.alpha_moment
    }

    /// Parse from the canonical JSON document, rejecting unknown fields.
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("params serialize")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    beta: f64,
    alpha: f64,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "K")]
    k: f64,
    omega: RawOmega,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawOmega {
    PointMass { u: f64 },
    Discrete { atoms: Vec<Atom> },
    Frechet { gamma: f64, scale: f64 },
    StdNormal,
}

impl TryFrom<RawParams> for SumMaxStableParams {
    type Error = MeasureError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        let omega = match raw.omega {
            RawOmega::PointMass { u } => MixingMeasure::point_mass(u)?,
            RawOmega::Discrete { atoms } => MixingMeasure::discrete(atoms)?,
            RawOmega::Frechet { gamma, scale } => MixingMeasure::frechet(gamma, scale)?,
            RawOmega::StdNormal => MixingMeasure::std_normal(),
        };
        SumMaxStableParams::new(raw.beta, raw.alpha, raw.c, raw.k, omega)
    }
}

impl From<SumMaxStableParams> for RawParams {
    fn from(p: SumMaxStableParams) -> Self {
        let omega = match p.omega.kind {
            MixingKind::PointMass { u } => RawOmega::PointMass { u },
            MixingKind::Discrete { atoms } => RawOmega::Discrete { atoms },
            MixingKind::Frechet { gamma, scale } => RawOmega::Frechet { gamma, scale },
            MixingKind::StdNormal => RawOmega::StdNormal,
        };
        RawParams {
            beta: p.beta,
            alpha: p.alpha,
            c: p.c,
            k: p.k,
            omega,
        }
    }
}

/// Lévy triple [x₀, a, η] with η described analytically by the parameters.
/// The Fréchet-case laws produced here always have x₀ = 0 and zero drift.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyRepresentation {
    pub x0: f64,
    pub drift_a: f64,
    pub params: SumMaxStableParams,
}

impl LevyRepresentation {
    pub fn frechet_case(params: SumMaxStableParams) -> Self {
        Self {
            x0: 0.0,
            drift_a: 0.0,
            params,
        }
    }
}

/// The matrix exponent E = diag(1/β, 1/α) of the scaling law t·η = t^E η.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingExponent {
    pub inv_beta: f64,
    pub inv_alpha: f64,
}

impl ScalingExponent {
    pub fn of(params: &SumMaxStableParams) -> Self {
        Self {
            inv_beta: 1.0 / params.beta(),
            inv_alpha: 1.0 / params.alpha(),
        }
    }
}

/// η({0} × (x, ∞)) = C x^{−α}, the mass of the independent Fréchet slice.
pub fn atom_slice_mass(params: &SumMaxStableParams, x: f64) -> f64 {
    assert!(x > 0.0, "atom_slice_mass requires x > 0");
    params.c() * x.powf(-params.alpha())
}

/// η₁((r, ∞) × (x, ∞)) = K ∫_0^∞ max(r, (u/x)^{−α/β})^{−β} ω(du), the mass
/// of the dependent part above the rectangle corner (r, x).
///
/// For x = 0 the second constraint degenerates to {J̄ > 0}, giving
/// K r^{−β} ω((0,∞)); mixing mass on (−∞, 0] never contributes. Discrete ω
/// is summed exactly; continuous ω is integrated adaptively with the
/// integrand kink at u = x·r^{−β/α} supplied as a breakpoint.
pub fn rect_mass(params: &SumMaxStableParams, r: f64, x: f64) -> Result<f64, MeasureError> {
    if !(r >= 0.0) || !(x >= 0.0) {
        return Err(MeasureError::InvalidParams(
            "rectangle corner must be nonnegative",
        ));
    }
    if r == 0.0 && x == 0.0 {
        return Err(MeasureError::RectangleAtOrigin);
    }
    let beta = params.beta();
    let alpha = params.alpha();
    let k = params.k();
    if x == 0.0 {
        return Ok(k * r.powf(-beta) * params.omega().positive_mass());
    }
    // Pointwise the integrand is min((u/x)^α, r^{−β}) on u > 0; the two
    // branches meet at u* = x·r^{−β/α}.
    let cap = r.powf(-beta); // +inf when r = 0, which min() handles.
    if let Some(atoms) = params.omega().atoms() {
        let mut acc = 0.0;
        for a in atoms {
            if a.u > 0.0 {
                acc += a.w * (a.u / x).powf(alpha).min(cap);
            }
        }
        return Ok(k * acc);
    }
    let omega = params.omega();
    let kink = x * r.powf(-beta / alpha);
    let mut hints = omega.quartile_hints();
    hints.push(kink);
    let integrand = |u: f64| {
        let d = omega.density(u).expect("continuous mixing");
        (u / x).powf(alpha).min(cap) * d
    };
    let quad = integrate_0_inf(integrand, &hints, QuadratureTarget::tight())?;
    Ok(k * quad.value)
}

/// Full mass η([0,∞) × (x,∞) ∪ (r,∞) × (x,∞)) above a rectangle corner:
/// the dependent part plus, when r = 0, the independent atom slice at t = 0.
pub fn eta_upper_mass(params: &SumMaxStableParams, r: f64, x: f64) -> Result<f64, MeasureError> {
    let mut mass = rect_mass(params, r, x)?;
    if r == 0.0 {
        mass += atom_slice_mass(params, x);
    }
    Ok(mass)
}

/// Left side of the scaling law: η evaluated on t^{−E}·((r,∞) × (x,∞)),
/// which by t·η = t^E η must equal t · [`eta_upper_mass`]`(r, x)`.
pub fn scale_levy_rect(
    params: &SumMaxStableParams,
    t: f64,
    r: f64,
    x: f64,
) -> Result<f64, MeasureError> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(MeasureError::InvalidParams("scaling factor must be positive"));
    }
    let e = ScalingExponent::of(params);
    eta_upper_mass(params, t.powf(-e.inv_beta) * r, t.powf(-e.inv_alpha) * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::integrate_0_inf;

    fn example_4_1(beta: f64) -> SumMaxStableParams {
        let k = 1.0 / gamma_fn(1.0 - beta).unwrap();
        SumMaxStableParams::new(beta, beta, 0.0, k, MixingMeasure::point_mass(1.0).unwrap())
            .unwrap()
    }

    #[test]
    fn omega_tail_point_mass() {
        let om = MixingMeasure::point_mass(1.0).unwrap();
        assert_eq!(omega_tail(&om, 0.5), 1.0);
        assert_eq!(omega_tail(&om, 1.0), 0.0); // open interval excludes the atom
        assert_eq!(omega_tail(&om, 2.0), 0.0);
    }

    #[test]
    fn omega_tail_frechet_cdf() {
        // 1 − exp(−1·2^{−2}), checked against a direct CDF evaluation.
        let om = MixingMeasure::frechet(2.0, 1.0).unwrap();
        let want = 1.0 - (-0.25f64).exp();
        assert!((omega_tail(&om, 2.0) - want).abs() < 1e-15);
        assert!((want - 0.221_199_216_928_595_1).abs() < 1e-15);
    }

    #[test]
    fn omega_tail_is_monotone_with_zero_limit() {
        let measures = [
            MixingMeasure::frechet(1.5, 2.0).unwrap(),
            MixingMeasure::std_normal(),
            MixingMeasure::discrete(vec![
                Atom { u: -1.0, w: 0.25 },
                Atom { u: 0.5, w: 0.5 },
                Atom { u: 2.0, w: 0.25 },
            ])
            .unwrap(),
        ];
        for om in &measures {
            let mut prev = f64::INFINITY;
            for z in [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
                let t = omega_tail(om, z);
                assert!(t <= prev && (0.0..=1.0).contains(&t));
                prev = t;
            }
            assert!(omega_tail(om, 1e12) < 1e-9);
        }
    }

    #[test]
    fn invalid_mixing_rejected() {
        assert!(MixingMeasure::point_mass(-0.1).is_err());
        assert!(MixingMeasure::frechet(0.0, 1.0).is_err());
        assert!(MixingMeasure::frechet(2.0, -1.0).is_err());
        assert!(MixingMeasure::discrete(vec![]).is_err());
        assert!(MixingMeasure::discrete(vec![Atom { u: 1.0, w: 0.5 }]).is_err());
        assert!(
            MixingMeasure::discrete(vec![Atom { u: 1.0, w: 1.5 }, Atom { u: 2.0, w: -0.5 }])
                .is_err()
        );
    }

    #[test]
    fn params_validation() {
        let om = || MixingMeasure::point_mass(1.0).unwrap();
        assert!(SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0, om()).is_ok());
        assert!(SumMaxStableParams::new(1.0, 1.0, 0.0, 1.0, om()).is_err());
        assert!(SumMaxStableParams::new(0.0, 1.0, 0.0, 1.0, om()).is_err());
        assert!(SumMaxStableParams::new(0.5, 0.0, 0.0, 1.0, om()).is_err());
        assert!(SumMaxStableParams::new(0.5, 1.0, -1.0, 1.0, om()).is_err());
        assert!(SumMaxStableParams::new(0.5, 1.0, 0.0, 0.0, om()).is_err());
        // Fréchet mixing needs alpha < gamma.
        let fr = MixingMeasure::frechet(2.0, 1.0).unwrap();
        assert!(matches!(
            SumMaxStableParams::new(0.5, 2.0, 0.0, 1.0, fr.clone()),
            Err(MeasureError::MomentDiverges { .. })
        ));
        assert!(SumMaxStableParams::new(0.5, 1.9, 0.0, 1.0, fr).is_ok());
        // Point mass at 0 is only admissible with C > 0.
        let zero = MixingMeasure::point_mass(0.0).unwrap();
        assert!(matches!(
            SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0, zero.clone()),
            Err(MeasureError::DegenerateMax)
        ));
        assert!(SumMaxStableParams::new(0.5, 1.0, 1.0, 1.0, zero).is_ok());
    }

    #[test]
    fn json_round_trip_and_unknown_field_rejection() {
        let doc = r#"{"beta":0.5,"alpha":1.0,"C":0.0,"K":1.0,"omega":{"kind":"point_mass","u":1.0}}"#;
        let p = SumMaxStableParams::from_json_str(doc).unwrap();
        assert_eq!(p.beta(), 0.5);
        assert_eq!(p.alpha(), 1.0);
        let back = p.to_json_string();
        let p2 = SumMaxStableParams::from_json_str(&back).unwrap();
        assert_eq!(p, p2);

        let unknown = r#"{"beta":0.5,"alpha":1.0,"C":0.0,"K":1.0,"omega":{"kind":"point_mass","u":1.0},"extra":1}"#;
        assert!(SumMaxStableParams::from_json_str(unknown).is_err());
        let unknown_omega = r#"{"beta":0.5,"alpha":1.0,"C":0.0,"K":1.0,"omega":{"kind":"point_mass","u":1.0,"x":2}}"#;
        assert!(SumMaxStableParams::from_json_str(unknown_omega).is_err());
        let invalid = r#"{"beta":1.5,"alpha":1.0,"C":0.0,"K":1.0,"omega":{"kind":"point_mass","u":1.0}}"#;
        assert!(SumMaxStableParams::from_json_str(invalid).is_err());

        let frechet = r#"{"beta":0.5,"alpha":1.0,"C":0.5,"K":2.0,"omega":{"kind":"frechet","gamma":2.0,"scale":1.0}}"#;
        let p3 = SumMaxStableParams::from_json_str(frechet).unwrap();
        assert_eq!(p3.omega().quartile_hints().len(), 3);
        let discrete = r#"{"beta":0.5,"alpha":1.0,"C":0.0,"K":1.0,"omega":{"kind":"discrete","atoms":[{"u":0.5,"w":0.5},{"u":2.0,"w":0.5}]}}"#;
        assert!(SumMaxStableParams::from_json_str(discrete).is_ok());
        let normal = r#"{"beta":0.5,"alpha":1.0,"C":0.0,"K":1.0,"omega":{"kind":"std_normal"}}"#;
        assert!(SumMaxStableParams::from_json_str(normal).is_ok());
    }

    #[test]
    fn atom_slice_values() {
        let om = MixingMeasure::point_mass(1.0).unwrap();
        let p0 = SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0, om.clone()).unwrap();
        assert_eq!(atom_slice_mass(&p0, 3.0), 0.0);
        let p1 = SumMaxStableParams::new(0.5, 1.0, 2.0, 1.0, om.clone()).unwrap();
        assert!((atom_slice_mass(&p1, 4.0) - 0.5).abs() < 1e-15);
        let p2 = SumMaxStableParams::new(0.5, 2.0, 1.0, 1.0, om).unwrap();
        assert!((atom_slice_mass(&p2, 3.0) - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rect_mass_example_4_1_closed_form() {
        // K max(r, x)^{−β} with K = 1/Γ(1/2): at (1, 4) this is 0.5/√π.
        let p = example_4_1(0.5);
        let got = rect_mass(&p, 1.0, 4.0).unwrap();
        assert!((got - 0.282_094_791_773_878_14).abs() < 1e-15);
        // Max-constraint vacuous at x = 0 for a positive atom.
        let full = rect_mass(&p, 1.0, 0.0).unwrap();
        assert!((full - p.k()).abs() < 1e-15);
        assert!(rect_mass(&p, 0.0, 0.0).is_err());
    }

    #[test]
    fn rect_mass_discrete_matches_atom_sum() {
        let om = MixingMeasure::discrete(vec![
            Atom { u: 0.5, w: 0.5 },
            Atom { u: 2.0, w: 0.5 },
        ])
        .unwrap();
        let p = SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0, om).unwrap();
        // Atom-sum oracle: w · max(r, (u/x)^{-a/b})^{-b}, confirmed by the
        // direct tail-integral route int_r^inf omega(t^{-b/a} x, inf) b t^{-b-1} dt.
        let got = rect_mass(&p, 1.0, 1.0).unwrap();
        let want = 0.5 * (2.0f64 / 1.0).powf(-2.0f64).max(1.0).powf(-0.5)
            + 0.5 * (0.5f64 / 1.0).powf(-2.0f64).max(1.0).powf(-0.5);
        assert!((got - want).abs() < 1e-15);
        assert!((want - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rect_mass_ignores_nonpositive_mass() {
        let om = MixingMeasure::discrete(vec![
            Atom { u: -2.0, w: 0.25 },
            Atom { u: 0.0, w: 0.25 },
            Atom { u: 1.0, w: 0.5 },
        ])
        .unwrap();
        let p = SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0, om).unwrap();
        // Only the positive atom contributes for x > 0 …
        let got = rect_mass(&p, 1.0, 2.0).unwrap();
        assert!((got - 0.5 * 0.5).abs() < 1e-15);
        // … and for x = 0 the constraint is J̄ > 0, so again only u > 0.
        let got0 = rect_mass(&p, 1.0, 0.0).unwrap();
        assert!((got0 - 0.5).abs() < 1e-15);
    }

    // 10^6-point trapezoid oracle for the continuous-ω rectangle mass; the
    // domain is truncated at hi = 60 past the integrand kink, where the
    // integrand is exactly cap · density, so the remainder is completed
    // analytically as cap · ω((hi, ∞)).
    fn trapezoid_rect_mass(params: &SumMaxStableParams, r: f64, x: f64) -> f64 {
        let omega = params.omega();
        let (lo, hi) = (1e-9, 60.0);
        let n = 1_000_000usize;
        let h = (hi - lo) / n as f64;
        let cap = r.powf(-params.beta());
        assert!(x * r.powf(-params.beta() / params.alpha()) < hi);
        let f = |u: f64| {
            omega.density(u).unwrap() * (u / x).powf(params.alpha()).min(cap)
        };
        let mut acc = 0.5 * (f(lo) + f(hi));
        for i in 1..n {
            acc += f(lo + i as f64 * h);
        }
        params.k() * (acc * h + cap * omega.tail(hi))
    }

    #[test]
    fn rect_mass_frechet_vs_trapezoid_oracle() {
        let om = MixingMeasure::frechet(2.0, 1.0).unwrap();
        let p = SumMaxStableParams::new(0.5, 1.0, 0.0, 1.3, om).unwrap();
        for (r, x) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
            let fast = rect_mass(&p, r, x).unwrap();
            let slow = trapezoid_rect_mass(&p, r, x);
            assert!(
                (fast - slow).abs() <= 1e-7 * slow.abs(),
                "(r,x)=({r},{x}): {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn rect_mass_std_normal_vs_trapezoid_oracle() {
        let p =
            SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0, MixingMeasure::std_normal()).unwrap();
        for (r, x) in [(1.0, 1.0), (0.2, 0.7)] {
            let fast = rect_mass(&p, r, x).unwrap();
            let slow = trapezoid_rect_mass(&p, r, x);
            assert!(
                (fast - slow).abs() <= 1e-7 * slow.abs(),
                "(r,x)=({r},{x}): {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn scaling_law_grid() {
        // t·mass(B) = mass(t^{−E} B) over the documented grid, three example
        // parameter sets, 1e-9 relative.
        let examples = vec![
            example_4_1(0.5),
            SumMaxStableParams::new(0.5, 1.0, 0.0, 1.0 / std::f64::consts::PI.sqrt(), MixingMeasure::std_normal()).unwrap(),
            SumMaxStableParams::new(
                0.5,
                1.0,
                0.0,
                1.0 / std::f64::consts::PI.sqrt(),
                MixingMeasure::frechet(2.0, 1.0).unwrap(),
            )
            .unwrap(),
        ];
        for p in &examples {
            for t in [0.1, 0.5, 2.0, 10.0] {
                for r in [0.0, 0.2, 1.0, 5.0] {
                    for x in [0.0, 0.2, 1.0, 5.0] {
                        if r == 0.0 && x == 0.0 {
                            continue;
                        }
                        let direct = t * eta_upper_mass(p, r, x).unwrap();
                        let scaled = scale_levy_rect(p, t, r, x).unwrap();
                        assert!(
                            (direct - scaled).abs() <= 1e-9 * direct.abs(),
                            "t={t} r={r} x={x}: {direct} vs {scaled}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn atom_slice_scaling_self_similarity() {
        let p = SumMaxStableParams::new(
            0.5,
            2.0,
            1.0,
            1.0,
            MixingMeasure::point_mass(1.0).unwrap(),
        )
        .unwrap();
        // 9 · C x^{−2} at x = 1 equals the slice at x = 9^{−1/2}.
        let direct = 9.0 * atom_slice_mass(&p, 1.0);
        let scaled = atom_slice_mass(&p, 9.0f64.powf(-0.5));
        assert!((direct - scaled).abs() < 1e-12);
        assert!((direct - 9.0).abs() < 1e-12);
    }

    #[test]
    fn frechet_marginal_identity() {
        // atom_slice + lim_{r→0} rect_mass(r, x) = (C + K m_α) x^{−α}.
        let cases = vec![
            SumMaxStableParams::new(0.5, 1.0, 0.7, 1.2, MixingMeasure::std_normal()).unwrap(),
            SumMaxStableParams::new(
                0.3,
                1.4,
                0.2,
                2.0,
                MixingMeasure::frechet(2.0, 1.5).unwrap(),
            )
            .unwrap(),
            SumMaxStableParams::new(
                0.8,
                0.6,
                0.0,
                1.0,
                MixingMeasure::discrete(vec![
                    Atom { u: 0.5, w: 0.5 },
                    Atom { u: 2.0, w: 0.5 },
                ])
                .unwrap(),
            )
            .unwrap(),
        ];
        for p in &cases {
            for x in [0.5, 1.0, 3.0] {
                let lhs = eta_upper_mass(p, 0.0, x).unwrap();
                let rhs = p.frechet_marginal_scale() * x.powf(-p.alpha());
                assert!(
                    (lhs - rhs).abs() <= 1e-8 * rhs.abs(),
                    "x={x}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn std_normal_moment_constant_vs_quadrature_oracle() {
        // The closed-form m_α for standard normal mixing, verified against a
        // direct numeric integral of u^α φ(u).
        let om = MixingMeasure::std_normal();
        for alpha in [0.5, 1.0, 1.6, 2.0, 3.0] {
            let closed = om.alpha_moment(alpha).unwrap();
            let quad = integrate_0_inf(
                |u| u.powf(alpha) * FRAC_1_SQRT_2PI * (-0.5 * u * u).exp(),
                &[1.0],
                QuadratureTarget::default(),
            )
            .unwrap();
            assert!(
                (closed - quad.value).abs() <= 1e-10 * closed,
                "alpha={alpha}: {closed} vs {}",
                quad.value
            );
        }
        // Spot values: m_1 = 1/√(2π), m_2 = 1/2.
        assert!((om.alpha_moment(1.0).unwrap() - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((om.alpha_moment(2.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn frechet_moment_closed_form() {
        // m_α = scale^{α/γ} Γ(1 − α/γ); for γ=2, scale=1, α=1: Γ(1/2) = √π.
        let om = MixingMeasure::frechet(2.0, 1.0).unwrap();
        let got = om.alpha_moment(1.0).unwrap();
        assert!((got - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!(om.alpha_moment(2.0).is_none());
    }

    #[test]
    fn monotonicity_in_rectangle_corner() {
        let p = SumMaxStableParams::new(
            0.4,
            0.9,
            0.3,
            1.1,
            MixingMeasure::frechet(2.0, 1.0).unwrap(),
        )
        .unwrap();
        let grid = [0.0, 0.3, 1.0, 2.5];
        for (i, &r) in grid.iter().enumerate() {
            for (j, &x) in grid.iter().enumerate() {
                if r == 0.0 && x == 0.0 {
                    continue;
                }
                let m = rect_mass(&p, r, x).unwrap();
                if i + 1 < grid.len() {
                    let m_r = rect_mass(&p, grid[i + 1], x).unwrap();
                    assert!(m_r <= m + 1e-12);
                }
                if j + 1 < grid.len() {
                    let m_x = rect_mass(&p, r, grid[j + 1]).unwrap();
                    assert!(m_x <= m + 1e-12);
                }
            }
        }
    }

    #[test]
    fn levy_representation_and_scaling_exponent() {
        let p = example_4_1(0.5);
        let rep = LevyRepresentation::frechet_case(p.clone());
        assert_eq!(rep.x0, 0.0);
        assert_eq!(rep.drift_a, 0.0);
        // Integrability witnesses: finite masses on sets bounded away from 0.
        assert!(rect_mass(&rep.params, 0.5, 0.0).unwrap().is_finite());
        assert!(eta_upper_mass(&rep.params, 0.0, 0.5).unwrap().is_finite());
        let e = ScalingExponent::of(&p);
        assert_eq!(e.inv_beta, 2.0);
        assert_eq!(e.inv_alpha, 2.0);
    }
}
