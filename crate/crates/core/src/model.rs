//! Geometric parameters of a gas-giant manifold and the closed-form
//! quantities derived from them.
//!
//! Near the boundary the metric reads `dx² + x^{-β} g₁` on `(0, outer_x] × M`,
//! with `M` a closed `n`-dimensional base. Everything here is a pure function
//! of `(n, β)` plus the base volume.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::base_spectrum::BaseManifold;
use crate::error::{Error, Result};

/// Relative slack used when deciding whether `β` sits exactly on `β_c`.
const CRITICAL_REL_TOL: f64 = 1e-12;

/// How the collar `(0, outer_x]` is closed off away from the singular boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainVariant {
    /// Dirichlet wall at `x = outer_x`; every base mode, including `ω = 0`.
    CompactSlab,
    /// Half-line cone truncated by the confinement rule; `ω = 0` excluded.
    TruncatedCone,
}

impl std::str::FromStr for DomainVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compact-slab" | "slab" => Ok(DomainVariant::CompactSlab),
            "truncated-cone" | "cone" => Ok(DomainVariant::TruncatedCone),
            other => Err(Error::Parse(format!("unknown domain variant `{other}`"))),
        }
    }
}

impl std::fmt::Display for DomainVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainVariant::CompactSlab => "compact-slab",
            DomainVariant::TruncatedCone => "truncated-cone",
        })
    }
}

/// The problem definition: dimension, singularity exponent, base and domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasGiantModel {
    pub n: usize,
    pub beta: f64,
    pub base: BaseManifold,
    pub variant: DomainVariant,
    pub outer_x: f64,
}

impl GasGiantModel {
    pub fn new(
        n: usize,
        beta: f64,
        base: BaseManifold,
        variant: DomainVariant,
        outer_x: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension n must be at least 1"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::domain(format!("beta must be positive, got {beta}")));
        }
        if !(outer_x.is_finite() && outer_x > 0.0) {
            return Err(Error::domain(format!("outer_x must be positive, got {outer_x}")));
        }
        base.validate()?;
        if base.dim() != n {
            return Err(Error::domain(format!(
                "base manifold has dimension {} but n = {n}",
                base.dim()
            )));
        }
        Ok(Self { n, beta, base, variant, outer_x })
    }

    /// Builds the model from the sound-speed exponent `α ∈ (0, 2)`.
    pub fn from_alpha(
        n: usize,
        alpha: f64,
        base: BaseManifold,
        variant: DomainVariant,
        outer_x: f64,
    ) -> Result<Self> {
        Self::new(n, alpha_to_beta(alpha)?, base, variant, outer_x)
    }

    pub fn alpha(&self) -> f64 {
        2.0 * self.beta / (2.0 + self.beta)
    }

    pub fn constants(&self) -> DerivedConstants {
        derive_constants(self)
    }

    /// `v_G(M)`, when the base carries a known volume.
    pub fn base_volume(&self) -> Option<f64> {
        self.base.volume()
    }

    /// Volume of the collar `(0, outer_x] × M` in the singular metric.
    pub fn volume_profile(&self) -> VolumeProfile {
        let exponent = 1.0 - self.beta * self.n as f64 / 2.0;
        let total_volume = match self.base_volume() {
            Some(v) if exponent > 0.0 => {
                TotalVolume::Finite(v * self.outer_x.powf(exponent) / exponent)
            }
            Some(_) => TotalVolume::Infinite,
            None if exponent > 0.0 => TotalVolume::Unknown,
            None => TotalVolume::Infinite,
        };
        VolumeProfile { total_volume, exponent, outer_x: self.outer_x }
    }
}

/// Where `β` sits relative to `β_c = 2/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub beta_c: f64,
    /// Hausdorff dimension `max(n+1, δ_H)`.
    pub d_h: f64,
    pub delta_h: f64,
    /// Coefficient of the `1/x²` potential after the half-density change.
    pub c_beta: f64,
    pub gamma_n: f64,
    pub gamma_n_plus_1: f64,
    pub regime: Regime,
}

/// Total volume of the collar; infinite volume is a distinct state, never a
/// large float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum TotalVolume {
    Finite(f64),
    Infinite,
    /// Finite but the base volume was not supplied.
    Unknown,
}

impl TotalVolume {
    pub fn is_finite(&self) -> bool {
        !matches!(self, TotalVolume::Infinite)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            TotalVolume::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeProfile {
    pub total_volume: TotalVolume,
    /// `1 − βn/2`; the collar volume below depth `a` scales like `a^exponent`.
    pub exponent: f64,
    pub outer_x: f64,
}

impl VolumeProfile {
    /// Fraction of the volume lying in `{x ≤ a}`; `None` when the volume is
    /// infinite.
    pub fn boundary_fraction(&self, a: f64) -> Option<f64> {
        if !self.total_volume.is_finite() {
            return None;
        }
        let a = a.clamp(0.0, self.outer_x);
        Some((a / self.outer_x).powf(self.exponent))
    }
}

/// `β = 2α / (2 − α)`.
pub fn alpha_to_beta(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    Ok(2.0 * alpha / (2.0 - alpha))
}

/// Inverse of [`alpha_to_beta`].
pub fn beta_to_alpha(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    Ok(2.0 * beta / (2.0 + beta))
}

/// Classical Weyl constant `γ_n = 1 / ((4π)^{n/2} Γ(n/2 + 1))`.
pub fn weyl_gamma(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    1.0 / ((4.0 * PI).powf(half) * gamma(half + 1.0))
}

/// Coefficient `C_n` of the `λ^{(n+1)/2} ln λ` law at the critical exponent.
pub fn critical_log_constant(n: usize) -> f64 {
    let m = n as f64 + 1.0;
    1.0 / (m * (4.0 * PI).powf(m / 2.0) * gamma(m / 2.0))
}

/// `C_β = (βn/4)(βn/4 + 1)`.
pub fn c_beta(n: usize, beta: f64) -> f64 {
    let b = beta * n as f64 / 4.0;
    b * (b + 1.0)
}

pub fn classify_regime(n: usize, beta: f64) -> Regime {
    let beta_c = 2.0 / n as f64;
    if (beta - beta_c).abs() <= CRITICAL_REL_TOL * beta_c {
        Regime::Critical
    } else if beta > beta_c {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    }
}

pub fn derive_constants(model: &GasGiantModel) -> DerivedConstants {
    constants_for(model.n, model.beta)
}

pub fn constants_for(n: usize, beta: f64) -> DerivedConstants {
    let nf = n as f64;
    let delta_h = nf * (1.0 + beta / 2.0);
    let regime = classify_regime(n, beta);
    // d_H is continuous across β_c; snap it there so n+1 comes out exact.
    let d_h = match regime {
        Regime::Critical => nf + 1.0,
        _ => (nf + 1.0).max(delta_h),
    };
    DerivedConstants {
        beta_c: 2.0 / nf,
        d_h,
        delta_h,
        c_beta: c_beta(n, beta),
        gamma_n: weyl_gamma(n),
        gamma_n_plus_1: weyl_gamma(n + 1),
        regime,
    }
}

/// Leading term of `N(λ)` for the model's regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedLeadingTerm {
    pub regime: Regime,
    /// Power of `λ` in the leading term.
    pub exponent: f64,
    /// Whether the leading term carries an extra `ln λ` factor.
    pub log_factor: bool,
    /// Full coefficient, volume included: `A v_G`, `C_n v_G` or `γ_{n+1} v_g(X)`.
    pub coefficient: f64,
    /// `C_n`, reported for every regime.
    pub critical_constant: f64,
    pub lambda: f64,
    pub value: f64,
}

/// Leading Weyl term at `lambda`. The supercritical regime needs `A(β, n)`
/// (see [`crate::weyl_analysis::compute_a_beta_n`]).
pub fn predicted_counting(
    model: &GasGiantModel,
    constants: &DerivedConstants,
    lambda: f64,
    a_beta_n: Option<f64>,
) -> Result<PredictedLeadingTerm> {
    let nf = model.n as f64;
    let critical_constant = critical_log_constant(model.n);
    let base_volume = || {
        model
            .base_volume()
            .ok_or_else(|| Error::MissingDependency("base volume v_G(M)".into()))
    };
    let (exponent, log_factor, coefficient) = match constants.regime {
        Regime::Supercritical => {
            let a = a_beta_n.ok_or_else(|| {
                Error::MissingDependency("A(beta, n) is required in the supercritical regime".into())
            })?;
            (constants.d_h / 2.0, false, a * base_volume()?)
        }
        Regime::Critical => ((nf + 1.0) / 2.0, true, critical_constant * base_volume()?),
        Regime::Subcritical => {
            let volume = match model.volume_profile().total_volume {
                TotalVolume::Finite(v) => v,
                TotalVolume::Infinite => {
                    return Err(Error::domain("subcritical model with infinite volume"))
                }
                TotalVolume::Unknown => {
                    return Err(Error::MissingDependency("base volume v_G(M)".into()))
                }
            };
            ((nf + 1.0) / 2.0, false, constants.gamma_n_plus_1 * volume)
        }
    };
    let mut value = coefficient * lambda.powf(exponent);
    if log_factor {
        value *= lambda.ln();
    }
    Ok(PredictedLeadingTerm {
        regime: constants.regime,
        exponent,
        log_factor,
        coefficient,
        critical_constant,
        lambda,
        value,
    })
}

/// Weyl limit-point/limit-circle classification of `−∂² + C/x²` at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointClass {
    EssentiallySelfAdjoint,
    FriedrichsRequired,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndpointExponents {
    pub class: EndpointClass,
    /// Roots of `−γ(γ−1) + C = 0`; local solutions behave like `x^γ±`.
    pub gamma_plus: f64,
    pub gamma_minus: f64,
}

pub fn self_adjointness_class(c: f64) -> Result<EndpointExponents> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::domain(format!("C must be nonnegative, got {c}")));
    }
    let root = (1.0 + 4.0 * c).sqrt();
    let class = if c >= 0.75 {
        EndpointClass::EssentiallySelfAdjoint
    } else {
        EndpointClass::FriedrichsRequired
    };
    Ok(EndpointExponents {
        class,
        gamma_plus: (1.0 + root) / 2.0,
        gamma_minus: (1.0 - root) / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn circle_model(beta: f64) -> GasGiantModel {
        GasGiantModel::new(
            1,
            beta,
            BaseManifold::Circle { circumference: 2.0 * PI },
            DomainVariant::CompactSlab,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha_to_beta(1.0).unwrap(), 2.0);
        assert_relative_eq!(alpha_to_beta(4.0 / 3.0).unwrap(), 4.0, max_relative = 1e-14);
        assert!(alpha_to_beta(1e-9).unwrap() < 1e-8);
        assert!(alpha_to_beta(0.0).is_err());
        assert!(alpha_to_beta(2.0).is_err());
        assert!(alpha_to_beta(-1.0).is_err());
    }

    #[test]
    fn alpha_beta_round_trip_grid() {
        for i in 1..1000 {
            let alpha = 2.0 * i as f64 / 1000.0;
            let beta = alpha_to_beta(alpha).unwrap();
            let back = alpha_to_beta(beta_to_alpha(beta).unwrap()).unwrap();
            assert!(((back - beta) / beta).abs() < 1e-12, "alpha = {alpha}");
        }
    }

    #[test]
    fn derived_constants_examples() {
        let c = constants_for(1, 4.0);
        assert_eq!(c.d_h, 3.0);
        assert_eq!(c.delta_h, 3.0);
        assert_eq!(c.beta_c, 2.0);
        assert_eq!(c.c_beta, 2.0);
        assert_eq!(c.regime, Regime::Supercritical);

        let c = constants_for(1, 2.0);
        assert_eq!(c.c_beta, 0.75);
        assert_eq!(c.regime, Regime::Critical);

        let c = constants_for(2, 1.0);
        assert_eq!(c.beta_c, 1.0);
        assert_eq!(c.regime, Regime::Critical);
        assert_eq!(c.d_h, 3.0);
        assert_eq!(c.delta_h, 3.0);
    }

    #[test]
    fn weyl_gammas() {
        assert_relative_eq!(weyl_gamma(1), 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(weyl_gamma(2), 1.0 / (4.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(critical_log_constant(1), 1.0 / (8.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn subcritical_circle_prediction() {
        let model = circle_model(1.0);
        let constants = model.constants();
        let volume = model.volume_profile();
        assert_relative_eq!(volume.total_volume.value().unwrap(), 4.0 * PI, max_relative = 1e-14);
        let lead = predicted_counting(&model, &constants, 100.0, None).unwrap();
        assert_eq!(lead.exponent, 1.0);
        assert_relative_eq!(lead.coefficient, 1.0, max_relative = 1e-14);
        assert_relative_eq!(lead.value, 100.0, max_relative = 1e-14);
        assert_relative_eq!(volume.boundary_fraction(0.25).unwrap(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn critical_prediction_carries_log() {
        let model = circle_model(2.0);
        let lead = predicted_counting(&model, &model.constants(), 1000.0, None).unwrap();
        assert!(lead.log_factor);
        assert_relative_eq!(lead.coefficient, 0.25, max_relative = 1e-14);
        assert_relative_eq!(lead.critical_constant, 1.0 / (8.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(lead.value, 0.25 * 1000.0 * 1000f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn supercritical_needs_a_constant() {
        let model = circle_model(4.0);
        let err = predicted_counting(&model, &model.constants(), 10.0, None).unwrap_err();
        assert!(matches!(err, Error::MissingDependency(_)));
        let lead = predicted_counting(&model, &model.constants(), 100.0, Some(0.5)).unwrap();
        assert_eq!(lead.exponent, 1.5);
        assert_relative_eq!(lead.value, 0.5 * 2.0 * PI * 1000.0, max_relative = 1e-14);
        assert_eq!(model.volume_profile().total_volume, TotalVolume::Infinite);
        assert!(model.volume_profile().boundary_fraction(0.5).is_none());
    }

    #[test]
    fn endpoint_classification() {
        let e = self_adjointness_class(0.75).unwrap();
        assert_eq!(e.class, EndpointClass::EssentiallySelfAdjoint);
        assert_eq!(e.gamma_plus, 1.5);
        assert_eq!(e.gamma_minus, -0.5);

        let e = self_adjointness_class(0.0).unwrap();
        assert_eq!(e.class, EndpointClass::FriedrichsRequired);
        assert_eq!((e.gamma_plus, e.gamma_minus), (1.0, 0.0));

        let e = self_adjointness_class(2.0).unwrap();
        assert_eq!(e.class, EndpointClass::EssentiallySelfAdjoint);
        assert_eq!((e.gamma_plus, e.gamma_minus), (2.0, -1.0));

        assert!(self_adjointness_class(-0.1).is_err());
    }

    #[test]
    fn invalid_models_rejected() {
        let circle = BaseManifold::Circle { circumference: 1.0 };
        assert!(GasGiantModel::new(0, 1.0, circle.clone(), DomainVariant::CompactSlab, 1.0).is_err());
        assert!(GasGiantModel::new(1, 0.0, circle.clone(), DomainVariant::CompactSlab, 1.0).is_err());
        assert!(GasGiantModel::new(2, 1.0, circle, DomainVariant::CompactSlab, 1.0).is_err());
    }

    #[test]
    fn c_beta_threshold_matches_regime_on_grid() {
        for n in 1..=6 {
            let beta_c = 2.0 / n as f64;
            for i in 1..=400 {
                let beta = 0.01 * i as f64;
                let c = c_beta(n, beta);
                let regime = classify_regime(n, beta);
                let at_or_above = regime != Regime::Subcritical;
                assert_eq!(c >= 0.75, at_or_above, "n={n} beta={beta}");
            }
            assert_eq!(c_beta(n, beta_c), 0.75);
            let exps = constants_for(n, beta_c);
            assert_eq!(exps.d_h, n as f64 + 1.0);
        }
    }

    proptest! {
        #[test]
        fn boundary_fraction_is_a_cdf(beta in 0.05f64..1.95, outer in 0.2f64..5.0,
                                      a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let model = GasGiantModel::new(
                1, beta, BaseManifold::Circle { circumference: 2.0 * PI },
                DomainVariant::CompactSlab, outer).unwrap();
            let profile = model.volume_profile();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let f_lo = profile.boundary_fraction(lo * outer).unwrap();
            let f_hi = profile.boundary_fraction(hi * outer).unwrap();
            prop_assert!(f_lo <= f_hi);
            prop_assert_eq!(profile.boundary_fraction(0.0).unwrap(), 0.0);
            prop_assert!((profile.boundary_fraction(outer).unwrap() - 1.0).abs() < 1e-15);
        }

        #[test]
        fn d_h_dominates_topological_dimension(n in 1usize..6, beta in 0.01f64..10.0) {
            let c = constants_for(n, beta);
            prop_assert!(c.d_h >= n as f64 + 1.0);
            prop_assert_eq!(c.d_h > n as f64 + 1.0, c.regime == Regime::Supercritical);
        }
    }
}
