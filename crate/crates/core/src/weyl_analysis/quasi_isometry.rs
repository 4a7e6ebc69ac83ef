//! Eigenvalue stability under an `ε`-quasi-isometric change of the metric.
//!
//! The perturbed metric `dx² + x^{−β}(1 + εη(x)) g₁` keeps the product
//! structure, so every base level still gives a one-dimensional problem, now
//! in the weighted Sturm–Liouville form.

use serde::{Deserialize, Serialize};

use crate::base_spectrum::EigenvalueStream;
use crate::error::{Error, Result};
use crate::model::{DomainVariant, GasGiantModel};
use crate::schrodinger1d::{eigen_below, EtaProfile, Operator1D, SolverOptions, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiIsometryReport {
    pub eps: f64,
    pub eta: EtaProfile,
    pub j_max: usize,
    pub lambda_max: f64,
    /// `|λ_j^pert / λ_j − 1|` for `j = 1..=j_max`.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// 1-based index attaining the maximum.
    pub worst_index: usize,
    /// `max_deviation / eps`, an empirical lower bound on `C(n)`.
    pub empirical_constant: Option<f64>,
}

/// The first eigenvalues, with multiplicity, of the weighted problem over
/// every base level. `None` when fewer than `count` lie below `lambda_max`.
fn weighted_spectrum(
    model: &GasGiantModel,
    weight: Weight,
    omega_scale: f64,
    lambda_max: f64,
    count: usize,
    opts: &SolverOptions,
) -> Result<Option<Vec<f64>>> {
    let mut all = Vec::new();
    for (k, level) in EigenvalueStream::new(&model.base).enumerate() {
        let omega = level.omega * omega_scale;
        let op = Operator1D::sturm_liouville(weight, omega, model.outer_x);
        let s = eigen_below(&op, lambda_max, opts).map_err(|e| Error::Mode { k, omega, source: Box::new(e) })?;
        // The potential grows with ω, so an empty level ends the search.
        if s.is_empty() && omega > 0.0 {
            break;
        }
        for &l in &s.eigenvalues {
            all.extend(std::iter::repeat_n(l, level.multiplicity as usize));
        }
    }
    if all.len() < count {
        return Ok(None);
    }
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    Ok(Some(all))
}

fn check_model(model: &GasGiantModel, eps: f64) -> Result<()> {
    if model.n != 1 || model.variant != DomainVariant::CompactSlab {
        return Err(Error::domain("the experiment needs n = 1 on the compact slab"));
    }
    if !(eps.is_finite() && eps.abs() <= 0.5) {
        return Err(Error::domain(format!("eps must satisfy |eps| ≤ 1/2, got {eps}")));
    }
    Ok(())
}

/// Paired first-`j_max` spectra of the reference and a variant, growing the
/// window until both are complete.
fn paired(
    model: &GasGiantModel,
    variant: (Weight, f64),
    j_max: usize,
    opts: &SolverOptions,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let base = Weight::separable(model.beta);
    let mut lambda_max = 4.0 * j_max as f64;
    for _ in 0..40 {
        let a = weighted_spectrum(model, base, 1.0, lambda_max, j_max, opts)?;
        let b = weighted_spectrum(model, variant.0, variant.1, lambda_max, j_max, opts)?;
        if let (Some(a), Some(b)) = (a, b) {
            return Ok((lambda_max, a, b));
        }
        lambda_max *= 2.0;
    }
    Err(Error::Insufficient(format!("could not reach {j_max} eigenvalues")))
}

/// Maximum relative eigenvalue deviation over `j ≤ j_max` between the
/// separable metric and its perturbation.
pub fn quasi_isometry_experiment(
    model: &GasGiantModel,
    eps: f64,
    eta: EtaProfile,
    j_max: usize,
    opts: &SolverOptions,
) -> Result<QuasiIsometryReport> {
    check_model(model, eps)?;
    if j_max == 0 {
        return Err(Error::domain("j_max must be at least 1"));
    }
    if let EtaProfile::Bump { support } = eta {
        if !(support > 0.0 && support <= model.outer_x) {
            return Err(Error::domain(format!("bump support {support} outside (0, {}]", model.outer_x)));
        }
    }
    let weight = Weight { beta: model.beta, eps, eta };
    let (lambda_max, base, pert) = paired(model, (weight, 1.0), j_max, opts)?;
    let deviations: Vec<f64> = base.iter().zip(&pert).map(|(b, p)| (p / b - 1.0).abs()).collect();
    let (worst, max_deviation) = deviations
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
    Ok(QuasiIsometryReport {
        eps,
        eta,
        j_max,
        lambda_max,
        deviations,
        max_deviation,
        worst_index: worst + 1,
        empirical_constant: (eps != 0.0).then(|| max_deviation / eps.abs()),
    })
}

/// Constant `η ≡ 1` rescales `g₁`, which is the same as dividing every base
/// eigenvalue by `1 + ε`. Returns the largest relative mismatch between the
/// two constructions over `j ≤ j_max`.
pub fn conformal_control(model: &GasGiantModel, eps: f64, j_max: usize, opts: &SolverOptions) -> Result<f64> {
    check_model(model, eps)?;
    let scaled_weight = Weight { beta: model.beta, eps, eta: EtaProfile::Constant };
    let (lambda_max, _, weighted) = paired(model, (scaled_weight, 1.0), j_max, opts)?;
    let rescaled = weighted_spectrum(model, Weight::separable(model.beta), 1.0 / (1.0 + eps), lambda_max, j_max, opts)?
        .ok_or_else(|| Error::Insufficient("rescaled spectrum incomplete".into()))?;
    Ok(weighted.iter().zip(&rescaled).map(|(a, b)| (a / b - 1.0).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_spectrum::BaseManifold;

    fn model() -> GasGiantModel {
        GasGiantModel::new(1, 2.0, BaseManifold::circle(2.0 * std::f64::consts::PI), DomainVariant::CompactSlab, 1.0)
            .unwrap()
    }

    #[test]
    fn zero_perturbation_is_exact() {
        let r = quasi_isometry_experiment(&model(), 0.0, EtaProfile::Bump { support: 0.5 }, 30, &SolverOptions::default())
            .unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.empirical_constant.is_none());
    }

    #[test]
    fn rejects_large_eps() {
        let err = quasi_isometry_experiment(&model(), 0.6, EtaProfile::Constant, 10, &SolverOptions::default());
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn conformal_rescaling() {
        let d = conformal_control(&model(), 0.1, 30, &SolverOptions::default()).unwrap();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn small_bump_moves_little() {
        let r = quasi_isometry_experiment(&model(), 0.02, EtaProfile::Bump { support: 0.5 }, 30, &SolverOptions::default())
            .unwrap();
        assert!(r.max_deviation > 0.0 && r.max_deviation <= 2.0 * 0.02, "{r:?}");
    }
}
