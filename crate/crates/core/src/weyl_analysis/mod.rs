//! Comparison of computed spectra with the Weyl laws, heat-trace
//! asymptotics and boundary concentration of eigenfunctions.

pub mod fit;
pub mod karamata;
pub mod measure;
pub mod quasi_isometry;
pub mod weyl_constant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{predicted_counting, Regime};
use crate::product_spectrum::AssembledSpectrum;

pub use fit::{
    default_window, fit_constant, fit_power, fit_power_log, fit_power_pinned, geometric_grid, AsymptoticFit,
    CountSample, CountingFunction, ModelForm,
};
pub use karamata::{karamata_converse, karamata_forward, smallest_workable_epsilon, ConverseReport, ForwardReport};
pub use measure::{density_one_check, weyl_measure_estimate, DensityOneCheck, WeylMeasureEstimate};
pub use quasi_isometry::{conformal_control, quasi_isometry_experiment, QuasiIsometryReport};
pub use weyl_constant::{a_beta_n_zeta, compute_a_beta_n, ABetaN, ABetaNOptions, Z1Evaluator};

/// Samples per fit window.
pub const FIT_SAMPLES: usize = 64;

/// Regime-dispatched fit of `N(λ)` with the theoretical targets alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylFitReport {
    pub regime: Regime,
    pub target_exponent: f64,
    /// `γ_{n+1} v_g(X)`, `C_n v_G(M)` (log coefficient) or `A v_G(M)`;
    /// absent when the needed volume or constant is unknown.
    pub target_constant: Option<f64>,
    /// Free exponent (power) or the two-parameter log law (critical).
    pub fit: AsymptoticFit,
    /// Constant with the exponent held at its target; not used at the
    /// critical exponent.
    pub pinned: Option<AsymptoticFit>,
    pub exponent_deviation: f64,
    /// Relative deviation of the pinned constant (log coefficient when
    /// critical) from the target.
    pub constant_deviation: Option<f64>,
}

pub fn weyl_fit(spec: &AssembledSpectrum, window: (f64, f64), a_beta_n: Option<f64>) -> Result<WeylFitReport> {
    if window.1 > spec.lambda_max {
        return Err(crate::Error::Range { lambda: window.1, lambda_max: spec.lambda_max });
    }
    let constants = spec.model.constants();
    let samples = spec.counting_function().sample(window.0, window.1, FIT_SAMPLES);
    let target = predicted_counting(&spec.model, &constants, window.1, a_beta_n).ok();
    let target_exponent = match constants.regime {
        Regime::Supercritical => constants.d_h / 2.0,
        _ => (spec.model.n as f64 + 1.0) / 2.0,
    };
    let target_constant = target.map(|t| t.coefficient);
    let rel = |got: f64| target_constant.map(|c| got / c - 1.0);
    if constants.regime == Regime::Critical {
        let fit = fit_power_log(&samples, spec.model.n, window)?;
        return Ok(WeylFitReport {
            regime: constants.regime,
            target_exponent,
            target_constant,
            exponent_deviation: 0.0,
            constant_deviation: rel(fit.log_coefficient.unwrap_or(f64::NAN)),
            fit,
            pinned: None,
        });
    }
    let fit = fit_power(&samples, window)?;
    let pinned = fit_power_pinned(&samples, target_exponent, window)?;
    Ok(WeylFitReport {
        regime: constants.regime,
        target_exponent,
        target_constant,
        exponent_deviation: fit.exponent / target_exponent - 1.0,
        constant_deviation: rel(pinned.constant),
        fit,
        pinned: Some(pinned),
    })
}
