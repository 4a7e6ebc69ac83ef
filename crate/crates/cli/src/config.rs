//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use gg_spectra::schrodinger1d::EtaProfile;
use gg_spectra::{BaseManifold, DomainVariant, GasGiantModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every field is optional so that a file and the flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `circle:L`, `sphere:n:r`, `torus:L1,...` or `file:PATH`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<DomainVariant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outer_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaProfile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    /// Eigenvalue budget of the `Z₁` sum behind `A(β, n)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z1_cut: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config `{}`: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config `{}`: {e}", path.display())))
    }

    /// Fields set in `over` replace those here. Giving either of
    /// `alpha`/`beta` on the command line clears the other from the file.
    pub fn merge(mut self, over: RunConfig) -> Self {
        if over.alpha.is_some() || over.beta.is_some() {
            self.alpha = None;
            self.beta = None;
        }
        overlay!(self, over; n, beta, alpha, base, variant, outer_x, lambda_max, tol, workers, out, format,
            omega, a_grid, lambda, interval, epsilon, eps, eta, j_max, t_grid, points, window, z1_cut, suite);
        self
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        let tol = self.tol.unwrap_or(1e-4);
        positive("tol", tol)?;
        if tol >= 0.1 {
            return Err(field("tol", format!("must be below 0.1, got {tol}")));
        }
        Ok(tol)
    }

    pub fn lambda_max(&self) -> Result<f64, CliError> {
        let l = self.lambda_max.ok_or_else(|| field("lambda_max", "is required"))?;
        positive("lambda_max", l)?;
        Ok(l)
    }

    pub fn model(&self) -> Result<GasGiantModel, CliError> {
        let n = self.n.unwrap_or(1);
        if n == 0 {
            return Err(field("n", "must be at least 1"));
        }
        let default_base = if n == 1 { "circle:6.283185307179586".to_string() } else { format!("sphere:{n}:1") };
        let descriptor = self.base.clone().unwrap_or(default_base);
        let base = BaseManifold::parse(&descriptor).map_err(|e| field("base", e))?;
        let variant = self.variant.unwrap_or(DomainVariant::CompactSlab);
        let outer_x = self.outer_x.unwrap_or(1.0);
        positive("outer_x", outer_x)?;
        let model = match (self.alpha, self.beta) {
            (Some(_), Some(_)) => return Err(field("alpha/beta", "give exactly one of alpha and beta, not both")),
            (None, None) => return Err(field("alpha/beta", "one of alpha and beta is required")),
            (Some(alpha), None) => {
                GasGiantModel::from_alpha(n, alpha, base, variant, outer_x).map_err(|e| field("alpha", e))?
            }
            (None, Some(beta)) => GasGiantModel::new(n, beta, base, variant, outer_x).map_err(|e| field("beta", e))?,
        };
        Ok(model)
    }

    pub fn eta(&self) -> Result<EtaProfile, CliError> {
        let eta = self.eta.unwrap_or(EtaProfile::Bump { support: 0.5 });
        if let EtaProfile::Bump { support } = eta {
            positive("eta.support", support)?;
        }
        Ok(eta)
    }

    pub fn window(&self, lambda_max: f64) -> Result<(f64, f64), CliError> {
        let (lo, hi) = self.window.unwrap_or((lambda_max / 16.0, lambda_max));
        if !(lo > 0.0 && hi > lo) {
            return Err(field("window", format!("needs 0 < lo < hi, got ({lo}, {hi})")));
        }
        if hi > lambda_max {
            return Err(field("window", format!("upper end {hi} exceeds lambda_max {lambda_max}")));
        }
        Ok((lo, hi))
    }
}

pub fn field(name: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("config field `{name}`: {msg}"))
}

pub fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field(name, format!("must be positive and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(r#"{"n": 1, "alpha": 1.0, "tol": 1e-3}"#).unwrap();
        let flags = RunConfig { beta: Some(4.0), tol: Some(1e-5), ..RunConfig::default() };
        let merged = file.merge(flags);
        assert_eq!(merged.alpha, None);
        assert_eq!(merged.beta, Some(4.0));
        assert_eq!(merged.tol, Some(1e-5));
        assert_eq!(merged.model().unwrap().beta, 4.0);
    }

    #[test]
    fn alpha_converts() {
        let c = RunConfig { alpha: Some(1.0), ..RunConfig::default() };
        assert_eq!(c.model().unwrap().beta, 2.0);
    }

    #[test]
    fn errors_name_the_field() {
        let both = RunConfig { alpha: Some(1.0), beta: Some(2.0), ..RunConfig::default() };
        assert!(both.model().unwrap_err().to_string().contains("alpha/beta"));
        let tol = RunConfig { tol: Some(-1.0), ..RunConfig::default() };
        assert!(tol.tol().unwrap_err().to_string().contains("`tol`"));
        assert!(serde_json::from_str::<RunConfig>(r#"{"bta": 2}"#).is_err());
    }
}
