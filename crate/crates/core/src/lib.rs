//! Spectra of the singular Laplace–Beltrami operator on gas-giant-type
//! manifolds, whose metric `dx² + x^{-β} g₁` blows up at the boundary.
//!
//! The Laplacian separates into half-line operators
//! `P_ω = −∂² + C_β/x² + ω x^β`, one per base eigenvalue `ω`. The crate
//! solves those ([`schrodinger1d`]), merges them into the full spectrum
//! ([`product_spectrum`]) and compares counting functions, heat traces and
//! eigenfunction concentration against the Weyl laws of the three regimes
//! ([`weyl_analysis`]).
//!
//! ```
//! use gg_spectra::model::{constants_for, Regime};
//!
//! let c = constants_for(1, 4.0);
//! assert_eq!(c.regime, Regime::Supercritical);
//! assert_eq!(c.d_h, 3.0);
//! ```

pub mod base_spectrum;
pub mod error;
pub mod model;
pub mod oracle;
pub mod product_spectrum;
pub mod quad;
pub mod schrodinger1d;
pub mod tridiag;
pub mod verify;
pub mod weyl_analysis;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use base_spectrum::{BaseLevel, BaseManifold, EigenvalueStream};
pub use error::{Error, Result};
pub use model::{
    DerivedConstants, DomainVariant, GasGiantModel, PredictedLeadingTerm, Regime, TotalVolume,
    VolumeProfile,
};
pub use product_spectrum::{AssembleOptions, AssembledSpectrum, HeatTraceSample, SpectrumEntry};
pub use schrodinger1d::{Operator1D, SolverOptions, Spectrum1D};
pub use weyl_analysis::{AsymptoticFit, CountingFunction, WeylMeasureEstimate};
