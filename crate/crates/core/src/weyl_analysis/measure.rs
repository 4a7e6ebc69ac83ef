//! Cesàro averages of eigenfunction mass near the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Regime;
use crate::product_spectrum::{AssembledSpectrum, SpectrumCache};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylMeasureEstimate {
    pub a_grid: Vec<f64>,
    /// `(1/N(Λ)) Σ_{λ_j ≤ Λ} m_j ∫_{x ≤ a} |φ_j|²` for each depth.
    pub cesaro_mass: Vec<f64>,
    pub lambda: f64,
    pub count: u64,
    /// 1 at and above the critical exponent, the volume fraction below it.
    pub theory_target: Vec<f64>,
}

/// Weyl measure of the collar `{x ≤ a}` estimated at level `lambda`.
pub fn weyl_measure_estimate(
    spec: &AssembledSpectrum,
    a_grid: &[f64],
    lambda: f64,
    cache: &SpectrumCache,
) -> Result<WeylMeasureEstimate> {
    let rows = spec.boundary_masses(a_grid, lambda, cache)?;
    let count: u64 = rows.iter().map(|(e, _)| e.multiplicity).sum();
    if count == 0 {
        return Err(Error::Insufficient(format!("no eigenvalues below {lambda}")));
    }
    let mut cesaro_mass = vec![0.0; a_grid.len()];
    for (entry, masses) in &rows {
        for (acc, m) in cesaro_mass.iter_mut().zip(masses) {
            *acc += entry.multiplicity as f64 * m;
        }
    }
    for m in &mut cesaro_mass {
        *m = (*m / count as f64).clamp(0.0, 1.0);
    }
    let profile = spec.model.volume_profile();
    let theory_target = a_grid
        .iter()
        .map(|&a| match spec.model.constants().regime {
            Regime::Subcritical => profile.boundary_fraction(a).unwrap_or(f64::NAN),
            _ => 1.0,
        })
        .collect();
    Ok(WeylMeasureEstimate { a_grid: a_grid.to_vec(), cesaro_mass, lambda, count, theory_target })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityOneCheck {
    pub lambda: f64,
    pub interval: (f64, f64),
    pub epsilon: f64,
    pub exceptional: u64,
    pub count: u64,
    pub fraction: f64,
}

/// Fraction of eigenfunctions below `lambda` (with multiplicity) whose mass
/// in `interval` exceeds `epsilon`.
pub fn density_one_check(
    spec: &AssembledSpectrum,
    lambda: f64,
    interval: (f64, f64),
    epsilon: f64,
    cache: &SpectrumCache,
) -> Result<DensityOneCheck> {
    let (lo, hi) = interval;
    if !(0.0 <= lo && lo < hi && hi <= spec.model.outer_x) {
        return Err(Error::domain(format!("interval [{lo}, {hi}] is not inside (0, {}]", spec.model.outer_x)));
    }
    let rows = spec.boundary_masses(&[lo, hi], lambda, cache)?;
    let count: u64 = rows.iter().map(|(e, _)| e.multiplicity).sum();
    let exceptional: u64 = rows
        .iter()
        .filter(|(_, m)| m[1] - m[0] > epsilon)
        .map(|(e, _)| e.multiplicity)
        .sum();
    let fraction = if count == 0 { 0.0 } else { exceptional as f64 / count as f64 };
    Ok(DensityOneCheck { lambda, interval, epsilon, exceptional, count, fraction })
}
