//! Karamata's tauberian theorem and its quantitative converse, checked on
//! computed spectra.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ui};

use super::fit::CountingFunction;
use crate::error::{Error, Result};

/// `Σ m_j e^{−tλ_j}` over the stored steps, accumulated in order.
pub fn laplace_sum(counting: &CountingFunction, t: f64) -> f64 {
    let mut prev = 0;
    let mut sum = 0.0;
    for (&l, &c) in counting.steps.iter().zip(&counting.cumulative) {
        sum += (c - prev) as f64 * (-t * l).exp();
        prev = c;
    }
    sum
}

/// `∫_{λ_max}^∞ e^{−tλ} d(Aλ^α)`, the part of the transform beyond the data.
fn power_tail(constant: f64, alpha: f64, t: f64, lambda_max: f64) -> f64 {
    constant * alpha * t.powf(-alpha) * gamma_ui(alpha, t * lambda_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardSample {
    pub t: f64,
    /// Laplace transform of the counting measure, data plus tail.
    pub transform: f64,
    pub tail: f64,
    /// `A Γ(α+1) t^{−α}`.
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardReport {
    pub constant: f64,
    pub alpha: f64,
    pub samples: Vec<ForwardSample>,
}

/// Compares the Laplace transform of `dN` with `A Γ(α+1) t^{−α}` implied by
/// `N ~ Aλ^α`. Data end at `lambda_max`; beyond it the power law is used.
pub fn karamata_forward(
    counting: &CountingFunction,
    constant: f64,
    alpha: f64,
    lambda_max: f64,
    t_grid: &[f64],
) -> ForwardReport {
    let samples = t_grid
        .iter()
        .map(|&t| {
            let tail = power_tail(constant, alpha, t, lambda_max);
            let transform = laplace_sum(counting, t) + tail;
            let predicted = constant * gamma(alpha + 1.0) * t.powf(-alpha);
            ForwardSample { t, transform, tail, predicted, ratio: transform / predicted }
        })
        .collect();
    ForwardReport { constant, alpha, samples }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseSample {
    pub t: f64,
    /// `|S − Cα I|`.
    pub lhs: f64,
    /// `K f(λ₁) + ε I`.
    pub rhs: f64,
    /// `I = ∫_{λ₁}^∞ f(λ) λ^{α−1} dλ`.
    pub integral: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseReport {
    pub constant: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// Relative band `|N/(Cλ^α) − 1| ≤ ε/(Cα)` holds on `[Λ₀, λ_max]`.
    pub lambda_0: f64,
    pub k: f64,
    pub samples: Vec<ConverseSample>,
    pub holds: bool,
}

/// Smallest `Λ₀` from which `(1 − δ)Cλ^α ≤ N(λ) ≤ (1 + δ)Cλ^α` on the data.
/// Both sides of every step are checked, which covers the step function.
fn band_start(counting: &CountingFunction, constant: f64, alpha: f64, delta: f64) -> Option<f64> {
    let ok = |l: f64, n: u64| (n as f64 / (constant * l.powf(alpha)) - 1.0).abs() <= delta;
    let mut start = None;
    for (i, (&l, &c)) in counting.steps.iter().zip(&counting.cumulative).enumerate().rev() {
        let before = if i == 0 { 0 } else { counting.cumulative[i - 1] };
        if ok(l, c) && ok(l, before) {
            start = Some(l);
        } else {
            break;
        }
    }
    start
}

/// Checks `|S − Cα∫_{λ₁}^∞ f λ^{α−1}| ≤ K f(λ₁) + ε ∫_{λ₁}^∞ f λ^{α−1}` for
/// `f = e^{−tλ}` with `K = N(Λ₀) + C(1 + δ)Λ₀^α` and `δ = ε/(Cα)`, the
/// constant the argument produces.
pub fn karamata_converse(
    counting: &CountingFunction,
    constant: f64,
    alpha: f64,
    lambda_max: f64,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<ConverseReport> {
    let lambda1 = *counting
        .steps
        .first()
        .ok_or_else(|| Error::Insufficient("empty counting function".into()))?;
    let delta = epsilon / (constant * alpha);
    let lambda_0 = band_start(counting, constant, alpha, delta).ok_or_else(|| {
        Error::Insufficient(format!("counting function never enters the ε = {epsilon} band"))
    })?;
    let k = counting.eval(lambda_0) as f64 + constant * (1.0 + delta) * lambda_0.powf(alpha);
    let samples: Vec<ConverseSample> = t_grid
        .iter()
        .map(|&t| {
            let s = laplace_sum(counting, t) + power_tail(constant, alpha, t, lambda_max);
            let integral = t.powf(-alpha) * gamma_ui(alpha, t * lambda1);
            let lhs = (s - constant * alpha * integral).abs();
            let rhs = k * (-t * lambda1).exp() + epsilon * integral;
            ConverseSample { t, lhs, rhs, integral, holds: lhs <= rhs }
        })
        .collect();
    let holds = samples.iter().all(|s| s.holds);
    Ok(ConverseReport { constant, alpha, epsilon, lambda_0, k, samples, holds })
}

/// Smallest `ε` on a geometric scan from 1 down to `1e-4` for which the
/// converse inequality holds on `t_grid`.
pub fn smallest_workable_epsilon(
    counting: &CountingFunction,
    constant: f64,
    alpha: f64,
    lambda_max: f64,
    t_grid: &[f64],
) -> Option<ConverseReport> {
    let mut best = None;
    for i in 0..=40 {
        let eps = 10f64.powf(-(i as f64) / 10.0);
        match karamata_converse(counting, constant, alpha, lambda_max, eps, t_grid) {
            Ok(r) if r.holds => best = Some(r),
            _ => break,
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::half_oscillator_heat_trace;

    fn oscillator(count: usize) -> CountingFunction {
        CountingFunction::from_levels((0..count).map(|k| (4.0 * k as f64 + 3.0, 1)))
    }

    #[test]
    fn oscillator_transform() {
        let c = oscillator(100_000);
        let lmax = 4.0 * 99_999.0 + 3.0;
        assert!((laplace_sum(&c, 1.0) - half_oscillator_heat_trace(1.0)).abs() < 1e-15);
        let r = karamata_forward(&c, 0.25, 1.0, lmax, &[1e-3, 1e-2, 1e-1]);
        for s in &r.samples {
            assert!((s.transform - half_oscillator_heat_trace(s.t)).abs() < 1e-6 * s.transform);
            // e^{−3t}/(1 − e^{−4t}) · 4t → 1.
            assert!((s.ratio - 1.0).abs() < 2.0 * s.t);
        }
        assert_eq!(c.eval(1000.0), 250);
    }

    #[test]
    fn squares_transform() {
        // λ_j = j²: Σ e^{−tj²} = (√(π/t) θ − 1)/2 with θ = 1 + 2Σ e^{−π²k²/t}.
        let c = CountingFunction::from_levels((1..=4000u64).map(|j| ((j * j) as f64, 1)));
        let lmax = 4000.0f64 * 4000.0;
        for t in [1e-4, 1e-3, 1e-2] {
            let theta: f64 = 1.0 + 2.0 * (1..5).map(|k| (-(std::f64::consts::PI * k as f64).powi(2) / t).exp()).sum::<f64>();
            let exact = ((std::f64::consts::PI / t).sqrt() * theta - 1.0) / 2.0;
            let r = karamata_forward(&c, 1.0, 0.5, lmax, &[t]);
            assert!((r.samples[0].transform / exact - 1.0).abs() < 1e-10);
            // Γ(3/2) t^{−1/2} = √π/2 · t^{−1/2} leads.
            assert!((r.samples[0].ratio - 1.0).abs() < 2.0 * t.sqrt());
        }
    }

    #[test]
    fn converse_on_oscillator() {
        let c = oscillator(100_000);
        let lmax = 4.0 * 99_999.0 + 3.0;
        let r = karamata_converse(&c, 0.25, 1.0, lmax, 0.05, &[1e-3, 0.01, 0.1, 1.0, 10.0]).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.lambda_0 < 30.0);
        let best = smallest_workable_epsilon(&c, 0.25, 1.0, lmax, &[0.01, 0.1, 1.0]).unwrap();
        assert!(best.epsilon <= 0.05);
    }
}
