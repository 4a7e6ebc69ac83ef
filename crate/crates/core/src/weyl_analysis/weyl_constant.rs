//! The supercritical Weyl constant
//! `A(β, n) = nγ_n(β+2) / (4Γ(1 + d_H/2)) ∫₀^∞ Z₁(τ) τ^{d_H/2 − 1} dτ`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ui};

use crate::error::{Error, Result};
use crate::model::{c_beta, constants_for, weyl_gamma, Regime};
use crate::quad::integrate_geometric;
use crate::schrodinger1d::{eigen_below, one_d_counting_constant, Operator1D, SolverOptions, Spectrum1D};

/// `Z₁(τ) = tr e^{−τP₁}` from eigenvalues below `mu_cut` plus a power-law
/// tail `∫_{μ_cut}^∞ e^{−τμ} dN₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Z1Evaluator {
    pub beta: f64,
    pub eigenvalues: Vec<f64>,
    pub mu_cut: f64,
    /// `N₁(μ) ≈ tail_constant · μ^tail_exponent` beyond `mu_cut`.
    pub tail_constant: f64,
    pub tail_exponent: f64,
}

impl Z1Evaluator {
    /// Solves `P₁` for the model `(n, β)` on a confinement-truncated half-line.
    pub fn solve(n: usize, beta: f64, mu_cut: f64, opts: &SolverOptions) -> Result<Self> {
        let op = Operator1D::confined(c_beta(n, beta), beta, 1.0, mu_cut);
        Ok(Self::from_spectrum(beta, &eigen_below(&op, mu_cut, opts)?))
    }

    pub fn from_spectrum(beta: f64, spec: &Spectrum1D) -> Self {
        let p = 0.5 + 1.0 / beta;
        let n = spec.len();
        let tail_constant = if n < 4 {
            one_d_counting_constant(beta)
        } else {
            spec.eigenvalues[n / 2..]
                .iter()
                .enumerate()
                .map(|(i, mu)| (n / 2 + i + 1) as f64 / mu.powf(p))
                .fold(0.0, f64::max)
        };
        Self {
            beta,
            eigenvalues: spec.eigenvalues.clone(),
            mu_cut: spec.mu_max,
            tail_constant,
            tail_exponent: p,
        }
    }

    pub fn ground_state(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn tail(&self, tau: f64) -> f64 {
        let p = self.tail_exponent;
        self.tail_constant * p * tau.powf(-p) * gamma_ui(p, tau * self.mu_cut)
    }

    /// Eigenvalue sum plus the tail estimate.
    pub fn eval(&self, tau: f64) -> f64 {
        let sum: f64 = self.eigenvalues.iter().rev().map(|mu| (-tau * mu).exp()).sum();
        sum + self.tail(tau)
    }

    /// `Σ μ_j^{−s}` with the power-law tail, `s > tail_exponent`.
    pub fn spectral_zeta(&self, s: f64) -> f64 {
        let p = self.tail_exponent;
        let sum: f64 = self.eigenvalues.iter().rev().map(|mu| mu.powf(-s)).sum();
        sum + self.tail_constant * p * self.mu_cut.powf(p - s) / (s - p)
    }
}

/// Leading small-`τ` behaviour `Z₁(τ) ≈ Γ(1 + 1/β)(4πτ)^{−1/2} τ^{−1/β}`.
pub fn small_tau_leading(beta: f64, tau: f64) -> f64 {
    gamma(1.0 + 1.0 / beta) * (4.0 * std::f64::consts::PI * tau).powf(-0.5) * tau.powf(-1.0 / beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ABetaNOptions {
    /// Split between the small-`τ` form and the eigenvalue sum; chosen
    /// automatically when absent.
    pub tau_split: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ABetaN {
    pub value: f64,
    /// Spread over `τ_split ∈ {τ_s, 2τ_s, 4τ_s}` plus quadrature error.
    pub error: f64,
    pub tau_split: f64,
    /// Fitted `r₀` in `Z₁ − leading ≈ r₀ τ^{−γ}` near the split.
    pub remainder_coefficient: f64,
    pub remainder_exponent: f64,
    /// Contribution of `τ ≥ τ_end` bounded through `e^{−μ₁τ}`.
    pub large_tau_tail: f64,
    pub tau_end: f64,
}

/// Smallest `τ μ_cut` at which the truncated eigenvalue sum is trusted.
const SPLIT_FLOOR: f64 = 20.0;

/// `A(β, n)` by hybrid quadrature of the Mellin integral of `Z₁`.
pub fn compute_a_beta_n(n: usize, beta: f64, z1: &Z1Evaluator, opts: &ABetaNOptions) -> Result<ABetaN> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let constants = constants_for(n, beta);
    if constants.regime != Regime::Supercritical {
        return Err(Error::Divergence(format!(
            "∫ Z₁(τ) τ^(d_H/2 − 1) dτ diverges at τ → 0 for beta = {beta} ≤ beta_c = {}",
            constants.beta_c
        )));
    }
    if (z1.beta - beta).abs() > 1e-12 * beta {
        return Err(Error::domain("Z₁ evaluator was built for a different beta"));
    }
    let mu1 = z1.ground_state().ok_or_else(|| Error::Insufficient("Z₁ evaluator holds no eigenvalues".into()))?;
    let s = constants.d_h / 2.0;
    let p = 0.5 + 1.0 / beta;
    let g = (1.0 / beta).max(0.5);
    let floor = SPLIT_FLOOR / z1.mu_cut;

    // Remainder coefficient from Z₁ − leading over [floor, 16 floor].
    let (num, den) = (0..32).fold((0.0, 0.0), |(num, den), i| {
        let tau = floor * 16f64.powf(i as f64 / 31.0);
        let r = z1.eval(tau) - small_tau_leading(beta, tau);
        let basis = tau.powf(-g);
        (num + r * basis, den + basis * basis)
    });
    let r0 = num / den;

    let tau_split = match opts.tau_split {
        Some(t) if t >= floor => t,
        Some(t) => {
            return Err(Error::domain(format!(
                "tau_split = {t} is below the trusted floor {floor} of the eigenvalue sum"
            )))
        }
        None => {
            // Where |r₀| τ^{−γ} drops to 1% of the leading term, or the
            // floor when the eigenvalue budget cannot reach that far.
            let lead = small_tau_leading(beta, 1.0);
            let one_percent = if r0 == 0.0 { 0.0 } else { (0.01 * lead / r0.abs()).powf(1.0 / (p - g)) };
            one_percent.max(floor)
        }
    };

    let tau_end = 50.0 / mu1;
    let tail_end = z1.eval(tau_end) * (mu1 * tau_end).exp() * mu1.powf(-s) * gamma_ui(s, mu1 * tau_end);
    let prefactor = n as f64 * constants.gamma_n * (beta + 2.0) / (4.0 * gamma(1.0 + s));

    let at_split = |ts: f64| {
        let small = gamma(1.0 + 1.0 / beta) * (4.0 * std::f64::consts::PI).powf(-0.5) * ts.powf(s - p) / (s - p)
            + r0 * ts.powf(s - g) / (s - g);
        let (spectral, err) = if ts < tau_end {
            let q = integrate_geometric(|t| z1.eval(t) * t.powf(s - 1.0), ts, tau_end, 8, 1e-10);
            (q.value, q.error)
        } else {
            (0.0, 0.0)
        };
        (prefactor * (small + spectral + tail_end), prefactor * err)
    };
    let (value, quad_err) = at_split(tau_split);
    let spread = [2.0, 4.0]
        .iter()
        .map(|m| (at_split(m * tau_split).0 - value).abs())
        .fold(0.0, f64::max);
    Ok(ABetaN {
        value,
        error: spread + quad_err,
        tau_split,
        remainder_coefficient: r0,
        remainder_exponent: g,
        large_tau_tail: prefactor * tail_end,
        tau_end,
    })
}

/// Independent route through the spectral zeta function:
/// `∫ Z₁ τ^{s−1} dτ = Γ(s) ζ₁(s)`, so `A = nγ_n(β+2) ζ₁(s) / (4s)`.
pub fn a_beta_n_zeta(n: usize, beta: f64, z1: &Z1Evaluator) -> Result<f64> {
    let constants = constants_for(n, beta);
    if constants.regime != Regime::Supercritical {
        return Err(Error::Divergence(format!("spectral zeta diverges at s = d_H/2 for beta = {beta}")));
    }
    let s = constants.d_h / 2.0;
    Ok(n as f64 * weyl_gamma(n) * (beta + 2.0) * z1.spectral_zeta(s) / (4.0 * s))
}
