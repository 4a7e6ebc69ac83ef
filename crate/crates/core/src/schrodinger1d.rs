//! Finite-difference solver for the singular half-line operators
//! `P_ω = −∂² + C/x² + ω x^β` and for the weighted Sturm–Liouville form
//! `∫ (|u′|² + k²|u|²/m) √m dx` with `m(x) = x^{-β}(1 + ε η(x))`.
//!
//! Both are discretized by central differences on a uniform grid of
//! `(0, x_max]` with Dirichlet values at the walls, giving a symmetric
//! tridiagonal matrix. Eigenvalues are refined by grid doubling and
//! Richardson extrapolation; every spectrum carries a Sturm-count
//! certificate at its threshold.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ui};

use crate::error::{Error, Result};
use crate::tridiag::SymTridiag;

/// Shape of the perturbation in the weighted form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EtaProfile {
    /// Smooth bump `exp(1 − 1/(1 − (x/δ)²))` on `[0, δ)`, equal to 1 at 0.
    Bump { support: f64 },
    Constant,
}

impl EtaProfile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            EtaProfile::Constant => 1.0,
            EtaProfile::Bump { support } => {
                let r = x / support;
                if r >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }
}

/// `m(x) = x^{-β} (1 + ε η(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub beta: f64,
    pub eps: f64,
    pub eta: EtaProfile,
}

impl Weight {
    pub fn separable(beta: f64) -> Self {
        Self { beta, eps: 0.0, eta: EtaProfile::Constant }
    }

    /// `√m(x)`, the density of the volume form.
    fn sqrt_m(&self, x: f64) -> f64 {
        x.powf(-0.5 * self.beta) * (1.0 + self.eps * self.eta.value(x)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Form {
    Schrodinger { c: f64, beta: f64, omega: f64 },
    SturmLiouville { weight: Weight, mode_sq: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Operator1D {
    pub form: Form,
    pub x_max: f64,
    /// Whether the outer wall truncates a half-line problem (and must then
    /// satisfy the confinement rule) rather than being physical.
    pub truncated: bool,
}

/// Agmon distance `∫ √(ωx^β − μ) dx` kept beyond the turning point of
/// `mu_max`; eigenfunctions there are below `e^{-18}` of their peak.
const AGMON_DISTANCE: f64 = 18.0;

/// Outer wall for truncating the half-line: at least the rule
/// `ω x_max^β = μ + 10√μ`, pushed further out when the Agmon distance from
/// the turning point of `mu_max` is shorter than [`AGMON_DISTANCE`].
pub fn confinement_radius(beta: f64, omega: f64, mu_max: f64) -> f64 {
    let rule = ((mu_max + 10.0 * mu_max.sqrt()) / omega).powf(1.0 / beta);
    let turning = (mu_max / omega).powf(1.0 / beta);
    let length = omega.powf(-1.0 / (2.0 + beta));
    let dx = 1e-3 * turning.max(length);
    let mut x = turning;
    let mut distance = 0.0;
    while distance < AGMON_DISTANCE && x < rule {
        let mid = x + 0.5 * dx;
        distance += (omega * mid.powf(beta) - mu_max).max(0.0).sqrt() * dx;
        x += dx;
    }
    while distance < AGMON_DISTANCE {
        let mid = x + 0.5 * dx;
        distance += (omega * mid.powf(beta) - mu_max).max(0.0).sqrt() * dx;
        x += dx;
    }
    x.max(rule)
}

impl Operator1D {
    pub fn schrodinger(c: f64, beta: f64, omega: f64, x_max: f64) -> Self {
        Self { form: Form::Schrodinger { c, beta, omega }, x_max, truncated: false }
    }

    /// `P_ω` on a half-line truncated by the confinement rule for `mu_max`.
    pub fn confined(c: f64, beta: f64, omega: f64, mu_max: f64) -> Self {
        Self {
            form: Form::Schrodinger { c, beta, omega },
            x_max: confinement_radius(beta, omega, mu_max),
            truncated: true,
        }
    }

    pub fn sturm_liouville(weight: Weight, mode_sq: f64, x_max: f64) -> Self {
        Self { form: Form::SturmLiouville { weight, mode_sq }, x_max, truncated: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_max.is_finite() && self.x_max > 0.0) {
            return Err(Error::domain(format!("x_max must be positive, got {}", self.x_max)));
        }
        match self.form {
            Form::Schrodinger { c, beta, omega } => {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::domain(format!("C must be nonnegative, got {c}")));
                }
                if !(beta.is_finite() && beta > 0.0) {
                    return Err(Error::domain(format!("beta must be positive, got {beta}")));
                }
                if !(omega.is_finite() && omega >= 0.0) {
                    return Err(Error::domain(format!("omega must be nonnegative, got {omega}")));
                }
            }
            Form::SturmLiouville { weight, mode_sq } => {
                if !(weight.beta.is_finite() && weight.beta > 0.0) {
                    return Err(Error::domain("weight exponent must be positive"));
                }
                if !(weight.eps.is_finite() && weight.eps > -1.0) {
                    return Err(Error::domain("weight perturbation must exceed -1"));
                }
                if let EtaProfile::Bump { support } = weight.eta {
                    if !(support > 0.0) {
                        return Err(Error::domain("bump support must be positive"));
                    }
                }
                if !(mode_sq.is_finite() && mode_sq >= 0.0) {
                    return Err(Error::domain("mode eigenvalue must be nonnegative"));
                }
            }
        }
        Ok(())
    }

    /// Whether eigenvalue growth follows `μ^{1/2 + 1/β}` (confining
    /// half-line) rather than the interval law `μ^{1/2}`.
    fn confining_exponent(&self) -> Option<f64> {
        match self.form {
            Form::Schrodinger { beta, omega, .. } if self.truncated && omega > 0.0 => {
                Some(0.5 + 1.0 / beta)
            }
            _ => None,
        }
    }

    /// Order `q` of the leading discretization error `O(h^q)`. Below the
    /// limit-point threshold the eigenfunctions behave like `x^{1/2 + ν}`
    /// with `ν = √(1/4 + C) < 1` and the error is `O(h^{2ν})`; `C = 0` is a
    /// regular endpoint.
    pub fn error_order(&self) -> f64 {
        let c = match self.form {
            Form::Schrodinger { c, .. } => c,
            Form::SturmLiouville { weight, .. } => {
                let b = weight.beta / 4.0;
                b * (b + 1.0)
            }
        };
        if c == 0.0 {
            return 2.0;
        }
        (2.0 * (0.25 + c).sqrt()).min(2.0)
    }

    /// Symmetric tridiagonal matrix on `n_intervals` uniform cells.
    pub fn matrix(&self, n_intervals: usize) -> SymTridiag {
        let n = n_intervals - 1;
        let h = self.x_max / n_intervals as f64;
        let inv_h2 = 1.0 / (h * h);
        match self.form {
            Form::Schrodinger { c, beta, omega } => {
                let d = (1..=n)
                    .map(|i| {
                        let x = i as f64 * h;
                        let mut v = 2.0 * inv_h2 + c / (x * x);
                        if omega > 0.0 {
                            v += omega * x.powf(beta);
                        }
                        v
                    })
                    .collect();
                SymTridiag::new(d, vec![-inv_h2; n - 1])
            }
            Form::SturmLiouville { weight, mode_sq } => {
                let s: Vec<f64> = (1..=n).map(|i| weight.sqrt_m(i as f64 * h)).collect();
                let s_half: Vec<f64> = (0..=n).map(|i| weight.sqrt_m((i as f64 + 0.5) * h)).collect();
                let d = (0..n)
                    .map(|i| ((s_half[i] + s_half[i + 1]) * inv_h2 + mode_sq / s[i]) / s[i])
                    .collect();
                let e = (0..n - 1)
                    .map(|i| -s_half[i + 1] * inv_h2 / (s[i] * s[i + 1]).sqrt())
                    .collect();
                SymTridiag::new(d, e)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    /// Number of cells; interior nodes are `1..node_count`.
    pub node_count: usize,
    pub spacing_bits: u64,
    pub refinement_level: u32,
}

impl Grid {
    fn new(x_max: f64, node_count: usize, refinement_level: u32) -> Self {
        Self { node_count, spacing_bits: (x_max / node_count as f64).to_bits(), refinement_level }
    }

    pub fn spacing(&self) -> f64 {
        f64::from_bits(self.spacing_bits)
    }

    pub fn x_max(&self) -> f64 {
        self.spacing() * self.node_count as f64
    }

    /// Coordinates of the interior nodes.
    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (1..self.node_count).map(move |i| i as f64 * h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative change allowed between the `N` and `2N` grids.
    pub tol: f64,
    pub initial_nodes: Option<usize>,
    pub max_nodes: usize,
    pub want_vectors: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-6, initial_nodes: None, max_nodes: 1 << 17, want_vectors: false }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    pub fn vectors(mut self) -> Self {
        self.want_vectors = true;
        self
    }
}

/// Inertia certificate on the finest grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Sturm count of the finest-grid matrix at `mu_max`.
    pub sturm_count: usize,
    /// Eigenvalues whose extrapolated value crossed below `mu_max`.
    pub crossed_in: usize,
    /// Eigenvalues whose extrapolated value crossed above `mu_max`.
    pub crossed_out: usize,
}

impl Certificate {
    pub fn expected_count(&self) -> usize {
        self.sturm_count + self.crossed_in - self.crossed_out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum1D {
    pub eigenvalues: Vec<f64>,
    /// Interior-node values normalized so `Σ v_i² h = 1`; for the weighted
    /// form these are half-density values `√(√m) u`.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// Relative change between the last two extrapolated estimates.
    pub convergence_estimate: Vec<f64>,
    pub grid: Grid,
    pub certificate: Certificate,
    pub mu_max: f64,
}

impl Spectrum1D {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Mass of eigenfunction `j` in `[0, a]`.
    pub fn boundary_mass(&self, j: usize, a: f64) -> Result<f64> {
        let vectors = self
            .eigenvectors
            .as_ref()
            .ok_or_else(|| Error::MissingDependency("spectrum was solved without eigenvectors".into()))?;
        let v = vectors
            .get(j)
            .ok_or_else(|| Error::domain(format!("no eigenvector with index {j}")))?;
        boundary_mass(v, &self.grid, a)
    }
}

fn initial_nodes(op: &Operator1D, mu_max: f64, tol: f64) -> usize {
    // Extrapolated values err like (κh)⁴ away from the singular endpoint;
    // start near the resolution the tolerance asks for.
    let h = 2.0 * tol.powf(0.25) / mu_max.max(1.0).sqrt();
    let n = (op.x_max / h).ceil() as usize;
    n.clamp(64, 1 << 13)
}

/// All eigenvalues `≤ mu_max`, converged to `opts.tol` under grid doubling.
///
/// Each doubling `N → 2N` yields the extrapolated estimate
/// `(2^q μ(2N) − μ(N))/(2^q − 1)` with `q` from [`Operator1D::error_order`]
/// (followed by a second `h²` pass when `q < 2`); refinement stops once two
/// successive estimates agree to `tol` for every returned eigenvalue.
pub fn eigen_below(op: &Operator1D, mu_max: f64, opts: &SolverOptions) -> Result<Spectrum1D> {
    op.validate()?;
    if !(mu_max.is_finite() && mu_max > 0.0) {
        return Err(Error::domain(format!("mu_max must be positive, got {mu_max}")));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::domain("solver tolerance must be positive"));
    }
    if let (true, Form::Schrodinger { beta, omega, .. }) = (op.truncated, op.form) {
        if omega > 0.0 {
            let needed = mu_max + 10.0 * mu_max.sqrt();
            if omega * op.x_max.powf(beta) < needed * (1.0 - 1e-9) {
                return Err(Error::domain(format!(
                    "truncation x_max = {} violates the confinement rule for mu_max = {mu_max}",
                    op.x_max
                )));
            }
        }
    }

    const BISECT_TOL: f64 = 1e-14;
    let order = op.error_order();
    let gain = 2f64.powf(order);
    let singular = order < 2.0;
    let mut previous_first: Option<Vec<f64>> = None;
    let pad = mu_max * (1.0 + (20.0 * opts.tol).max(1e-3));
    let mut n = opts.initial_nodes.unwrap_or_else(|| initial_nodes(op, mu_max, opts.tol)).max(8);
    let mut coarse_mat = op.matrix(n);
    let mut coarse = coarse_mat.eigenvalues_below(pad, BISECT_TOL);
    let mut previous: Option<Vec<f64>> = None;
    let mut older: Option<Vec<f64>> = None;
    let mut level = 0u32;
    loop {
        let fine_n = 2 * n;
        if fine_n > opts.max_nodes {
            return Err(match (&older, &previous) {
                (Some(old), Some(new)) => worst_change(old, new, mu_max, opts.tol),
                _ => Error::Convergence {
                    index: 1,
                    previous: f64::NAN,
                    current: coarse.first().copied().unwrap_or(f64::NAN),
                    change: f64::INFINITY,
                    tol: opts.tol,
                },
            });
        }
        let fine_mat = op.matrix(fine_n);
        let fine = fine_mat.eigenvalues_below(pad, BISECT_TOL);
        level += 1;
        if coarse.len() < fine.len() {
            coarse = coarse_mat.eigenvalues_by_index(0, fine.len(), BISECT_TOL);
        }
        let first: Vec<f64> = fine.iter().zip(&coarse).map(|(f, c)| (gain * f - c) / (gain - 1.0)).collect();
        // With a singular leading term the O(h²) term is removed in a second
        // pass over consecutive first-pass estimates.
        let rich = if singular {
            let second = previous_first
                .as_ref()
                .filter(|p: &&Vec<f64>| p.len() >= first.len())
                .map(|p| first.iter().zip(p).map(|(f, c)| (4.0 * f - c) / 3.0).collect::<Vec<f64>>());
            previous_first = Some(first);
            match second {
                Some(r) => r,
                None => {
                    n = fine_n;
                    coarse_mat = fine_mat;
                    coarse = fine;
                    continue;
                }
            }
        } else {
            first
        };

        if let Some(prev) = &previous {
            let wanted = rich.iter().filter(|&&r| r <= mu_max).count();
            let converged = prev.len() >= rich.len()
                && rich
                    .iter()
                    .zip(prev)
                    .all(|(r, p)| *r > mu_max || ((r - p) / r).abs() <= opts.tol);
            if converged {
                let mut eigenvalues = Vec::with_capacity(wanted);
                let mut estimates = Vec::with_capacity(wanted);
                let mut indices = Vec::with_capacity(wanted);
                let mut crossed_in = 0;
                let mut crossed_out = 0;
                for (j, (&r, &p)) in rich.iter().zip(prev).enumerate() {
                    let raw = fine[j];
                    if r > mu_max {
                        crossed_out += usize::from(raw <= mu_max);
                        continue;
                    }
                    crossed_in += usize::from(raw > mu_max);
                    eigenvalues.push(r);
                    estimates.push(((r - p) / r).abs());
                    indices.push(j);
                }
                let h = op.x_max / fine_n as f64;
                let eigenvectors = opts.want_vectors.then(|| {
                    let scale = 1.0 / h.sqrt();
                    indices
                        .iter()
                        .map(|&j| {
                            let mut v = fine_mat.eigenvector(fine[j]);
                            v.iter_mut().for_each(|x| *x *= scale);
                            v
                        })
                        .collect()
                });
                let sturm_count = fine_mat.count_below(next_up(mu_max));
                return Ok(Spectrum1D {
                    eigenvalues,
                    eigenvectors,
                    convergence_estimate: estimates,
                    grid: Grid::new(op.x_max, fine_n, level),
                    certificate: Certificate { sturm_count, crossed_in, crossed_out },
                    mu_max,
                });
            }
        }
        older = previous.replace(rich);
        n = fine_n;
        coarse_mat = fine_mat;
        coarse = fine;
    }
}

fn next_up(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1)
}

/// Convergence error for the eigenvalue with the largest change between the
/// last two extrapolated estimates.
fn worst_change(previous: &[f64], current: &[f64], mu_max: f64, tol: f64) -> Error {
    let mut worst = (0, f64::NAN, f64::NAN, 0.0);
    for (j, (&p, &c)) in previous.iter().zip(current).enumerate() {
        if c > mu_max {
            break;
        }
        let change = ((c - p) / c).abs();
        if change > worst.3 {
            worst = (j, p, c, change);
        }
    }
    Error::Convergence { index: worst.0 + 1, previous: worst.1, current: worst.2, change: worst.3, tol }
}

/// `N₁(μ) = #{j : μ_j ≤ μ}`.
pub fn counting_n1(op: &Operator1D, mu: f64, opts: &SolverOptions) -> Result<usize> {
    if mu <= 0.0 {
        op.validate()?;
        return Ok(0);
    }
    Ok(eigen_below(op, mu, opts)?.len())
}

/// Truncated heat trace with a separately reported tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTrace1D {
    pub value: f64,
    pub tail_bound: f64,
    pub eigenvalue_count: usize,
    /// Power law `N₁(μ) ≈ counting_constant · μ^counting_exponent` used for the tail.
    pub counting_exponent: f64,
    pub counting_constant: f64,
}

/// `Σ_{μ_j ≤ μ_cut} e^{−τ μ_j}` with the tail `∫_{μ_cut}^∞ e^{−τμ} dN` estimated
/// from the counting law.
pub fn heat_trace_z1(op: &Operator1D, tau: f64, mu_cut: f64, opts: &SolverOptions) -> Result<HeatTrace1D> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    let spec = eigen_below(op, mu_cut, opts)?;
    Ok(heat_trace_from(op, &spec, tau))
}

fn counting_law(op: &Operator1D, spec: &Spectrum1D) -> (f64, f64) {
    let (p, theory) = match (op.confining_exponent(), op.form) {
        (Some(p), Form::Schrodinger { beta, omega, .. }) => {
            (p, one_d_counting_constant(beta) * omega.powf(-1.0 / beta))
        }
        _ => (0.5, op.x_max / std::f64::consts::PI),
    };
    let n = spec.len();
    if n < 4 {
        return (p, theory);
    }
    // Largest ratio over the upper half keeps the estimate on the safe side.
    let fitted = spec.eigenvalues[n / 2..]
        .iter()
        .enumerate()
        .map(|(i, mu)| (n / 2 + i + 1) as f64 / mu.powf(p))
        .fold(0.0f64, f64::max);
    (p, fitted)
}

fn heat_trace_from(op: &Operator1D, spec: &Spectrum1D, tau: f64) -> HeatTrace1D {
    let value: f64 = spec.eigenvalues.iter().rev().map(|mu| (-tau * mu).exp()).sum();
    let (p, a) = counting_law(op, spec);
    let tail_bound = a * p * tau.powf(-p) * gamma_ui(p, tau * spec.mu_max);
    HeatTrace1D {
        value,
        tail_bound,
        eigenvalue_count: spec.len(),
        counting_exponent: p,
        counting_constant: a,
    }
}

/// Leading constant of `N₁(μ) ~ A μ^{1/2 + 1/β}` for `P₁`, obtained from the
/// heat-trace leading term `(4πτ)^{-1/2} τ^{-1/β} Γ(1 + 1/β)` by Karamata:
/// `Γ(1 + 1/β) / (2√π Γ(3/2 + 1/β))`.
pub fn one_d_counting_constant(beta: f64) -> f64 {
    gamma(1.0 + 1.0 / beta) / (2.0 * std::f64::consts::PI.sqrt() * gamma(1.5 + 1.0 / beta))
}

/// The alternative closed form `√(2/π) (1/β) B(3/2, 1 + 1/β)`, reported
/// next to [`one_d_counting_constant`] for comparison.
pub fn one_d_counting_constant_beta_form(beta: f64) -> f64 {
    (2.0 / std::f64::consts::PI).sqrt() / beta * statrs::function::beta::beta(1.5, 1.0 + 1.0 / beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedTrace {
    pub value: f64,
    pub tail_bound: f64,
    /// `τ^{-1/2} min(a, τ^{-1/β})`.
    pub bound_scale: f64,
    /// `value / bound_scale`, the smallest constant for which the bound holds here.
    pub constant: f64,
}

/// `Σ_j e^{−τμ_j} ∫₀^a |φ_j|²` over the eigenpairs below `mu_cut`.
pub fn truncated_heat_trace(
    op: &Operator1D,
    tau: f64,
    a: f64,
    mu_cut: f64,
    opts: &SolverOptions,
) -> Result<TruncatedTrace> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    if !(0.0..=op.x_max).contains(&a) {
        return Err(Error::domain(format!("a = {a} lies outside [0, {}]", op.x_max)));
    }
    let spec = eigen_below(op, mu_cut, &opts.vectors())?;
    truncated_trace_from(op, &spec, tau, a)
}

pub(crate) fn truncated_trace_from(op: &Operator1D, spec: &Spectrum1D, tau: f64, a: f64) -> Result<TruncatedTrace> {
    let mut value = 0.0;
    for j in (0..spec.len()).rev() {
        value += (-tau * spec.eigenvalues[j]).exp() * spec.boundary_mass(j, a)?;
    }
    let beta = match op.form {
        Form::Schrodinger { beta, .. } => beta,
        Form::SturmLiouville { weight, .. } => weight.beta,
    };
    let bound_scale = tau.powf(-0.5) * a.min(tau.powf(-1.0 / beta));
    let tail_bound = heat_trace_from(op, spec, tau).tail_bound;
    Ok(TruncatedTrace {
        value,
        tail_bound,
        bound_scale,
        constant: if bound_scale > 0.0 { value / bound_scale } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub factor: f64,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

/// Compares `μ_j(ω)` with `ω^{2/(2+β)} μ_j(1)` for `j ≤ j_max`, both solved
/// on confinement-truncated half-lines.
pub fn scaling_check(
    c: f64,
    beta: f64,
    omega: f64,
    j_max: usize,
    opts: &SolverOptions,
) -> Result<ScalingReport> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!("scaling needs omega > 0, got {omega}")));
    }
    if j_max == 0 {
        return Err(Error::domain("j_max must be at least 1"));
    }
    let p = 0.5 + 1.0 / beta;
    let mut mu = (2.0 * j_max as f64 / one_d_counting_constant(beta)).powf(1.0 / p).max(1.0);
    let reference = loop {
        let s = eigen_below(&Operator1D::confined(c, beta, 1.0, mu), mu, opts)?;
        if s.len() >= j_max {
            break s;
        }
        mu *= 2.0;
    };
    let factor = omega.powf(2.0 / (2.0 + beta));
    let mu_omega = mu * factor;
    let scaled = eigen_below(&Operator1D::confined(c, beta, omega, mu_omega), mu_omega, opts)?;
    let deviations: Vec<f64> = reference.eigenvalues[..j_max]
        .iter()
        .zip(&scaled.eigenvalues)
        .map(|(r, s)| (s / (factor * r) - 1.0).abs())
        .collect();
    if deviations.len() < j_max {
        return Err(Error::Insufficient(format!(
            "scaled operator returned {} of {j_max} eigenvalues",
            deviations.len()
        )));
    }
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(ScalingReport { factor, deviations, max_deviation })
}

/// `∫₀^a |φ|²` for a normalized eigenvector on `grid`. Each interior node
/// carries mass `h v_i²` spread over its cell `[x_i − h/2, x_i + h/2]`, so the
/// result is continuous and nondecreasing in `a`.
pub fn boundary_mass(eigenvector: &[f64], grid: &Grid, a: f64) -> Result<f64> {
    let h = grid.spacing();
    let x_max = grid.x_max();
    if !(a >= 0.0 && a <= x_max * (1.0 + 1e-12)) {
        return Err(Error::domain(format!("a = {a} lies outside [0, {x_max}]")));
    }
    if eigenvector.len() + 1 != grid.node_count {
        return Err(Error::domain("eigenvector does not match the grid"));
    }
    let mut mass = 0.0;
    for (i, v) in eigenvector.iter().enumerate() {
        let left = (i as f64 + 0.5) * h;
        let covered = ((a - left) / h).clamp(0.0, 1.0);
        if covered == 0.0 {
            break;
        }
        mass += h * v * v * covered;
    }
    Ok(mass.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Heat trace of the unit interval: `Σ_{n≥1} e^{−τπ²n²}` (Dirichlet) or the
/// same sum plus the `n = 0` term (Neumann).
pub fn interval_heat_trace(tau: f64, bc: BoundaryCondition) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::domain(format!("tau must be positive, got {tau}")));
    }
    let k = tau * std::f64::consts::PI * std::f64::consts::PI;
    // Terms below e^{-745} underflow; sum the rest from smallest to largest.
    let n_max = ((745.0 / k).sqrt().ceil() as u64).max(1);
    let tail: f64 = (1..=n_max).rev().map(|n| (-(k * (n * n) as f64)).exp()).sum();
    Ok(match bc {
        BoundaryCondition::Dirichlet => tail,
        BoundaryCondition::Neumann => 1.0 + tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::c_beta;
    use crate::oracle::{bessel_dirichlet_eigenvalues, half_oscillator_heat_trace};

    // Squares of the first zeros of J₁ and J_{3/4} (high-precision reference).
    const J1_SQ: [f64; 5] = [
        14.681_970_642_123_893,
        49.218_456_321_694_6,
        103.499_453_895_136_58,
        177.520_766_813_803_65,
        271.281_654_272_873_3,
    ];
    const J34_SQ: [f64; 5] = [
        12.187_139_468_095_129,
        44.257_559_403_502_45,
        96.071_604_838_843_09,
        167.625_712_420_578_3,
        258.919_300_357_440_36,
    ];

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn half_oscillator() {
        let op = Operator1D::schrodinger(0.0, 2.0, 1.0, 12.0);
        let s = eigen_below(&op, 20.0, &SolverOptions::with_tol(1e-8)).unwrap();
        assert_eq!(s.len(), 5);
        for (j, mu) in s.eigenvalues.iter().enumerate() {
            assert!(rel(*mu, 4.0 * j as f64 + 3.0) < 1e-6, "{mu}");
        }
        assert_eq!(s.certificate.expected_count(), s.len());
    }

    #[test]
    fn bessel_limit_point() {
        let op = Operator1D::schrodinger(0.75, 2.0, 0.0, 1.0);
        let s = eigen_below(&op, 120.0, &SolverOptions::with_tol(1e-8)).unwrap();
        assert_eq!(s.len(), 3);
        for (mu, r) in s.eigenvalues.iter().zip(J1_SQ) {
            assert!(rel(*mu, r) < 1e-6, "{mu} vs {r}");
        }
    }

    #[test]
    fn bessel_friedrichs_branch() {
        let op = Operator1D::schrodinger(5.0 / 16.0, 1.0, 0.0, 1.0);
        let s = eigen_below(&op, 260.0, &SolverOptions::with_tol(2e-7)).unwrap();
        assert_eq!(s.len(), 5);
        for (mu, r) in s.eigenvalues.iter().zip(J34_SQ) {
            assert!(rel(*mu, r) < 1e-6, "{mu} vs {r}");
        }
        let oracle = bessel_dirichlet_eigenvalues(5.0 / 16.0, 1.0, 5);
        for (o, r) in oracle.iter().zip(J34_SQ) {
            assert!(rel(*o, r) < 1e-13);
        }
    }

    #[test]
    fn counting_examples() {
        let osc = Operator1D::confined(0.0, 2.0, 1.0, 100.0);
        assert_eq!(counting_n1(&osc, 100.0, &SolverOptions::default()).unwrap(), 25);
        let bes = Operator1D::schrodinger(0.75, 2.0, 0.0, 1.0);
        assert_eq!(counting_n1(&bes, 200.0, &SolverOptions::default()).unwrap(), 4);
        assert_eq!(counting_n1(&bes, 10.0, &SolverOptions::default()).unwrap(), 0);
        assert!(eigen_below(&bes, 10.0, &SolverOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn oscillator_heat_trace() {
        let op = Operator1D::confined(0.0, 2.0, 1.0, 200.0);
        let z = heat_trace_z1(&op, 1.0, 200.0, &SolverOptions::with_tol(1e-9)).unwrap();
        assert!(rel(z.value, 0.050_715_963_643_859_04) < 1e-8, "{z:?}");
        assert!(z.tail_bound < 1e-60);
        assert!(rel(z.value, half_oscillator_heat_trace(1.0)) < 1e-8);

        // Small τ: Z·√(4πτ)·τ^{1/β} → Γ(1 + 1/β).
        let z = heat_trace_z1(&op, 0.01, 200.0, &SolverOptions::with_tol(1e-6)).unwrap();
        let exact = half_oscillator_heat_trace(0.01);
        assert!(z.value <= exact && z.value + z.tail_bound >= exact * 0.98, "{z:?} vs {exact}");
        let lead = exact * (4.0 * std::f64::consts::PI * 0.01).sqrt() * 0.01f64.sqrt();
        assert!((lead / gamma(1.5) - 1.0).abs() < 0.2);

        // Large τ: dominated by the ground state.
        let z = heat_trace_z1(&op, 5.0, 200.0, &SolverOptions::default()).unwrap();
        assert!(z.value <= 1.001 * (-15.0f64).exp());
        assert!(heat_trace_z1(&op, 0.0, 10.0, &SolverOptions::default()).is_err());
    }

    #[test]
    fn counting_constants() {
        assert!((one_d_counting_constant(2.0) - 0.25).abs() < 1e-15);
        assert!((one_d_counting_constant(1.0) - 0.212_206_590_789_193_8).abs() < 1e-15);
        assert!((one_d_counting_constant(4.0) - 0.278_208_947_224_691_14).abs() < 1e-15);
        assert!((one_d_counting_constant_beta_form(2.0) - 0.156_664_267_164_437_52).abs() < 1e-14);
        assert!((one_d_counting_constant_beta_form(1.0) - 0.212_769_216_214_097_45).abs() < 1e-14);
        assert!((one_d_counting_constant_beta_form(4.0) - 0.099_623_773_338_390_62).abs() < 1e-14);
    }

    #[test]
    fn truncated_trace_limits() {
        let op = Operator1D::confined(0.75, 2.0, 1.0, 400.0);
        let opts = SolverOptions::with_tol(1e-6);
        let full = truncated_heat_trace(&op, 0.1, op.x_max, 400.0, &opts).unwrap();
        let z = heat_trace_z1(&op, 0.1, 400.0, &opts).unwrap();
        assert!(rel(full.value, z.value) < 1e-9, "{} vs {}", full.value, z.value);
        let zero = truncated_heat_trace(&op, 0.1, 0.0, 400.0, &opts).unwrap();
        assert_eq!(zero.value, 0.0);
        let half = truncated_heat_trace(&op, 0.1, 0.5, 400.0, &opts).unwrap();
        assert!(half.value > 0.0 && half.value < z.value);
        assert!((half.bound_scale - 0.1f64.powf(-0.5) * 0.5).abs() < 1e-12);
        assert!(half.constant.is_finite() && half.constant > 0.0);
    }

    #[test]
    fn scaling_identity() {
        let opts = SolverOptions::with_tol(1e-6);
        let r = scaling_check(0.75, 2.0, 1.0, 5, &opts).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        let r = scaling_check(0.75, 2.0, 16.0, 10, &opts).unwrap();
        assert!(r.max_deviation <= 10.0 * opts.tol, "{r:?}");
        let r = scaling_check(0.75, 2.0, 16.0, 3, &opts).unwrap();
        assert!((r.factor - 4.0).abs() < 1e-15);
        assert!(scaling_check(0.75, 2.0, 0.0, 3, &opts).is_err());
    }

    #[test]
    fn ground_state_localizes() {
        let op = Operator1D::confined(0.75, 2.0, 100.0, 60.0);
        let s = eigen_below(&op, 60.0, &SolverOptions::with_tol(1e-6).vectors()).unwrap();
        let m = s.boundary_mass(0, 1.0f64.min(op.x_max)).unwrap();
        assert!(m >= 0.99, "{m}");
        assert!((s.boundary_mass(0, op.x_max).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(s.boundary_mass(0, 0.0).unwrap(), 0.0);
        assert!(s.boundary_mass(0, -0.1).is_err());
    }

    #[test]
    fn potential_monotonicity() {
        let opts = SolverOptions::with_tol(1e-6);
        let mut prev: Option<Vec<f64>> = None;
        for omega in [0.0, 1.0, 4.0, 16.0] {
            let s = eigen_below(&Operator1D::schrodinger(0.75, 2.0, omega, 1.0), 400.0, &opts).unwrap();
            if let Some(p) = &prev {
                assert!(s.len() <= p.len());
                for (a, b) in s.eigenvalues.iter().zip(p) {
                    assert!(a > b);
                }
            }
            prev = Some(s.eigenvalues);
        }
    }

    #[test]
    fn truncation_is_stable() {
        let opts = SolverOptions::with_tol(1e-7);
        let op = Operator1D::confined(2.0, 4.0, 1.0, 100.0);
        let a = eigen_below(&op, 100.0, &opts).unwrap();
        let wide = Operator1D { x_max: 2.0 * op.x_max, ..op };
        let b = eigen_below(&wide, 100.0, &opts).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!(rel(*x, *y) < 1e-6, "{x} {y}");
        }
    }

    #[test]
    fn weighted_form_matches_schrodinger() {
        let opts = SolverOptions::with_tol(1e-7);
        for beta in [1.0, 2.0, 4.0] {
            for k2 in [0.0, 9.0] {
                let sl = Operator1D::sturm_liouville(Weight::separable(beta), k2, 1.0);
                let sch = Operator1D::schrodinger(c_beta(1, beta), beta, k2, 1.0);
                let a = eigen_below(&sl, 300.0, &opts).unwrap();
                let b = eigen_below(&sch, 300.0, &opts).unwrap();
                assert_eq!(a.len(), b.len(), "beta={beta} k2={k2}");
                for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                    assert!(rel(*x, *y) < 1e-5, "beta={beta} k2={k2}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn interval_traces() {
        for tau in [1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0] {
            let d = interval_heat_trace(tau, BoundaryCondition::Dirichlet).unwrap();
            let n = interval_heat_trace(tau, BoundaryCondition::Neumann).unwrap();
            assert!((n - d - 1.0).abs() <= 2.0 * f64::EPSILON * n);
            assert!((d - (4.0 * std::f64::consts::PI * tau).powf(-0.5)).abs() < 1.0);
        }
        let d = interval_heat_trace(0.01, BoundaryCondition::Dirichlet).unwrap();
        assert!((d - 2.320_947_917_738_781).abs() < 1e-9, "{d}");
        assert!(interval_heat_trace(50.0, BoundaryCondition::Dirichlet).unwrap() < 1e-200);
        assert!(interval_heat_trace(-1.0, BoundaryCondition::Neumann).is_err());
    }

    #[test]
    fn weighted_eps_zero_and_constant_eta() {
        let opts = SolverOptions::with_tol(1e-7);
        let w = Weight { beta: 2.0, eps: 0.1, eta: EtaProfile::Constant };
        // Constant η rescales the mode eigenvalue by 1/(1+ε).
        let a = eigen_below(&Operator1D::sturm_liouville(w, 16.0, 1.0), 300.0, &opts).unwrap();
        let b = eigen_below(&Operator1D::sturm_liouville(Weight::separable(2.0), 16.0 / 1.1, 1.0), 300.0, &opts)
            .unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!(rel(*x, *y) < 1e-9);
        }
        assert_eq!(EtaProfile::Bump { support: 0.5 }.value(0.0), 1.0);
        assert_eq!(EtaProfile::Bump { support: 0.5 }.value(0.5), 0.0);
    }
}
