//! The spectrum of `Δ_g` assembled from the separated operators
//! `P_{ω_k}`, one per base level.
//!
//! Each base level `ω_k` contributes the eigenvalues of `P_{ω_k}` below
//! `lambda_max`, with the base multiplicity. Levels stop once the half-line
//! ground state `ω^{2/(2+β)} μ₁(1)` exceeds `lambda_max`; potential
//! monotonicity and domain monotonicity make this a certified cutoff. Above a
//! switch frequency the dilation identity `μ_j(ω) = ω^{2/(2+β)} μ_j(1)`
//! replaces per-level solves.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ui;

use crate::base_spectrum::EigenvalueStream;
use crate::error::{Error, Result};
use crate::model::{DomainVariant, GasGiantModel};
use crate::schrodinger1d::{self, Certificate, Operator1D, SolverOptions, Spectrum1D};
use crate::weyl_analysis::fit::{default_window, fit_power, CountingFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FastPath {
    /// Switch at the first frequency where direct and scaled eigenvalues
    /// agree to `10·tol`.
    Auto,
    Off,
    /// Use the scaled reference for every `ω ≥ omega`.
    Above { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssembleOptions {
    pub tol: f64,
    pub fast_path: FastPath,
    pub max_nodes: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        Self { tol: 1e-4, fast_path: FastPath::Auto, max_nodes: SolverOptions::default().max_nodes }
    }
}

impl AssembleOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_nodes: self.max_nodes, ..SolverOptions::default() }
    }
}

/// One eigenvalue `λ = μ_j(ω_k)` of `Δ_g` with the multiplicity of `ω_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    /// Index of the base level (0 for the lowest).
    pub k: usize,
    /// 1-based index of the eigenvalue of `P_{ω_k}`.
    pub j: usize,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeMethod {
    Direct,
    Scaled,
}

/// Per-level provenance and completeness evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    pub k: usize,
    pub omega: f64,
    pub multiplicity: u64,
    pub method: ModeMethod,
    pub retained: usize,
    /// Sturm certificate of the direct solve; scaled modes inherit the
    /// reference certificate.
    pub certificate: Option<Certificate>,
    pub x_max: f64,
}

impl ModeRecord {
    pub fn is_certified(&self) -> bool {
        match (self.method, self.certificate) {
            (ModeMethod::Direct, Some(c)) => c.expected_count() == self.retained,
            (ModeMethod::Scaled, _) => true,
            _ => false,
        }
    }
}

/// Evidence that no base level beyond the retained ones contributes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffCertificate {
    /// First excluded level, `None` when the base spectrum is exhausted.
    pub first_excluded_k: Option<usize>,
    pub first_excluded_omega: Option<f64>,
    /// `ω^{2/(2+β)} μ₁(1)`, a lower bound for the excluded ground state.
    pub ground_state_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembledSpectrum {
    pub model: GasGiantModel,
    pub lambda_max: f64,
    pub solver_tol: f64,
    /// Sorted by `(λ, k, j)`.
    pub entries: Vec<SpectrumEntry>,
    pub modes: Vec<ModeRecord>,
    pub cutoff: CutoffCertificate,
    /// Eigenvalues of `P₁` on a confinement-truncated half-line.
    pub reference: Spectrum1D,
    pub omega_switch: Option<f64>,
    /// Whether a zero base level was refused (truncated cone).
    pub skipped_zero_mode: bool,
}

/// Memoized 1D solves keyed by operator, threshold and options. Insertion is
/// idempotent: the first stored value for a key wins.
#[derive(Debug, Default)]
pub struct SpectrumCache {
    inner: Mutex<HashMap<CacheKey, Arc<Spectrum1D>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    form: [u64; 4],
    x_max: u64,
    truncated: bool,
    mu_max: u64,
    tol: u64,
    max_nodes: usize,
    vectors: bool,
}

impl CacheKey {
    fn new(op: &Operator1D, mu_max: f64, opts: &SolverOptions) -> Self {
        let form = match op.form {
            schrodinger1d::Form::Schrodinger { c, beta, omega } => {
                [0, c.to_bits(), beta.to_bits(), omega.to_bits()]
            }
            schrodinger1d::Form::SturmLiouville { weight, mode_sq } => {
                let eta = match weight.eta {
                    schrodinger1d::EtaProfile::Bump { support } => support.to_bits(),
                    schrodinger1d::EtaProfile::Constant => u64::MAX,
                };
                [
                    1 ^ eta.rotate_left(1),
                    weight.beta.to_bits(),
                    weight.eps.to_bits(),
                    mode_sq.to_bits(),
                ]
            }
        };
        Self {
            form,
            x_max: op.x_max.to_bits(),
            truncated: op.truncated,
            mu_max: mu_max.to_bits(),
            tol: opts.tol.to_bits(),
            max_nodes: opts.max_nodes,
            vectors: opts.want_vectors,
        }
    }
}

impl SpectrumCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn solve(&self, op: &Operator1D, mu_max: f64, opts: &SolverOptions) -> Result<Arc<Spectrum1D>> {
        let key = CacheKey::new(op, mu_max, opts);
        if let Some(hit) = self.inner.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let solved = Arc::new(schrodinger1d::eigen_below(op, mu_max, opts)?);
        let mut map = self.inner.lock().expect("cache lock");
        Ok(Arc::clone(map.entry(key).or_insert(solved)))
    }
}

fn mode_operator(model: &GasGiantModel, omega: f64, lambda_max: f64) -> Operator1D {
    let c = model.constants().c_beta;
    match model.variant {
        DomainVariant::CompactSlab => Operator1D::schrodinger(c, model.beta, omega, model.outer_x),
        DomainVariant::TruncatedCone => Operator1D::confined(c, model.beta, omega, lambda_max),
    }
}

fn reference_operator(model: &GasGiantModel, mu_max: f64) -> Operator1D {
    Operator1D::confined(model.constants().c_beta, model.beta, 1.0, mu_max)
}

fn dilation(beta: f64, omega: f64) -> f64 {
    omega.powf(2.0 / (2.0 + beta))
}

/// Assembles every eigenvalue of `Δ_g` up to `lambda_max`.
pub fn assemble(model: &GasGiantModel, lambda_max: f64, opts: &AssembleOptions) -> Result<AssembledSpectrum> {
    assemble_with_cache(model, lambda_max, opts, &SpectrumCache::new())
}

pub fn assemble_with_cache(
    model: &GasGiantModel,
    lambda_max: f64,
    opts: &AssembleOptions,
    cache: &SpectrumCache,
) -> Result<AssembledSpectrum> {
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::domain(format!("lambda_max must be positive, got {lambda_max}")));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::domain("solver tolerance must be positive"));
    }
    let beta = model.beta;
    let solver = opts.solver();

    // Smallest frequency at which scaled modes may be used; the reference
    // solve must cover λ_max / ω^{2/(2+β)} from there on.
    let first_positive = EigenvalueStream::new(&model.base)
        .take(64)
        .map(|l| l.omega)
        .find(|&w| w > 0.0);
    let omega_a = match model.variant {
        DomainVariant::CompactSlab => lambda_max / model.outer_x.powf(beta),
        DomainVariant::TruncatedCone => first_positive.unwrap_or(1.0),
    };
    let omega_ref = match opts.fast_path {
        FastPath::Above { omega } if omega > 0.0 => omega.min(omega_a),
        _ => omega_a,
    };
    let mut mu_ref = lambda_max / dilation(beta, omega_ref);
    let reference = loop {
        let s = cache.solve(&reference_operator(model, mu_ref), mu_ref, &solver)?;
        if !s.is_empty() {
            break s;
        }
        mu_ref *= 2.0;
    };
    let ground = reference.eigenvalues[0];

    // Base levels up to the certified cutoff.
    let mut levels = Vec::new();
    let mut cutoff = CutoffCertificate { first_excluded_k: None, first_excluded_omega: None, ground_state_bound: None };
    let mut skipped_zero_mode = false;
    for (k, level) in EigenvalueStream::new(&model.base).enumerate() {
        if level.omega > 0.0 {
            let bound = dilation(beta, level.omega) * ground;
            if bound > lambda_max {
                cutoff = CutoffCertificate {
                    first_excluded_k: Some(k),
                    first_excluded_omega: Some(level.omega),
                    ground_state_bound: Some(bound),
                };
                break;
            }
        } else if model.variant == DomainVariant::TruncatedCone {
            skipped_zero_mode = true;
            continue;
        }
        levels.push((k, level));
    }

    let switch_floor = match opts.fast_path {
        FastPath::Off => f64::INFINITY,
        FastPath::Auto => omega_a,
        FastPath::Above { omega } => omega,
    };
    let direct_levels: Vec<_> = levels.iter().filter(|(_, l)| l.omega < switch_floor).copied().collect();
    let solve_mode = |k: usize, omega: f64| -> Result<(Arc<Spectrum1D>, f64)> {
        let op = mode_operator(model, omega, lambda_max);
        cache
            .solve(&op, lambda_max, &solver)
            .map(|s| (s, op.x_max))
            .map_err(|e| Error::Mode { k, omega, source: Box::new(e) })
    };
    let direct: Vec<(Arc<Spectrum1D>, f64)> =
        direct_levels.par_iter().map(|(k, l)| solve_mode(*k, l.omega)).collect::<Result<_>>()?;

    let mut modes = Vec::with_capacity(levels.len());
    let mut entries = Vec::new();
    let push_direct = |k: usize, l: &crate::BaseLevel, s: &Spectrum1D, x_max: f64, modes: &mut Vec<ModeRecord>, entries: &mut Vec<SpectrumEntry>| {
        for (j, &lambda) in s.eigenvalues.iter().enumerate() {
            entries.push(SpectrumEntry { lambda, k, j: j + 1, multiplicity: l.multiplicity });
        }
        modes.push(ModeRecord {
            k,
            omega: l.omega,
            multiplicity: l.multiplicity,
            method: ModeMethod::Direct,
            retained: s.len(),
            certificate: Some(s.certificate),
            x_max,
        });
    };
    for ((k, l), (s, x_max)) in direct_levels.iter().zip(&direct) {
        push_direct(*k, l, s, *x_max, &mut modes, &mut entries);
    }

    let mut omega_switch = match opts.fast_path {
        FastPath::Above { omega } => Some(omega),
        _ => None,
    };
    let agreement = 10.0 * opts.tol;
    for (k, l) in levels.iter().filter(|(_, l)| l.omega >= switch_floor) {
        let factor = dilation(beta, l.omega);
        let scaled: Vec<f64> = reference
            .eigenvalues
            .iter()
            .map(|m| factor * m)
            .take_while(|&v| v <= lambda_max)
            .collect();
        if omega_switch.is_none() {
            let (s, x_max) = solve_mode(*k, l.omega)?;
            let agree = s.len() == scaled.len()
                && s.eigenvalues.iter().zip(&scaled).all(|(d, c)| (d / c - 1.0).abs() <= agreement);
            push_direct(*k, l, &s, x_max, &mut modes, &mut entries);
            if agree {
                omega_switch = Some(l.omega);
            }
            continue;
        }
        for (j, &lambda) in scaled.iter().enumerate() {
            entries.push(SpectrumEntry { lambda, k: *k, j: j + 1, multiplicity: l.multiplicity });
        }
        modes.push(ModeRecord {
            k: *k,
            omega: l.omega,
            multiplicity: l.multiplicity,
            method: ModeMethod::Scaled,
            retained: scaled.len(),
            certificate: Some(reference.certificate),
            x_max: reference.grid.x_max() / l.omega.powf(1.0 / (2.0 + beta)),
        });
    }

    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.k.cmp(&b.k)).then(a.j.cmp(&b.j)));
    Ok(AssembledSpectrum {
        model: model.clone(),
        lambda_max,
        solver_tol: opts.tol,
        entries,
        modes,
        cutoff,
        reference: (*reference).clone(),
        omega_switch,
        skipped_zero_mode,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTraceSample {
    pub t: f64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Relative tail size below which a heat-trace sample is trusted.
const TAIL_FRACTION: f64 = 0.01;

impl AssembledSpectrum {
    /// Total count `N(λ_max)`.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn counting_function(&self) -> CountingFunction {
        CountingFunction::from_levels(self.entries.iter().map(|e| (e.lambda, e.multiplicity)))
    }

    /// `N(λ)`; exact up to the completeness bound.
    pub fn counting_n(&self, lambda: f64) -> Result<u64> {
        counting_n(self, lambda)
    }

    pub fn is_certified(&self) -> bool {
        self.modes.iter().all(ModeRecord::is_certified)
    }

    /// `N ≈ c λ^p` fitted over `[λ_max/16, λ_max]`; drives the tail estimate.
    pub fn tail_law(&self) -> Result<(f64, f64)> {
        let window = default_window(self.lambda_max);
        let samples = self.counting_function().sample(window.0, window.1, 64);
        let fit = fit_power(&samples, window)?;
        Ok((fit.constant, fit.exponent))
    }

    /// Smallest `t` with `tail_bound ≤ 1% · value`.
    pub fn heat_trace_t_min(&self) -> Result<f64> {
        let (c, p) = self.tail_law()?;
        let ratio = |t: f64| self.tail(c, p, t) / self.trace_sum(t);
        let mut hi = 1.0 / self.lambda_max;
        while ratio(hi) > TAIL_FRACTION {
            hi *= 2.0;
            if hi > 1e6 / self.lambda_max {
                return Err(Error::Insufficient("heat-trace tail never drops below 1%".into()));
            }
        }
        let mut lo = hi / 2.0;
        while ratio(lo) <= TAIL_FRACTION && lo > 1e-300 {
            lo /= 2.0;
        }
        for _ in 0..80 {
            let mid = (lo * hi).sqrt();
            if ratio(mid) <= TAIL_FRACTION {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    fn trace_sum(&self, t: f64) -> f64 {
        self.entries.iter().map(|e| e.multiplicity as f64 * (-t * e.lambda).exp()).sum()
    }

    fn tail(&self, c: f64, p: f64, t: f64) -> f64 {
        c * p * t.powf(-p) * gamma_ui(p, t * self.lambda_max)
    }

    pub fn heat_trace(&self, t: f64) -> Result<HeatTraceSample> {
        heat_trace(self, t)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "lambda,k,j,multiplicity")?;
        for e in &self.entries {
            writeln!(w, "{},{},{},{}", e.lambda, e.k, e.j, e.multiplicity)?;
        }
        Ok(())
    }

    /// Binary cache (CBOR); floats are stored bit-exactly.
    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        ciborium::into_writer(self, w).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }

    pub fn read_binary<R: Read>(r: R) -> Result<Self> {
        ciborium::from_reader(r).map_err(|e| Error::Parse(format!("spectrum cache: {e}")))
    }

    fn mode(&self, k: usize) -> Result<&ModeRecord> {
        self.modes
            .iter()
            .find(|m| m.k == k)
            .ok_or_else(|| Error::domain(format!("no mode with base index {k}")))
    }

    /// Eigenfunction masses in `[0, a]` for every entry with `λ ≤ lambda`,
    /// one row per entry (in entry order) and one column per depth.
    pub fn boundary_masses(&self, a_grid: &[f64], lambda: f64, cache: &SpectrumCache) -> Result<Vec<(SpectrumEntry, Vec<f64>)>> {
        if lambda > self.lambda_max {
            return Err(Error::Range { lambda, lambda_max: self.lambda_max });
        }
        for &a in a_grid {
            if !(0.0..=self.model.outer_x).contains(&a) {
                return Err(Error::domain(format!("depth {a} outside [0, {}]", self.model.outer_x)));
            }
        }
        let wanted: Vec<SpectrumEntry> = self.entries.iter().copied().filter(|e| e.lambda <= lambda).collect();
        let mut ks: Vec<usize> = wanted.iter().map(|e| e.k).collect();
        ks.sort_unstable();
        ks.dedup();
        let opts = SolverOptions::with_tol(self.solver_tol).vectors();
        let beta = self.model.beta;

        // Same operators and thresholds as the assembly, so row indices match
        // and the answer does not depend on which entries were requested.
        let reference = if ks.iter().any(|&k| self.mode(k).map(|m| m.method == ModeMethod::Scaled).unwrap_or(false)) {
            let mu = self.reference.mu_max;
            Some(cache.solve(&reference_operator(&self.model, mu), mu, &opts)?)
        } else {
            None
        };

        let per_mode: Vec<Vec<(SpectrumEntry, Vec<f64>)>> = ks
            .par_iter()
            .map(|&k| -> Result<Vec<(SpectrumEntry, Vec<f64>)>> {
                let mode = self.mode(k)?;
                let rows: Vec<SpectrumEntry> = wanted.iter().copied().filter(|e| e.k == k).collect();
                match mode.method {
                    ModeMethod::Direct => {
                        let op = mode_operator(&self.model, mode.omega, self.lambda_max);
                        let s = cache
                            .solve(&op, self.lambda_max, &opts)
                            .map_err(|e| Error::Mode { k, omega: mode.omega, source: Box::new(e) })?;
                        rows.into_iter()
                            .map(|e| {
                                let masses = a_grid
                                    .iter()
                                    .map(|&a| s.boundary_mass(e.j - 1, a.min(op.x_max)))
                                    .collect::<Result<Vec<f64>>>()?;
                                Ok((e, masses))
                            })
                            .collect()
                    }
                    ModeMethod::Scaled => {
                        let r = reference.as_ref().expect("reference solved for scaled modes");
                        let stretch = mode.omega.powf(1.0 / (2.0 + beta));
                        let x_ref = r.grid.x_max();
                        rows.into_iter()
                            .map(|e| {
                                let masses = a_grid
                                    .iter()
                                    .map(|&a| r.boundary_mass(e.j - 1, (a * stretch).min(x_ref)))
                                    .collect::<Result<Vec<f64>>>()?;
                                Ok((e, masses))
                            })
                            .collect()
                    }
                }
            })
            .collect::<Result<_>>()?;
        let mut out: Vec<(SpectrumEntry, Vec<f64>)> = per_mode.into_iter().flatten().collect();
        out.sort_by(|a, b| a.0.lambda.total_cmp(&b.0.lambda).then(a.0.k.cmp(&b.0.k)).then(a.0.j.cmp(&b.0.j)));
        Ok(out)
    }
}

/// `N(λ) = Σ_{λ_j ≤ λ} multiplicity`.
pub fn counting_n(spec: &AssembledSpectrum, lambda: f64) -> Result<u64> {
    if lambda > spec.lambda_max {
        return Err(Error::Range { lambda, lambda_max: spec.lambda_max });
    }
    let idx = spec.entries.partition_point(|e| e.lambda <= lambda);
    Ok(spec.entries[..idx].iter().map(|e| e.multiplicity).sum())
}

/// `Z(t) = Σ m e^{−tλ}`, accumulated in entry order, with the fitted-law
/// tail above `lambda_max` reported separately.
pub fn heat_trace(spec: &AssembledSpectrum, t: f64) -> Result<HeatTraceSample> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let t_min = spec.heat_trace_t_min()?;
    if t < t_min {
        return Err(Error::BelowValidRange { t, t_min });
    }
    let (c, p) = spec.tail_law()?;
    Ok(HeatTraceSample { t, value: spec.trace_sum(t), tail_bound: spec.tail(c, p, t) })
}

pub fn write_heat_trace_csv<W: Write>(samples: &[HeatTraceSample], mut w: W) -> Result<()> {
    writeln!(w, "t,value,tail_bound")?;
    for s in samples {
        writeln!(w, "{},{},{}", s.t, s.value, s.tail_bound)?;
    }
    Ok(())
}

/// Mass in `[0, a]` of the eigenfunction behind `entry`; the base factor is
/// normalized on all of `M` and contributes 1.
pub fn eigenfunction_boundary_mass(spec: &AssembledSpectrum, entry: &SpectrumEntry, a: f64) -> Result<f64> {
    let rows = spec.boundary_masses(&[a], entry.lambda, &SpectrumCache::new())?;
    rows.into_iter()
        .find(|(e, _)| e.k == entry.k && e.j == entry.j)
        .map(|(_, m)| m[0])
        .ok_or_else(|| Error::domain("entry does not belong to this spectrum"))
}
