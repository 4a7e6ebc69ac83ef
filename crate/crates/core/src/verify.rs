//! The acceptance suite: analytic oracles for the 1D solver and finite-`λ`
//! checks of the asymptotic laws.
//!
//! Each criterion yields a [`CriterionReport`] listing every measured value
//! next to its target and tolerance. Spectra shared between criteria are
//! assembled once per [`Verifier`].

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::base_spectrum::BaseManifold;
use crate::error::{Error, Result};
use crate::model::{c_beta, critical_log_constant, DomainVariant, GasGiantModel};
use crate::oracle::bessel_dirichlet_eigenvalues;
use crate::product_spectrum::{assemble, AssembleOptions, AssembledSpectrum, SpectrumCache};
use crate::schrodinger1d::{
    eigen_below, interval_heat_trace, one_d_counting_constant, one_d_counting_constant_beta_form, scaling_check,
    BoundaryCondition, EtaProfile, Operator1D, SolverOptions,
};
use crate::weyl_analysis::{
    compute_a_beta_n, density_one_check, fit_power, fit_power_log, fit_power_pinned, geometric_grid,
    karamata_converse, karamata_forward, quasi_isometry_experiment, smallest_workable_epsilon,
    weyl_measure_estimate, ABetaNOptions, CountingFunction, Z1Evaluator, FIT_SAMPLES,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub target: Option<f64>,
    /// Relative tolerance for targets, absolute bound otherwise.
    pub tolerance: Option<f64>,
    /// `None` for values reported without a threshold.
    pub passed: Option<bool>,
}

impl Measurement {
    fn relative(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let ok = (value / target - 1.0).abs() <= tol;
        Self { label: label.into(), value, target: Some(target), tolerance: Some(tol), passed: Some(ok) }
    }

    fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, target: None, tolerance: Some(bound), passed: Some(value <= bound) }
    }

    fn at_least(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { label: label.into(), value, target: Some(bound), tolerance: None, passed: Some(value >= bound) }
    }

    fn check(label: impl Into<String>, value: f64, ok: bool) -> Self {
        Self { label: label.into(), value, target: None, tolerance: None, passed: Some(ok) }
    }

    fn info(label: impl Into<String>, value: f64) -> Self {
        Self { label: label.into(), value, target: None, tolerance: None, passed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub measurements: Vec<Measurement>,
    /// Set when the criterion could not be evaluated.
    pub error: Option<String>,
}

impl CriterionReport {
    fn from_result(id: u32, result: Result<Vec<Measurement>>) -> Self {
        let title = TITLES[(id - 1) as usize].to_string();
        match result {
            Ok(measurements) => {
                let passed = measurements.iter().all(|m| m.passed != Some(false));
                Self { id, title, passed, measurements, error: None }
            }
            Err(e) => Self { id, title, passed: false, measurements: Vec::new(), error: Some(e.to_string()) },
        }
    }

    /// One line: `PASS  6 critical Weyl law: ...`.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => self
                .measurements
                .iter()
                .filter(|m| m.passed.is_some())
                .map(|m| {
                    if m.value != 0.0 && m.value.abs() < 1e-3 {
                        format!("{}={:.3e}", m.label, m.value)
                    } else {
                        format!("{}={:.6}", m.label, m.value)
                    }
                })
                .collect::<Vec<_>>()
                .join(" "),
        };
        format!("{verdict} {:>2} {}: {detail}", self.id, self.title)
    }
}

pub const CRITERIA: u32 = 13;

const TITLES: [&str; CRITERIA as usize] = [
    "oscillator oracle",
    "Bessel oracle",
    "scaling law",
    "1D counting law",
    "subcritical Weyl law",
    "critical Weyl law",
    "supercritical Weyl law",
    "heat-trace regimes",
    "Weyl measure",
    "density-one concentration",
    "Karamata forward/converse",
    "quasi-isometry bound",
    "interval-trace lemma",
];

/// Named groups of criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    /// Analytic checks of the 1D solver: 1, 2, 3, 13.
    Oracles,
    /// The critical (Grushin) benchmark: 2, 6.
    Grushin,
    /// Counting laws: 4 to 8.
    Weyl,
    /// Eigenfunction concentration: 9, 10.
    Measure,
    Karamata,
    QuasiIsometry,
}

impl Suite {
    pub fn criteria(&self) -> Vec<u32> {
        match self {
            Suite::All => (1..=CRITERIA).collect(),
            Suite::Oracles => vec![1, 2, 3, 13],
            Suite::Grushin => vec![2, 6],
            Suite::Weyl => vec![4, 5, 6, 7, 8],
            Suite::Measure => vec![9, 10],
            Suite::Karamata => vec![11],
            Suite::QuasiIsometry => vec![12],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "oracles" => Suite::Oracles,
            "grushin" | "critical" => Suite::Grushin,
            "weyl" => Suite::Weyl,
            "measure" => Suite::Measure,
            "karamata" => Suite::Karamata,
            "quasi-isometry" | "quasi" => Suite::QuasiIsometry,
            other => return Err(Error::Parse(format!("unknown suite '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Tolerance of the assembled 2D spectra.
    pub assembly_tol: f64,
    /// Tolerance of the 1D oracle solves.
    pub oracle_tol: f64,
    pub subcritical_lambda: f64,
    pub critical_lambda: f64,
    pub supercritical_lambda: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            assembly_tol: 1e-5,
            oracle_tol: 1e-7,
            subcritical_lambda: 5000.0,
            critical_lambda: 2000.0,
            supercritical_lambda: 8000.0,
        }
    }
}

type Fixture = OnceLock<std::result::Result<AssembledSpectrum, String>>;

/// Runs criteria, assembling each shared spectrum at most once.
#[derive(Debug, Default)]
pub struct Verifier {
    pub options: VerifyOptions,
    subcritical: Fixture,
    critical: Fixture,
    supercritical: Fixture,
    cache: SpectrumCache,
}

/// `n = 1`, circle of length `2π`, collar `(0, 1]`.
pub fn circle_model(beta: f64) -> GasGiantModel {
    GasGiantModel::new(1, beta, BaseManifold::circle(2.0 * PI), DomainVariant::CompactSlab, 1.0)
        .expect("valid benchmark model")
}

fn relative_spread(got: &[f64], want: &[f64]) -> f64 {
    got.iter().zip(want).map(|(g, w)| (g / w - 1.0).abs()).fold(0.0, f64::max)
}

/// Least-squares slope and intercept of `y` on `x`.
fn line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| ((intercept + slope * x) / y - 1.0).powi(2)).sum::<f64>() / n).sqrt();
    (slope, intercept, rms)
}

/// Semiclassical share of `{x ≤ a}` at level `Λ` for `n = 1`: states over
/// `[a, 1]` fill the phase-space volume `(Λ/2) ∫_a^1 x^{−β/2} dx` (base of
/// length `2π`), the rest are assigned to the collar. Uses the computed
/// `N(Λ)`, so it carries the same finite-`Λ` corrections.
fn phase_space_mass(spec: &AssembledSpectrum, a: f64, lambda: f64) -> Result<f64> {
    let beta = spec.model.beta;
    let outer = spec.model.outer_x;
    let e = 1.0 - beta / 2.0;
    let integral = if e.abs() < 1e-12 { (outer / a).ln() } else { (outer.powf(e) - a.powf(e)) / e };
    let scale = spec.model.base_volume().unwrap_or(2.0 * PI) / (2.0 * PI);
    let interior = scale * lambda / 2.0 * integral;
    Ok(1.0 - interior / spec.counting_n(lambda)? as f64)
}

impl Verifier {
    pub fn new(options: VerifyOptions) -> Self {
        Self { options, ..Self::default() }
    }

    fn fixture<'a>(&'a self, cell: &'a Fixture, beta: f64, lambda_max: f64) -> Result<&'a AssembledSpectrum> {
        cell.get_or_init(|| {
            assemble(&circle_model(beta), lambda_max, &AssembleOptions::with_tol(self.options.assembly_tol))
                .map_err(|e| e.to_string())
        })
        .as_ref()
        .map_err(|e| Error::Insufficient(format!("benchmark spectrum for beta = {beta}: {e}")))
    }

    pub fn subcritical(&self) -> Result<&AssembledSpectrum> {
        self.fixture(&self.subcritical, 1.0, self.options.subcritical_lambda)
    }

    pub fn critical(&self) -> Result<&AssembledSpectrum> {
        self.fixture(&self.critical, 2.0, self.options.critical_lambda)
    }

    pub fn supercritical(&self) -> Result<&AssembledSpectrum> {
        self.fixture(&self.supercritical, 4.0, self.options.supercritical_lambda)
    }

    pub fn run(&self, id: u32) -> CriterionReport {
        let result = match id {
            1 => self.oscillator(),
            2 => self.bessel(),
            3 => self.scaling(),
            4 => self.one_d_counting(),
            5 => self.subcritical_law(),
            6 => self.critical_law(),
            7 => self.supercritical_law(),
            8 => self.heat_trace_regimes(),
            9 => self.weyl_measure(),
            10 => self.density_one(),
            11 => self.karamata(),
            12 => self.quasi_isometry(),
            13 => self.interval_trace(),
            _ => Err(Error::domain(format!("no criterion {id}"))),
        };
        if !(1..=CRITERIA).contains(&id) {
            return CriterionReport {
                id,
                title: "unknown".into(),
                passed: false,
                measurements: Vec::new(),
                error: result.err().map(|e| e.to_string()),
            };
        }
        CriterionReport::from_result(id, result)
    }

    pub fn run_suite(&self, suite: Suite) -> Vec<CriterionReport> {
        suite.criteria().into_iter().map(|id| self.run(id)).collect()
    }

    fn oracle_opts(&self) -> SolverOptions {
        SolverOptions::with_tol(self.options.oracle_tol)
    }

    fn oscillator(&self) -> Result<Vec<Measurement>> {
        let s = eigen_below(&Operator1D::confined(0.0, 2.0, 1.0, 21.0), 21.0, &self.oracle_opts())?;
        let want = [3.0, 7.0, 11.0, 15.0, 19.0];
        if s.len() < 5 {
            return Err(Error::Insufficient(format!("{} oscillator eigenvalues found", s.len())));
        }
        Ok(vec![Measurement::at_most("max_rel_err", relative_spread(&s.eigenvalues[..5], &want), 1e-6)])
    }

    fn bessel(&self) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        for (label, c) in [("J1", 0.75), ("J3/4", 5.0 / 16.0)] {
            let want = bessel_dirichlet_eigenvalues(c, 1.0, 5);
            let s = eigen_below(&Operator1D::schrodinger(c, 2.0, 0.0, 1.0), want[4] * 1.05, &self.oracle_opts())?;
            if s.len() < 5 {
                return Err(Error::Insufficient(format!("{} Bessel eigenvalues found", s.len())));
            }
            out.push(Measurement::at_most(format!("{label}_max_rel_err"), relative_spread(&s.eigenvalues[..5], &want), 1e-6));
        }
        Ok(out)
    }

    fn scaling(&self) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        let opts = SolverOptions::with_tol(1e-6);
        for beta in [1.0, 2.0, 4.0] {
            let mut worst: f64 = 0.0;
            for omega in [4.0, 16.0, 256.0] {
                worst = worst.max(scaling_check(c_beta(1, beta), beta, omega, 10, &opts)?.max_deviation);
            }
            out.push(Measurement::at_most(format!("beta{beta}_max_dev"), worst, 1e-3));
        }
        Ok(out)
    }

    fn one_d_counting(&self) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        let opts = SolverOptions::with_tol(1e-5);
        for beta in [1.0, 2.0, 4.0] {
            let p = 0.5 + 1.0 / beta;
            let a_k = one_d_counting_constant(beta);
            let mu_max = (1100.0 / a_k).powf(1.0 / p);
            let s = eigen_below(&Operator1D::confined(c_beta(1, beta), beta, 1.0, mu_max), mu_max, &opts)?;
            let counting = CountingFunction::from_levels(s.eigenvalues.iter().map(|&l| (l, 1)));
            let window = (mu_max / 16.0, mu_max);
            let samples = counting.sample(window.0, window.1, FIT_SAMPLES);
            let free = fit_power(&samples, window)?;
            let pinned = fit_power_pinned(&samples, p, window)?;
            out.push(Measurement::at_least(format!("beta{beta}_count"), s.len() as f64, 1000.0));
            out.push(Measurement::relative(format!("beta{beta}_exponent"), free.exponent, p, 0.02));
            out.push(Measurement::relative(format!("beta{beta}_constant"), pinned.constant, a_k, 0.05));
            out.push(Measurement::info(format!("beta{beta}_closed_form_A"), one_d_counting_constant_beta_form(beta)));
            out.push(Measurement::info(format!("beta{beta}_free_constant"), free.constant));
        }
        Ok(out)
    }

    fn subcritical_law(&self) -> Result<Vec<Measurement>> {
        let spec = self.subcritical()?;
        let window = (spec.lambda_max / 16.0, spec.lambda_max);
        let samples = spec.counting_function().sample(window.0, window.1, FIT_SAMPLES);
        let free = fit_power(&samples, window)?;
        let pinned = fit_power_pinned(&samples, 1.0, window)?;
        // γ₂ v_g(X) = (1/4π)·(2π·∫₀¹ x^{−1/2} dx) = 1.
        let volume = spec.model.volume_profile().total_volume.value().unwrap_or(f64::NAN);
        let target = crate::model::weyl_gamma(2) * volume;
        Ok(vec![
            Measurement::relative("exponent", free.exponent, 1.0, 0.03),
            Measurement::relative("constant", pinned.constant, target, 0.05),
            Measurement::info("free_constant", free.constant),
            Measurement::info("count", spec.total_count() as f64),
        ])
    }

    fn critical_law(&self) -> Result<Vec<Measurement>> {
        let spec = self.critical()?;
        let window = (100.0, 2000.0f64.min(spec.lambda_max));
        let samples = spec.counting_function().sample(window.0, window.1, FIT_SAMPLES);
        let fit = fit_power_log(&samples, 1, window)?;
        let target = critical_log_constant(1) * 2.0 * PI;
        Ok(vec![
            Measurement::relative("log_coefficient", fit.log_coefficient.unwrap_or(f64::NAN), target, 0.15),
            Measurement::info("intercept", fit.constant),
            Measurement::info("residual", fit.residual),
        ])
    }

    fn a_beta_n(&self, beta: f64) -> Result<crate::weyl_analysis::ABetaN> {
        let z1 = Z1Evaluator::solve(1, beta, 4000.0, &SolverOptions::with_tol(1e-7))?;
        compute_a_beta_n(1, beta, &z1, &ABetaNOptions::default())
    }

    fn supercritical_law(&self) -> Result<Vec<Measurement>> {
        let spec = self.supercritical()?;
        let window = (500.0, spec.lambda_max);
        let samples = spec.counting_function().sample(window.0, window.1, FIT_SAMPLES);
        let free = fit_power(&samples, window)?;
        let pinned = fit_power_pinned(&samples, 1.5, window)?;
        let a = self.a_beta_n(4.0)?;
        let target = a.value * 2.0 * PI;
        Ok(vec![
            Measurement::relative("exponent", free.exponent, 1.5, 0.03),
            Measurement::relative("constant", pinned.constant, target, 0.10),
            Measurement::info("A", a.value),
            Measurement::info("A_error", a.error),
            Measurement::info("free_constant", free.constant),
        ])
    }

    /// `(ln t, ln Z)` slope over `[t_min, 4 t_min]`.
    fn trace_slope(spec: &AssembledSpectrum) -> Result<(Vec<f64>, Vec<f64>)> {
        let t_min = spec.heat_trace_t_min()?;
        let ts = geometric_grid(t_min, 4.0 * t_min, 24);
        let zs = ts.iter().map(|&t| spec.heat_trace(t).map(|s| s.value)).collect::<Result<Vec<f64>>>()?;
        Ok((ts, zs))
    }

    fn heat_trace_regimes(&self) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        for (label, spec, target) in [("supercritical", self.supercritical()?, -1.5), ("subcritical", self.subcritical()?, -1.0)] {
            let (ts, zs) = Self::trace_slope(spec)?;
            let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
            let ly: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
            let (slope, _, _) = line(&lx, &ly);
            out.push(Measurement::relative(format!("{label}_slope"), slope, target, 0.03));
            out.push(Measurement::info(format!("{label}_t_min"), ts[0]));
        }
        let spec = self.critical()?;
        let (ts, zs) = Self::trace_slope(spec)?;
        let xs: Vec<f64> = ts.iter().map(|t| t.ln().abs()).collect();
        let ys: Vec<f64> = ts.iter().zip(&zs).map(|(t, z)| t * z).collect();
        let (slope, _, rms) = line(&xs, &ys);
        out.push(Measurement::check("critical_tZ_slope", slope, slope > 0.0));
        out.push(Measurement::at_most("critical_tZ_linear_rms", rms, 0.01));
        out.push(Measurement::info("critical_tZ_slope_target", critical_log_constant(1) * 2.0 * PI));
        Ok(out)
    }

    fn weyl_measure(&self) -> Result<Vec<Measurement>> {
        let sub = self.subcritical()?;
        let est = weyl_measure_estimate(sub, &[0.25], 2000.0, &self.cache)?;
        let mut out = vec![
            Measurement::relative("subcritical_mass_0.25", est.cesaro_mass[0], est.theory_target[0], 0.10),
            Measurement::info("subcritical_phase_space_0.25", phase_space_mass(sub, 0.25, 2000.0)?),
        ];
        let sup = self.supercritical()?;
        let ladder = [250.0, 500.0, 1000.0, 2000.0];
        let masses = ladder
            .iter()
            .map(|&l| weyl_measure_estimate(sup, &[0.2], l, &self.cache).map(|e| e.cesaro_mass[0]))
            .collect::<Result<Vec<f64>>>()?;
        for (l, m) in ladder.iter().zip(&masses) {
            out.push(Measurement::info(format!("supercritical_mass_0.2@{l}"), *m));
        }
        out.push(Measurement::info("supercritical_phase_space_0.2", phase_space_mass(sup, 0.2, 2000.0)?));
        out.push(Measurement::at_least("supercritical_mass_0.2", masses[3], 0.9));
        let increasing = masses.windows(2).all(|w| w[1] > w[0]);
        out.push(Measurement::check("supercritical_ladder_rise", masses[3] - masses[0], increasing));
        Ok(out)
    }

    fn density_one(&self) -> Result<Vec<Measurement>> {
        let spec = self.supercritical()?;
        let ladder = [1000.0, 2000.0, 4000.0, 8000.0f64.min(spec.lambda_max)];
        let fractions = ladder
            .iter()
            .map(|&l| density_one_check(spec, l, (0.5, 1.0), 0.1, &self.cache).map(|d| d.fraction))
            .collect::<Result<Vec<f64>>>()?;
        let mut out: Vec<Measurement> =
            ladder.iter().zip(&fractions).map(|(l, f)| Measurement::info(format!("fraction@{l}"), *f)).collect();
        let worst_rise = fractions.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        out.push(Measurement::at_most("largest_increase", worst_rise, 0.02));
        Ok(out)
    }

    fn karamata(&self) -> Result<Vec<Measurement>> {
        let mut out = Vec::new();
        // {4k+3}: N(μ) ~ μ/4 and transform e^{−3t}/(1 − e^{−4t}) ~ 1/(4t).
        let count = 1_000_000;
        let osc = CountingFunction::from_levels((0..count).map(|k| (4.0 * k as f64 + 3.0, 1)));
        let lmax = 4.0 * (count - 1) as f64 + 3.0;
        let fwd = karamata_forward(&osc, 0.25, 1.0, lmax, &[1e-4, 1e-3]);
        for s in &fwd.samples {
            let exact = crate::oracle::half_oscillator_heat_trace(s.t);
            out.push(Measurement::at_most(format!("oscillator_transform_err@{}", s.t), (s.transform / exact - 1.0).abs(), 1e-9));
            out.push(Measurement::at_most(format!("oscillator_ratio_dev@{}", s.t), (s.ratio - 1.0).abs(), 2.0 * s.t));
        }
        out.push(Measurement::check("oscillator_count@1e4", osc.eval(1e4) as f64, osc.eval(1e4) == 2500));
        let conv = karamata_converse(&osc, 0.25, 1.0, lmax, 0.05, &[1e-3, 0.01, 0.1, 1.0])?;
        out.push(Measurement::check("oscillator_converse_eps0.05_K", conv.k, conv.holds));

        let t_grid = [0.01, 0.1, 1.0];
        for (label, spec) in [("subcritical", self.subcritical()?), ("supercritical", self.supercritical()?)] {
            let counting = spec.counting_function();
            let window = (spec.lambda_max / 16.0, spec.lambda_max);
            let law = fit_power(&counting.sample(window.0, window.1, FIT_SAMPLES), window)?;
            match smallest_workable_epsilon(&counting, law.constant, law.exponent, spec.lambda_max, &t_grid) {
                Some(r) => {
                    out.push(Measurement::check(format!("{label}_converse_eps"), r.epsilon, r.holds));
                    out.push(Measurement::info(format!("{label}_converse_K"), r.k));
                }
                None => out.push(Measurement::check(format!("{label}_converse_eps"), f64::NAN, false)),
            }
        }
        Ok(out)
    }

    fn quasi_isometry(&self) -> Result<Vec<Measurement>> {
        let model = circle_model(2.0);
        let eta = EtaProfile::Bump { support: 0.5 };
        let opts = SolverOptions::with_tol(1e-8);
        let small = quasi_isometry_experiment(&model, 0.01, eta, 100, &opts)?;
        let large = quasi_isometry_experiment(&model, 0.05, eta, 100, &opts)?;
        let ratio = large.max_deviation / small.max_deviation;
        Ok(vec![
            Measurement::relative("deviation_ratio", ratio, 5.0, 0.30),
            Measurement::info("max_dev_eps0.01", small.max_deviation),
            Measurement::info("max_dev_eps0.05", large.max_deviation),
            Measurement::info("empirical_C", large.empirical_constant.unwrap_or(f64::NAN)),
        ])
    }

    fn interval_trace(&self) -> Result<Vec<Measurement>> {
        let taus = geometric_grid(1e-4, 10.0, 200);
        let mut gap: f64 = 0.0;
        let mut remainder: f64 = 0.0;
        for &tau in &taus {
            let d = interval_heat_trace(tau, BoundaryCondition::Dirichlet)?;
            let n = interval_heat_trace(tau, BoundaryCondition::Neumann)?;
            gap = gap.max((n - d - 1.0).abs() / n);
            remainder = remainder.max((d - (4.0 * PI * tau).powf(-0.5)).abs());
        }
        Ok(vec![
            Measurement::at_most("neumann_minus_dirichlet_rel_err", gap, 4.0 * f64::EPSILON),
            // θ-function identity: the Dirichlet remainder tends to −1/2.
            Measurement::at_most("dirichlet_remainder_sup", remainder, 0.5 + 1e-9),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_criteria_pass() {
        let v = Verifier::new(VerifyOptions::default());
        for id in [1, 2, 13] {
            let r = v.run(id);
            assert!(r.passed, "{}", r.summary_line());
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        let r = Verifier::default().run(99);
        assert!(!r.passed);
        assert!(r.error.is_some());
    }

    #[test]
    fn suites_parse() {
        assert_eq!("grushin".parse::<Suite>().unwrap().criteria(), vec![2, 6]);
        assert_eq!(Suite::All.criteria().len(), 13);
        assert!("nope".parse::<Suite>().is_err());
    }
}
