//! One function per subcommand. Each returns its files and a manifest
//! fragment; nothing touches the filesystem here.

use std::fmt::Write as _;

use gg_spectra::model::{critical_log_constant, predicted_counting, self_adjointness_class};
use gg_spectra::product_spectrum::{assemble, write_heat_trace_csv, AssembleOptions, ModeMethod, SpectrumCache};
use gg_spectra::schrodinger1d::{
    eigen_below, one_d_counting_constant, one_d_counting_constant_beta_form, Operator1D, SolverOptions,
};
use gg_spectra::verify::{Suite, Verifier};
use gg_spectra::weyl_analysis::{
    a_beta_n_zeta, compute_a_beta_n, density_one_check, geometric_grid, quasi_isometry_experiment, weyl_fit,
    weyl_measure_estimate, ABetaNOptions, Z1Evaluator,
};
use gg_spectra::{AssembledSpectrum, DomainVariant, GasGiantModel, Regime};
use serde_json::{json, Value};

use crate::config::{field, positive, Format, RunConfig};
use crate::output::Outputs;
use crate::CliError;

pub struct CommandResult {
    pub outputs: Outputs,
    /// Printed to stdout; when empty and no output directory is set, the
    /// files themselves are printed.
    pub summary: String,
    /// Failed acceptance criteria.
    pub failed: usize,
}

impl CommandResult {
    fn files(outputs: Outputs) -> Self {
        Self { outputs, summary: String::new(), failed: 0 }
    }
}

pub fn dispatch(name: &str, cfg: &RunConfig) -> Result<CommandResult, CliError> {
    match name {
        "constants" => constants(cfg),
        "solve1d" => solve1d(cfg),
        "spectrum" => spectrum(cfg),
        "counting" => counting(cfg),
        "heat-trace" => heat_trace(cfg),
        "weyl-fit" => fit(cfg),
        "weyl-measure" => measure(cfg),
        "quasi-isometry" => quasi_isometry(cfg),
        "verify" => verify(cfg),
        other => Err(CliError::Validation(format!("unknown command `{other}`"))),
    }
}

fn model_json(model: &GasGiantModel) -> Value {
    json!({
        "n": model.n,
        "beta": model.beta,
        "alpha": model.alpha(),
        "base": model.base,
        "variant": model.variant,
        "outer_x": model.outer_x,
        "constants": model.constants(),
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn constants(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let model = cfg.model()?;
    let c = model.constants();
    let endpoint = self_adjointness_class(c.c_beta)?;
    let volume = model.volume_profile().total_volume;
    let report = json!({
        "model": model_json(&model),
        "critical_log_constant": critical_log_constant(model.n),
        "dilation_exponent": 2.0 / (2.0 + model.beta),
        "endpoint": endpoint,
        "total_volume": volume,
        "one_d_counting_constant": one_d_counting_constant(model.beta),
        "one_d_counting_constant_closed_form": one_d_counting_constant_beta_form(model.beta),
    });
    let mut summary = String::new();
    let mut line = |k: &str, v: String| writeln!(summary, "{k} = {v}").expect("string write");
    line("n", model.n.to_string());
    line("beta", model.beta.to_string());
    line("alpha", model.alpha().to_string());
    line("d_H", c.d_h.to_string());
    line("beta_c", c.beta_c.to_string());
    line("C_beta", c.c_beta.to_string());
    line("regime", c.regime.to_string());
    line("gamma_n", c.gamma_n.to_string());
    line("gamma_n+1", c.gamma_n_plus_1.to_string());
    line("C_n", critical_log_constant(model.n).to_string());
    line("volume", volume.value().map_or_else(|| format!("{volume:?}").to_lowercase(), |v| v.to_string()));
    line("endpoint", to_value(&endpoint.class).as_str().unwrap_or_default().to_string());

    let mut outputs = Outputs { derived_constants: to_value(&c), ..Outputs::default() };
    match cfg.format() {
        Format::Json => outputs.add_json("constants.json", &report)?,
        Format::Csv => {
            let mut csv = String::from("key,value\n");
            for l in summary.lines() {
                let (k, v) = l.split_once(" = ").expect("summary line");
                writeln!(csv, "{k},{v}").expect("string write");
            }
            outputs.add("constants.csv", csv.into_bytes());
        }
    }
    Ok(CommandResult { outputs, summary, failed: 0 })
}

fn solve1d(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let model = cfg.model()?;
    let mu_max = cfg.lambda_max()?;
    let omega = cfg.omega.ok_or_else(|| field("omega", "is required"))?;
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(field("omega", format!("must be nonnegative, got {omega}")));
    }
    let c = model.constants().c_beta;
    let op = match model.variant {
        DomainVariant::CompactSlab => Operator1D::schrodinger(c, model.beta, omega, model.outer_x),
        DomainVariant::TruncatedCone => {
            if omega == 0.0 {
                return Err(field("omega", "must be positive on the truncated cone"));
            }
            Operator1D::confined(c, model.beta, omega, mu_max)
        }
    };
    let s = eigen_below(&op, mu_max, &SolverOptions::with_tol(cfg.tol()?))?;
    let mut outputs = Outputs {
        derived_constants: to_value(&model.constants()),
        certificates: json!({ "sturm": s.certificate, "grid": s.grid }),
        solve_counts: json!({ "direct": 1 }),
        ..Outputs::default()
    };
    match cfg.format() {
        Format::Csv => {
            let mut csv = String::from("j,mu,convergence\n");
            for (j, (mu, conv)) in s.eigenvalues.iter().zip(&s.convergence_estimate).enumerate() {
                writeln!(csv, "{},{mu},{conv}", j + 1).expect("string write");
            }
            outputs.add("solve1d.csv", csv.into_bytes());
        }
        Format::Json => outputs.add_json(
            "solve1d.json",
            &json!({
                "omega": omega,
                "c": c,
                "mu_max": s.mu_max,
                "eigenvalues": s.eigenvalues,
                "convergence_estimate": s.convergence_estimate,
                "grid": s.grid,
                "certificate": s.certificate,
            }),
        )?,
    }
    Ok(CommandResult::files(outputs))
}

fn assembled(cfg: &RunConfig) -> Result<(AssembledSpectrum, Outputs), CliError> {
    let model = cfg.model()?;
    let spec = assemble(&model, cfg.lambda_max()?, &AssembleOptions::with_tol(cfg.tol()?))?;
    let direct = spec.modes.iter().filter(|m| m.method == ModeMethod::Direct).count();
    let scaled = spec.modes.len() - direct;
    let outputs = Outputs {
        derived_constants: to_value(&model.constants()),
        certificates: json!({
            "certified": spec.is_certified(),
            "lambda_max": spec.lambda_max,
            "cutoff": spec.cutoff,
            "omega_switch": spec.omega_switch,
            "skipped_zero_mode": spec.skipped_zero_mode,
            "modes": spec.modes.len(),
        }),
        solve_counts: json!({ "direct": direct, "reference": 1, "scaled_modes": scaled }),
        ..Outputs::default()
    };
    Ok((spec, outputs))
}

fn spectrum(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let (spec, mut outputs) = assembled(cfg)?;
    match cfg.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            spec.write_csv(&mut buf)?;
            outputs.add("spectrum.csv", buf);
        }
        Format::Json => outputs.add_json("spectrum.json", &spec.entries)?,
    }
    Ok(CommandResult::files(outputs))
}

fn counting(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let (spec, mut outputs) = assembled(cfg)?;
    let points = cfg.points.unwrap_or(64);
    if points < 2 {
        return Err(field("points", "must be at least 2"));
    }
    let first = spec.entries.first().map(|e| e.lambda).ok_or_else(|| field("lambda_max", "lies below λ₁"))?;
    let rows: Vec<(f64, u64)> = geometric_grid(first, spec.lambda_max, points)
        .into_iter()
        .map(|l| spec.counting_n(l).map(|c| (l, c)))
        .collect::<gg_spectra::Result<_>>()?;
    match cfg.format() {
        Format::Csv => {
            let mut csv = String::from("lambda,count\n");
            for (l, c) in &rows {
                writeln!(csv, "{l},{c}").expect("string write");
            }
            outputs.add("counting.csv", csv.into_bytes());
        }
        Format::Json => outputs.add_json(
            "counting.json",
            &rows.iter().map(|(l, c)| json!({ "lambda": l, "count": c })).collect::<Vec<_>>(),
        )?,
    }
    Ok(CommandResult::files(outputs))
}

fn heat_trace(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let (spec, mut outputs) = assembled(cfg)?;
    let t_min = spec.heat_trace_t_min()?;
    let grid = match &cfg.t_grid {
        Some(g) => {
            for &t in g {
                positive("t_grid", t)?;
            }
            g.clone()
        }
        None => geometric_grid(t_min, 100.0 * t_min, cfg.points.unwrap_or(32).max(2)),
    };
    let samples = grid.iter().map(|&t| spec.heat_trace(t)).collect::<gg_spectra::Result<Vec<_>>>()?;
    if let Value::Object(m) = &mut outputs.certificates {
        m.insert("heat_trace_t_min".into(), json!(t_min));
    }
    match cfg.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            write_heat_trace_csv(&samples, &mut buf)?;
            outputs.add("heat_trace.csv", buf);
        }
        Format::Json => outputs.add_json("heat_trace.json", &json!({ "t_min": t_min, "samples": samples }))?,
    }
    Ok(CommandResult::files(outputs))
}

fn fit(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let (spec, mut outputs) = assembled(cfg)?;
    let window = cfg.window(spec.lambda_max)?;
    let model = &spec.model;
    let (a, zeta) = if model.constants().regime == Regime::Supercritical {
        let cut = cfg.z1_cut.unwrap_or(4000.0);
        positive("z1_cut", cut)?;
        let z1 = Z1Evaluator::solve(model.n, model.beta, cut, &SolverOptions::with_tol(cfg.tol()?.min(1e-6)))?;
        (Some(compute_a_beta_n(model.n, model.beta, &z1, &ABetaNOptions::default())?), Some(a_beta_n_zeta(model.n, model.beta, &z1)?))
    } else {
        (None, None)
    };
    let report = weyl_fit(&spec, window, a.map(|a| a.value))?;
    let predicted = predicted_counting(model, &model.constants(), window.1, a.map(|a| a.value)).ok();
    // Fit reports are JSON whatever the format selector says.
    outputs.add_json(
        "weyl_fit.json",
        &json!({
            "regime": report.regime,
            "window": window,
            "report": report,
            "predicted": predicted,
            "a_beta_n": a,
            "a_beta_n_zeta": zeta,
        }),
    )?;
    Ok(CommandResult::files(outputs))
}

fn measure(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let (spec, mut outputs) = assembled(cfg)?;
    let lambda = cfg.lambda.unwrap_or(spec.lambda_max);
    positive("lambda", lambda)?;
    if lambda > spec.lambda_max {
        return Err(field("lambda", format!("exceeds lambda_max {}", spec.lambda_max)));
    }
    let outer = spec.model.outer_x;
    let a_grid = cfg.a_grid.clone().unwrap_or_else(|| [0.05, 0.1, 0.2, 0.25, 0.5, 1.0].map(|a| a * outer).to_vec());
    for &a in &a_grid {
        if !(a > 0.0 && a <= outer) {
            return Err(field("a_grid", format!("depth {a} outside (0, {outer}]")));
        }
    }
    let cache = SpectrumCache::new();
    let est = weyl_measure_estimate(&spec, &a_grid, lambda, &cache)?;
    let density = match cfg.interval {
        Some(interval) => {
            let eps = cfg.epsilon.unwrap_or(0.1);
            positive("epsilon", eps)?;
            Some(density_one_check(&spec, lambda, interval, eps, &cache).map_err(|e| field("interval", e))?)
        }
        None => None,
    };
    outputs.solve_counts = json!({ "direct": spec.modes.iter().filter(|m| m.method == ModeMethod::Direct).count(), "eigenvector_solves": cache.len() });
    match cfg.format() {
        Format::Csv => {
            let mut csv = String::from("a,cesaro_mass,theory_target\n");
            for ((a, m), t) in est.a_grid.iter().zip(&est.cesaro_mass).zip(&est.theory_target) {
                writeln!(csv, "{a},{m},{t}").expect("string write");
            }
            outputs.add("weyl_measure.csv", csv.into_bytes());
            if let Some(d) = density {
                let csv = format!(
                    "lambda,lo,hi,epsilon,exceptional,count,fraction\n{},{},{},{},{},{},{}\n",
                    d.lambda, d.interval.0, d.interval.1, d.epsilon, d.exceptional, d.count, d.fraction
                );
                outputs.add("density_one.csv", csv.into_bytes());
            }
        }
        Format::Json => outputs.add_json("weyl_measure.json", &json!({ "estimate": est, "density_one": density }))?,
    }
    Ok(CommandResult::files(outputs))
}

fn quasi_isometry(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let model = cfg.model()?;
    let eps = cfg.eps.unwrap_or(0.05);
    let j_max = cfg.j_max.unwrap_or(100);
    let report = quasi_isometry_experiment(&model, eps, cfg.eta()?, j_max, &SolverOptions::with_tol(cfg.tol()?))
        .map_err(|e| match e {
            gg_spectra::Error::Domain(msg) => field("eps/eta/j_max", msg),
            other => other.into(),
        })?;
    let mut outputs = Outputs {
        derived_constants: to_value(&model.constants()),
        certificates: json!({ "lambda_max": report.lambda_max }),
        ..Outputs::default()
    };
    match cfg.format() {
        Format::Csv => {
            let mut csv = String::from("j,deviation\n");
            for (j, d) in report.deviations.iter().enumerate() {
                writeln!(csv, "{},{d}", j + 1).expect("string write");
            }
            outputs.add("quasi_isometry.csv", csv.into_bytes());
        }
        Format::Json => outputs.add_json("quasi_isometry.json", &report)?,
    }
    Ok(CommandResult::files(outputs))
}

fn verify(cfg: &RunConfig) -> Result<CommandResult, CliError> {
    let suite: Suite = cfg.suite.as_deref().unwrap_or("all").parse().map_err(|e| field("suite", e))?;
    let verifier = Verifier::default();
    let reports = verifier.run_suite(suite);
    let mut summary = String::new();
    for r in &reports {
        writeln!(summary, "{}", r.summary_line()).expect("string write");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    let mut outputs = Outputs::default();
    outputs.add_json("verify.json", &json!({ "suite": suite, "options": verifier.options, "reports": reports }))?;
    Ok(CommandResult { outputs, summary, failed })
}
