//! Least-squares fits of counting functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sample `(λ, N(λ))` of a counting function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountSample {
    pub lambda: f64,
    pub count: f64,
}

/// Right-continuous step function `N(λ) = Σ_{λ_j ≤ λ} m_j`, stored by its
/// exact step locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingFunction {
    /// Distinct step locations, ascending.
    pub steps: Vec<f64>,
    /// `N` just after each step.
    pub cumulative: Vec<u64>,
}

impl CountingFunction {
    /// Builds from `(λ, multiplicity)` pairs in any order.
    pub fn from_levels<I: IntoIterator<Item = (f64, u64)>>(levels: I) -> Self {
        let mut pairs: Vec<(f64, u64)> = levels.into_iter().collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut steps: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut cumulative: Vec<u64> = Vec::with_capacity(pairs.len());
        let mut acc = 0;
        for (l, m) in pairs {
            acc += m;
            if steps.last() == Some(&l) {
                *cumulative.last_mut().expect("nonempty") = acc;
            } else {
                steps.push(l);
                cumulative.push(acc);
            }
        }
        Self { steps, cumulative }
    }

    pub fn eval(&self, lambda: f64) -> u64 {
        let idx = self.steps.partition_point(|&s| s <= lambda);
        if idx == 0 {
            0
        } else {
            self.cumulative[idx - 1]
        }
    }

    pub fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// `count` geometrically spaced samples over `[lo, hi]`.
    pub fn sample(&self, lo: f64, hi: f64, count: usize) -> Vec<CountSample> {
        geometric_grid(lo, hi, count)
            .into_iter()
            .map(|lambda| CountSample { lambda, count: self.eval(lambda) as f64 })
            .collect()
    }
}

/// `count ≥ 2` points from `lo` to `hi` with constant ratio.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![hi];
    }
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo * (r * i as f64).exp() })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelForm {
    Power,
    PowerWithLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub model_form: ModelForm,
    pub exponent: f64,
    pub constant: f64,
    pub log_coefficient: Option<f64>,
    pub fit_window: (f64, f64),
    /// Relative RMS misfit over the window.
    pub residual: f64,
    pub samples: usize,
}

impl AsymptoticFit {
    pub fn predict(&self, lambda: f64) -> f64 {
        match self.model_form {
            ModelForm::Power => self.constant * lambda.powf(self.exponent),
            ModelForm::PowerWithLog => {
                lambda.powf(self.exponent) * (self.log_coefficient.unwrap_or(0.0) * lambda.ln() + self.constant)
            }
        }
    }
}

const MIN_SAMPLES: usize = 20;

fn in_window(samples: &[CountSample], window: (f64, f64)) -> Result<Vec<CountSample>> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::DegenerateFit(format!("invalid window [{lo}, {hi}]")));
    }
    let inside: Vec<CountSample> = samples
        .iter()
        .copied()
        .filter(|s| s.lambda >= lo * (1.0 - 1e-12) && s.lambda <= hi * (1.0 + 1e-12))
        .collect();
    if inside.len() < MIN_SAMPLES {
        return Err(Error::DegenerateFit(format!(
            "window [{lo}, {hi}] holds {} samples; at least {MIN_SAMPLES} needed",
            inside.len()
        )));
    }
    if inside.iter().any(|s| !(s.count > 0.0)) {
        return Err(Error::DegenerateFit("counting function vanishes inside the window".into()));
    }
    Ok(inside)
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::DegenerateFit("abscissae do not vary".into()));
    }
    let b = sxy / sxx;
    Ok((my - b * mx, b))
}

fn relative_rms(samples: &[CountSample], f: impl Fn(f64) -> f64) -> f64 {
    let s: f64 = samples.iter().map(|p| (f(p.lambda) / p.count - 1.0).powi(2)).sum();
    (s / samples.len() as f64).sqrt()
}

/// `N ≈ c λ^p` by least squares on `(ln λ, ln N)`.
pub fn fit_power(samples: &[CountSample], window: (f64, f64)) -> Result<AsymptoticFit> {
    let inside = in_window(samples, window)?;
    let xs: Vec<f64> = inside.iter().map(|s| s.lambda.ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|s| s.count.ln()).collect();
    let (a, b) = linear_fit(&xs, &ys)?;
    let constant = a.exp();
    Ok(AsymptoticFit {
        model_form: ModelForm::Power,
        exponent: b,
        constant,
        log_coefficient: None,
        fit_window: window,
        residual: relative_rms(&inside, |l| constant * l.powf(b)),
        samples: inside.len(),
    })
}

/// `N ≈ c λ^p` with `p` held fixed: `ln c` is the mean of `ln N − p ln λ`.
pub fn fit_constant(samples: &[CountSample], exponent: f64, window: (f64, f64)) -> Result<f64> {
    let inside = in_window(samples, window)?;
    let mean = inside.iter().map(|s| s.count.ln() - exponent * s.lambda.ln()).sum::<f64>() / inside.len() as f64;
    Ok(mean.exp())
}

/// Power fit with the exponent pinned, returned in the common fit shape.
pub fn fit_power_pinned(samples: &[CountSample], exponent: f64, window: (f64, f64)) -> Result<AsymptoticFit> {
    let constant = fit_constant(samples, exponent, window)?;
    let inside = in_window(samples, window)?;
    Ok(AsymptoticFit {
        model_form: ModelForm::Power,
        exponent,
        constant,
        log_coefficient: None,
        fit_window: window,
        residual: relative_rms(&inside, |l| constant * l.powf(exponent)),
        samples: inside.len(),
    })
}

/// `N ≈ λ^{(n+1)/2} (a ln λ + b)`: linear regression of `N / λ^{(n+1)/2}`
/// on `ln λ`. The slope is the log coefficient, the intercept the constant.
pub fn fit_power_log(samples: &[CountSample], n: usize, window: (f64, f64)) -> Result<AsymptoticFit> {
    let inside = in_window(samples, window)?;
    let p = (n as f64 + 1.0) / 2.0;
    let xs: Vec<f64> = inside.iter().map(|s| s.lambda.ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|s| s.count / s.lambda.powf(p)).collect();
    let (b, a) = linear_fit(&xs, &ys)?;
    Ok(AsymptoticFit {
        model_form: ModelForm::PowerWithLog,
        exponent: p,
        constant: b,
        log_coefficient: Some(a),
        fit_window: window,
        residual: relative_rms(&inside, |l| l.powf(p) * (a * l.ln() + b)),
        samples: inside.len(),
    })
}

/// Default dyadic window `[λ_hi/16, λ_hi]`.
pub fn default_window(lambda_hi: f64) -> (f64, f64) {
    (lambda_hi / 16.0, lambda_hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<CountSample> {
        geometric_grid(lo, hi, 40).into_iter().map(|l| CountSample { lambda: l, count: f(l) }).collect()
    }

    #[test]
    fn exact_power_law() {
        let s = synthetic(|l| 2.0 * l.powf(1.5), 10.0, 1000.0);
        let fit = fit_power(&s, (10.0, 1000.0)).unwrap();
        assert!((fit.exponent - 1.5).abs() < 1e-10);
        assert!((fit.constant - 2.0).abs() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn exact_log_law() {
        let s = synthetic(|l| 0.25 * l * l.ln() + 0.1 * l, 100.0, 2000.0);
        let fit = fit_power_log(&s, 1, (100.0, 2000.0)).unwrap();
        assert!((fit.log_coefficient.unwrap() - 0.25).abs() < 1e-10);
        assert!((fit.constant - 0.1).abs() < 1e-10);
        assert!((fit.predict(500.0) / (0.25 * 500.0 * 500f64.ln() + 50.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_windows() {
        let s = synthetic(|l| l, 1.0, 10.0);
        assert!(matches!(fit_power(&s, (5.0, 6.0)), Err(Error::DegenerateFit(_))));
        assert!(matches!(fit_power(&s, (6.0, 5.0)), Err(Error::DegenerateFit(_))));
        let zeros = synthetic(|_| 0.0, 1.0, 10.0);
        assert!(fit_power(&zeros, (1.0, 10.0)).is_err());
    }

    #[test]
    fn counting_function_steps() {
        let c = CountingFunction::from_levels([(3.0, 1), (7.0, 2), (3.0, 1), (11.0, 1)]);
        assert_eq!(c.steps, vec![3.0, 7.0, 11.0]);
        assert_eq!(c.eval(2.9), 0);
        assert_eq!(c.eval(3.0), 2);
        assert_eq!(c.eval(7.0), 4);
        assert_eq!(c.eval(100.0), 5);
        assert_eq!(c.total(), 5);
    }

    proptest! {
        #[test]
        fn recovers_synthetic_power_laws(p in 0.2f64..3.0, c in 0.01f64..50.0) {
            let s = synthetic(|l| c * l.powf(p), 3.0, 3000.0);
            let fit = fit_power(&s, (3.0, 3000.0)).unwrap();
            prop_assert!((fit.exponent - p).abs() < 1e-10);
            prop_assert!((fit.constant / c - 1.0).abs() < 1e-10);
            let pinned = fit_constant(&s, p, (3.0, 3000.0)).unwrap();
            prop_assert!((pinned / c - 1.0).abs() < 1e-10);
        }
    }
}
