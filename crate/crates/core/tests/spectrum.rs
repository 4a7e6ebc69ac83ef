//! End-to-end behaviour of assembled spectra.

use std::f64::consts::PI;

use gg_spectra::model::{constants_for, Regime};
use gg_spectra::oracle::bessel_zeros;
use gg_spectra::product_spectrum::{assemble, AssembleOptions, SpectrumCache};
use gg_spectra::verify::circle_model;
use gg_spectra::weyl_analysis::{weyl_fit, weyl_measure_estimate};
use gg_spectra::{AssembledSpectrum, BaseLevel, BaseManifold, DomainVariant, GasGiantModel};

fn spectrum(beta: f64, lambda_max: f64) -> AssembledSpectrum {
    assemble(&circle_model(beta), lambda_max, &AssembleOptions::default()).unwrap()
}

#[test]
fn grushin_ground_state_is_bessel() {
    let spec = spectrum(2.0, 200.0);
    let first = spec.entries[0];
    assert_eq!((first.k, first.j, first.multiplicity), (0, 1, 1));
    let j11 = bessel_zeros(1.0, 1)[0];
    assert!((first.lambda / (j11 * j11) - 1.0).abs() < 1e-4);
    assert!((first.lambda - 14.681_970_6).abs() < 2e-3);
}

#[test]
fn csv_is_round_trip_exact() {
    let spec = spectrum(4.0, 300.0);
    let mut buf = Vec::new();
    spec.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,k,j,multiplicity"));
    for (line, e) in lines.zip(&spec.entries) {
        let lambda: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(lambda.to_bits(), e.lambda.to_bits());
    }
}

#[test]
fn binary_cache_round_trips() {
    let spec = spectrum(1.0, 200.0);
    let mut buf = Vec::new();
    spec.write_binary(&mut buf).unwrap();
    let back = AssembledSpectrum::read_binary(buf.as_slice()).unwrap();
    assert_eq!(back, spec);
}

#[test]
fn schedule_independent() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| spectrum(4.0, 400.0))
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.entries.len(), b.entries.len());
    for (x, y) in a.entries.iter().zip(&b.entries) {
        assert_eq!((x.lambda.to_bits(), x.k, x.j, x.multiplicity), (y.lambda.to_bits(), y.k, y.j, y.multiplicity));
    }
}

#[test]
fn certified_and_positive() {
    for beta in [1.0, 2.0, 4.0] {
        let spec = spectrum(beta, 300.0);
        assert!(spec.is_certified());
        assert!(spec.entries.iter().all(|e| e.lambda > 0.0));
        assert!(spec.entries.windows(2).all(|w| (w[0].lambda, w[0].k, w[0].j) <= (w[1].lambda, w[1].k, w[1].j)));
        assert_eq!(spec.counting_n(spec.entries[0].lambda * 0.999).unwrap(), 0);
        assert!(spec.counting_n(301.0).is_err());
    }
}

#[test]
fn modes_are_monotone_in_frequency() {
    let spec = spectrum(2.0, 500.0);
    let max_k = spec.entries.iter().map(|e| e.k).max().unwrap();
    for j in 1..=3 {
        let by_k: Vec<f64> = (0..=max_k)
            .filter_map(|k| spec.entries.iter().find(|e| e.k == k && e.j == j).map(|e| e.lambda))
            .collect();
        assert!(by_k.windows(2).all(|w| w[1] >= w[0]), "j = {j}: {by_k:?}");
    }
}

#[test]
fn heat_trace_is_log_convex() {
    let spec = spectrum(4.0, 1000.0);
    let t0 = spec.heat_trace_t_min().unwrap();
    let ts: Vec<f64> = (0..12).map(|i| t0 * (1.0 + i as f64 * 0.5)).collect();
    let ln: Vec<f64> = ts.iter().map(|&t| spec.heat_trace(t).unwrap().value.ln()).collect();
    for w in ln.windows(3) {
        assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-12);
    }
    assert!(spec.heat_trace(t0 / 4.0).is_err());
}

#[test]
fn regime_dispatch_matches_fit() {
    for (beta, lambda_max) in [(1.0, 1500.0), (4.0, 1500.0), (6.0, 1500.0)] {
        let spec = spectrum(beta, lambda_max);
        let c = constants_for(1, beta);
        let report = weyl_fit(&spec, (lambda_max / 16.0, lambda_max), None).unwrap();
        assert_eq!(report.regime, c.regime);
        // The fitted exponent is nearer the regime's own exponent than to
        // the other regime's.
        let own = report.target_exponent;
        let other = if c.regime == Regime::Supercritical { 1.0 } else { (1.0 + beta / 2.0) / 2.0 };
        assert!((report.fit.exponent - own).abs() < (report.fit.exponent - other).abs(), "beta = {beta}: {report:?}");
    }
}

#[test]
fn weyl_measure_is_a_distribution_function() {
    let spec = spectrum(4.0, 600.0);
    let grid = [0.02, 0.1, 0.3, 0.6, 1.0];
    let est = weyl_measure_estimate(&spec, &grid, 600.0, &SpectrumCache::new()).unwrap();
    assert!(est.cesaro_mass.windows(2).all(|w| w[1] >= w[0]));
    assert!(est.cesaro_mass.iter().all(|&m| (0.0..=1.0).contains(&m)));
    assert!((est.cesaro_mass[4] - 1.0).abs() < 1e-3);
}

#[test]
fn single_level_base_is_one_mode() {
    let base = BaseManifold::Explicit { dim: 1, volume: None, levels: vec![BaseLevel { omega: 0.0, multiplicity: 1 }] };
    let model = GasGiantModel::new(1, 2.0, base, DomainVariant::CompactSlab, 1.0).unwrap();
    let spec = assemble(&model, 500.0, &AssembleOptions::default()).unwrap();
    assert!(spec.entries.iter().all(|e| e.k == 0));
    let zeros = bessel_zeros(1.0, spec.entries.len());
    for (e, z) in spec.entries.iter().zip(zeros) {
        assert!((e.lambda / (z * z) - 1.0).abs() < 1e-3);
    }
}

#[test]
fn cone_excludes_zero_mode() {
    let model = GasGiantModel::new(1, 4.0, BaseManifold::circle(2.0 * PI), DomainVariant::TruncatedCone, 1.0).unwrap();
    let spec = assemble(&model, 300.0, &AssembleOptions::default()).unwrap();
    assert!(spec.skipped_zero_mode);
    assert!(spec.entries.iter().all(|e| e.k > 0));
}
