use newman_lab::extremal::{crest_factor, newman_polynomial_l1};
use newman_lab::generators::{jump_indices, sample_function, EnsembleSpec, FunctionDescriptor, SpectrumSource};
use newman_lab::metrics::{convergence_sweep, default_gibbs_halfwidth, ensemble_study, gibbs_profile, sup_error};
use newman_lab::phase_opt::{
    fd_gradient, minimize, objective, objective_gradient, stationarity_report, Ensemble, InitKind, MinimizeOptions,
    ObjectiveSettings, PhaseVector,
};
use newman_lab::spectral::{
    attach_phase, inverse_dft, magnitude, naive_inverse_dft, newman_phase, reverse, Normalization, PhaseSequence,
    PipelineConfig, ReversalConvention, Spectrum,
};

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale
}

fn opt_ensemble() -> Ensemble {
    let spec = EnsembleSpec { count: 8, seed: 1, ..EnsembleSpec::default() };
    Ensemble::from_spec(&spec, 64, ObjectiveSettings::default()).unwrap()
}

#[test]
fn smooth_sweep_decays() {
    let source = SpectrumSource::Function(FunctionDescriptor::smooth());
    let sizes: Vec<usize> = (9..=14).map(|p| 1 << p).collect();
    let records = convergence_sweep(&source, &sizes, &PipelineConfig::default()).unwrap();
    let drops = records.windows(2).filter(|w| w[1].sup_error < w[0].sup_error).count();
    assert!(drops >= 4, "{drops} of 5 doublings decreased");
}

#[test]
fn smooth_reconstruction_improves_from_512_to_4096() {
    let d = FunctionDescriptor::SumOfSinusoids {
        terms: vec![newman_lab::generators::SinusoidTerm { amplitude: 1.0, frequency: 1, phase: 0.0 }],
        bias: 2.0,
    };
    let err = |n| {
        let target = sample_function(&d, n).unwrap();
        sup_error(&PipelineConfig::default().run(&target).unwrap(), &target).unwrap()
    };
    assert!(err(4096) < err(512));
}

#[test]
fn constant_spectrum_matches_naive_oracle() {
    let n = 256;
    let m = Spectrum::constant(n, 1.0).unwrap();
    let x = attach_phase(&m, &newman_phase(n).unwrap()).unwrap();
    let slow = reverse(&magnitude(&naive_inverse_dft(&x, Normalization::Unitary).unwrap()), ReversalConvention::Modular);
    let fast = PipelineConfig::default().run(&m).unwrap();
    assert!(rel_err(&fast, &slow) < 1e-9);
    // the quadratic phase reconstructs a flat spectrum exactly, so only rounding is left
    assert!(sup_error(&slow, &m).unwrap() < 1e-10);
    let small = sup_error(&PipelineConfig::default().run(&Spectrum::constant(1 << 8, 1.0).unwrap()).unwrap(), &m).unwrap();
    let large_m = Spectrum::constant(1 << 12, 1.0).unwrap();
    let large = sup_error(&PipelineConfig::default().run(&large_m).unwrap(), &large_m).unwrap();
    assert!(small < 1e-10 && large < 1e-10);
}

#[test]
fn delta_sweep_never_converges() {
    let source = SpectrumSource::Delta { k0: 3, height: 1.0 };
    let records = convergence_sweep(&source, &[8, 64, 1024], &PipelineConfig::default()).unwrap();
    for r in records {
        assert!(r.sup_error >= 1.0 - 1.0 / (r.n as f64).sqrt() - 1e-12);
    }
}

#[test]
fn ensemble_median_shrinks() {
    let spec = EnsembleSpec { count: 100, seed: 1, ..EnsembleSpec::default() };
    let levels = ensemble_study(&spec, &[32, 32768], &PipelineConfig::default()).unwrap();
    assert!(levels[&32768].rms_stats.median < levels[&32].rms_stats.median);
    assert!(levels.values().all(|l| l.rms_stats.count == 100));
    let single = ensemble_study(&EnsembleSpec { count: 1, ..spec }, &[64], &PipelineConfig::default()).unwrap();
    let s = single[&64].rms_stats;
    assert!(s.min == s.median && s.median == s.max);
}

#[test]
fn gibbs_overshoot_persists() {
    let run = |n| {
        let target = sample_function(&FunctionDescriptor::step(), n).unwrap();
        let recon = PipelineConfig::default().run(&target).unwrap();
        gibbs_profile(&recon, &target, &jump_indices(&target), default_gibbs_halfwidth(n)).unwrap()
    };
    let (coarse, fine) = (run(1 << 10), run(1 << 14));
    let far = |p: &newman_lab::metrics::GibbsProfile| p.reports[0].far_field_sup_error;
    let over = |p: &newman_lab::metrics::GibbsProfile| p.reports.iter().map(|r| r.max_overshoot).fold(0.0, f64::max);
    assert!(far(&coarse) >= 2.0 * far(&fine));
    assert!(over(&coarse) < 2.0 * over(&fine));
}

#[test]
fn fd_error_shrinks_then_plateaus() {
    let e = opt_ensemble();
    let theta = PhaseVector::random(64, 3, 0);
    let g = objective_gradient(&theta, &e).unwrap();
    let err_at = |h| rel_err(&fd_gradient(&theta, &e, h).unwrap(), &g);
    let (coarse, fine) = (err_at(1e-2), err_at(1e-4));
    assert!(fine < coarse, "{fine} vs {coarse}");
    assert!(err_at(1e-6) < 1e-6);
}

#[test]
fn newman_beats_random_phases() {
    let e = opt_ensemble();
    let newman = objective(&PhaseVector::newman(64).unwrap(), &e).unwrap();
    let wins = (0..100).filter(|&i| newman < objective(&PhaseVector::random(64, 7, i), &e).unwrap()).count();
    assert!(wins >= 95, "{wins}");
}

#[test]
fn random_init_halves_objective() {
    let e = opt_ensemble();
    let init = InitKind::Random { seed: 1 };
    let report = minimize(&init.initial_theta(64).unwrap(), &e, init, &MinimizeOptions::default()).unwrap();
    assert!(report.steps() <= 200);
    assert!(report.final_objective() <= 0.5 * report.initial_objective());
    assert!(report.iterations.windows(2).all(|w| w[1].objective <= w[0].objective));
}

#[test]
fn newman_init_improvement_is_reported() {
    // The descent from Newman does not stay within 1%; see the acceptance output.
    // Here only the monotone trace and the stationarity comparison are pinned.
    let e = opt_ensemble();
    let report =
        minimize(&PhaseVector::newman(64).unwrap(), &e, InitKind::Newman, &MinimizeOptions::default()).unwrap();
    assert!(report.final_objective() <= report.initial_objective());
    let st = stationarity_report(&e, 100, 1).unwrap();
    assert!(st.grad_norm_at_newman < st.random_grad_norms.median);
    assert_eq!(st, stationarity_report(&e, 100, 1).unwrap());
    let one = stationarity_report(&e, 1, 1).unwrap().random_grad_norms;
    assert!(one.min == one.max);
}

#[test]
fn l1_at_63_and_1023() {
    let small = newman_polynomial_l1(63, 32).unwrap();
    assert!(small.l1_estimate <= small.upper_bound + 1e-9);
    assert!(small.l1_estimate >= 63f64.sqrt() - small.sqrt_n_gap - 1e-12);
    let large = newman_polynomial_l1(1023, 32).unwrap();
    assert!(large.l1_estimate <= large.upper_bound + 1e-9);
    assert!(large.ratio_to_sqrt_n.unwrap() > 0.85);
}

#[test]
fn l1_quadrature_converges() {
    let deltas: Vec<f64> = [8, 16, 32, 64].iter().map(|&os| newman_polynomial_l1(63, os).unwrap().quadrature_delta).collect();
    assert!(deltas.windows(2).all(|w| w[1] <= w[0]), "{deltas:?}");
}

#[test]
fn crest_factor_examples() {
    for n in [16, 64, 256] {
        let m = Spectrum::constant(n, 1.0).unwrap();
        let newman = crest_factor(&m, &newman_phase(n).unwrap(), 16).unwrap();
        assert!(newman.crest_factor_db < 6.0, "N={n}: {}", newman.crest_factor_db);
        let finer = crest_factor(&m, &newman_phase(n).unwrap(), 32).unwrap();
        assert!((finer.crest_factor_db - newman.crest_factor_db).abs() < 0.05);
    }
    let m = Spectrum::constant(64, 1.0).unwrap();
    let coherent = crest_factor(&m, &PhaseSequence::zeros(64), 16).unwrap();
    assert!(coherent.crest_factor_db > 20.0);
}

#[test]
fn fast_transform_agrees_on_newman_spectrum() {
    let n = 2048;
    let m = sample_function(&FunctionDescriptor::smooth(), n).unwrap();
    let x = attach_phase(&m, &newman_phase(n).unwrap()).unwrap();
    let a = inverse_dft(&x, Normalization::InverseN).unwrap();
    let b = naive_inverse_dft(&x, Normalization::InverseN).unwrap();
    let diff: f64 = a.iter().zip(b.iter()).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
    assert!(diff / b.energy().sqrt() < 1e-9);
}
