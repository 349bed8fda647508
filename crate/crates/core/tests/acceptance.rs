//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p newman-lab --test acceptance`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use newman_lab::extremal::{crest_factor, newman_polynomial_l1, newman_polynomial_l1_with, PolynomialPhase};
use newman_lab::generators::{jump_indices, sample_function, EnsembleSpec, FunctionDescriptor, SpectrumSource};
use newman_lab::io::{ensemble_box_csv, ensemble_raw_csv, Provenance};
use newman_lab::metrics::{
    convergence_sweep, default_gibbs_halfwidth, ensemble_study, gibbs_profile, EnsembleLevel,
};
use newman_lab::phase_opt::{
    fd_gradient, minimize, objective, objective_and_gradient, stationarity_report, Ensemble, InitKind,
    MinimizeOptions, ObjectiveSettings, PhaseVector,
};
use newman_lab::spectral::{
    inverse_dft, naive_inverse_dft, newman_phase, reconstruct, ComplexSpectrum, Normalization, PhaseSequence,
    PipelineConfig, ReversalConvention, Spectrum,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed shared by every randomized criterion.
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> ComplexSpectrum {
    ComplexSpectrum::new((0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .unwrap()
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let sizes: Vec<usize> = (1..=64).chain([127, 128, 255, 256, 1024, 2048]).collect();
    let mut worst: f64 = 0.0;
    for &n in &sizes {
        for _ in 0..50 {
            let x = random_complex(&mut rng, n);
            let fast = inverse_dft(&x, Normalization::Unitary).unwrap();
            let slow = naive_inverse_dft(&x, Normalization::Unitary).unwrap();
            worst = worst.max(rel_l2(&fast, &slow));
        }
    }
    outcome(worst <= 1e-9, format!("worst relative error {worst:.3e} (limit 1e-9) over {} sizes x 50", sizes.len()))
}

fn parseval() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let sizes: Vec<usize> = (0..=16).map(|p| 1usize << p).chain([3, 1000, 4095, 65535]).collect();
    let mut worst: f64 = 0.0;
    for &n in &sizes {
        for _ in 0..5 {
            let x = random_complex(&mut rng, n);
            let y = inverse_dft(&x, Normalization::Unitary).unwrap();
            worst = worst.max((y.energy() - x.energy()).abs() / x.energy());
        }
    }
    outcome(worst <= 1e-10, format!("worst relative energy change {worst:.3e} (limit 1e-10), N up to 65536"))
}

fn conjecture_trend() -> Outcome {
    let sizes: Vec<usize> = (9..=14).map(|p| 1usize << p).collect();
    let records =
        convergence_sweep(&FunctionDescriptor::preset("smooth").into(), &sizes, &PipelineConfig::default()).unwrap();
    let errs: Vec<f64> = records.iter().map(|r| r.sup_error).collect();
    let decreases = errs.windows(2).filter(|w| w[1] < w[0]).count();
    let halved = errs[5] < errs[0] / 2.0;
    outcome(
        decreases >= 4 && halved,
        format!(
            "sup errors {:?}; {decreases}/5 doublings decrease (need 4); sup(2^14)/sup(2^9) = {:.3e} (need < 0.5)",
            errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            errs[5] / errs[0]
        ),
    )
}

fn delta_counterexample() -> Outcome {
    let cfg = PipelineConfig::default();
    let mut worst_spread: f64 = 0.0;
    let mut sup_ok = true;
    let sizes = [2usize, 8, 64, 512, 4096];
    for &n in &sizes {
        for k0 in [0, n / 3, n - 1] {
            let source = SpectrumSource::Delta { k0, height: 1.0 };
            let target = source.sample(n).unwrap();
            let recon = cfg.run(&target).unwrap();
            let (lo, hi) = recon.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            // scaled so the flat level is 1
            worst_spread = worst_spread.max((hi - lo) * (n as f64).sqrt());
            // any phase at all gives a flat output
            let arbitrary = PhaseSequence::new((0..n).map(|k| (k as f64).sqrt() * 1.7).collect()).unwrap();
            let other = reconstruct(&target, &arbitrary, Normalization::Unitary, ReversalConvention::Flip).unwrap();
            let (lo, hi) = other.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            worst_spread = worst_spread.max((hi - lo) * (n as f64).sqrt());

            let rec = &convergence_sweep(&source, &[n], &cfg).unwrap()[0];
            sup_ok &= rec.sup_error >= 1.0 - 1.0 / (n as f64).sqrt() - 1e-12;
        }
    }
    outcome(
        worst_spread <= 1e-12 && sup_ok,
        format!("max-min after scaling {worst_spread:.3e} (limit 1e-12); sup_error >= 1-1/sqrt(N) at every N: {sup_ok}"),
    )
}

fn ensemble_csvs(spec: &EnsembleSpec, sizes: &[usize], threads: usize) -> (BTreeMap<usize, EnsembleLevel>, String) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let levels = pool.install(|| ensemble_study(spec, sizes, &PipelineConfig::default())).unwrap();
    let prov = Provenance::new("ensemble", format!("{spec:?}"));
    let text = ensemble_raw_csv(&prov, &levels).unwrap() + &ensemble_box_csv(&prov, &levels).unwrap();
    (levels, text)
}

fn ensemble_trend() -> Outcome {
    let spec = EnsembleSpec { count: 100, seed: SEED, ..EnsembleSpec::default() };
    let sizes = [32, 128, 512, 2048, 8192, 32768];
    let (levels, first) = ensemble_csvs(&spec, &sizes, 4);
    let (_, second) = ensemble_csvs(&spec, &sizes, 1);
    let small = levels[&32].rms_stats.median;
    let large = levels[&32768].rms_stats.median;
    let identical = first == second;
    outcome(
        large < small && identical,
        format!("median rms {small:.3e} at N=32 -> {large:.3e} at N=32768; rerun byte-identical (4 vs 1 threads): {identical}"),
    )
}

fn gibbs_persistence() -> Outcome {
    let cfg = PipelineConfig::default();
    let measure = |n: usize| {
        let target = sample_function(&FunctionDescriptor::preset("step"), n).unwrap();
        let recon = cfg.run(&target).unwrap();
        let profile = gibbs_profile(&recon, &target, &jump_indices(&target), default_gibbs_halfwidth(n)).unwrap();
        let overshoot = profile.reports.iter().map(|r| r.max_overshoot).fold(0.0, f64::max);
        (profile.reports[0].far_field_sup_error, overshoot)
    };
    let (far_small, over_small) = measure(1 << 10);
    let (far_large, over_large) = measure(1 << 14);
    let far_ratio = far_small / far_large;
    let over_ratio = over_small / over_large;
    outcome(
        far_ratio >= 2.0 && over_ratio < 2.0,
        format!(
            "far field {far_small:.3e} -> {far_large:.3e} (x{far_ratio:.2}, need >= 2); overshoot {over_small:.4} -> {over_large:.4} (x{over_ratio:.3}, need < 2)"
        ),
    )
}

fn optimization_ensemble() -> Ensemble {
    let spec = EnsembleSpec { count: 8, seed: SEED, ..EnsembleSpec::default() };
    Ensemble::from_spec(&spec, 64, ObjectiveSettings::default()).unwrap()
}

fn gradient_correctness() -> Outcome {
    let e = optimization_ensemble();
    let mut worst_rel: f64 = 0.0;
    let mut worst_ones: f64 = 0.0;
    let points = std::iter::once(PhaseVector::newman(64).unwrap()).chain((0..4).map(|i| PhaseVector::random(64, SEED, i)));
    for theta in points {
        let (_, g) = objective_and_gradient(&theta, &e).unwrap();
        let fd = fd_gradient(&theta, &e, 1e-6).unwrap();
        let diff: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let norm: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst_rel = worst_rel.max(diff / norm);
        worst_ones = worst_ones.max(g.iter().sum::<f64>().abs());
    }
    outcome(
        worst_rel <= 1e-6 && worst_ones <= 1e-8,
        format!("worst relative FD error {worst_rel:.3e} (limit 1e-6); worst |<grad, 1>| {worst_ones:.3e} (limit 1e-8)"),
    )
}

fn newman_near_stationarity() -> Outcome {
    let e = optimization_ensemble();
    let report = stationarity_report(&e, 100, SEED).unwrap();
    let grad_ok = report.grad_norm_at_newman < report.random_grad_norms.median;

    let opts = MinimizeOptions { max_iters: 200, ..MinimizeOptions::default() };
    let newman = PhaseVector::newman(64).unwrap();
    let from_newman = minimize(&newman, &e, InitKind::Newman, &opts).unwrap();
    let improvement = (from_newman.initial_objective() - from_newman.final_objective()) / from_newman.initial_objective();

    let init = InitKind::Random { seed: SEED };
    let from_random = minimize(&init.initial_theta(64).unwrap(), &e, init, &opts).unwrap();
    let reduction = from_random.initial_objective() / from_random.final_objective();
    let newman_value = objective(&newman, &e).unwrap();

    outcome(
        grad_ok && improvement < 0.01 && reduction >= 2.0,
        format!(
            "|grad| at Newman {:.3} vs random median {:.3}; Newman-init improvement {:.2}% over {} steps (need < 1%); \
             random init {:.3} -> {:.3} (x{reduction:.2}, need >= 2); objective(Newman) {newman_value:.3}",
            report.grad_norm_at_newman,
            report.random_grad_norms.median,
            100.0 * improvement,
            from_newman.steps(),
            from_random.initial_objective(),
            from_random.final_objective(),
        ),
    )
}

fn extremal_bounds() -> Outcome {
    let degrees = [63usize, 255, 1023];
    let reports: Vec<_> = degrees.iter().map(|&n| newman_polynomial_l1(n, 32).unwrap()).collect();
    let bounded = reports.iter().all(|r| r.l1_estimate <= r.upper_bound + r.quadrature_delta + 1e-12);
    let ratios: Vec<f64> = reports.iter().map(|r| r.ratio_to_sqrt_n.unwrap()).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]) && ratios.iter().all(|&r| r < 1.0);
    let chirp: Vec<f64> = degrees
        .iter()
        .map(|&n| newman_polynomial_l1_with(n, 32, PolynomialPhase::Chirp).unwrap().ratio_to_sqrt_n.unwrap())
        .collect();
    outcome(
        bounded && increasing,
        format!(
            "a_k = exp(2 pi i k^2/(n+1)): l1 <= sqrt(n+1): {bounded}; ratio to sqrt(n) at n = {degrees:?}: {:?} \
             (need strictly increasing toward 1); [info] chirp exp(pi i k^2/(n+1)) ratios {:?}",
            ratios.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>(),
            chirp.iter().map(|r| format!("{r:.5}")).collect::<Vec<_>>(),
        ),
    )
}

fn crest_factor_criterion() -> Outcome {
    let mut values = Vec::new();
    for n in [16usize, 64, 256] {
        let r = crest_factor(&Spectrum::constant(n, 1.0).unwrap(), &newman_phase(n).unwrap(), 16).unwrap();
        values.push((n, r.crest_factor_db));
    }
    let single = crest_factor(&Spectrum::constant(1, 1.0).unwrap(), &PhaseSequence::zeros(1), 16).unwrap();
    let below = values.iter().all(|(_, db)| *db < 6.0);
    let single_ok = (single.crest_factor_db - 3.0103).abs() <= 0.001;
    outcome(
        below && single_ok,
        format!(
            "Newman multitone crest {:?} dB (need < 6.0); single tone {:.5} dB (need 3.0103 +/- 0.001)",
            values.iter().map(|(n, db)| format!("N={n}: {db:.3}")).collect::<Vec<_>>(),
            single.crest_factor_db
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", 30, oracle_equivalence),
        ("parseval invariant", 10, parseval),
        ("conjecture trend", 60, conjecture_trend),
        ("delta counterexample", 5, delta_counterexample),
        ("ensemble trend", 300, ensemble_trend),
        ("gibbs persistence", 60, gibbs_persistence),
        ("gradient correctness", 30, gradient_correctness),
        ("newman near-stationarity", 300, newman_near_stationarity),
        ("extremal bounds", 60, extremal_bounds),
        ("crest factor", 30, crest_factor_criterion),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let pass = out.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} {name}: {} [{:.2}s, budget {budget}s{}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} of {} criteria passed", 10 - failures, 10);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
