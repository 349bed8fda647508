//! Ensemble phase optimization.
//!
//! For targets `M_1..M_J` of length `N` and a phase vector `θ`, the objective
//! is
//!
//! ```text
//! J(θ) = Σ_j sqrt( 1/N Σ_k ( |x_j[k](θ)| - M_j[r(k)] )² ),
//! x_j(θ) = IDFT_c( M_j · e^{iθ} )
//! ```
//!
//! where `r` is the reversal convention (flip, `N-1-k`, by default) and `c`
//! the transform normalization. It depends on `θ` only through the moduli
//! `|x_j|`, so it is 2π-periodic in every coordinate and invariant under a
//! global shift `θ + c·1`.
//!
//! # Gradient
//!
//! With `u_k = x_k / |x_k|` and `w_k = (|x_k| - t_k) / (N · rms_j)`,
//!
//! ```text
//! ∂J_j/∂θ_l = Re( i · c · X_l · conj( Σ_k w_k u_k e^{-2πikl/N} ) )
//! ```
//!
//! which is one forward DFT per target. Terms with `|x_k| = 0` or a zero RMS
//! contribute nothing.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{random_sos, sample_function, EnsembleSpec};
use crate::metrics::{quantiles, BoxStats};
use crate::spectral::{newman_phase, wrap_angle, DftPlan, Normalization, ReversalConvention, Spectrum};

/// Stream offset for random phase vectors, disjoint from ensemble member streams.
const PHASE_STREAM_BASE: u64 = 1 << 63;

/// Phase vector `θ`, one angle per frequency bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(index) = theta.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { what: "phase", index });
        }
        Ok(Self(theta))
    }

    pub fn newman(n: usize) -> Result<Self> {
        Self::new(newman_phase(n)?.into_inner())
    }

    /// Uniform draws on `[0, 2π)` from stream `index` of `seed`.
    pub fn random(n: usize, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(PHASE_STREAM_BASE + index);
        Self((0..n).map(|_| rng.gen_range(0.0..TAU)).collect())
    }

    /// Copy with every angle reduced into `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        Self(self.0.iter().map(|&t| wrap_angle(t)).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Transform conventions that define the objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObjectiveSettings {
    pub normalization: Normalization,
    pub reversal: ReversalConvention,
}

impl Default for ObjectiveSettings {
    fn default() -> Self {
        Self { normalization: Normalization::Unitary, reversal: ReversalConvention::Flip }
    }
}

/// Target spectra of a common length plus the settings of the objective.
#[derive(Debug, Clone)]
pub struct Ensemble {
    targets: Vec<Spectrum>,
    settings: ObjectiveSettings,
    plan: DftPlan,
}

impl Ensemble {
    pub fn new(targets: Vec<Spectrum>, settings: ObjectiveSettings) -> Result<Self> {
        let first = targets.first().ok_or(Error::EmptyInput("ensemble needs at least one target"))?;
        let n = first.len();
        if let Some(bad) = targets.iter().find(|t| t.len() != n) {
            return Err(Error::LengthMismatch { expected: n, found: bad.len() });
        }
        Ok(Self { targets, settings, plan: DftPlan::new(n)? })
    }

    /// Samples the first `spec.count` random sum-of-sinusoids members at size `n`.
    pub fn from_spec(spec: &EnsembleSpec, n: usize, settings: ObjectiveSettings) -> Result<Self> {
        spec.validate()?;
        let targets = (0..spec.count)
            .map(|i| sample_function(&random_sos(spec, i)?, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(targets, settings)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn size(&self) -> usize {
        self.plan.len()
    }

    pub fn targets(&self) -> &[Spectrum] {
        &self.targets
    }

    pub fn settings(&self) -> ObjectiveSettings {
        self.settings
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.size() {
            return Err(Error::LengthMismatch { expected: self.size(), found: theta.len() });
        }
        Ok(())
    }

    /// RMS term and (optionally) its gradient for one target.
    fn term(&self, target: &Spectrum, theta: &[f64], with_gradient: bool) -> Result<(f64, Vec<f64>)> {
        let n = self.size();
        let c = self.settings.normalization.factor(n);
        let spectrum: Vec<Complex64> =
            target.iter().zip(theta).map(|(&m, &t)| Complex64::from_polar(m, t)).collect();
        let mut x = spectrum.clone();
        self.plan.inverse_in_place(&mut x, self.settings.normalization)?;

        let reversal = self.settings.reversal;
        let mut sum_sq = 0.0;
        for (k, xk) in x.iter().enumerate() {
            let d = xk.norm() - target[reversal.source_index(k, n)];
            sum_sq += d * d;
        }
        let rms = (sum_sq / n as f64).sqrt();
        if !with_gradient {
            return Ok((rms, Vec::new()));
        }
        if rms == 0.0 {
            return Ok((rms, vec![0.0; n]));
        }

        let scale = 1.0 / (n as f64 * rms);
        for (k, xk) in x.iter_mut().enumerate() {
            let a = xk.norm();
            *xk = if a > 0.0 { *xk * ((a - target[reversal.source_index(k, n)]) * scale / a) } else { Complex64::new(0.0, 0.0) };
        }
        self.plan.forward_in_place(&mut x, Normalization::Unscaled)?;
        let grad = spectrum.iter().zip(&x).map(|(xl, sl)| (Complex64::i() * c * xl * sl.conj()).re).collect();
        Ok((rms, grad))
    }

    fn evaluate(&self, theta: &[f64], with_gradient: bool) -> Result<(f64, Vec<f64>)> {
        self.check(theta)?;
        let terms: Vec<(f64, Vec<f64>)> = self
            .targets
            .par_iter()
            .map(|t| self.term(t, theta, with_gradient))
            .collect::<Result<_>>()?;
        // summed in target order so the result is independent of scheduling
        let mut value = 0.0;
        let mut grad = vec![0.0; if with_gradient { theta.len() } else { 0 }];
        for (v, g) in &terms {
            value += v;
            grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
        }
        Ok((value, grad))
    }
}

/// Objective value at `theta`.
pub fn objective(theta: &PhaseVector, ensemble: &Ensemble) -> Result<f64> {
    Ok(ensemble.evaluate(theta.as_slice(), false)?.0)
}

/// Analytic gradient of [`objective`].
pub fn objective_gradient(theta: &PhaseVector, ensemble: &Ensemble) -> Result<Vec<f64>> {
    Ok(ensemble.evaluate(theta.as_slice(), true)?.1)
}

/// Objective and gradient from one pass.
pub fn objective_and_gradient(theta: &PhaseVector, ensemble: &Ensemble) -> Result<(f64, Vec<f64>)> {
    ensemble.evaluate(theta.as_slice(), true)
}

/// Central differences `(f(x + h e_l) - f(x - h e_l)) / 2h` of any function.
pub fn central_differences<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("finite-difference step {h} must be > 0")));
    }
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|l| {
            probe[l] = x[l] + h;
            let plus = f(&probe)?;
            probe[l] = x[l] - h;
            let minus = f(&probe)?;
            probe[l] = x[l];
            Ok((plus - minus) / (2.0 * h))
        })
        .collect()
}

/// Finite-difference gradient of [`objective`].
pub fn fd_gradient(theta: &PhaseVector, ensemble: &Ensemble, h: f64) -> Result<Vec<f64>> {
    ensemble.check(theta.as_slice())?;
    central_differences(|t| Ok(ensemble.evaluate(t, false)?.0), theta.as_slice(), h)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How the starting point was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitKind {
    Random { seed: u64 },
    Newman,
    /// Newman phase plus independent `U[-radius, radius]` offsets.
    NewmanPerturbed { radius: f64, seed: u64 },
}

impl InitKind {
    pub fn initial_theta(&self, n: usize) -> Result<PhaseVector> {
        match *self {
            InitKind::Random { seed } => Ok(PhaseVector::random(n, seed, 0)),
            InitKind::Newman => PhaseVector::newman(n),
            InitKind::NewmanPerturbed { radius, seed } => {
                if !(radius >= 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidParameter(format!("perturbation radius {radius} must be >= 0")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(PHASE_STREAM_BASE);
                let base = newman_phase(n)?;
                PhaseVector::new(
                    base.iter()
                        .map(|&t| t + if radius > 0.0 { rng.gen_range(-radius..=radius) } else { 0.0 })
                        .collect(),
                )
            }
        }
    }
}

/// Minimizer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    pub gradient_tolerance: f64,
    /// Length of the first trial step, in radians along the normalized direction.
    pub initial_step: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo_c1: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            gradient_tolerance: 1e-6,
            initial_step: 1.0,
            armijo_c1: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 60,
        }
    }
}

impl MinimizeOptions {
    fn validate(&self) -> Result<()> {
        let ok = self.gradient_tolerance > 0.0
            && self.initial_step > 0.0
            && self.armijo_c1 > 0.0
            && self.armijo_c1 < 1.0
            && self.backtrack_factor > 0.0
            && self.backtrack_factor < 1.0
            && self.max_backtracks > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid minimizer options {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    GradientTolerance,
    MaxIterations,
    LineSearchFailed,
}

/// One accepted iterate. Entry 0 is the starting point with `step_size` 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub objective: f64,
    pub gradient_norm: f64,
    pub step_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptReport {
    pub iterations: Vec<IterationRecord>,
    /// Final iterate, wrapped into `[0, 2π)`.
    pub final_theta: PhaseVector,
    pub init_kind: InitKind,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl OptReport {
    /// Number of accepted steps.
    pub fn steps(&self) -> usize {
        self.iterations.len() - 1
    }

    pub fn initial_objective(&self) -> f64 {
        self.iterations[0].objective
    }

    pub fn final_objective(&self) -> f64 {
        self.iterations[self.iterations.len() - 1].objective
    }
}

fn finite_or_err(value: f64, grad: &[f64], iter: usize) -> Result<()> {
    if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite { what: "objective or gradient", index: iter });
    }
    Ok(())
}

/// Polak–Ribière+ nonlinear conjugate gradient with Armijo backtracking.
///
/// The direction restarts to steepest descent whenever it stops being a
/// descent direction or its line search fails. Every accepted step satisfies
/// the sufficient-decrease test, so the recorded objective never increases.
pub fn minimize(
    init: &PhaseVector,
    ensemble: &Ensemble,
    init_kind: InitKind,
    opts: &MinimizeOptions,
) -> Result<OptReport> {
    opts.validate()?;
    ensemble.check(init.as_slice())?;

    let mut theta = init.as_slice().to_vec();
    let (mut value, mut grad) = ensemble.evaluate(&theta, true)?;
    finite_or_err(value, &grad, 0)?;
    let mut grad_norm = norm2(&grad);
    let mut trace = vec![IterationRecord { iter: 0, objective: value, gradient_norm: grad_norm, step_size: 0.0 }];

    let mut direction: Vec<f64> = grad.iter().map(|g| -g).collect();
    let mut step = opts.initial_step;
    let mut trial = vec![0.0; theta.len()];

    let stop_reason = loop {
        if grad_norm <= opts.gradient_tolerance {
            break StopReason::GradientTolerance;
        }
        if trace.len() > opts.max_iters {
            break StopReason::MaxIterations;
        }

        let mut slope = dot(&grad, &direction);
        let mut steepest = false;
        if !(slope < 0.0) {
            direction = grad.iter().map(|g| -g).collect();
            slope = -grad_norm * grad_norm;
            steepest = true;
        }

        let accepted = loop {
            let dir_norm = norm2(&direction);
            let mut alpha = (step / dir_norm).min(1e6);
            let mut found = None;
            for _ in 0..opts.max_backtracks {
                for ((t, x), d) in trial.iter_mut().zip(&theta).zip(&direction) {
                    *t = x + alpha * d;
                }
                let (f_trial, _) = ensemble.evaluate(&trial, false)?;
                if f_trial.is_finite() && f_trial <= value + opts.armijo_c1 * alpha * slope {
                    found = Some((alpha, alpha * dir_norm));
                    break;
                }
                alpha *= opts.backtrack_factor;
            }
            match found {
                Some(hit) => break Some(hit),
                None if !steepest => {
                    direction = grad.iter().map(|g| -g).collect();
                    slope = -grad_norm * grad_norm;
                    steepest = true;
                }
                None => break None,
            }
        };

        let Some((alpha, step_len)) = accepted else {
            break StopReason::LineSearchFailed;
        };
        for (x, d) in theta.iter_mut().zip(&direction) {
            *x += alpha * d;
        }
        let (new_value, new_grad) = ensemble.evaluate(&theta, true)?;
        finite_or_err(new_value, &new_grad, trace.len())?;

        let beta = {
            let num: f64 = new_grad.iter().zip(&grad).map(|(gn, go)| gn * (gn - go)).sum();
            (num / (grad_norm * grad_norm)).max(0.0)
        };
        for (d, g) in direction.iter_mut().zip(&new_grad) {
            *d = -g + beta * *d;
        }
        value = new_value;
        grad = new_grad;
        grad_norm = norm2(&grad);
        // next trial step starts from twice the last accepted length
        step = 2.0 * step_len;
        trace.push(IterationRecord { iter: trace.len(), objective: value, gradient_norm: grad_norm, step_size: step_len });
    };

    Ok(OptReport {
        iterations: trace,
        final_theta: PhaseVector::new(theta)?.wrapped(),
        init_kind,
        converged: stop_reason == StopReason::GradientTolerance,
        stop_reason,
    })
}

/// Gradient norm at the Newman phase against the spread over random phases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    pub newman_objective: f64,
    pub grad_norm_at_newman: f64,
    pub random_grad_norms: BoxStats,
}

/// Compares `|∇J|` at the Newman phase with `n_random` uniform phase vectors
/// drawn from streams `0..n_random` of `seed`.
pub fn stationarity_report(ensemble: &Ensemble, n_random: usize, seed: u64) -> Result<StationarityReport> {
    if n_random == 0 {
        return Err(Error::InvalidParameter("n_random must be >= 1".into()));
    }
    let n = ensemble.size();
    let (newman_objective, grad) = objective_and_gradient(&PhaseVector::newman(n)?, ensemble)?;
    let norms = (0..n_random as u64)
        .map(|i| Ok(norm2(&objective_gradient(&PhaseVector::random(n, seed, i), ensemble)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StationarityReport {
        newman_objective,
        grad_norm_at_newman: norm2(&grad),
        random_grad_norms: quantiles(&norms)?,
    })
}
