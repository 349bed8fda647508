//! Classical extremal properties of quadratic phases: the L1 norm of the
//! unimodular polynomial `Σ a_k z^k` on the unit circle, and the crest factor
//! of chirp-phased multitones.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{DftPlan, Normalization, PhaseSequence, Spectrum};

/// Coefficient phase of the degree-`n` unimodular polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolynomialPhase {
    /// `a_k = exp(2πi k² / (n+1))`.
    #[default]
    Original,
    /// `a_k = exp(πi k² / (n+1))`, the same chirp the recovery pipeline uses.
    Chirp,
}

impl PolynomialPhase {
    pub fn coefficients(self, degree_n: usize) -> Vec<Complex64> {
        let len = (degree_n + 1) as f64;
        let scale = match self {
            PolynomialPhase::Original => TAU,
            PolynomialPhase::Chirp => std::f64::consts::PI,
        };
        // reduce k² mod 2(n+1) first: both phases are periodic in k² with that period
        let period = 2 * (degree_n + 1);
        (0..=degree_n).map(|k| Complex64::from_polar(1.0, scale * ((k * k) % period) as f64 / len)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Report {
    pub degree_n: usize,
    pub oversample: usize,
    pub coefficient_phase: PolynomialPhase,
    pub l1_estimate: f64,
    /// `l1_estimate / √n`; absent for `n = 0`.
    pub ratio_to_sqrt_n: Option<f64>,
    /// `√(n+1)`.
    pub upper_bound: f64,
    /// `√n - l1_estimate`, the measured constant in the `√n - c` lower bound.
    pub sqrt_n_gap: f64,
    /// `|estimate - estimate at half the oversampling|`.
    pub quadrature_delta: f64,
}

/// Uniform-grid mean of `|P(e^{iθ})|` over `oversample · len` points.
///
/// On the circle this is the trapezoid rule. By Cauchy–Schwarz on the grid it
/// never exceeds the exact L2 norm `sqrt(Σ|a_k|²)` once the grid has at least
/// `len` points.
pub fn polynomial_l1(coefficients: &[Complex64], oversample: usize) -> Result<f64> {
    if coefficients.is_empty() {
        return Err(Error::EmptyInput("polynomial coefficients"));
    }
    if oversample == 0 {
        return Err(Error::InvalidParameter("oversample must be >= 1".into()));
    }
    let grid = oversample * coefficients.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    buf[..coefficients.len()].copy_from_slice(coefficients);
    DftPlan::new(grid)?.inverse_in_place(&mut buf, Normalization::Unscaled)?;
    Ok(buf.iter().map(|v| v.norm()).sum::<f64>() / grid as f64)
}

/// L1 norm of the degree-`n` polynomial with `a_k = exp(2πi k²/(n+1))`.
pub fn newman_polynomial_l1(degree_n: usize, oversample: usize) -> Result<L1Report> {
    newman_polynomial_l1_with(degree_n, oversample, PolynomialPhase::Original)
}

/// As [`newman_polynomial_l1`], for either coefficient phase.
pub fn newman_polynomial_l1_with(degree_n: usize, oversample: usize, phase: PolynomialPhase) -> Result<L1Report> {
    if oversample < 4 {
        return Err(Error::InvalidParameter(format!("oversample {oversample} must be >= 4")));
    }
    let coefficients = phase.coefficients(degree_n);
    let l1_estimate = polynomial_l1(&coefficients, oversample)?;
    let coarse = polynomial_l1(&coefficients, oversample / 2)?;
    let sqrt_n = (degree_n as f64).sqrt();
    Ok(L1Report {
        degree_n,
        oversample,
        coefficient_phase: phase,
        l1_estimate,
        ratio_to_sqrt_n: (degree_n > 0).then(|| l1_estimate / sqrt_n),
        upper_bound: ((degree_n + 1) as f64).sqrt(),
        sqrt_n_gap: sqrt_n - l1_estimate,
        quadrature_delta: (l1_estimate - coarse).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrestReport {
    pub n_tones: usize,
    pub oversample: usize,
    pub crest_factor_db: f64,
    pub peak: f64,
    pub rms: f64,
}

/// `s(t) = Σ_k m_k cos(2π(k+1)t + φ_k)` at a single point.
fn multitone_at(tones: &[Complex64], t: f64) -> f64 {
    tones
        .iter()
        .enumerate()
        .map(|(k, c)| (c * Complex64::from_polar(1.0, TAU * (k + 1) as f64 * t)).re)
        .sum()
}

/// Golden-section search for the maximum of `|s|` on `[lo, hi]`.
fn refine_peak(tones: &[Complex64], lo: f64, hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| multitone_at(tones, t).abs();
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Crest factor of the real multitone `Σ_k m_k cos(2π(k+1)t + φ_k)`.
///
/// Tone `k` sits on harmonic `k + 1`, so there is no DC term and a single tone
/// is a plain cosine. The signal is sampled on `oversample · N` points of one
/// period; the RMS is the grid mean (exact for this grid), and the peak is the
/// grid maximum refined by a golden-section search around the largest grid
/// maxima.
pub fn crest_factor(magnitudes: &Spectrum, phase: &PhaseSequence, oversample: usize) -> Result<CrestReport> {
    if magnitudes.len() != phase.len() {
        return Err(Error::LengthMismatch { expected: magnitudes.len(), found: phase.len() });
    }
    if oversample < 8 {
        return Err(Error::InvalidParameter(format!("oversample {oversample} must be >= 8")));
    }
    if magnitudes.iter().all(|&m| m == 0.0) {
        return Err(Error::ZeroSignal);
    }
    let n = magnitudes.len();
    let tones: Vec<Complex64> =
        magnitudes.iter().zip(phase.iter()).map(|(&m, &p)| Complex64::from_polar(m, p)).collect();

    let grid = oversample * n;
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    buf[1..=n].copy_from_slice(&tones);
    DftPlan::new(grid)?.inverse_in_place(&mut buf, Normalization::Unscaled)?;
    let samples: Vec<f64> = buf.iter().map(|c| c.re).collect();

    let rms = (samples.iter().map(|s| s * s).sum::<f64>() / grid as f64).sqrt();

    // local maxima of |s| on the cyclic grid, largest first
    let abs: Vec<f64> = samples.iter().map(|s| s.abs()).collect();
    let mut candidates: Vec<usize> = (0..grid)
        .filter(|&j| abs[j] >= abs[(j + grid - 1) % grid] && abs[j] >= abs[(j + 1) % grid])
        .collect();
    candidates.sort_by(|&a, &b| abs[b].total_cmp(&abs[a]).then(a.cmp(&b)));
    let step = 1.0 / grid as f64;
    let grid_peak = abs.iter().cloned().fold(0.0, f64::max);
    let peak = candidates
        .iter()
        .take(8)
        .map(|&j| refine_peak(&tones, (j as f64 - 1.0) * step, (j as f64 + 1.0) * step))
        .fold(grid_peak, f64::max);

    Ok(CrestReport { n_tones: n, oversample, crest_factor_db: 20.0 * (peak / rms).log10(), peak, rms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::newman_phase;

    #[test]
    fn degree_zero_is_one() {
        let r = newman_polynomial_l1(0, 32).unwrap();
        assert_eq!(r.l1_estimate, 1.0);
        assert_eq!(r.ratio_to_sqrt_n, None);
        assert_eq!(r.upper_bound, 1.0);
        assert!(newman_polynomial_l1(5, 2).is_err());
    }

    #[test]
    fn coefficients_are_unimodular_and_reduced_correctly() {
        for phase in [PolynomialPhase::Original, PolynomialPhase::Chirp] {
            let c = phase.coefficients(63);
            assert_eq!(c.len(), 64);
            let scale = if phase == PolynomialPhase::Original { TAU } else { std::f64::consts::PI };
            for (k, a) in c.iter().enumerate() {
                let direct = Complex64::from_polar(1.0, scale * (k * k) as f64 / 64.0);
                assert!((a - direct).norm() < 1e-12);
                assert!((a.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_tone_is_three_db() {
        let m = Spectrum::new(vec![1.0]).unwrap();
        let r = crest_factor(&m, &PhaseSequence::zeros(1), 16).unwrap();
        assert!((r.crest_factor_db - 10.0 * 2f64.log10()).abs() < 1e-9, "{}", r.crest_factor_db);
    }

    #[test]
    fn zero_phase_multitone_is_coherent() {
        let n = 64;
        let m = Spectrum::constant(n, 1.0).unwrap();
        let r = crest_factor(&m, &PhaseSequence::zeros(n), 16).unwrap();
        let expected = 20.0 * (2.0 * n as f64).sqrt().log10();
        assert!((r.crest_factor_db - expected).abs() < 1e-6, "{} vs {expected}", r.crest_factor_db);
        let newman = crest_factor(&m, &newman_phase(n).unwrap(), 16).unwrap();
        assert!(newman.crest_factor_db < 6.0);
    }

    #[test]
    fn crest_errors() {
        let zero = Spectrum::constant(4, 0.0).unwrap();
        assert_eq!(crest_factor(&zero, &PhaseSequence::zeros(4), 16), Err(Error::ZeroSignal));
        let one = Spectrum::constant(4, 1.0).unwrap();
        assert!(crest_factor(&one, &PhaseSequence::zeros(4), 4).is_err());
        assert!(crest_factor(&one, &PhaseSequence::zeros(3), 16).is_err());
    }
}
