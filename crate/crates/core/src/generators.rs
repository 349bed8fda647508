//! Discrete magnitude spectra: uniform sampling of described functions on
//! `[-π, π)`, the seeded random sum-of-sinusoids family, and Kronecker deltas.
//!
//! # Sampling grid
//!
//! `M[k] = m(-π + 2πk/N)` for `k = 0..N-1`: the left endpoint is included and
//! `+π` is not.
//!
//! # Random streams
//!
//! Ensemble member `i` of an [`EnsembleSpec`] with seed `s` is drawn from a
//! ChaCha8 generator seeded with `s` and positioned on stream `i`. Members are
//! therefore independent of generation order and thread count. Each term draws
//! amplitude, then frequency, then phase.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectrum;

/// Grid point `ω_k = -π + 2πk/N`.
#[inline]
pub fn grid_point(k: usize, n_samples: usize) -> f64 {
    -PI + TAU * k as f64 / n_samples as f64
}

/// One term `amplitude · sin(frequency · ω + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SinusoidTerm {
    pub amplitude: f64,
    /// Whole cycles over `[-π, π)`.
    pub frequency: i64,
    pub phase: f64,
}

impl SinusoidTerm {
    #[inline]
    pub fn eval(&self, omega: f64) -> f64 {
        self.amplitude * (self.frequency as f64 * omega + self.phase).sin()
    }
}

/// Serializable description of a non-negative function on `[-π, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionDescriptor {
    /// `bias + Σ aᵢ sin(fᵢ ω + ρᵢ)` with `bias ≥ Σ|aᵢ|`.
    SumOfSinusoids { terms: Vec<SinusoidTerm>, bias: f64 },
    /// `levels[i]` on `[breakpoints[i-1], breakpoints[i])`.
    PiecewiseConstant { breakpoints: Vec<f64>, levels: Vec<f64> },
    /// `Σ cᵢ ωⁱ`; non-negativity is checked when sampled.
    Polynomial { coefficients: Vec<f64> },
    /// A built-in function, see [`FunctionDescriptor::PRESETS`].
    Preset { name: String },
}

impl FunctionDescriptor {
    /// Names accepted by [`FunctionDescriptor::Preset`].
    pub const PRESETS: [&'static str; 3] = ["smooth", "step", "constant"];

    /// `2 + sin ω + 0.5 cos 3ω`.
    pub fn smooth() -> Self {
        FunctionDescriptor::SumOfSinusoids {
            terms: vec![
                SinusoidTerm { amplitude: 1.0, frequency: 1, phase: 0.0 },
                SinusoidTerm { amplitude: 0.5, frequency: 3, phase: FRAC_PI_2 },
            ],
            bias: 2.0,
        }
    }

    /// Level 1 on `[-π, 0)`, level 2 on `[0, π)`.
    pub fn step() -> Self {
        FunctionDescriptor::PiecewiseConstant { breakpoints: vec![0.0], levels: vec![1.0, 2.0] }
    }

    pub fn constant(level: f64) -> Self {
        FunctionDescriptor::SumOfSinusoids { terms: Vec::new(), bias: level }
    }

    pub fn preset(name: &str) -> Self {
        FunctionDescriptor::Preset { name: name.to_string() }
    }

    /// Replaces a preset by its concrete definition; validates the result.
    pub fn resolve(&self) -> Result<FunctionDescriptor> {
        let resolved = match self {
            FunctionDescriptor::Preset { name } => match name.as_str() {
                "smooth" => Self::smooth(),
                "step" => Self::step(),
                "constant" => Self::constant(1.0),
                other => {
                    return Err(Error::InvalidDescriptor(format!(
                        "unknown preset {other:?}; expected one of {:?}",
                        Self::PRESETS
                    )))
                }
            },
            other => other.clone(),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    /// Checks the structural invariants of a concrete descriptor.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDescriptor(msg));
        match self {
            FunctionDescriptor::SumOfSinusoids { terms, bias } => {
                if !bias.is_finite() || terms.iter().any(|t| !t.amplitude.is_finite() || !t.phase.is_finite()) {
                    return bad("sum_of_sinusoids has non-finite parameters".into());
                }
                let total: f64 = terms.iter().map(|t| t.amplitude.abs()).sum();
                if *bias < total {
                    return bad(format!("bias {bias} is below the amplitude sum {total}"));
                }
                Ok(())
            }
            FunctionDescriptor::PiecewiseConstant { breakpoints, levels } => {
                if levels.len() != breakpoints.len() + 1 {
                    return bad(format!(
                        "piecewise_constant needs {} levels for {} breakpoints, got {}",
                        breakpoints.len() + 1,
                        breakpoints.len(),
                        levels.len()
                    ));
                }
                if let Some(l) = levels.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
                    return bad(format!("piecewise_constant level {l} is not a finite non-negative value"));
                }
                if breakpoints.iter().any(|b| !(*b > -PI && *b < PI)) {
                    return bad("breakpoints must lie strictly inside (-π, π)".into());
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("breakpoints must be strictly increasing".into());
                }
                Ok(())
            }
            FunctionDescriptor::Polynomial { coefficients } => {
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                    return bad("polynomial needs at least one finite coefficient".into());
                }
                Ok(())
            }
            FunctionDescriptor::Preset { .. } => self.resolve().map(|_| ()),
        }
    }

    /// Evaluates a concrete (non-preset) descriptor at `omega`.
    fn eval_concrete(&self, omega: f64) -> f64 {
        match self {
            FunctionDescriptor::SumOfSinusoids { terms, bias } => {
                bias + terms.iter().map(|t| t.eval(omega)).sum::<f64>()
            }
            FunctionDescriptor::PiecewiseConstant { breakpoints, levels } => {
                levels[breakpoints.partition_point(|b| *b <= omega)]
            }
            FunctionDescriptor::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * omega + c)
            }
            FunctionDescriptor::Preset { .. } => unreachable!("presets are resolved before evaluation"),
        }
    }

    /// Evaluates the described function at `omega`.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        Ok(self.resolve()?.eval_concrete(omega))
    }

    /// Short identifier recorded next to error measurements.
    pub fn id(&self) -> String {
        match self {
            FunctionDescriptor::SumOfSinusoids { terms, .. } => format!("sum_of_sinusoids/{}", terms.len()),
            FunctionDescriptor::PiecewiseConstant { breakpoints, .. } => {
                format!("piecewise_constant/{}", breakpoints.len())
            }
            FunctionDescriptor::Polynomial { coefficients } => format!("polynomial/{}", coefficients.len() - 1),
            FunctionDescriptor::Preset { name } => format!("preset:{name}"),
        }
    }
}

/// `M[k] = m(-π + 2πk/N)`.
///
/// Fails with [`Error::NegativeMagnitude`] naming the first grid index where
/// the function is negative.
pub fn sample_function(descriptor: &FunctionDescriptor, n_samples: usize) -> Result<Spectrum> {
    if n_samples == 0 {
        return Err(Error::InvalidSize("sampling needs n_samples >= 1".into()));
    }
    let concrete = descriptor.resolve()?;
    let values = (0..n_samples).map(|k| concrete.eval_concrete(grid_point(k, n_samples))).collect();
    Spectrum::new(values)
}

/// Grid indices `k` where `m[k] != m[k-1]` (cyclically, so index 0 counts
/// when the first and last samples differ).
pub fn jump_indices(spectrum: &Spectrum) -> Vec<usize> {
    let n = spectrum.len();
    (0..n).filter(|&k| spectrum[k] != spectrum[(k + n - 1) % n]).collect()
}

/// `height` at `k0`, zero elsewhere.
pub fn delta_spectrum(n_samples: usize, k0: usize, height: f64) -> Result<Spectrum> {
    if n_samples == 0 {
        return Err(Error::InvalidSize("delta spectrum needs n_samples >= 1".into()));
    }
    if k0 >= n_samples {
        return Err(Error::IndexOutOfRange { index: k0, len: n_samples });
    }
    if !(height > 0.0) || !height.is_finite() {
        return Err(Error::InvalidParameter(format!("delta height {height} must be finite and > 0")));
    }
    let mut values = vec![0.0; n_samples];
    values[k0] = height;
    Spectrum::new(values)
}

/// Parameters of the random sum-of-sinusoids family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSpec {
    pub count: usize,
    pub seed: u64,
    pub term_count: usize,
    /// Amplitudes are drawn from `U[low, high)`.
    pub amplitude_range: [f64; 2],
    /// Integer frequencies drawn uniformly from `low..=high`.
    pub frequency_range: [i64; 2],
    /// Added on top of `Σ|amplitude|`, so every member is at least this large.
    pub bias_margin: f64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            count: 100,
            seed: 0,
            term_count: 3,
            amplitude_range: [0.5, 1.5],
            frequency_range: [1, 10],
            bias_margin: 1.0,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(format!("ensemble spec: {msg}")));
        if self.count == 0 {
            return bad("count must be >= 1");
        }
        if self.term_count == 0 {
            return bad("term_count must be >= 1");
        }
        let [alo, ahi] = self.amplitude_range;
        if !alo.is_finite() || !ahi.is_finite() || alo > ahi {
            return bad("amplitude_range must be finite with low <= high");
        }
        if self.frequency_range[0] > self.frequency_range[1] {
            return bad("frequency_range must have low <= high");
        }
        if !(self.bias_margin > 0.0) || !self.bias_margin.is_finite() {
            return bad("bias_margin must be finite and > 0");
        }
        Ok(())
    }

    /// Generator for member `index`: seeded by `seed`, on stream `index`.
    pub fn member_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Member `index` of the random sum-of-sinusoids ensemble.
pub fn random_sos(spec: &EnsembleSpec, index: usize) -> Result<FunctionDescriptor> {
    spec.validate()?;
    if index >= spec.count {
        return Err(Error::IndexOutOfRange { index, len: spec.count });
    }
    let mut rng = spec.member_rng(index);
    let [alo, ahi] = spec.amplitude_range;
    let [flo, fhi] = spec.frequency_range;
    let terms: Vec<SinusoidTerm> = (0..spec.term_count)
        .map(|_| {
            let amplitude = if alo == ahi { alo } else { rng.gen_range(alo..ahi) };
            let frequency = rng.gen_range(flo..=fhi);
            let phase = rng.gen_range(0.0..TAU);
            SinusoidTerm { amplitude, frequency, phase }
        })
        .collect();
    let bias = terms.iter().map(|t| t.amplitude.abs()).sum::<f64>() + spec.bias_margin;
    Ok(FunctionDescriptor::SumOfSinusoids { terms, bias })
}

/// Either a described function or a Kronecker delta; what experiment drivers sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSource {
    Function(FunctionDescriptor),
    Delta { k0: usize, height: f64 },
}

impl SpectrumSource {
    pub fn sample(&self, n_samples: usize) -> Result<Spectrum> {
        match self {
            SpectrumSource::Function(d) => sample_function(d, n_samples),
            SpectrumSource::Delta { k0, height } => delta_spectrum(n_samples, *k0, *height),
        }
    }

    pub fn id(&self) -> String {
        match self {
            SpectrumSource::Function(d) => d.id(),
            SpectrumSource::Delta { k0, .. } => format!("delta/{k0}"),
        }
    }
}

impl From<FunctionDescriptor> for SpectrumSource {
    fn from(d: FunctionDescriptor) -> Self {
        SpectrumSource::Function(d)
    }
}
