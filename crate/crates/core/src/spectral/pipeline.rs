use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phase::PhaseKind;
use super::transform::inverse_dft;
use super::types::{ComplexSpectrum, Normalization, PhaseSequence, ReversalConvention, Spectrum, TimeSignal};
use crate::error::{Error, Result};

/// `X[k] = M[k] · e^{iφ[k]}`.
pub fn attach_phase(magnitudes: &Spectrum, phase: &PhaseSequence) -> Result<ComplexSpectrum> {
    if magnitudes.len() != phase.len() {
        return Err(Error::LengthMismatch { expected: magnitudes.len(), found: phase.len() });
    }
    let values = magnitudes.iter().zip(phase.iter()).map(|(&m, &phi)| Complex64::from_polar(m, phi)).collect();
    ComplexSpectrum::new(values)
}

/// Entrywise modulus.
pub fn magnitude(signal: &TimeSignal) -> Spectrum {
    Spectrum::from_trusted(signal.iter().map(|c| c.norm()).collect())
}

/// Index reversal under the given convention. Both conventions are involutions.
pub fn reverse(spectrum: &Spectrum, conv: ReversalConvention) -> Spectrum {
    let n = spectrum.len();
    Spectrum::from_trusted((0..n).map(|k| spectrum[conv.source_index(k, n)]).collect())
}

/// The full recovery map: attach phase, inverse DFT, modulus, reversal.
pub fn reconstruct(
    magnitudes: &Spectrum,
    phase: &PhaseSequence,
    norm: Normalization,
    conv: ReversalConvention,
) -> Result<Spectrum> {
    let signal = inverse_dft(&attach_phase(magnitudes, phase)?, norm)?;
    Ok(reverse(&magnitude(&signal), conv))
}

/// Settings shared by every driver that runs the recovery pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub normalization: Normalization,
    pub reversal: ReversalConvention,
    pub phase: PhaseKind,
    /// Slope of the linear term for [`PhaseKind::NewmanPlusLinear`].
    pub linear_slope: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            normalization: Normalization::Unitary,
            reversal: ReversalConvention::Modular,
            phase: PhaseKind::Newman,
            linear_slope: PhaseKind::DEFAULT_LINEAR_SLOPE,
        }
    }
}

impl PipelineConfig {
    pub fn phase_for(&self, n_samples: usize) -> Result<PhaseSequence> {
        self.phase.build(n_samples, self.linear_slope)
    }

    /// Runs [`reconstruct`] with the configured phase and conventions.
    pub fn run(&self, magnitudes: &Spectrum) -> Result<Spectrum> {
        let phase = self.phase_for(magnitudes.len())?;
        reconstruct(magnitudes, &phase, self.normalization, self.reversal)
    }
}
