use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::types::PhaseSequence;
use crate::error::{Error, Result};

fn check_size(n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::InvalidSize("phase sequence needs n_samples >= 1".into()));
    }
    Ok(())
}

/// Quadratic chirp `π k² / N`, `k = 0..N-1`.
///
/// The angles are not reduced modulo 2π.
pub fn newman_phase(n_samples: usize) -> Result<PhaseSequence> {
    check_size(n_samples)?;
    let n = n_samples as f64;
    // k² stays exact in f64 for every size this crate can allocate
    Ok(PhaseSequence::from_vec((0..n_samples).map(|k| PI * (k * k) as f64 / n).collect()))
}

/// Coefficient phase of the classical extremal polynomial, `2π k² / N`.
pub fn newman_original_phase(n_samples: usize) -> Result<PhaseSequence> {
    check_size(n_samples)?;
    let n = n_samples as f64;
    Ok(PhaseSequence::from_vec((0..n_samples).map(|k| TAU * (k * k) as f64 / n).collect()))
}

/// Linear phase `slope · k`.
pub fn linear_phase(n_samples: usize, slope: f64) -> Result<PhaseSequence> {
    check_size(n_samples)?;
    PhaseSequence::new((0..n_samples).map(|k| slope * k as f64).collect())
}

/// Pointwise sum of two phase sequences of equal length.
pub fn add_phases(a: &PhaseSequence, b: &PhaseSequence) -> Result<PhaseSequence> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), found: b.len() });
    }
    PhaseSequence::new(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect())
}

/// Named phase constructions selectable from experiment configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    #[default]
    Newman,
    /// Newman chirp plus a linear term (slope π unless configured otherwise).
    NewmanPlusLinear,
    NewmanOriginal,
    /// Anything supplied directly by the caller.
    Custom,
}

impl PhaseKind {
    pub const DEFAULT_LINEAR_SLOPE: f64 = PI;

    /// Builds the phase for a named kind. `Custom` has no construction rule.
    pub fn build(self, n_samples: usize, linear_slope: f64) -> Result<PhaseSequence> {
        match self {
            PhaseKind::Newman => newman_phase(n_samples),
            PhaseKind::NewmanPlusLinear => {
                add_phases(&newman_phase(n_samples)?, &linear_phase(n_samples, linear_slope)?)
            }
            PhaseKind::NewmanOriginal => newman_original_phase(n_samples),
            PhaseKind::Custom => Err(Error::InvalidParameter(
                "custom phase sequences must be supplied explicitly".into(),
            )),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Newman => "newman",
            PhaseKind::NewmanPlusLinear => "newman_plus_linear",
            PhaseKind::NewmanOriginal => "newman_original",
            PhaseKind::Custom => "custom",
        }
    }
}

impl PhaseSequence {
    // finite by construction in this module
    fn from_vec(angles: Vec<f64>) -> Self {
        PhaseSequence::new(angles).expect("finite phase angles")
    }
}
