use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A discrete magnitude spectrum: non-negative, finite, at least one bin.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSize("spectrum must have at least one bin".into()));
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { what: "magnitude", index });
            }
            if value < 0.0 {
                return Err(Error::NegativeMagnitude { index, value });
            }
        }
        Ok(Self(values))
    }

    /// Builds a spectrum from values already known to satisfy the invariants.
    pub(crate) fn from_trusted(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        Self(values)
    }

    pub fn constant(n_samples: usize, level: f64) -> Result<Self> {
        Self::new(vec![level; n_samples])
    }

    /// Multiplies every bin by `factor` (must be non-negative).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor {factor} must be finite and >= 0")));
        }
        Ok(Self(self.0.iter().map(|v| v * factor).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Spectrum {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        Spectrum::new(values).map_err(serde::de::Error::custom)
    }
}

/// Phase angles in radians. Angles are kept unreduced; they act modulo 2π.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhaseSequence(Vec<f64>);

impl PhaseSequence {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if let Some(index) = angles.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite { what: "phase angle", index });
        }
        Ok(Self(angles))
    }

    pub fn zeros(n_samples: usize) -> Self {
        Self(vec![0.0; n_samples])
    }

    /// Adds `offset` radians to every angle.
    pub fn offset(&self, offset: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|a| a + offset).collect())
    }

    /// Angles reduced into `[0, 2π)`.
    pub fn wrapped(&self) -> Vec<f64> {
        self.0.iter().map(|&a| wrap_angle(a)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PhaseSequence {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl<'de> Deserialize<'de> for PhaseSequence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        PhaseSequence::new(values).map_err(serde::de::Error::custom)
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = angle.rem_euclid(tau);
    // rem_euclid can round up to exactly tau for tiny negative inputs
    if r >= tau {
        0.0
    } else {
        r
    }
}

macro_rules! complex_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(Vec<Complex64>);

        impl $name {
            pub fn new(values: Vec<Complex64>) -> Result<Self> {
                if values.is_empty() {
                    return Err(Error::InvalidSize(concat!(stringify!($name), " must be non-empty").into()));
                }
                Ok(Self(values))
            }

            pub fn as_slice(&self) -> &[Complex64] {
                &self.0
            }

            pub fn into_inner(self) -> Vec<Complex64> {
                self.0
            }

            /// Sum of squared moduli.
            pub fn energy(&self) -> f64 {
                self.0.iter().map(|c| c.norm_sqr()).sum()
            }
        }

        impl Deref for $name {
            type Target = [Complex64];

            fn deref(&self) -> &[Complex64] {
                &self.0
            }
        }
    };
}

complex_vector!(
    /// Frequency-domain complex values `X[k]`.
    ComplexSpectrum
);
complex_vector!(
    /// Time-domain complex values `x[n]`.
    TimeSignal
);

/// Scaling constant applied to the synthesis sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `1/√N`; energy preserving.
    #[default]
    Unitary,
    /// `1/N`, the textbook inverse DFT.
    InverseN,
    /// No scaling.
    Unscaled,
}

impl Normalization {
    pub fn factor(self, n: usize) -> f64 {
        match self {
            Normalization::Unitary => 1.0 / (n as f64).sqrt(),
            Normalization::InverseN => 1.0 / n as f64,
            Normalization::Unscaled => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::Unitary => "unitary",
            Normalization::InverseN => "inverse_n",
            Normalization::Unscaled => "unscaled",
        }
    }
}

/// Index map used to undo the time reversal induced by the quadratic phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReversalConvention {
    /// `out[k] = in[(N - k) mod N]`; index 0 is fixed.
    #[default]
    Modular,
    /// `out[k] = in[N - 1 - k]`.
    Flip,
}

impl ReversalConvention {
    /// Source index feeding output index `k` for a sequence of length `n`.
    #[inline]
    pub fn source_index(self, k: usize, n: usize) -> usize {
        match self {
            ReversalConvention::Modular => (n - k) % n,
            ReversalConvention::Flip => n - 1 - k,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReversalConvention::Modular => "modular",
            ReversalConvention::Flip => "flip",
        }
    }
}
