//! The recovery pipeline: phase construction, phase attachment, inverse DFT,
//! pointwise modulus and time reversal.

mod phase;
mod pipeline;
mod transform;
mod types;

pub use phase::{add_phases, linear_phase, newman_original_phase, newman_phase, PhaseKind};
pub use pipeline::{attach_phase, magnitude, reconstruct, reverse, PipelineConfig};
pub use transform::{inverse_dft, naive_inverse_dft, naive_inverse_dft_capped, DftPlan, DEFAULT_ORACLE_CAP};
pub use types::{wrap_angle, ComplexSpectrum, Normalization, PhaseSequence, ReversalConvention, Spectrum, TimeSignal};
