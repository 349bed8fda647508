//! Experiment config documents, one per subcommand. Parsing is strict.

use newman_lab::extremal::PolynomialPhase;
use newman_lab::generators::{EnsembleSpec, SpectrumSource};
use newman_lab::phase_opt::{InitKind, MinimizeOptions, ObjectiveSettings};
use newman_lab::spectral::PipelineConfig;
use serde::Deserialize;

/// Largest size accepted without `--allow-large`.
pub const LARGE_LIMIT: usize = 1 << 20;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    #[serde(default)]
    pub pipeline: PipelineConfig,
    pub source: SpectrumSource,
    pub n: usize,
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub pipeline: PipelineConfig,
    pub source: SpectrumSource,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

fn default_stationarity_samples() -> usize {
    100
}

fn default_init() -> InitKind {
    InitKind::Random { seed: 0 }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    pub n: usize,
    #[serde(default)]
    pub objective: ObjectiveSettings,
    #[serde(default = "default_init")]
    pub init: InitKind,
    #[serde(default)]
    pub optimizer: MinimizeOptions,
    /// Random phase vectors in the stationarity comparison; 0 skips it.
    #[serde(default = "default_stationarity_samples")]
    pub stationarity_samples: usize,
    #[serde(default)]
    pub out_dir: Option<String>,
}

/// Phase used for the crest-factor rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrestPhase {
    Newman,
    Zero,
}

impl CrestPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            CrestPhase::Newman => "newman",
            CrestPhase::Zero => "zero",
        }
    }
}

fn default_l1_oversample() -> usize {
    32
}

fn default_crest_oversample() -> usize {
    16
}

fn default_crest_phases() -> Vec<CrestPhase> {
    vec![CrestPhase::Newman]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalConfig {
    #[serde(default)]
    pub degrees: Vec<usize>,
    #[serde(default = "default_l1_oversample")]
    pub l1_oversample: usize,
    #[serde(default)]
    pub polynomial_phase: PolynomialPhase,
    #[serde(default)]
    pub tone_counts: Vec<usize>,
    #[serde(default = "default_crest_oversample")]
    pub crest_oversample: usize,
    #[serde(default = "default_crest_phases")]
    pub crest_phases: Vec<CrestPhase>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

impl ReconstructConfig {
    pub fn sizes(&self) -> Vec<usize> {
        vec![self.n]
    }
}

impl SweepConfig {
    pub fn sizes(&self) -> Vec<usize> {
        self.sizes.clone()
    }
}

impl EnsembleConfig {
    pub fn sizes(&self) -> Vec<usize> {
        self.sizes.clone()
    }
}

impl OptimizeConfig {
    pub fn sizes(&self) -> Vec<usize> {
        vec![self.n]
    }
}

impl ExtremalConfig {
    /// Transform lengths the command will allocate.
    pub fn sizes(&self) -> Vec<usize> {
        let l1 = self.degrees.iter().map(|d| d.saturating_add(1).saturating_mul(self.l1_oversample));
        let crest = self.tone_counts.iter().map(|n| n.saturating_mul(self.crest_oversample));
        l1.chain(crest).collect()
    }
}
