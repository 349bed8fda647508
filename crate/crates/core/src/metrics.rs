//! Error norms between a reconstruction and its target, convergence sweeps,
//! ensemble statistics and overshoot near jump discontinuities.
//!
//! The metric functions compare vectors index by index; callers pass a
//! reconstruction that has already been reversed (which
//! [`reconstruct`](crate::spectral::reconstruct) does).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{random_sos, sample_function, EnsembleSpec, SpectrumSource};
use crate::spectral::{Normalization, PhaseKind, PipelineConfig, ReversalConvention, Spectrum};

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: b.len(), found: a.len() });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput("error metric on empty vectors"));
    }
    Ok(())
}

/// `max_k |recon[k] - target[k]|`.
pub fn sup_error(recon: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(recon, target)?;
    Ok(recon.iter().zip(target).map(|(r, t)| (r - t).abs()).fold(0.0, f64::max))
}

/// `sqrt(1/N Σ (recon[k] - target[k])²)`.
pub fn rms_error(recon: &[f64], target: &[f64]) -> Result<f64> {
    check_lengths(recon, target)?;
    let sum: f64 = recon.iter().zip(target).map(|(r, t)| (r - t) * (r - t)).sum();
    Ok((sum / recon.len() as f64).sqrt())
}

/// One error measurement with the settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub n: usize,
    pub sup_error: f64,
    pub rms_error: f64,
    pub normalization: Normalization,
    pub reversal: ReversalConvention,
    pub phase_kind: PhaseKind,
    pub descriptor_id: String,
    pub seed: Option<u64>,
    /// Ensemble member index, when the record belongs to an ensemble.
    pub member: Option<usize>,
}

/// Five-number summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub count: usize,
}

/// Quantile at probability `p` of sorted data, interpolating linearly between
/// the closest ranks: position `h = (n - 1) p`.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Box-plot statistics with linear interpolation between closest ranks
/// (the same rule as the default in numpy and R type 7).
pub fn quantiles(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::EmptyInput("quantiles of an empty list"));
    }
    if let Some(index) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::NonFinite { what: "quantile input", index });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(BoxStats {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        count: sorted.len(),
    })
}

fn measure(target: &Spectrum, cfg: &PipelineConfig) -> Result<(f64, f64)> {
    let recon = cfg.run(target)?;
    Ok((sup_error(&recon, target)?, rms_error(&recon, target)?))
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::EmptyInput("size list"));
    }
    if let Some(n) = sizes.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidSize(format!("sweep sizes must be >= 2, got {n}")));
    }
    Ok(())
}

/// Sample, reconstruct and measure at every size in `sizes`.
pub fn convergence_sweep(source: &SpectrumSource, sizes: &[usize], cfg: &PipelineConfig) -> Result<Vec<ErrorRecord>> {
    check_sizes(sizes)?;
    let id = source.id();
    sizes
        .par_iter()
        .map(|&n| {
            let target = source.sample(n)?;
            let (sup, rms) = measure(&target, cfg)?;
            Ok(ErrorRecord {
                n,
                sup_error: sup,
                rms_error: rms,
                normalization: cfg.normalization,
                reversal: cfg.reversal,
                phase_kind: cfg.phase,
                descriptor_id: id.clone(),
                seed: None,
                member: None,
            })
        })
        .collect()
}

/// Per-size results of an ensemble study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleLevel {
    pub rms_stats: BoxStats,
    /// Ordered by member index.
    pub records: Vec<ErrorRecord>,
}

/// Runs every ensemble member at every size and summarizes the RMS errors.
///
/// Members are evaluated in parallel into per-index slots, so the output does
/// not depend on scheduling.
pub fn ensemble_study(
    spec: &EnsembleSpec,
    sizes: &[usize],
    cfg: &PipelineConfig,
) -> Result<BTreeMap<usize, EnsembleLevel>> {
    spec.validate()?;
    check_sizes(sizes)?;
    let per_member: Vec<Vec<ErrorRecord>> = (0..spec.count)
        .into_par_iter()
        .map(|index| {
            let descriptor = random_sos(spec, index)?;
            sizes
                .iter()
                .map(|&n| {
                    let target = sample_function(&descriptor, n)?;
                    let (sup, rms) = measure(&target, cfg)?;
                    Ok(ErrorRecord {
                        n,
                        sup_error: sup,
                        rms_error: rms,
                        normalization: cfg.normalization,
                        reversal: cfg.reversal,
                        phase_kind: cfg.phase,
                        descriptor_id: format!("ensemble:{}:{index}", spec.seed),
                        seed: Some(spec.seed),
                        member: Some(index),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut out = BTreeMap::new();
    for (slot, &n) in sizes.iter().enumerate() {
        let records: Vec<ErrorRecord> = per_member.iter().map(|rows| rows[slot].clone()).collect();
        let rms: Vec<f64> = records.iter().map(|r| r.rms_error).collect();
        out.insert(n, EnsembleLevel { rms_stats: quantiles(&rms)?, records });
    }
    Ok(out)
}

/// Overshoot measurements around one jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsReport {
    pub jump_location: usize,
    pub jump_size: f64,
    /// Peak excess of the reconstruction above the larger of the two side
    /// levels, inside the window.
    pub max_overshoot: f64,
    pub window_halfwidth: usize,
    /// Sup error on the complement of all windows.
    pub far_field_sup_error: f64,
}

/// Reports for every jump plus any pairs of windows that overlap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsProfile {
    pub reports: Vec<GibbsReport>,
    pub overlapping: Vec<(usize, usize)>,
}

/// Default window halfwidth around a jump: `max(8, N/32)` samples.
///
/// The first ripple lobe of the quadratic-phase reconstruction sits roughly
/// `0.9·√N` samples from the jump, which is inside `N/32` for `N ≥ 1024`.
pub fn default_gibbs_halfwidth(n: usize) -> usize {
    (n / 32).max(8)
}

/// Cyclic window `[j - hw, j + hw]` as a list of indices.
fn window(j: usize, hw: usize, n: usize) -> impl Iterator<Item = usize> {
    let span = (2 * hw + 1).min(n);
    let start = (j + n - hw % n) % n;
    (0..span).map(move |d| (start + d) % n)
}

fn cyclic_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Overshoot and far-field error around the given jump indices.
///
/// A jump at index `j` separates `target[j-1]` from `target[j]` (cyclically).
pub fn gibbs_profile(recon: &[f64], target: &[f64], jumps: &[usize], window_halfwidth: usize) -> Result<GibbsProfile> {
    check_lengths(recon, target)?;
    let n = target.len();
    if window_halfwidth == 0 {
        return Err(Error::InvalidParameter("window_halfwidth must be >= 1".into()));
    }
    if let Some(&j) = jumps.iter().find(|&&j| j >= n) {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }

    let mut in_window = vec![false; n];
    for &j in jumps {
        for i in window(j, window_halfwidth, n) {
            in_window[i] = true;
        }
    }
    let far_field_sup_error = (0..n)
        .filter(|&i| !in_window[i])
        .map(|i| (recon[i] - target[i]).abs())
        .fold(0.0, f64::max);

    let reports = jumps
        .iter()
        .map(|&j| {
            let left = target[(j + n - 1) % n];
            let right = target[j];
            let top = left.max(right);
            let peak = window(j, window_halfwidth, n).map(|i| recon[i]).fold(f64::NEG_INFINITY, f64::max);
            GibbsReport {
                jump_location: j,
                jump_size: (right - left).abs(),
                max_overshoot: (peak - top).max(0.0),
                window_halfwidth,
                far_field_sup_error,
            }
        })
        .collect();

    let mut overlapping = Vec::new();
    for (a, &ja) in jumps.iter().enumerate() {
        for &jb in &jumps[a + 1..] {
            if cyclic_distance(ja, jb, n) <= 2 * window_halfwidth {
                overlapping.push((ja, jb));
            }
        }
    }
    Ok(GibbsProfile { reports, overlapping })
}
