//! Inverse DFT under a selectable normalization, and the brute-force oracle
//! used to check it.
//!
//! The fast path is backed by `rustfft`, which covers power-of-two sizes with
//! radix kernels and every other size with mixed-radix, Rader or Bluestein
//! plans. Plans are built per call (or per [`DftPlan`]) so no scratch space is
//! shared between threads.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::types::{ComplexSpectrum, Normalization, TimeSignal};
use crate::error::{Error, Result};

/// Largest size [`naive_inverse_dft`] accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// Reusable forward/inverse transform pair for one size.
#[derive(Clone)]
pub struct DftPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for DftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan").field("len", &self.len).finish()
    }
}

impl DftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidSize("transform length must be >= 1".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `buf[n] <- c · Σ_k buf[k] e^{+2πikn/N}` in place.
    pub fn inverse_in_place(&self, buf: &mut [Complex64], norm: Normalization) -> Result<()> {
        self.run(&self.inverse, buf, norm)
    }

    /// `buf[k] <- c · Σ_n buf[n] e^{-2πikn/N}` in place.
    pub fn forward_in_place(&self, buf: &mut [Complex64], norm: Normalization) -> Result<()> {
        self.run(&self.forward, buf, norm)
    }

    fn run(&self, fft: &Arc<dyn Fft<f64>>, buf: &mut [Complex64], norm: Normalization) -> Result<()> {
        if buf.len() != self.len {
            return Err(Error::LengthMismatch { expected: self.len, found: buf.len() });
        }
        fft.process(buf);
        let c = norm.factor(self.len);
        if c != 1.0 {
            buf.iter_mut().for_each(|v| *v *= c);
        }
        Ok(())
    }
}

/// Fast inverse DFT: `x[n] = c_N Σ_k X[k] e^{2πikn/N}`.
pub fn inverse_dft(spectrum: &ComplexSpectrum, norm: Normalization) -> Result<TimeSignal> {
    let plan = DftPlan::new(spectrum.len())?;
    let mut buf = spectrum.as_slice().to_vec();
    plan.inverse_in_place(&mut buf, norm)?;
    TimeSignal::new(buf)
}

/// Direct O(N²) evaluation of the same sum, capped at [`DEFAULT_ORACLE_CAP`].
pub fn naive_inverse_dft(spectrum: &ComplexSpectrum, norm: Normalization) -> Result<TimeSignal> {
    naive_inverse_dft_capped(spectrum, norm, DEFAULT_ORACLE_CAP)
}

/// Direct evaluation with an explicit size cap.
pub fn naive_inverse_dft_capped(spectrum: &ComplexSpectrum, norm: Normalization, cap: usize) -> Result<TimeSignal> {
    let n = spectrum.len();
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    // twiddles indexed by (k·n mod N) so large products never reach the trig call
    let twiddles: Vec<Complex64> =
        (0..n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64)).collect();
    let c = norm.factor(n);
    let out = (0..n)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, x) in spectrum.iter().enumerate() {
                acc += x * twiddles[(k * t) % n];
            }
            acc * c
        })
        .collect();
    TimeSignal::new(out)
}
