//! Zero-padded FFT machinery shared by the spectral operators.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Internal zero-padding factor of the 1D limit-functional transforms.
///
/// Periodization biases the Ḣ^{1/2} value by roughly −π·mass²/(3P²) for a period P,
/// so a factor 16 keeps that below 1e−3 on unit-scale profiles.
pub const DEFAULT_PAD_FACTOR: usize = 16;

/// Options of the periodic spectral approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// DFT length is at least `pad_factor · len`, rounded up to a 2·3·5-smooth size.
    pub pad_factor: usize,
    /// Reject profiles with less than 25% zero margin on either side of the support.
    pub check_padding: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { pad_factor: DEFAULT_PAD_FACTOR, check_padding: true }
    }
}

impl SpectralOptions {
    /// Plain periodic transform on the given samples.
    pub fn periodic() -> Self {
        Self { pad_factor: 1, check_padding: false }
    }
}

/// Smallest 2^a·3^b·5^c that is ≥ `n`.
pub fn fast_len(n: usize) -> usize {
    let mut best = usize::MAX;
    let mut p2 = 1usize;
    while p2 < 2 * n.max(1) {
        let mut p3 = p2;
        while p3 < 2 * n.max(1) {
            let mut p5 = p3;
            while p5 < n {
                p5 *= 5;
            }
            best = best.min(p5);
            p3 *= 3;
        }
        p2 *= 2;
    }
    best
}

/// Requires ≥ 25% (of the support length) zero margin on each side.
pub fn check_padding(values: &[f64], dx: f64) -> Result<()> {
    let (Some(i0), Some(i1)) =
        (values.iter().position(|v| *v != 0.0), values.iter().rposition(|v| *v != 0.0))
    else {
        return Ok(());
    };
    let support = (i1 - i0 + 1) as f64 * dx;
    let left = i0 as f64 * dx;
    let right = (values.len() - 1 - i1) as f64 * dx;
    let required = 0.25 * support;
    if left < required || right < required {
        return Err(Error::Padding { required, left, right });
    }
    Ok(())
}

/// Frequency of DFT bin `k` for length `m` and step `dx`.
pub fn bin_frequency(k: usize, m: usize, dx: f64) -> f64 {
    let kk = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
    2.0 * PI * kk / (m as f64 * dx)
}

/// A forward/inverse plan pair of fixed length.
#[derive(Clone)]
pub struct Plan {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Plan {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, fwd: planner.plan_fft_forward(len), inv: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized DFT of the real samples, zero-padded to the plan length.
    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (b, &v) in buf.iter_mut().zip(values) {
            b.re = v;
        }
        self.fwd.process(&mut buf);
        buf
    }

    /// Unnormalized DFT of arbitrary complex samples.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
    }

    /// Inverse DFT including the 1/len normalization.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        let s = 1.0 / self.len as f64;
        for b in buf.iter_mut() {
            *b *= s;
        }
    }
}

/// DFT length used for `n` samples with padding factor `pad`.
pub fn padded_len(n: usize, pad: usize) -> usize {
    fast_len(n * pad.max(1))
}

/// Approximates ∫ g(ξ)|Â(ξ)|² dξ (unitary transform) by (dx/M)·Σ g(ξ_k)|F_k|².
pub fn weighted_power(
    values: &[f64],
    dx: f64,
    opts: SpectralOptions,
    g: impl Fn(f64) -> f64,
) -> Result<f64> {
    if opts.check_padding {
        check_padding(values, dx)?;
    }
    let m = padded_len(values.len(), opts.pad_factor);
    let f = Plan::new(m).forward_real(values);
    let s: f64 = f.iter().enumerate().map(|(k, c)| g(bin_frequency(k, m, dx)) * c.norm_sqr()).sum();
    Ok(s * dx / m as f64)
}

/// Applies the Fourier multiplier `mult` and returns samples on the original grid.
///
/// The Nyquist bin (even lengths) receives the average of the multiplier at ±ξ_N so that
/// Hermitian multipliers map real data to real data.
pub fn apply_multiplier(
    values: &[f64],
    dx: f64,
    opts: SpectralOptions,
    mult: impl Fn(f64) -> Complex64,
) -> Result<Vec<f64>> {
    if opts.check_padding {
        check_padding(values, dx)?;
    }
    let m = padded_len(values.len(), opts.pad_factor);
    let plan = Plan::new(m);
    let mut f = plan.forward_real(values);
    for (k, c) in f.iter_mut().enumerate() {
        let xi = bin_frequency(k, m, dx);
        let w = if m % 2 == 0 && k == m / 2 { 0.5 * (mult(xi) + mult(-xi)) } else { mult(xi) };
        *c *= w;
    }
    plan.inverse(&mut f);
    Ok(f[..values.len()].iter().map(|c| c.re).collect())
}
