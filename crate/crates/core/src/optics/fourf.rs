//! Numerical 4f relay with an off-axis circular aperture.
//!
//! Filtering the binary mirror array around the spatial frequency of the
//! phase ramp makes each mirror contribute `e^{i2π f0·x}`, which is the
//! per-mirror phase mask of the superpixel scheme.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{fft2, signed_bin};
use crate::error::{Error, Result};
use crate::modulator::ComplexField;
use crate::stego::DmdPattern;
use crate::superpixel::{phase_angle, PhaseAssignment, BLOCK_SIDE};

/// Fourier-plane aperture, in cycles per mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureSpec {
    /// Phase-ramp frequency `(f_x0, f_y0)` the aperture is centered on.
    pub center: (f64, f64),
    pub radius: f64,
    /// Phase of the superpixel's origin mirror; output values are rotated
    /// by it so that they sit in codebook units.
    pub origin_phase: f64,
}

impl ApertureSpec {
    pub const DEFAULT_RADIUS: f64 = 1.0 / 16.0;

    pub fn new(center: (f64, f64), radius: f64, origin_phase: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::usage(format!("aperture radius must be positive, got {radius}")));
        }
        if !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::usage("aperture center must be finite"));
        }
        Ok(Self {
            center,
            radius,
            origin_phase,
        })
    }

    /// Aperture on the assignment's phase ramp with the default radius;
    /// `None` when the assignment is not an affine ramp.
    pub fn for_assignment(a: &PhaseAssignment) -> Option<Self> {
        let center = a.phase_gradient()?;
        let origin_phase = phase_angle(a.indices()[0]);
        Some(Self {
            center,
            radius: Self::DEFAULT_RADIUS,
            origin_phase,
        })
    }

    pub fn with_radius(self, radius: f64) -> Result<Self> {
        Self::new(self.center, radius, self.origin_phase)
    }
}

/// Simulated complex output of the 4f system, one value per superpixel.
///
/// Mirrors are unit-amplitude binary samples. The spectrum is cut to the
/// circular aperture around the ramp frequency, transformed back,
/// demodulated by the ramp, and summed over each 4×4 block. With an aperture
/// covering the whole spectrum the result is exactly the codebook value of
/// every block.
pub fn simulate_4f(pattern: &DmdPattern, ap: &ApertureSpec) -> Result<ComplexField> {
    let (w, h) = (pattern.width(), pattern.height());
    if w % BLOCK_SIDE != 0 || h % BLOCK_SIDE != 0 {
        return Err(Error::dimension(format!("pattern {w}×{h} is not a multiple of 4")));
    }
    let mut data: Vec<Complex64> = pattern
        .mirrors()
        .iter()
        .map(|&m| Complex64::new(if m { 1.0 } else { 0.0 }, 0.0))
        .collect();
    fft2(&mut data, w, h, false);

    // A mirror weighted by e^{+i2π f0·x} lands on DFT bin −f0.
    let (fx0, fy0) = ap.center;
    let r2 = ap.radius * ap.radius;
    let wrap = |f: f64| f - f.round();
    data.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let dy = wrap(signed_bin(y, h) / h as f64 + fy0);
        for (x, v) in row.iter_mut().enumerate() {
            let dx = wrap(signed_bin(x, w) / w as f64 + fx0);
            if dx * dx + dy * dy > r2 {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    });
    fft2(&mut data, w, h, true);

    // Ramp relative to each block's origin mirror; the per-block offset of
    // a global ramp is not part of the superpixel value.
    let mut carrier = [Complex64::new(0.0, 0.0); BLOCK_SIDE * BLOCK_SIDE];
    for r in 0..BLOCK_SIDE {
        for c in 0..BLOCK_SIDE {
            carrier[r * BLOCK_SIDE + c] = Complex64::from_polar(
                1.0,
                ap.origin_phase + 2.0 * PI * (fx0 * c as f64 + fy0 * r as f64),
            );
        }
    }

    let (cols, rows) = (w / BLOCK_SIDE, h / BLOCK_SIDE);
    let values = (0..rows * cols)
        .into_par_iter()
        .map(|i| {
            let (row, col) = (i / cols, i % cols);
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..BLOCK_SIDE {
                let base = (row * BLOCK_SIDE + r) * w + col * BLOCK_SIDE;
                for c in 0..BLOCK_SIDE {
                    acc += data[base + c] * carrier[r * BLOCK_SIDE + c];
                }
            }
            acc
        })
        .collect();
    ComplexField::new(cols, rows, values)
}

/// `|⟨a, b⟩| / (‖a‖·‖b‖)`; zero when either side has no energy.
pub fn complex_correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner.norm() / (na * nb).sqrt()
}
