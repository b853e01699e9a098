use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{fft2, signed_bin};
use crate::error::{Error, Result};
use crate::modulator::ComplexField;

/// Scalar paraxial propagation geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    /// Meters.
    pub wavelength: f64,
    /// Meters; negative values propagate backwards.
    pub distance: f64,
    /// Sample pitch at the field plane, meters.
    pub pitch: f64,
}

impl PropagationParams {
    pub fn new(wavelength: f64, distance: f64, pitch: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::usage(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(pitch > 0.0 && pitch.is_finite()) {
            return Err(Error::usage(format!("pitch must be positive, got {pitch}")));
        }
        if !distance.is_finite() {
            return Err(Error::usage(format!("distance must be finite, got {distance}")));
        }
        Ok(Self {
            wavelength,
            distance,
            pitch,
        })
    }

    pub fn reversed(&self) -> Self {
        Self {
            distance: -self.distance,
            ..*self
        }
    }

    /// Largest |z| for which the transfer function stays adequately sampled
    /// on an axis of `samples` points: `N·pitch²/λ`.
    pub fn max_distance(&self, samples: usize) -> f64 {
        samples as f64 * self.pitch * self.pitch / self.wavelength
    }

    /// Human-readable aliasing-guard violations for a `width × height` grid.
    pub fn sampling_warnings(&self, width: usize, height: usize) -> Vec<String> {
        [("x", width), ("y", height)]
            .into_iter()
            .filter(|&(_, n)| self.distance.abs() > self.max_distance(n))
            .map(|(axis, n)| {
                format!(
                    "|z| = {} m exceeds the {axis}-axis sampling limit N·pitch²/λ = {} m (N = {n})",
                    self.distance.abs(),
                    self.max_distance(n)
                )
            })
            .collect()
    }
}

/// `H(f_x, f_y) = exp(−iπλz(f_x² + f_y²))` sampled in DFT bin order.
pub fn transfer_function(width: usize, height: usize, p: &PropagationParams) -> Vec<Complex64> {
    let fx: Vec<f64> = (0..width)
        .map(|i| signed_bin(i, width) / (width as f64 * p.pitch))
        .collect();
    let k = -PI * p.wavelength * p.distance;
    let mut out = vec![Complex64::new(0.0, 0.0); width * height];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        let fy = signed_bin(y, height) / (height as f64 * p.pitch);
        for (v, &fx) in row.iter_mut().zip(&fx) {
            *v = Complex64::from_polar(1.0, k * (fx * fx + fy * fy));
        }
    });
    out
}

/// Transfer-function Fresnel propagation. The constant `e^{ikz}` is dropped.
pub fn fresnel_propagate(f: &ComplexField, p: &PropagationParams) -> ComplexField {
    let (w, h) = (f.width(), f.height());
    let mut data = f.values().to_vec();
    if w == 0 || h == 0 || p.distance == 0.0 {
        return f.clone();
    }
    fft2(&mut data, w, h, false);
    let tf = transfer_function(w, h, p);
    data.par_iter_mut().zip(&tf).for_each(|(d, t)| *d *= t);
    fft2(&mut data, w, h, true);
    let mut out = ComplexField::new(w, h, data).expect("propagation preserves dimensions");
    out.pitch = Some(p.pitch);
    out
}
