use std::f64::consts::PI;

use num_complex::Complex64;

use super::fresnel::{fresnel_propagate, PropagationParams};
use crate::error::{Error, Result};
use crate::modulator::ComplexField;
use crate::rng::SplitMix64;

/// Nonnegative real image. Samples read from 8-bit files are on the 0..=255
/// scale.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeImage {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl AmplitudeImage {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != width * height {
            return Err(Error::dimension(format!(
                "{width}×{height} image needs {} samples, got {}",
                width * height,
                samples.len()
            )));
        }
        if let Some(s) = samples.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::usage(format!("image sample {s} is not finite and nonnegative")));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn from_gray8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    /// Rounds and clamps each sample into a byte.
    pub fn to_gray8(&self) -> Vec<u8> {
        self.samples
            .iter()
            .map(|&s| s.round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.width + col]
    }
}

/// Bilinear resample of `obj` into a `width × height` grid, preserving its
/// aspect ratio and centering it; the uncovered border is zero.
pub fn letterbox_resample(obj: &AmplitudeImage, width: usize, height: usize) -> AmplitudeImage {
    let mut out = vec![0.0; width * height];
    if obj.width == 0 || obj.height == 0 {
        return AmplitudeImage::new(width, height, out).unwrap();
    }
    let scale = (width as f64 / obj.width as f64).min(height as f64 / obj.height as f64);
    let fit_w = obj.width as f64 * scale;
    let fit_h = obj.height as f64 * scale;
    let off_x = (width as f64 - fit_w) / 2.0;
    let off_y = (height as f64 - fit_h) / 2.0;

    let sample = |sx: f64, sy: f64| -> f64 {
        let x = sx.clamp(0.0, (obj.width - 1) as f64);
        let y = sy.clamp(0.0, (obj.height - 1) as f64);
        let (x0, y0) = (x.floor() as usize, y.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(obj.width - 1), (y0 + 1).min(obj.height - 1));
        let (tx, ty) = (x - x0 as f64, y - y0 as f64);
        let top = obj.get(y0, x0) * (1.0 - tx) + obj.get(y0, x1) * tx;
        let bottom = obj.get(y1, x0) * (1.0 - tx) + obj.get(y1, x1) * tx;
        top * (1.0 - ty) + bottom * ty
    };

    for y in 0..height {
        let cy = y as f64 + 0.5 - off_y;
        if cy < 0.0 || cy > fit_h {
            continue;
        }
        for x in 0..width {
            let cx = x as f64 + 0.5 - off_x;
            if cx < 0.0 || cx > fit_w {
                continue;
            }
            out[y * width + x] = sample(cx / scale - 0.5, cy / scale - 0.5);
        }
    }
    AmplitudeImage::new(width, height, out).unwrap()
}

/// Complex hologram of an amplitude object.
///
/// The object is scaled to amplitude `[0, 1]` (`sample / 255`), letterboxed
/// onto the `width × height` hologram grid, optionally given a uniform random
/// phase drawn from SplitMix64(`diffuser_seed`), and propagated by `+z`.
pub fn generate_hologram(
    obj: &AmplitudeImage,
    p: &PropagationParams,
    width: usize,
    height: usize,
    diffuser_seed: Option<u64>,
) -> ComplexField {
    let amp = letterbox_resample(obj, width, height);
    let mut rng = diffuser_seed.map(SplitMix64::new);
    let values = amp
        .samples()
        .iter()
        .map(|&s| {
            let a = (s / 255.0).clamp(0.0, 1.0);
            match rng.as_mut() {
                Some(r) => Complex64::from_polar(a, 2.0 * PI * r.next_f64()),
                None => Complex64::new(a, 0.0),
            }
        })
        .collect();
    let object = ComplexField::new(width, height, values).expect("resampled grid matches");
    fresnel_propagate(&object, p)
}

/// Back-propagates by `−z` and returns the modulus with its peak scaled to
/// 255, quantized to integer levels.
pub fn reconstruct(h: &ComplexField, p: &PropagationParams) -> AmplitudeImage {
    let image = fresnel_propagate(h, &p.reversed());
    let peak = image.peak();
    let gain = if peak > 0.0 { 255.0 / peak } else { 0.0 };
    let samples = image
        .values()
        .iter()
        .map(|v| (v.norm() * gain).round().clamp(0.0, 255.0))
        .collect();
    AmplitudeImage::new(h.width(), h.height(), samples).unwrap()
}
