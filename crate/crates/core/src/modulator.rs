//! Complex field ⇄ DMD pattern.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::codebook::{Codebook, Strategy};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::stego::{render_plan, DmdPattern, StegoKey, TargetPlan};
use crate::superpixel::max_modulus;

/// Row-major grid of complex amplitudes, one per superpixel (or per sample
/// for optical fields).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    width: usize,
    height: usize,
    values: Vec<Complex64>,
    /// Sample pitch in meters, when known.
    pub pitch: Option<f64>,
}

impl ComplexField {
    pub fn new(width: usize, height: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::dimension(format!(
                "{width}×{height} field needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::usage(format!("non-finite field value {v}")));
        }
        Ok(Self {
            width,
            height,
            values,
            pitch: None,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: vec![Complex64::new(0.0, 0.0); width * height],
            pitch: None,
        }
    }

    pub fn with_pitch(mut self, pitch: f64) -> Self {
        self.pitch = Some(pitch);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.width + col]
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationParams {
    peak_fraction: f64,
}

impl NormalizationParams {
    pub fn new(peak_fraction: f64) -> Result<Self> {
        if !(peak_fraction > 0.0 && peak_fraction <= 1.0) {
            return Err(Error::usage(format!(
                "peak fraction must be in (0, 1], got {peak_fraction}"
            )));
        }
        Ok(Self { peak_fraction })
    }

    pub fn peak_fraction(&self) -> f64 {
        self.peak_fraction
    }
}

impl Default for NormalizationParams {
    fn default() -> Self {
        Self { peak_fraction: 0.8 }
    }
}

/// Scales the field so its peak amplitude is `α·R_max`. Returns the scaled
/// field and the factor `s`; an all-zero field is returned with `s = 1`.
pub fn normalize_field(f: &ComplexField, params: &NormalizationParams) -> (ComplexField, f64) {
    let peak = f.peak();
    let scale = if peak > 0.0 {
        params.peak_fraction * max_modulus() / peak
    } else {
        1.0
    };
    let mut out = f.clone();
    for v in out.values_mut() {
        *v *= scale;
    }
    (out, scale)
}

/// Nearest codebook value per superpixel.
pub fn quantize_field(f: &ComplexField, cb: &Codebook) -> TargetPlan {
    let indices = f
        .values()
        .par_iter()
        .map(|&v| cb.nearest_unchecked(v) as u16)
        .collect();
    TargetPlan::new(f.width(), f.height(), indices).expect("field dimensions are consistent")
}

#[derive(Debug, Clone)]
pub struct Encoded {
    pub pattern: DmdPattern,
    pub plan: TargetPlan,
    pub scale: f64,
}

/// normalize → quantize → select a pattern per superpixel. The random
/// strategy draws from SplitMix64(key), one sample per superpixel in
/// row-major order.
pub fn encode_field(
    f: &ComplexField,
    strategy: Strategy,
    key: StegoKey,
    params: &NormalizationParams,
    cb: &Codebook,
) -> Result<Encoded> {
    if f.width() == 0 || f.height() == 0 {
        return Err(Error::dimension("cannot encode an empty field"));
    }
    let (scaled, scale) = normalize_field(f, params);
    let plan = quantize_field(&scaled, cb);
    let pattern = render_plan(&plan, strategy, &mut SplitMix64::new(key.0), cb);
    Ok(Encoded {
        pattern,
        plan,
        scale,
    })
}

/// Reads back the canonical value of every block.
pub fn decode_field(p: &DmdPattern, cb: &Codebook) -> (TargetPlan, ComplexField) {
    let (cols, rows) = p.superpixels();
    let indices: Vec<u16> = (0..rows * cols)
        .map(|i| cb.pattern_index_in_group(p.block(i / cols, i % cols)).0 as u16)
        .collect();
    let values = indices
        .iter()
        .map(|&i| cb.groups()[i as usize].value)
        .collect();
    (
        TargetPlan::new(cols, rows, indices).expect("indices come from the codebook"),
        ComplexField::new(cols, rows, values).expect("codebook values are finite"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superpixel::{BlockPattern, CoeffVector, PhaseAssignment};
    use std::sync::OnceLock;

    fn cb() -> &'static Codebook {
        static CB: OnceLock<Codebook> = OnceLock::new();
        CB.get_or_init(|| Codebook::build(PhaseAssignment::row_major()))
    }

    /// Largest quantization error over the disk of radius 0.8·R_max, from a
    /// 0.01-step grid scan plus the grid's half-diagonal.
    const COVERING_RADIUS_BOUND: f64 = 0.2027;

    fn random_field(w: usize, h: usize, seed: u64) -> ComplexField {
        let mut rng = SplitMix64::new(seed);
        let v = (0..w * h)
            .map(|_| Complex64::new(rng.next_f64() * 2.0 - 1.0, rng.next_f64() * 2.0 - 1.0))
            .collect();
        ComplexField::new(w, h, v).unwrap()
    }

    #[test]
    fn field_validation() {
        assert!(ComplexField::new(2, 2, vec![Complex64::new(0.0, 0.0); 3]).is_err());
        assert!(ComplexField::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(NormalizationParams::new(0.0).is_err());
        assert!(NormalizationParams::new(1.5).is_err());
        assert!(NormalizationParams::new(1.0).is_ok());
    }

    #[test]
    fn normalize_examples() {
        let params = NormalizationParams::default();
        let (z, s) = normalize_field(&ComplexField::zeros(3, 2), &params);
        assert_eq!(s, 1.0);
        assert_eq!(z, ComplexField::zeros(3, 2));

        let f = ComplexField::new(1, 1, vec![Complex64::new(10.0, 0.0)]).unwrap();
        let (g, s) = normalize_field(&f, &params);
        assert!((g.get(0, 0).norm() - 4.100_664_716_386_411).abs() < 1e-9);
        assert!((s - 0.410_066_471_638_641_1).abs() < 1e-12);

        let small = ComplexField::new(1, 2, vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.05)]).unwrap();
        let (g, s) = normalize_field(&small, &params);
        assert!(s > 1.0);
        assert!((g.peak() - 0.8 * max_modulus()).abs() < 1e-12);
    }

    #[test]
    fn quantize_exact_values_is_lossless() {
        let idx: Vec<usize> = vec![0, 17, 3280, 6560, 1234, 4321];
        let values = idx.iter().map(|&i| cb().groups()[i].value).collect();
        let f = ComplexField::new(3, 2, values).unwrap();
        let plan = quantize_field(&f, cb());
        let got: Vec<usize> = plan.indices().iter().map(|&i| i as usize).collect();
        assert_eq!(got, idx);
    }

    #[test]
    fn quantize_zero_field() {
        let plan = quantize_field(&ComplexField::zeros(4, 3), cb());
        assert!(plan.indices().iter().all(|&i| i as usize == CoeffVector::ZERO.canonical_index()));
    }

    #[test]
    fn quantize_matches_per_entry_scan() {
        let (f, _) = normalize_field(&random_field(16, 9, 3), &NormalizationParams::default());
        let plan = quantize_field(&f, cb());
        for (v, &idx) in f.values().iter().zip(plan.indices()) {
            let mut best = (f64::INFINITY, 0usize);
            for (i, g) in cb().groups().iter().enumerate() {
                let d = (g.value - v).norm();
                if d < best.0 {
                    best = (d, i);
                }
            }
            assert_eq!(idx as usize, best.1);
        }
    }

    #[test]
    fn quantization_error_within_covering_radius() {
        for seed in 0..4 {
            let (f, _) = normalize_field(&random_field(40, 40, seed), &NormalizationParams::default());
            let plan = quantize_field(&f, cb());
            for (v, &idx) in f.values().iter().zip(plan.indices()) {
                let err = (cb().groups()[idx as usize].value - v).norm();
                assert!(err <= COVERING_RADIUS_BOUND, "error {err}");
            }
        }
    }

    #[test]
    fn encode_dimensions_and_zero_field() {
        let out = encode_field(
            &ComplexField::zeros(5, 3),
            Strategy::Min,
            StegoKey(0),
            &NormalizationParams::default(),
            cb(),
        )
        .unwrap();
        assert_eq!((out.pattern.width(), out.pattern.height()), (20, 12));
        assert!(out.pattern.mirrors().iter().all(|&m| !m));
        assert!(encode_field(&ComplexField::zeros(0, 3), Strategy::Min, StegoKey(0), &NormalizationParams::default(), cb()).is_err());
    }

    #[test]
    fn strategies_differ_in_patterns_not_values() {
        let f = random_field(24, 16, 9);
        let params = NormalizationParams::default();
        let mut plans = Vec::new();
        let mut patterns = Vec::new();
        for s in [Strategy::Min, Strategy::Max, Strategy::Random] {
            let e = encode_field(&f, s, StegoKey(77), &params, cb()).unwrap();
            let (plan, _) = decode_field(&e.pattern, cb());
            assert_eq!(plan, e.plan);
            let (scaled, _) = normalize_field(&f, &params);
            assert_eq!(plan, quantize_field(&scaled, cb()));
            plans.push(plan);
            patterns.push(e.pattern);
        }
        assert_eq!(plans[0], plans[1]);
        assert_eq!(plans[0], plans[2]);
        assert_ne!(patterns[0], patterns[1]);
        assert_ne!(patterns[0], patterns[2]);
    }

    #[test]
    fn decode_examples() {
        let (plan, field) = decode_field(&DmdPattern::new(8, 4).unwrap(), cb());
        assert_eq!((plan.width(), plan.height()), (2, 1));
        assert!(field.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));

        let mut p = DmdPattern::new(4, 4).unwrap();
        p.set_block(0, 0, BlockPattern::from_phase_indices(cb().assignment(), &[2, 4, 16]));
        let (_, field) = decode_field(&p, cb());
        let v = field.get(0, 0);
        assert!((v.norm() - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((v.arg() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }
}
