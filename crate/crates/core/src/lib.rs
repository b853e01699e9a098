//! Complex-amplitude modulation with a binary micromirror array, and data
//! hiding in the redundancy of that encoding.
//!
//! A 4×4 block of mirrors, each carrying one of sixteen phases, realizes one
//! of 6561 complex values; most values are produced by several block
//! patterns. [`codebook`] enumerates those equivalence classes, [`modulator`]
//! turns complex fields into mirror patterns and back, and [`stego`] uses the
//! choice among equivalent patterns to carry a keyed payload without
//! changing the modulated field. [`optics`] provides Fresnel holograms, a 4f
//! filter simulation and SSIM; [`formats`] the file codecs.

pub mod codebook;
pub mod error;
pub mod formats;
pub mod modulator;
pub mod optics;
pub mod rng;
pub mod stego;
pub mod superpixel;

pub use codebook::{Codebook, Strategy, ValueGroup};
pub use error::{Error, Result};
pub use modulator::{
    decode_field, encode_field, normalize_field, quantize_field, ComplexField, Encoded,
    NormalizationParams,
};
pub use rng::SplitMix64;
pub use stego::{
    capacity_of_plan, embed, extract, inverse_permute_bits, permute_bits, render_plan, DmdPattern,
    Payload, StegoKey, TargetPlan, HEADER_BITS,
};
pub use superpixel::{max_modulus, BlockPattern, CoeffVector, PhaseAssignment};

pub use num_complex::Complex64;
