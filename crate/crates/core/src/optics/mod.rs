//! Wave-optics side of the pipeline: Fresnel holograms, the 4f spatial
//! filter that turns a binary mirror array into a complex field, and SSIM.

mod fft;
mod fourf;
mod fresnel;
mod hologram;
mod ssim;

pub use fourf::{complex_correlation, simulate_4f, ApertureSpec};
pub use fresnel::{fresnel_propagate, transfer_function, PropagationParams};
pub use hologram::{generate_hologram, letterbox_resample, reconstruct, AmplitudeImage};
pub use ssim::ssim;
