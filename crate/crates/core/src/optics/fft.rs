use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

/// Signed DFT frequency index of bin `i` out of `n` (`fftfreq` ordering).
#[inline]
pub(crate) fn signed_bin(i: usize, n: usize) -> f64 {
    if i < n.div_ceil(2) {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    out.par_chunks_mut(height).enumerate().for_each(|(x, col)| {
        for (y, v) in col.iter_mut().enumerate() {
            *v = data[y * width + x];
        }
    });
    out
}

fn rows(data: &mut [Complex64], width: usize, planner: &mut FftPlanner<f64>, dir: FftDirection) {
    let fft = planner.plan_fft(width, dir);
    data.par_chunks_mut(width).for_each(|row| fft.process(row));
}

/// In-place 2-D DFT of a row-major `width × height` grid. The inverse is
/// scaled by `1/(width·height)` so forward∘inverse is the identity.
pub(crate) fn fft2(data: &mut Vec<Complex64>, width: usize, height: usize, inverse: bool) {
    let dir = if inverse {
        FftDirection::Inverse
    } else {
        FftDirection::Forward
    };
    let mut planner = FftPlanner::new();
    rows(data, width, &mut planner, dir);
    let mut t = transpose(data, width, height);
    rows(&mut t, height, &mut planner, dir);
    *data = transpose(&t, height, width);
    if inverse {
        let norm = 1.0 / (width * height) as f64;
        data.par_iter_mut().for_each(|v| *v *= norm);
    }
}
