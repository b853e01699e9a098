use super::hologram::AmplitudeImage;
use crate::error::{Error, Result};

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 255.0;

fn gaussian_window() -> [f64; WINDOW] {
    let mut w = [0.0; WINDOW];
    let half = (WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - half;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let sum: f64 = w.iter().sum();
    w.map(|v| v / sum)
}

/// Separable "valid" filtering: output is `(w − 10) × (h − 10)`.
fn filter_valid(src: &[f64], w: usize, h: usize, k: &[f64; WINDOW]) -> Vec<f64> {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut horiz = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            let row = &src[y * w + x..y * w + x + WINDOW];
            horiz[y * ow + x] = row.iter().zip(k).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..WINDOW).map(|i| horiz[(y + i) * ow + x] * k[i]).sum();
        }
    }
    out
}

/// Mean SSIM with an 11×11 Gaussian window (σ = 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 255, over every window fully inside the image.
pub fn ssim(a: &AmplitudeImage, b: &AmplitudeImage) -> Result<f64> {
    let (w, h) = (a.width(), a.height());
    if (w, h) != (b.width(), b.height()) {
        return Err(Error::dimension(format!(
            "SSIM needs equal sizes, got {w}×{h} and {}×{}",
            b.width(),
            b.height()
        )));
    }
    if w < WINDOW || h < WINDOW {
        return Err(Error::dimension(format!(
            "SSIM needs images of at least {WINDOW}×{WINDOW}, got {w}×{h}"
        )));
    }
    let k = gaussian_window();
    let x = a.samples();
    let y = b.samples();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();

    let mu_x = filter_valid(x, w, h, &k);
    let mu_y = filter_valid(y, w, h, &k);
    let e_xx = filter_valid(&xx, w, h, &k);
    let e_yy = filter_valid(&yy, w, h, &k);
    let e_xy = filter_valid(&xy, w, h, &k);

    let c1 = (K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (K2 * DYNAMIC_RANGE).powi(2);
    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let var_x = e_xx[i] - mx * mx;
            let var_y = e_yy[i] - my * my;
            let cov = e_xy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2))
                / ((mx * mx + my * my + c1) * (var_x + var_y + c2))
        })
        .sum();
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> AmplitudeImage {
        let s = (0..h).flat_map(|y| (0..w).map(move |x| (y, x))).map(|(y, x)| f(y, x)).collect();
        AmplitudeImage::new(w, h, s).unwrap()
    }

    fn mid_contrast() -> AmplitudeImage {
        image(32, 32, |i, j| 96.0 + ((i * 31 + j * 17) % 64) as f64)
    }

    /// Direct 2-D window sums at every valid position, no separability.
    fn oracle(a: &AmplitudeImage, b: &AmplitudeImage) -> f64 {
        let k = gaussian_window();
        let (w, h) = (a.width(), a.height());
        let c1 = (0.01f64 * 255.0).powi(2);
        let c2 = (0.03f64 * 255.0).powi(2);
        let mut total = 0.0;
        let mut count = 0;
        for y0 in 0..=h - 11 {
            for x0 in 0..=w - 11 {
                let (mut mx, mut my) = (0.0, 0.0);
                for dy in 0..11 {
                    for dx in 0..11 {
                        let g = k[dy] * k[dx];
                        mx += g * a.get(y0 + dy, x0 + dx);
                        my += g * b.get(y0 + dy, x0 + dx);
                    }
                }
                let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
                for dy in 0..11 {
                    for dx in 0..11 {
                        let g = k[dy] * k[dx];
                        let p = a.get(y0 + dy, x0 + dx) - mx;
                        let q = b.get(y0 + dy, x0 + dx) - my;
                        vx += g * p * p;
                        vy += g * q * q;
                        cxy += g * p * q;
                    }
                }
                total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                    / ((mx * mx + my * my + c1) * (vx + vy + c2));
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn identical_images_score_one() {
        let x = mid_contrast();
        assert!((ssim(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverted_image() {
        let x = mid_contrast();
        let inv = image(32, 32, |i, j| 255.0 - x.get(i, j));
        let s = ssim(&x, &inv).unwrap();
        assert!(s < 0.2);
        // Reference value from scikit-image (gaussian_weights, σ = 1.5,
        // population covariance, data_range 255).
        assert!((s - -0.838_497_978_580_344_9).abs() < 1e-9, "{s}");
        assert!((s - oracle(&x, &inv)).abs() < 1e-10);
    }

    #[test]
    fn matches_reference_on_perturbed_image() {
        let x = mid_contrast();
        let y = image(32, 32, |i, j| (x.get(i, j) + ((i * 5 + j * 3) % 9) as f64 - 4.0).clamp(0.0, 255.0));
        let s = ssim(&x, &y).unwrap();
        assert!((s - 0.990_921_997_423_206_7).abs() < 1e-9, "{s}");
        assert!((s - oracle(&x, &y)).abs() < 1e-10);
    }

    #[test]
    fn symmetric() {
        let x = mid_contrast();
        let y = image(32, 32, |i, j| ((i * j) % 200) as f64);
        assert!((ssim(&x, &y).unwrap() - ssim(&y, &x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let x = mid_contrast();
        let small = image(10, 32, |_, _| 0.0);
        assert!(ssim(&x, &small).is_err());
        assert!(ssim(&small, &small).is_err());
    }
}
