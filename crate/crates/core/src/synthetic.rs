//! Disk + sinusoid test images with known cartoon and texture parts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub height: usize,
    pub width: usize,
    /// Disk radius as a fraction of `min(height, width)`, in `[0, 0.5)`.
    pub disk_radius_frac: f64,
    /// Cycles of the sinusoid across the image width.
    pub texture_freq: f64,
    pub texture_amp: f64,
    /// Standard deviation of additive Gaussian noise on `f`; zero disables it.
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            height: 64,
            width: 64,
            disk_radius_frac: 0.3,
            texture_freq: 8.0,
            texture_amp: 0.2,
            noise_std: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticImage {
    pub image: ScalarField,
    pub cartoon_truth: ScalarField,
    pub texture_truth: ScalarField,
}

pub const DISK_BACKGROUND: f64 = 0.25;
pub const DISK_CONTRAST: f64 = 0.5;

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticImage> {
    if spec.height == 0 || spec.width == 0 {
        return Err(Error::InvalidDimensions(spec.height, spec.width));
    }
    if !(0.0..0.5).contains(&spec.disk_radius_frac) {
        return Err(Error::param(format!(
            "disk radius fraction must lie in [0, 0.5), got {}",
            spec.disk_radius_frac
        )));
    }
    if !(spec.texture_amp.abs() <= 0.5) {
        return Err(Error::param(format!(
            "texture amplitude must be at most 0.5, got {}",
            spec.texture_amp
        )));
    }
    if !(spec.noise_std >= 0.0 && spec.noise_std.is_finite()) || !spec.texture_freq.is_finite() {
        return Err(Error::param(
            "noise and frequency must be finite, noise non-negative",
        ));
    }

    let (h, w) = (spec.height, spec.width);
    let radius = spec.disk_radius_frac * h.min(w) as f64;
    let (ci, cj) = (h as f64 / 2.0, w as f64 / 2.0);
    let cartoon_truth = ScalarField::from_fn(h, w, |i, j| {
        let di = i as f64 + 0.5 - ci;
        let dj = j as f64 + 0.5 - cj;
        if radius > 0.0 && di * di + dj * dj <= radius * radius {
            DISK_BACKGROUND + DISK_CONTRAST
        } else {
            DISK_BACKGROUND
        }
    });
    let omega = 2.0 * std::f64::consts::PI * spec.texture_freq / w as f64;
    let texture_truth =
        ScalarField::from_fn(h, w, |_, j| spec.texture_amp * (omega * j as f64).sin());

    let mut image = &cartoon_truth + &texture_truth;
    if spec.noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let noise = Normal::new(0.0, spec.noise_std).expect("validated above");
        for x in image.data_mut() {
            *x += noise.sample(&mut rng);
        }
    }
    let image = image.map(|x| x.clamp(0.0, 1.0));

    Ok(SyntheticImage {
        image,
        cartoon_truth,
        texture_truth,
    })
}

/// Pearson correlation; `NaN` when either field is constant.
pub fn pearson(a: &ScalarField, b: &ScalarField) -> f64 {
    assert!(a.same_dims(b));
    let (ma, mb) = (a.mean(), b.mean());
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data()) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}
