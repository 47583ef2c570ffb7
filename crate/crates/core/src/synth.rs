//! Deterministic synthetic inputs for tests and benchmark sweeps.
//!
//! All generators are seeded; `HISTOSEG_SEED` overrides the base seed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::image_io::GrayImage;

/// Base seed: the `HISTOSEG_SEED` environment variable when set, else a
/// fixed default.
pub fn seed_from_env() -> u64 {
    std::env::var("HISTOSEG_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0x4153_7000)
}

/// Histogram whose shape is a Gaussian mixture, discretized onto the 256
/// bins so the counts sum to `total` exactly. `modes` entries are
/// `(center, sigma, weight)`.
///
/// Each bin gets its modal count floor(expected), the most probable value
/// under Poisson sampling; bins whose expected count is below one pixel stay
/// empty, as they would in a typical draw, so shallow valleys and tails keep
/// their shape instead of picking up rounding speckle. The deficit pixels
/// are then restored one each to the densest bins, where +1 is invisible.
pub fn gaussian_mixture_counts(total: u64, modes: &[(f64, f64, f64)]) -> [u64; 256] {
    let density = |x: f64| -> f64 {
        modes
            .iter()
            .map(|&(c, s, w)| w * (-(x - c) * (x - c) / (2.0 * s * s)).exp() / s)
            .sum()
    };
    let raw: Vec<f64> = (0..256).map(|v| density(v as f64)).collect();
    let mass: f64 = raw.iter().sum();

    let mut counts = [0u64; 256];
    let mut assigned = 0u64;
    for (v, &d) in raw.iter().enumerate() {
        counts[v] = (total as f64 * d / mass).floor() as u64;
        assigned += counts[v];
    }
    let deficit = (total - assigned) as usize;
    debug_assert!(deficit < 256, "each bin floors away less than one pixel");
    let mut by_density: Vec<usize> = (0..256).collect();
    by_density.sort_by(|&a, &b| raw[b].partial_cmp(&raw[a]).unwrap().then(a.cmp(&b)));
    for &v in by_density.iter().take(deficit) {
        counts[v] += 1;
    }
    counts
}

/// Lays out exactly `counts[v]` pixels of each intensity and shuffles their
/// placement with the given seed. The histogram of the result is `counts`.
pub fn image_from_counts(width: u32, height: u32, counts: &[u64; 256], seed: u64) -> GrayImage {
    let total: u64 = counts.iter().sum();
    assert_eq!(total, width as u64 * height as u64, "counts must fill the image");
    let mut data = Vec::with_capacity(total as usize);
    for (v, &c) in counts.iter().enumerate() {
        data.extend(std::iter::repeat(v as u8).take(c as usize));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    data.shuffle(&mut rng);
    GrayImage::new(width, height, data).unwrap()
}

/// Equal-mass two-Gaussian image with modes 60 and 180 and sigma 15.
pub fn bimodal_image(width: u32, height: u32, seed: u64) -> GrayImage {
    let counts = gaussian_mixture_counts(
        width as u64 * height as u64,
        &[(60.0, 15.0, 0.5), (180.0, 15.0, 0.5)],
    );
    image_from_counts(width, height, &counts, seed)
}
