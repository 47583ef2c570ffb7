//! Intensity histograms and the two preprocessing baselines
//! (global equalization, saturating linear stretch).

use std::io::Write;

use thiserror::Error;

use crate::image_io::GrayImage;

/// Default saturation fractions for [`adjust_intensity`].
pub const ADJUST_LOW_DEFAULT: f64 = 0.01;
pub const ADJUST_HIGH_DEFAULT: f64 = 0.99;

#[derive(Debug, Error)]
pub enum HistogramError {
    #[error("degenerate intensity range: low and high percentiles coincide at {0}")]
    DegenerateRange(u8),
    #[error("saturation fractions out of order: low {low} must be < high {high}")]
    BadFractions { low: f64, high: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// 256-bin count histogram over gray levels 0..=255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    counts: [u64; 256],
}

impl Histogram {
    /// Builds a histogram directly from counts (mainly for threshold tests).
    pub fn from_counts(counts: [u64; 256]) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max_count(&self) -> u64 {
        *self.counts.iter().max().unwrap()
    }

    pub fn nonzero_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Cumulative fraction of pixels at or below each gray level.
    pub fn cdf(&self) -> [f64; 256] {
        let total = self.total() as f64;
        let mut out = [0.0; 256];
        let mut cum = 0u64;
        for (v, &c) in self.counts.iter().enumerate() {
            cum += c;
            out[v] = cum as f64 / total;
        }
        out
    }

    /// Writes the `bin,count` CSV used by the plot subcommand.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), HistogramError> {
        writeln!(w, "bin,count")?;
        for (bin, &count) in self.counts.iter().enumerate() {
            writeln!(w, "{bin},{count}")?;
        }
        Ok(())
    }
}

/// Counts pixels per gray level.
pub fn compute_histogram(img: &GrayImage) -> Histogram {
    let mut counts = [0u64; 256];
    for &v in img.data() {
        counts[v as usize] += 1;
    }
    Histogram { counts }
}

fn remap(img: &GrayImage, map: &[u8; 256]) -> GrayImage {
    let data = img.data().iter().map(|&v| map[v as usize]).collect();
    GrayImage::new(img.width(), img.height(), data).expect("dimensions preserved")
}

/// Global histogram equalization: `v -> round(255 * cdf(v))`.
pub fn equalize(img: &GrayImage) -> GrayImage {
    let cdf = compute_histogram(img).cdf();
    let mut map = [0u8; 256];
    for (m, &c) in map.iter_mut().zip(&cdf) {
        *m = (255.0 * c).round() as u8;
    }
    remap(img, &map)
}

/// Saturating linear contrast stretch between the `low_frac` and `high_frac`
/// cumulative cutoffs.
///
/// The cutoff gray levels are the smallest occupied intensities whose cdf
/// reaches the requested fraction, so `low_frac = 0` selects the image
/// minimum and `high_frac = 1` the image maximum.
pub fn adjust_intensity(
    img: &GrayImage,
    low_frac: f64,
    high_frac: f64,
) -> Result<GrayImage, HistogramError> {
    if !(0.0..1.0).contains(&low_frac) || !(0.0..=1.0).contains(&high_frac) || low_frac >= high_frac
    {
        return Err(HistogramError::BadFractions { low: low_frac, high: high_frac });
    }
    let hist = compute_histogram(img);
    let cdf = hist.cdf();
    let cutoff = |frac: f64| -> Option<u8> {
        (0..256).find(|&v| hist.counts[v] > 0 && cdf[v] >= frac).map(|v| v as u8)
    };
    let lo = cutoff(low_frac).expect("image has at least one pixel");
    let hi = cutoff(high_frac).expect("cdf reaches 1");
    if hi == lo {
        return Err(HistogramError::DegenerateRange(lo));
    }
    let span = (hi - lo) as f64;
    let mut map = [0u8; 256];
    for v in 0..256 {
        let stretched = 255.0 * (v as f64 - lo as f64) / span;
        map[v] = stretched.round().clamp(0.0, 255.0) as u8;
    }
    Ok(remap(img, &map))
}
