//! Cleanup of segmentation artifacts: line-kernel motion blur with
//! re-binarization, and connected-component area filtering.

use thiserror::Error;

use crate::components::{label_components, Connectivity};
use crate::image_io::BinaryImage;

/// Default motion-blur kernel length in pixels.
pub const BLUR_LENGTH_DEFAULT: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum PostprocessError {
    #[error("motion blur length must be odd and >= 1, got {0}")]
    BadKernelLength(usize),
}

/// Orientation of the 1 x length blur kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlurAngle {
    /// 0 degrees.
    #[default]
    Horizontal,
    /// 90 degrees.
    Vertical,
}

/// Convolves the label field with a normalized line kernel (replicate
/// padding) and re-binarizes at 0.5, which wipes objects thinner than half
/// the kernel along its axis.
///
/// The window sums stay in integers, so `blurred >= 0.5` is evaluated as
/// `2 * sum >= length` with no rounding concerns.
pub fn motion_blur_clean(
    bin: &BinaryImage,
    length: usize,
    angle: BlurAngle,
) -> Result<BinaryImage, PostprocessError> {
    if length == 0 || length % 2 == 0 {
        return Err(PostprocessError::BadKernelLength(length));
    }
    let w = bin.width() as usize;
    let h = bin.height() as usize;
    let half = (length / 2) as isize;
    let data = bin.data();
    let mut out = vec![0u8; data.len()];
    for y in 0..h {
        for x in 0..w {
            let mut sum = 0usize;
            for k in -half..=half {
                let (sx, sy) = match angle {
                    BlurAngle::Horizontal => ((x as isize + k).clamp(0, w as isize - 1), y as isize),
                    BlurAngle::Vertical => (x as isize, (y as isize + k).clamp(0, h as isize - 1)),
                };
                sum += data[sy as usize * w + sx as usize] as usize;
            }
            out[y * w + x] = u8::from(2 * sum >= length);
        }
    }
    Ok(BinaryImage::from_labels_unchecked(bin.width(), bin.height(), out))
}

/// Zeroes foreground components with fewer than `min_area` pixels.
pub fn remove_small(bin: &BinaryImage, min_area: usize, connectivity: Connectivity) -> BinaryImage {
    if min_area == 0 {
        return bin.clone();
    }
    let labeled = label_components(bin, connectivity);
    let keep: Vec<bool> = labeled.areas.iter().map(|&a| a >= min_area).collect();
    let data = bin
        .data()
        .iter()
        .zip(&labeled.labels)
        .map(|(&v, &l)| if v == 1 && keep[l as usize - 1] { 1 } else { 0 })
        .collect();
    BinaryImage::from_labels_unchecked(bin.width(), bin.height(), data)
}
