//! Threshold application: single-threshold and band binarization.

use thiserror::Error;

use crate::image_io::{BinaryImage, GrayImage};

#[derive(Debug, Error, PartialEq)]
pub enum SegmentError {
    #[error("inverted band: th1 {th1} exceeds th2 {th2}")]
    InvertedBand { th1: f64, th2: f64 },
}

/// Labels 1 where `p >= th_norm * 255`, 0 elsewhere.
///
/// The comparison is exact against the real-valued threshold; pixel values
/// are never rounded toward it.
pub fn binarize(img: &GrayImage, th_norm: f64) -> BinaryImage {
    debug_assert!((0.0..=1.0).contains(&th_norm));
    let th = th_norm * 255.0;
    let data = img.data().iter().map(|&p| u8::from(p as f64 >= th)).collect();
    BinaryImage::from_labels_unchecked(img.width(), img.height(), data)
}

/// Labels 1 inside the closed band `th1 <= p/255 <= th2`, 0 outside.
pub fn binarize_band(
    img: &GrayImage,
    th1_norm: f64,
    th2_norm: f64,
) -> Result<BinaryImage, SegmentError> {
    if th1_norm > th2_norm {
        return Err(SegmentError::InvertedBand { th1: th1_norm, th2: th2_norm });
    }
    let th1 = th1_norm * 255.0;
    let th2 = th2_norm * 255.0;
    let data = img
        .data()
        .iter()
        .map(|&p| {
            let p = p as f64;
            u8::from(p >= th1 && p <= th2)
        })
        .collect();
    Ok(BinaryImage::from_labels_unchecked(img.width(), img.height(), data))
}
