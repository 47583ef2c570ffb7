//! Segmentation scoring: contour counts, count deviation, and MSE.

use serde::Serialize;
use thiserror::Error;

use crate::components::{label_components, Connectivity};
use crate::image_io::{BinaryImage, GrayImage};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("reference contour count is zero; deviation undefined")]
    ZeroReference,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(u32, u32, u32, u32),
}

/// MSE normalization: the per-pixel mean, or the raw squared-error sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MseNorm {
    Mean,
    Sum,
}

/// Number of connected foreground components.
pub fn count_contours(bin: &BinaryImage, connectivity: Connectivity) -> usize {
    label_components(bin, connectivity).count()
}

/// Relative contour-count deviation `|ps - it| / ps`.
pub fn deviation(ps_count: u64, it_count: u64) -> Result<f64, MetricsError> {
    if ps_count == 0 {
        return Err(MetricsError::ZeroReference);
    }
    Ok(ps_count.abs_diff(it_count) as f64 / ps_count as f64)
}

/// Squared-difference score between two grayscale images.
///
/// Binary inputs should be rendered to 0/255 (see [`BinaryImage::to_gray`])
/// before calling. The accumulation is exact integer arithmetic.
pub fn mse(a: &GrayImage, b: &GrayImage, norm: MseNorm) -> Result<f64, MetricsError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricsError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    let sum: u64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x.abs_diff(y) as u64;
            d * d
        })
        .sum();
    let sum = sum as f64;
    Ok(match norm {
        MseNorm::Sum => sum,
        MseNorm::Mean => sum / (a.width() as f64 * a.height() as f64),
    })
}

/// Comparison of a test segmentation against a reference one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub contours_ref: usize,
    pub contours_test: usize,
    pub deviation: f64,
    pub mse_mean: f64,
    pub mse_sum: f64,
    pub width: u32,
    pub height: u32,
    pub connectivity: u8,
}

impl MetricsReport {
    /// Scores `test` against `reference`; both are rendered at 0/255 for the
    /// MSE terms.
    pub fn compare(
        reference: &BinaryImage,
        test: &BinaryImage,
        connectivity: Connectivity,
    ) -> Result<Self, MetricsError> {
        if reference.width() != test.width() || reference.height() != test.height() {
            return Err(MetricsError::DimensionMismatch(
                reference.width(),
                reference.height(),
                test.width(),
                test.height(),
            ));
        }
        let contours_ref = count_contours(reference, connectivity);
        let contours_test = count_contours(test, connectivity);
        let deviation = deviation(contours_ref as u64, contours_test as u64)?;
        let ref_gray = reference.to_gray();
        let test_gray = test.to_gray();
        Ok(Self {
            contours_ref,
            contours_test,
            deviation,
            mse_mean: mse(&ref_gray, &test_gray, MseNorm::Mean)?,
            mse_sum: mse(&ref_gray, &test_gray, MseNorm::Sum)?,
            width: reference.width(),
            height: reference.height(),
            connectivity: connectivity.as_u8(),
        })
    }
}
