//! Grayscale image thresholding from histogram valleys.
//!
//! The pipeline computes a 256-bin histogram, fits it with an interpolating
//! cubic spline or a least-squares polynomial, locates curve minima through
//! the analytic derivatives, and converts the flattest surviving valley into
//! a normalized threshold. Otsu's between-class-variance criterion is
//! provided as the baseline, together with binarization rules, binary
//! cleanup filters, and deviation/MSE scoring of segmentations.
//!
//! The fitting and threshold kernels are generic over the scalar type (see
//! [`real::Real`]); the aliases below pin the common instantiations.

pub mod components;
pub mod curvefit;
pub mod histogram;
pub mod image_io;
pub mod metrics;
pub mod postprocess;
pub mod real;
pub mod segment;
pub mod synth;
pub mod threshold;

pub use components::Connectivity;
pub use curvefit::{Boundary, Curve1D};
pub use histogram::{adjust_intensity, compute_histogram, equalize, Histogram};
pub use image_io::{load_gray, save_binary, save_gray, BinaryImage, GrayImage};
pub use metrics::{count_contours, deviation, mse, MetricsReport, MseNorm};
pub use postprocess::{motion_blur_clean, remove_small, BlurAngle};
pub use real::Real;
pub use segment::{binarize, binarize_band};
pub use threshold::{
    find_minima, otsu, select_threshold, threshold_from_curve, Method, ThresholdError,
};

/// f64 instantiations of the scalar-generic curve types.
pub type PiecewiseCubic64 = curvefit::PiecewiseCubic<f64>;
pub type PolyCurve64 = curvefit::PolyCurve<f64>;
pub type Minimum64 = threshold::Minimum<f64>;
pub type ThresholdResult64 = threshold::ThresholdResult<f64>;

/// f32 instantiations, for callers trading precision for footprint.
pub type PiecewiseCubic32 = curvefit::PiecewiseCubic<f32>;
pub type PolyCurve32 = curvefit::PolyCurve<f32>;
pub type Minimum32 = threshold::Minimum<f32>;
pub type ThresholdResult32 = threshold::ThresholdResult<f32>;
