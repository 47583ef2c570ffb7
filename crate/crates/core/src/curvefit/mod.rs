//! Curve fitting over histogram data: interpolating cubic splines and
//! least-squares polynomials, with analytic first and second derivatives.

mod poly;
mod spline;

use std::io::Write;

use thiserror::Error;

use crate::real::Real;

pub use poly::{fit_poly, PolyCurve};
pub use spline::{fit_spline, PiecewiseCubic};

/// Boundary condition for [`fit_spline`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Third derivative continuous across the second and penultimate knots;
    /// reproduces a single cubic exactly.
    #[default]
    NotAKnot,
    /// Zero second derivative at both end knots.
    Natural,
}

#[derive(Debug, Error, PartialEq)]
pub enum CurveFitError {
    #[error("abscissae must be strictly increasing (violation near index {0})")]
    NonIncreasingAbscissae(usize),
    #[error("length mismatch: {xs} abscissae vs {ys} ordinates")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("too few points: got {got}, need at least {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("underdetermined system: {points} distinct abscissae cannot fix degree {degree}")]
    Underdetermined { points: usize, degree: usize },
    #[error("degenerate abscissae: all sample positions coincide")]
    DegenerateAbscissae,
}

#[derive(Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("x = {x} outside curve domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
}

/// A fitted curve with analytic derivatives over a closed domain.
///
/// Evaluation outside the domain is an error, not extrapolation.
pub trait Curve1D<F: Real> {
    /// Closed interval of fitted abscissae.
    fn domain(&self) -> (F, F);

    fn value(&self, x: F) -> Result<F, CurveError>;
    fn deriv1(&self, x: F) -> Result<F, CurveError>;
    fn deriv2(&self, x: F) -> Result<F, CurveError>;
}

pub(crate) fn check_domain<F: Real>(x: F, lo: F, hi: F) -> Result<(), CurveError> {
    if x < lo || x > hi || x.is_nan() {
        return Err(CurveError::OutOfDomain {
            x: x.to_f64().unwrap_or(f64::NAN),
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Uniform evaluation grid `lo, lo+step, ...` capped at `hi`, always
/// containing both endpoints: `ceil((hi-lo)/step) + 1` points.
pub fn uniform_grid<F: Real>(lo: F, hi: F, step: F) -> Vec<F> {
    debug_assert!(step > F::zero() && hi > lo);
    let ratio = (hi - lo) / step;
    let n_steps = (ratio - F::of(1e-9)).ceil().max(F::one()).to_usize().unwrap();
    (0..=n_steps)
        .map(|k| {
            let x = lo + F::from_usize(k).unwrap() * step;
            if x > hi {
                hi
            } else {
                x
            }
        })
        .collect()
}

/// Samples a curve onto CSV rows `x,value,deriv1,deriv2` over the uniform grid.
pub fn write_curve_csv<F: Real, C: Curve1D<F> + ?Sized, W: Write>(
    curve: &C,
    grid_step: F,
    mut w: W,
) -> std::io::Result<()> {
    let (lo, hi) = curve.domain();
    writeln!(w, "x,value,deriv1,deriv2")?;
    for x in uniform_grid(lo, hi, grid_step) {
        let v = curve.value(x).expect("grid point in domain");
        let d1 = curve.deriv1(x).expect("grid point in domain");
        let d2 = curve.deriv2(x).expect("grid point in domain");
        writeln!(w, "{x},{v},{d1},{d2}")?;
    }
    Ok(())
}
