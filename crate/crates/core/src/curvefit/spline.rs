//! Interpolating cubic splines via the tridiagonal moment system.

use crate::real::Real;

use super::{check_domain, Boundary, Curve1D, CurveError, CurveFitError};

/// Piecewise cubic `a + b t + c t^2 + d t^3`, `t = x - breaks[i]`, on each
/// interval `[breaks[i], breaks[i+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCubic<F> {
    breaks: Vec<F>,
    coeffs: Vec<[F; 4]>,
}

impl<F: Real> PiecewiseCubic<F> {
    pub fn breaks(&self) -> &[F] {
        &self.breaks
    }

    /// Per-interval `(a, b, c, d)` quadruples.
    pub fn coeffs(&self) -> &[[F; 4]] {
        &self.coeffs
    }

    /// Index of the interval containing `x` (assumes `x` is in the domain).
    fn locate(&self, x: F) -> usize {
        let idx = self.breaks.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(self.coeffs.len() - 1)
    }
}

impl<F: Real> Curve1D<F> for PiecewiseCubic<F> {
    fn domain(&self) -> (F, F) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    fn value(&self, x: F) -> Result<F, CurveError> {
        let (lo, hi) = self.domain();
        check_domain(x, lo, hi)?;
        let i = self.locate(x);
        let [a, b, c, d] = self.coeffs[i];
        let t = x - self.breaks[i];
        Ok(a + t * (b + t * (c + t * d)))
    }

    fn deriv1(&self, x: F) -> Result<F, CurveError> {
        let (lo, hi) = self.domain();
        check_domain(x, lo, hi)?;
        let i = self.locate(x);
        let [_, b, c, d] = self.coeffs[i];
        let t = x - self.breaks[i];
        let two = F::of(2.0);
        let three = F::of(3.0);
        Ok(b + t * (two * c + t * three * d))
    }

    fn deriv2(&self, x: F) -> Result<F, CurveError> {
        let (lo, hi) = self.domain();
        check_domain(x, lo, hi)?;
        let i = self.locate(x);
        let [_, _, c, d] = self.coeffs[i];
        let t = x - self.breaks[i];
        Ok(F::of(2.0) * c + F::of(6.0) * d * t)
    }
}

/// Solves a tridiagonal system in place with the Thomas algorithm.
///
/// `sub` and `sup` are one element shorter than `diag`/`rhs`. The spline
/// systems are diagonally dominant, so no pivoting is needed.
fn thomas<F: Real>(sub: &[F], diag: &[F], sup: &[F], rhs: &[F]) -> Vec<F> {
    let n = diag.len();
    debug_assert_eq!(rhs.len(), n);
    debug_assert_eq!(sub.len(), n - 1);
    debug_assert_eq!(sup.len(), n - 1);

    let mut c_prime = vec![F::zero(); n];
    let mut d_prime = vec![F::zero(); n];
    c_prime[0] = sup.first().copied().unwrap_or(F::zero()) / diag[0];
    d_prime[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i - 1] * c_prime[i - 1];
        if i < n - 1 {
            c_prime[i] = sup[i] / denom;
        }
        d_prime[i] = (rhs[i] - sub[i - 1] * d_prime[i - 1]) / denom;
    }
    let mut x = vec![F::zero(); n];
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d_prime[i] - c_prime[i] * x[i + 1];
    }
    x
}

fn validate<F: Real>(xs: &[F], ys: &[F]) -> Result<(), CurveFitError> {
    if xs.len() != ys.len() {
        return Err(CurveFitError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    if xs.len() < 2 {
        return Err(CurveFitError::TooFewPoints { got: xs.len(), need: 2 });
    }
    for (i, pair) in xs.windows(2).enumerate() {
        if pair[1] <= pair[0] {
            return Err(CurveFitError::NonIncreasingAbscissae(i));
        }
    }
    Ok(())
}

/// Fits an interpolating cubic spline through `(xs[i], ys[i])`.
///
/// Two points degrade to a straight segment, three points under not-a-knot
/// to the unique parabola; otherwise the interior second derivatives are
/// solved from the standard tridiagonal system.
pub fn fit_spline<F: Real>(
    xs: &[F],
    ys: &[F],
    boundary: Boundary,
) -> Result<PiecewiseCubic<F>, CurveFitError> {
    validate(xs, ys)?;
    let n = xs.len();

    if n == 2 {
        let slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return Ok(PiecewiseCubic {
            breaks: xs.to_vec(),
            coeffs: vec![[ys[0], slope, F::zero(), F::zero()]],
        });
    }
    if n == 3 && boundary == Boundary::NotAKnot {
        return Ok(quadratic_through_three(xs, ys));
    }

    let h: Vec<F> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let six = F::of(6.0);
    let two = F::of(2.0);

    // interior moment equations, unknowns M_1..M_{n-2}
    let m = n - 2;
    let mut sub = vec![F::zero(); m.saturating_sub(1)];
    let mut diag = vec![F::zero(); m];
    let mut sup = vec![F::zero(); m.saturating_sub(1)];
    let mut rhs = vec![F::zero(); m];
    for i in 1..=m {
        let r = six * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        rhs[i - 1] = r;
        diag[i - 1] = two * (h[i - 1] + h[i]);
        if i > 1 {
            sub[i - 2] = h[i - 1];
        }
        if i < m {
            sup[i - 1] = h[i];
        }
    }

    if boundary == Boundary::NotAKnot {
        // eliminate M_0 = (1 + h0/h1) M_1 - (h0/h1) M_2 from the first row
        let r0 = h[0] / h[1];
        diag[0] = F::of(3.0) * h[0] + two * h[1] + h[0] * r0;
        if m > 1 {
            sup[0] = h[1] - h[0] * r0;
        }
        // and M_{n-1} from the last row
        let rn = h[n - 2] / h[n - 3];
        diag[m - 1] = F::of(3.0) * h[n - 2] + two * h[n - 3] + h[n - 2] * rn;
        if m > 1 {
            sub[m - 2] = h[n - 3] - h[n - 2] * rn;
        }
    }

    let interior = thomas(&sub, &diag, &sup, &rhs);

    let mut moments = vec![F::zero(); n];
    moments[1..=m].copy_from_slice(&interior);
    if boundary == Boundary::NotAKnot {
        let r0 = h[0] / h[1];
        moments[0] = (F::one() + r0) * moments[1] - r0 * moments[2];
        let rn = h[n - 2] / h[n - 3];
        moments[n - 1] = (F::one() + rn) * moments[n - 2] - rn * moments[n - 3];
    }

    let mut coeffs = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let a = ys[i];
        let b = (ys[i + 1] - ys[i]) / h[i] - h[i] * (two * moments[i] + moments[i + 1]) / six;
        let c = moments[i] / two;
        let d = (moments[i + 1] - moments[i]) / (six * h[i]);
        coeffs.push([a, b, c, d]);
    }
    Ok(PiecewiseCubic { breaks: xs.to_vec(), coeffs })
}

fn quadratic_through_three<F: Real>(xs: &[F], ys: &[F]) -> PiecewiseCubic<F> {
    let h0 = xs[1] - xs[0];
    let h1 = xs[2] - xs[1];
    let f01 = (ys[1] - ys[0]) / h0;
    let f12 = (ys[2] - ys[1]) / h1;
    let f012 = (f12 - f01) / (xs[2] - xs[0]);
    let two = F::of(2.0);
    let b0 = f01 - f012 * h0;
    let coeffs = vec![
        [ys[0], b0, f012, F::zero()],
        [ys[1], b0 + two * f012 * h0, f012, F::zero()],
    ];
    PiecewiseCubic { breaks: xs.to_vec(), coeffs }
}
