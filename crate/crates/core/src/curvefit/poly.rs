//! Least-squares polynomial fitting in a scaled variable.

use crate::real::Real;

use super::{check_domain, Curve1D, CurveError, CurveFitError};

/// Polynomial `sum coeffs[k] * u^k` in the scaled variable
/// `u = (x - x_mid) / x_half`, which maps the fitted abscissa range onto
/// `[-1, 1]` so high-degree fits stay well conditioned.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve<F> {
    coeffs: Vec<F>,
    x_mid: F,
    x_half: F,
    x_lo: F,
    x_hi: F,
}

impl<F: Real> PolyCurve<F> {
    /// Builds a curve from explicit scaled-variable coefficients.
    pub fn from_scaled_coeffs(coeffs: Vec<F>, x_lo: F, x_hi: F) -> Self {
        assert!(!coeffs.is_empty() && x_hi > x_lo);
        let two = F::of(2.0);
        Self {
            coeffs,
            x_mid: (x_lo + x_hi) / two,
            x_half: (x_hi - x_lo) / two,
            x_lo,
            x_hi,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients in the scaled variable, constant term first.
    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn scale(&self) -> (F, F) {
        (self.x_mid, self.x_half)
    }

    fn to_u(&self, x: F) -> F {
        (x - self.x_mid) / self.x_half
    }

    fn horner(coeffs: &[F], u: F) -> F {
        coeffs.iter().rev().fold(F::zero(), |acc, &c| acc * u + c)
    }

    fn derived_coeffs(coeffs: &[F]) -> Vec<F> {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * F::from_usize(k).unwrap())
            .collect()
    }
}

impl<F: Real> Curve1D<F> for PolyCurve<F> {
    fn domain(&self) -> (F, F) {
        (self.x_lo, self.x_hi)
    }

    fn value(&self, x: F) -> Result<F, CurveError> {
        check_domain(x, self.x_lo, self.x_hi)?;
        Ok(Self::horner(&self.coeffs, self.to_u(x)))
    }

    fn deriv1(&self, x: F) -> Result<F, CurveError> {
        check_domain(x, self.x_lo, self.x_hi)?;
        let d1 = Self::derived_coeffs(&self.coeffs);
        if d1.is_empty() {
            return Ok(F::zero());
        }
        Ok(Self::horner(&d1, self.to_u(x)) / self.x_half)
    }

    fn deriv2(&self, x: F) -> Result<F, CurveError> {
        check_domain(x, self.x_lo, self.x_hi)?;
        let d1 = Self::derived_coeffs(&self.coeffs);
        let d2 = Self::derived_coeffs(&d1);
        if d2.is_empty() {
            return Ok(F::zero());
        }
        Ok(Self::horner(&d2, self.to_u(x)) / (self.x_half * self.x_half))
    }
}

/// Least-squares polynomial fit of the given degree.
///
/// The design matrix is built in the scaled variable and solved with
/// Householder QR, so no normal-equations squaring of the condition number.
pub fn fit_poly<F: Real>(xs: &[F], ys: &[F], degree: usize) -> Result<PolyCurve<F>, CurveFitError> {
    if xs.len() != ys.len() {
        return Err(CurveFitError::LengthMismatch { xs: xs.len(), ys: ys.len() });
    }
    let distinct = count_distinct(xs);
    if distinct < 2 {
        return Err(CurveFitError::DegenerateAbscissae);
    }
    if xs.len() < degree + 1 || distinct < degree + 1 {
        return Err(CurveFitError::Underdetermined { points: distinct, degree });
    }

    let (mut lo, mut hi) = (xs[0], xs[0]);
    for &x in xs {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let curve_frame = PolyCurve::from_scaled_coeffs(vec![F::zero()], lo, hi);

    let m = xs.len();
    let k = degree + 1;
    let mut design = vec![F::zero(); m * k];
    for (i, &x) in xs.iter().enumerate() {
        let u = curve_frame.to_u(x);
        let mut p = F::one();
        for j in 0..k {
            design[i * k + j] = p;
            p = p * u;
        }
    }
    let coeffs = householder_lsq(&mut design, m, k, ys)
        .ok_or(CurveFitError::Underdetermined { points: distinct, degree })?;

    Ok(PolyCurve { coeffs, ..curve_frame })
}

fn count_distinct<F: Real>(xs: &[F]) -> usize {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN abscissae"));
    sorted.dedup_by(|a, b| a == b);
    sorted.len()
}

/// Minimum-norm solve of `A x ~= y` for a tall row-major `m x k` matrix via
/// Householder reflections. Returns `None` on rank deficiency.
fn householder_lsq<F: Real>(a: &mut [F], m: usize, k: usize, ys: &[F]) -> Option<Vec<F>> {
    debug_assert!(m >= k);
    let mut rhs = ys.to_vec();
    for j in 0..k {
        let norm = (j..m).map(|i| a[i * k + j] * a[i * k + j]).fold(F::zero(), |s, v| s + v).sqrt();
        if norm == F::zero() {
            return None;
        }
        let alpha = if a[j * k + j] >= F::zero() { -norm } else { norm };
        let mut v = vec![F::zero(); m - j];
        v[0] = a[j * k + j] - alpha;
        for i in j + 1..m {
            v[i - j] = a[i * k + j];
        }
        let vtv = v.iter().map(|&x| x * x).fold(F::zero(), |s, x| s + x);
        if vtv > F::zero() {
            let two = F::of(2.0);
            for c in j..k {
                let dot = (j..m).map(|i| v[i - j] * a[i * k + c]).fold(F::zero(), |s, x| s + x);
                let f = two * dot / vtv;
                for i in j..m {
                    a[i * k + c] = a[i * k + c] - f * v[i - j];
                }
            }
            let dot = (j..m).map(|i| v[i - j] * rhs[i]).fold(F::zero(), |s, x| s + x);
            let f = two * dot / vtv;
            for i in j..m {
                rhs[i] = rhs[i] - f * v[i - j];
            }
        }
        a[j * k + j] = alpha;
        for i in j + 1..m {
            a[i * k + j] = F::zero();
        }
    }

    // back substitution on the upper triangle
    let mut x = vec![F::zero(); k];
    let tiny = F::epsilon() * F::from_usize(m).unwrap();
    for j in (0..k).rev() {
        let mut s = rhs[j];
        for c in j + 1..k {
            s = s - a[j * k + c] * x[c];
        }
        let diag = a[j * k + j];
        if diag.abs() <= tiny {
            return None;
        }
        x[j] = s / diag;
    }
    Some(x)
}
