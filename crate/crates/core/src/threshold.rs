//! Threshold selection from a fitted histogram curve, plus the Otsu baseline.
//!
//! The curve pipeline walks the first derivative on a uniform grid, refines
//! each negative-to-positive crossing by bisection, certifies it with the
//! second derivative, prunes shallow valleys with a prominence floor, and
//! then picks the candidate whose neighborhood has the flattest slope by
//! sorting the gridded |f'| values in ascending order.

use serde::Serialize;
use thiserror::Error;

use crate::curvefit::{
    fit_poly, fit_spline, uniform_grid, Boundary, Curve1D, CurveError, CurveFitError,
    PiecewiseCubic, PolyCurve,
};
use crate::histogram::Histogram;
use crate::real::Real;

/// Default evaluation grid step in gray levels.
pub const GRID_STEP_DEFAULT: f64 = 0.25;
/// Default prominence floor as a fraction of the curve peak.
pub const MIN_PROMINENCE_DEFAULT: f64 = 0.02;
/// Default least-squares degree for the polyfit method.
pub const POLY_DEGREE_DEFAULT: usize = 10;

#[derive(Debug, Error)]
pub enum ThresholdError {
    #[error("no candidate minima survived; lower the prominence floor (--min-prominence)")]
    NoCandidates,
    #[error("degenerate histogram: all mass sits in bin {0}")]
    DegenerateHistogram(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Fit(#[from] CurveFitError),
}

/// Thresholding method identifier carried through reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spline,
    Polyfit,
    Otsu,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Method::Spline => "spline",
            Method::Polyfit => "polyfit",
            Method::Otsu => "otsu",
        };
        f.write_str(name)
    }
}

/// A certified local minimum of the fitted curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minimum<F> {
    /// Refined abscissa of the minimum, in gray levels.
    pub x: F,
    /// Curve ordinate at `x` (count units).
    pub value: F,
    /// |f'| at the detection grid point nearest to `x`.
    pub deriv1_abs: F,
    /// Rise from the minimum to the lower of its two flanking maxima.
    pub prominence: F,
}

/// Output of [`find_minima`]: the surviving candidates and the valleys the
/// prominence floor discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaScan<F> {
    pub accepted: Vec<Minimum<F>>,
    pub rejected: Vec<Minimum<F>>,
}

impl<F> Default for MinimaScan<F> {
    fn default() -> Self {
        Self { accepted: Vec::new(), rejected: Vec::new() }
    }
}

/// Chosen threshold with its audit trail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult<F> {
    pub method: Method,
    /// Threshold in [0, 1]; `threshold_norm * 255 == gray_level` exactly.
    pub threshold_norm: F,
    /// Threshold in gray levels [0, 255].
    pub gray_level: F,
    pub candidates: Vec<Minimum<F>>,
    pub rejected: Vec<Minimum<F>>,
}

/// Scans `deriv1` for negative-to-positive crossings on a uniform grid,
/// refines each by bisection, and filters the resulting minima by prominence.
///
/// A monotone curve yields an empty scan; that is not an error.
pub fn find_minima<F: Real, C: Curve1D<F> + ?Sized>(
    curve: &C,
    grid_step: F,
    min_prominence_frac: F,
) -> Result<MinimaScan<F>, ThresholdError> {
    let (lo, hi) = curve.domain();
    let grid = uniform_grid(lo, hi, grid_step);
    let mut deriv = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    for &x in &grid {
        deriv.push(curve.deriv1(x)?);
        values.push(curve.value(x)?);
    }
    let peak = values.iter().fold(F::neg_infinity(), |m, &v| m.max(v));
    let floor = min_prominence_frac * peak;

    let mut scan = MinimaScan::default();
    for i in 0..grid.len() - 1 {
        if !(deriv[i] < F::zero() && deriv[i + 1] >= F::zero()) {
            continue;
        }
        let x = refine_crossing(curve, grid[i], grid[i + 1])?;
        if curve.deriv2(x)? <= F::zero() {
            continue; // saddle or flat, not a strict minimum
        }
        let value = curve.value(x)?;
        let k = if x - grid[i] <= grid[i + 1] - x { i } else { i + 1 };
        let minimum = Minimum {
            x,
            value,
            deriv1_abs: deriv[k].abs(),
            prominence: prominence_at(&values, k, value),
        };
        if minimum.prominence < floor {
            scan.rejected.push(minimum);
        } else {
            scan.accepted.push(minimum);
        }
    }
    Ok(scan)
}

/// Bisects `deriv1` over `[a, b]` (negative at `a`) down to an interval
/// shorter than 1e-6 and returns its midpoint.
fn refine_crossing<F: Real, C: Curve1D<F> + ?Sized>(
    curve: &C,
    mut a: F,
    mut b: F,
) -> Result<F, ThresholdError> {
    let tol = F::of(1e-6);
    let half = F::of(0.5);
    for _ in 0..80 {
        if b - a < tol {
            break;
        }
        let mid = (a + b) * half;
        if mid <= a || mid >= b {
            break; // interval below representable resolution
        }
        if curve.deriv1(mid)? < F::zero() {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a + b) * F::of(0.5))
}

/// Valley prominence on the sampled grid: walk outward from index `k` until
/// the curve drops below the minimum, tracking the highest point met on each
/// side; the lower of the two flank maxima bounds the rise.
fn prominence_at<F: Real>(values: &[F], k: usize, min_value: F) -> F {
    let mut left_max = values[k];
    let mut j = k;
    while j > 0 {
        j -= 1;
        if values[j] < min_value {
            break;
        }
        left_max = left_max.max(values[j]);
    }
    let mut right_max = values[k];
    let mut j = k;
    while j + 1 < values.len() {
        j += 1;
        if values[j] < min_value {
            break;
        }
        right_max = right_max.max(values[j]);
    }
    left_max.min(right_max) - min_value
}

/// Picks the threshold among candidate minima.
///
/// The gridded |f'| values are sorted ascending (ties to the smaller x) and
/// walked in order; the first grid point within `grid_step` of a candidate
/// elects that candidate. Should the walk match nothing, the candidate with
/// the smallest recorded |f'| wins. The result is invariant under
/// permutation of the candidate list.
pub fn select_threshold<F: Real, C: Curve1D<F> + ?Sized>(
    method: Method,
    scan: MinimaScan<F>,
    curve: &C,
    grid_step: F,
) -> Result<ThresholdResult<F>, ThresholdError> {
    let MinimaScan { mut accepted, mut rejected } = scan;
    if accepted.is_empty() {
        return Err(ThresholdError::NoCandidates);
    }
    let by_x = |a: &Minimum<F>, b: &Minimum<F>| a.x.partial_cmp(&b.x).expect("finite x");
    accepted.sort_by(by_x);
    rejected.sort_by(by_x);

    let (lo, hi) = curve.domain();
    let grid = uniform_grid(lo, hi, grid_step);
    let mut order: Vec<(usize, F)> = Vec::with_capacity(grid.len());
    for (i, &x) in grid.iter().enumerate() {
        order.push((i, curve.deriv1(x)?.abs()));
    }
    order.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .expect("finite derivative")
            .then(a.0.cmp(&b.0))
    });

    let mut chosen = None;
    'walk: for &(i, _) in &order {
        let xg = grid[i];
        // nearest candidate within one grid step; candidates are sorted by
        // x, so a strict comparison resolves distance ties to the smaller x
        let mut nearest: Option<(usize, F)> = None;
        for (ci, c) in accepted.iter().enumerate() {
            let dist = (xg - c.x).abs();
            if dist <= grid_step && nearest.map_or(true, |(_, best)| dist < best) {
                nearest = Some((ci, dist));
            }
        }
        if let Some((ci, _)) = nearest {
            chosen = Some(ci);
            break 'walk;
        }
    }
    let chosen = chosen.unwrap_or_else(|| {
        // no grid point adjacent to any candidate: fall back to the flattest
        let mut best = 0;
        for (ci, c) in accepted.iter().enumerate() {
            if c.deriv1_abs < accepted[best].deriv1_abs {
                best = ci;
            }
        }
        best
    });

    // renormalize so threshold_norm * 255 reproduces gray_level bit-exactly
    let full = F::of(255.0);
    let threshold_norm = accepted[chosen].x / full;
    let gray_level = threshold_norm * full;
    accepted[chosen].x = gray_level;

    Ok(ThresholdResult { method, threshold_norm, gray_level, candidates: accepted, rejected })
}

/// Runs the full curve pipeline: minima scan then selection.
pub fn threshold_from_curve<F: Real, C: Curve1D<F> + ?Sized>(
    method: Method,
    curve: &C,
    grid_step: F,
    min_prominence_frac: F,
) -> Result<ThresholdResult<F>, ThresholdError> {
    let scan = find_minima(curve, grid_step, min_prominence_frac)?;
    select_threshold(method, scan, curve, grid_step)
}

/// Interpolating spline through the 256 histogram bins.
pub fn fit_histogram_spline<F: Real>(
    hist: &Histogram,
    boundary: Boundary,
) -> Result<PiecewiseCubic<F>, CurveFitError> {
    let (xs, ys) = histogram_points(hist);
    fit_spline(&xs, &ys, boundary)
}

/// Least-squares polynomial over the 256 histogram bins.
pub fn fit_histogram_poly<F: Real>(
    hist: &Histogram,
    degree: usize,
) -> Result<PolyCurve<F>, CurveFitError> {
    let (xs, ys) = histogram_points(hist);
    fit_poly(&xs, &ys, degree)
}

fn histogram_points<F: Real>(hist: &Histogram) -> (Vec<F>, Vec<F>) {
    let xs = (0..256).map(|v| F::from_usize(v).unwrap()).collect();
    let ys = hist.counts().iter().map(|&c| F::from_u64(c).unwrap()).collect();
    (xs, ys)
}

/// Otsu's threshold: the split maximizing the between-class variance
/// `w0 * w1 * (mu0 - mu1)^2`, smallest maximizer on ties.
pub fn otsu<F: Real>(hist: &Histogram) -> Result<ThresholdResult<F>, ThresholdError> {
    if hist.nonzero_bins() < 2 {
        let bin = hist.counts().iter().position(|&c| c > 0).unwrap_or(0);
        return Err(ThresholdError::DegenerateHistogram(bin));
    }
    let total = F::from_u64(hist.total()).unwrap();
    let mut sum_all = F::zero();
    for (v, &c) in hist.counts().iter().enumerate() {
        sum_all = sum_all + F::from_usize(v).unwrap() * F::from_u64(c).unwrap();
    }

    let mut best_t = 0usize;
    let mut best_var = F::neg_infinity();
    let mut w0 = F::zero();
    let mut sum0 = F::zero();
    for (t, &c) in hist.counts().iter().enumerate() {
        let count = F::from_u64(c).unwrap();
        w0 = w0 + count;
        if w0 == F::zero() {
            continue;
        }
        let w1 = total - w0;
        if w1 == F::zero() {
            break;
        }
        sum0 = sum0 + F::from_usize(t).unwrap() * count;
        let mu0 = sum0 / w0;
        let mu1 = (sum_all - sum0) / w1;
        let omega0 = w0 / total;
        let omega1 = w1 / total;
        let diff = mu0 - mu1;
        let var = omega0 * omega1 * diff * diff;
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }

    let full = F::of(255.0);
    let threshold_norm = F::from_usize(best_t).unwrap() / full;
    let gray_level = threshold_norm * full;
    Ok(ThresholdResult {
        method: Method::Otsu,
        threshold_norm,
        gray_level,
        candidates: Vec::new(),
        rejected: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Analytic curve over a closed domain, for exercising the scan without
    /// going through a fit.
    struct Analytic {
        lo: f64,
        hi: f64,
        f: fn(f64) -> f64,
        d1: fn(f64) -> f64,
        d2: fn(f64) -> f64,
    }

    impl Curve1D<f64> for Analytic {
        fn domain(&self) -> (f64, f64) {
            (self.lo, self.hi)
        }
        fn value(&self, x: f64) -> Result<f64, CurveError> {
            crate::curvefit::check_domain(x, self.lo, self.hi)?;
            Ok((self.f)(x))
        }
        fn deriv1(&self, x: f64) -> Result<f64, CurveError> {
            crate::curvefit::check_domain(x, self.lo, self.hi)?;
            Ok((self.d1)(x))
        }
        fn deriv2(&self, x: f64) -> Result<f64, CurveError> {
            crate::curvefit::check_domain(x, self.lo, self.hi)?;
            Ok((self.d2)(x))
        }
    }

    fn parabola() -> Analytic {
        Analytic {
            lo: 0.0,
            hi: 255.0,
            f: |x| (x - 128.0) * (x - 128.0),
            d1: |x| 2.0 * (x - 128.0),
            d2: |_| 2.0,
        }
    }

    #[test]
    fn parabola_single_minimum() {
        let scan = find_minima(&parabola(), 0.25, 0.02).unwrap();
        assert_eq!(scan.accepted.len(), 1);
        assert!(scan.rejected.is_empty());
        let m = &scan.accepted[0];
        assert!((m.x - 128.0).abs() < 1e-4, "x = {}", m.x);
        // lower flank is the right domain edge: (255-128)^2 = 16129
        assert!((m.prominence - 16129.0).abs() < 1e-6);
        assert!(m.value < 1e-8);
    }

    #[test]
    fn monotone_curve_has_no_minima() {
        let rising = Analytic { lo: 0.0, hi: 255.0, f: |x| 3.0 * x + 1.0, d1: |_| 3.0, d2: |_| 0.0 };
        let scan = find_minima(&rising, 0.25, 0.02).unwrap();
        assert!(scan.accepted.is_empty() && scan.rejected.is_empty());
        assert!(matches!(
            select_threshold(Method::Spline, scan, &rising, 0.25),
            Err(ThresholdError::NoCandidates)
        ));
    }

    #[test]
    fn single_candidate_divided_by_255() {
        let curve = parabola();
        let result = threshold_from_curve(Method::Spline, &curve, 0.25, 0.02).unwrap();
        assert!((result.threshold_norm - 128.0 / 255.0).abs() < 1e-6);
        assert_eq!(result.threshold_norm * 255.0, result.gray_level);
        assert_eq!(result.candidates[0].x, result.gray_level);
        assert_eq!(result.candidates.len(), 1);
    }

    #[test]
    fn flat_valley_beats_steep_notch() {
        // wide dip near 60.1, sharp notch near 200.1, both depth 10
        fn f(x: f64) -> f64 {
            let a = (x - 60.1) / 25.0;
            let b = (x - 200.1) / 2.0;
            20.0 - 10.0 * (-a * a).exp() - 10.0 * (-b * b).exp()
        }
        fn d1(x: f64) -> f64 {
            let a = (x - 60.1) / 25.0;
            let b = (x - 200.1) / 2.0;
            10.0 * (2.0 * a / 25.0) * (-a * a).exp() + 10.0 * (2.0 * b / 2.0) * (-b * b).exp()
        }
        fn d2(x: f64) -> f64 {
            let a = (x - 60.1) / 25.0;
            let b = (x - 200.1) / 2.0;
            10.0 * (2.0 / (25.0 * 25.0)) * (1.0 - 2.0 * a * a) * (-a * a).exp()
                + 10.0 * (2.0 / 4.0) * (1.0 - 2.0 * b * b) * (-b * b).exp()
        }
        let curve = Analytic { lo: 0.0, hi: 255.0, f, d1, d2 };

        let scan = find_minima(&curve, 0.25, 0.02).unwrap();
        assert_eq!(scan.accepted.len(), 2);

        // independent oracle: exhaustively sort the gridded |f'| and take the
        // first grid point adjacent to either refined minimum
        let grid = uniform_grid(0.0, 255.0, 0.25);
        let mut order: Vec<(f64, f64)> = grid.iter().map(|&x| (d1(x).abs(), x)).collect();
        order.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mins: Vec<f64> = scan.accepted.iter().map(|m| m.x).collect();
        let oracle_x = order
            .iter()
            .find_map(|&(_, xg)| {
                mins.iter()
                    .copied()
                    .find(|m| (xg - m).abs() <= 0.25)
            })
            .unwrap();
        assert!((oracle_x - 60.1).abs() < 1e-3, "oracle picked {oracle_x}");

        let result = select_threshold(Method::Spline, scan, &curve, 0.25).unwrap();
        assert!((result.gray_level - 60.1).abs() < 1e-3);
    }

    #[test]
    fn symmetric_tie_breaks_to_smaller_x() {
        // identical W-shaped wells at 100 and 200, symmetric about 150
        fn f(x: f64) -> f64 {
            let u = x - 150.0;
            let w = (u * u - 2500.0) / 1000.0;
            w * w
        }
        fn d1(x: f64) -> f64 {
            let u = x - 150.0;
            4.0 * u * (u * u - 2500.0) / 1_000_000.0
        }
        fn d2(x: f64) -> f64 {
            let u = x - 150.0;
            (12.0 * u * u - 10_000.0) / 1_000_000.0
        }
        let curve = Analytic { lo: 0.0, hi: 300.0, f, d1, d2 };
        let result = threshold_from_curve(Method::Spline, &curve, 0.25, 0.0).unwrap();
        assert_eq!(result.candidates.len(), 2);
        assert!((result.gray_level - 100.0).abs() < 1e-4, "got {}", result.gray_level);
    }

    #[test]
    fn selection_invariant_under_candidate_permutation() {
        fn f(x: f64) -> f64 {
            let a = (x - 60.1) / 25.0;
            let b = (x - 200.1) / 2.0;
            20.0 - 10.0 * (-a * a).exp() - 10.0 * (-b * b).exp()
        }
        fn d1(x: f64) -> f64 {
            let a = (x - 60.1) / 25.0;
            let b = (x - 200.1) / 2.0;
            10.0 * (2.0 * a / 25.0) * (-a * a).exp() + 10.0 * (2.0 * b / 2.0) * (-b * b).exp()
        }
        fn d2(x: f64) -> f64 {
            let a = (x - 60.1) / 25.0;
            let b = (x - 200.1) / 2.0;
            10.0 * (2.0 / 625.0) * (1.0 - 2.0 * a * a) * (-a * a).exp()
                + 0.5 * 10.0 * (1.0 - 2.0 * b * b) * (-b * b).exp()
        }
        let curve = Analytic { lo: 0.0, hi: 255.0, f, d1, d2 };
        let scan = find_minima(&curve, 0.25, 0.02).unwrap();
        let mut reversed = scan.clone();
        reversed.accepted.reverse();
        let a = select_threshold(Method::Spline, scan, &curve, 0.25).unwrap();
        let b = select_threshold(Method::Spline, reversed, &curve, 0.25).unwrap();
        assert_eq!(a, b);
    }

    fn hist_with(pairs: &[(usize, u64)]) -> Histogram {
        let mut counts = [0u64; 256];
        for &(bin, c) in pairs {
            counts[bin] = c;
        }
        Histogram::from_counts(counts)
    }

    /// From-scratch between-class variance for a given split.
    fn sigma_b(hist: &Histogram, t: usize) -> f64 {
        let total: u64 = hist.total();
        let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
        for (v, &c) in hist.counts().iter().enumerate() {
            if v <= t {
                n0 += c;
                s0 += v as u64 * c;
            } else {
                n1 += c;
                s1 += v as u64 * c;
            }
        }
        if n0 == 0 || n1 == 0 {
            return f64::NEG_INFINITY;
        }
        let w0 = n0 as f64 / total as f64;
        let w1 = n1 as f64 / total as f64;
        let mu0 = s0 as f64 / n0 as f64;
        let mu1 = s1 as f64 / n1 as f64;
        w0 * w1 * (mu0 - mu1) * (mu0 - mu1)
    }

    fn brute_force_otsu(hist: &Histogram) -> usize {
        let mut best = (0usize, f64::NEG_INFINITY);
        for t in 0..256 {
            let v = sigma_b(hist, t);
            if v > best.1 {
                best = (t, v);
            }
        }
        best.0
    }

    #[test]
    fn otsu_two_spikes_plateau_left_edge() {
        let hist = hist_with(&[(50, 10), (200, 10)]);
        // oracle confirms the plateau and its left edge
        let expect = brute_force_otsu(&hist);
        assert_eq!(expect, 50);
        let result: ThresholdResult<f64> = otsu(&hist).unwrap();
        assert_eq!(result.gray_level, 50.0);
        assert_eq!(result.threshold_norm * 255.0, result.gray_level);
        assert!(result.candidates.is_empty() && result.rejected.is_empty());
    }

    #[test]
    fn otsu_degenerate_single_bin() {
        let hist = hist_with(&[(7, 123)]);
        assert!(matches!(
            otsu::<f64>(&hist),
            Err(ThresholdError::DegenerateHistogram(7))
        ));
    }

    #[test]
    fn otsu_matches_exhaustive_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut counts = [0u64; 256];
            for c in counts.iter_mut() {
                *c = rng.gen_range(0..1000);
            }
            let hist = Histogram::from_counts(counts);
            if hist.nonzero_bins() < 2 {
                continue;
            }
            let got: ThresholdResult<f64> = otsu(&hist).unwrap();
            assert_eq!(got.gray_level, brute_force_otsu(&hist) as f64);
        }
    }

    #[test]
    fn count_scaling_leaves_thresholds_unchanged() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0u64; 256];
        for (v, c) in counts.iter_mut().enumerate() {
            // smooth-ish bimodal shape plus noise
            let x = v as f64;
            let shape = 400.0 * (-(x - 70.0) * (x - 70.0) / 800.0).exp()
                + 500.0 * (-(x - 190.0) * (x - 190.0) / 600.0).exp();
            *c = shape as u64 + rng.gen_range(0..5);
        }
        let base = Histogram::from_counts(counts);
        let spline_base = threshold_from_curve::<f64, _>(
            Method::Spline,
            &fit_histogram_spline::<f64>(&base, Boundary::NotAKnot).unwrap(),
            0.25,
            0.02,
        )
        .unwrap();
        let otsu_base: ThresholdResult<f64> = otsu(&base).unwrap();

        for k in [2u64, 4, 8] {
            let mut scaled = [0u64; 256];
            for (s, &c) in scaled.iter_mut().zip(&counts) {
                *s = c * k;
            }
            let hist = Histogram::from_counts(scaled);
            let spline_scaled = threshold_from_curve::<f64, _>(
                Method::Spline,
                &fit_histogram_spline::<f64>(&hist, Boundary::NotAKnot).unwrap(),
                0.25,
                0.02,
            )
            .unwrap();
            let otsu_scaled: ThresholdResult<f64> = otsu(&hist).unwrap();
            assert_eq!(spline_scaled.gray_level, spline_base.gray_level);
            assert_eq!(otsu_scaled.gray_level, otsu_base.gray_level);
        }
    }

    #[test]
    fn bimodal_histogram_single_surviving_valley() {
        // two-Gaussian histogram with enough mass that the valley carries
        // real counts (~150/bin); the prominence floor then leaves exactly
        // one survivor
        let counts = crate::synth::gaussian_mixture_counts(
            1 << 24,
            &[(60.0, 15.0, 0.5), (180.0, 15.0, 0.5)],
        );
        let hist = Histogram::from_counts(counts);
        let spline = fit_histogram_spline::<f64>(&hist, Boundary::NotAKnot).unwrap();
        let scan = find_minima(&spline, 0.25, 0.02).unwrap();
        assert_eq!(scan.accepted.len(), 1, "one survivor, got {:?}", scan.accepted);

        // independent oracle: numeric argmin of the generator's density
        // between the modes
        let density = |x: f64| -> f64 {
            0.5 * (-(x - 60.0) * (x - 60.0) / 450.0).exp() / 15.0
                + 0.5 * (-(x - 180.0) * (x - 180.0) / 450.0).exp() / 15.0
        };
        let mut argmin = 60.0f64;
        let mut best = f64::INFINITY;
        let mut x = 60.0;
        while x <= 180.0 {
            let d = density(x);
            if d < best {
                best = d;
                argmin = x;
            }
            x += 1e-3;
        }
        assert!((argmin - 120.0).abs() < 1e-6);
        assert!(
            (scan.accepted[0].x - argmin).abs() <= 3.0,
            "valley at {} vs oracle {argmin}",
            scan.accepted[0].x
        );
    }

    #[test]
    fn reported_minima_are_certified() {
        let curve = parabola();
        let scan = find_minima(&curve, 0.25, 0.0).unwrap();
        for m in scan.accepted.iter().chain(&scan.rejected) {
            assert!(curve.deriv2(m.x).unwrap() > 0.0);
            assert!(curve.deriv1(m.x).unwrap().abs() < 1e-4);
        }
    }

    #[test]
    fn walkless_fallback_picks_flattest_candidate() {
        // candidates far outside the grid's reach: the sorted walk matches
        // nothing and the smallest recorded |f'| wins
        let curve = parabola();
        let far = |x: f64, deriv1_abs: f64| Minimum {
            x,
            value: 1.0,
            deriv1_abs,
            prominence: 100.0,
        };
        let scan = MinimaScan {
            accepted: vec![far(500.0, 0.8), far(600.0, 0.2)],
            rejected: vec![],
        };
        let result = select_threshold(Method::Spline, scan, &curve, 0.25).unwrap();
        assert_eq!(result.gray_level, (600.0 / 255.0) * 255.0);
    }

    #[test]
    fn works_in_f32() {
        struct Par32;
        impl Curve1D<f32> for Par32 {
            fn domain(&self) -> (f32, f32) {
                (0.0, 255.0)
            }
            fn value(&self, x: f32) -> Result<f32, CurveError> {
                Ok((x - 128.0) * (x - 128.0))
            }
            fn deriv1(&self, x: f32) -> Result<f32, CurveError> {
                Ok(2.0 * (x - 128.0))
            }
            fn deriv2(&self, _: f32) -> Result<f32, CurveError> {
                Ok(2.0)
            }
        }
        let result = threshold_from_curve(Method::Spline, &Par32, 0.25f32, 0.02).unwrap();
        assert!((result.gray_level - 128.0).abs() < 1e-2);
        assert_eq!(result.threshold_norm * 255.0, result.gray_level);
    }

    #[test]
    fn result_json_schema() {
        let result = threshold_from_curve(Method::Spline, &parabola(), 0.25, 0.02).unwrap();
        let json = serde_json::to_value(&result).unwrap();
        assert_eq!(json["method"], "spline");
        for key in ["threshold_norm", "gray_level", "candidates", "rejected"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let cand = &json["candidates"][0];
        for key in ["x", "value", "deriv1_abs", "prominence"] {
            assert!(cand.get(key).is_some(), "candidate missing {key}");
        }

        let o: ThresholdResult<f64> =
            otsu(&hist_with(&[(10, 5), (200, 9)])).unwrap();
        let json = serde_json::to_value(&o).unwrap();
        assert_eq!(json["method"], "otsu");
        assert_eq!(json["candidates"].as_array().unwrap().len(), 0);
    }
}
