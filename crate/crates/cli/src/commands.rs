//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use histoseg_core::components::Connectivity;
use histoseg_core::curvefit::{write_curve_csv, Boundary, Curve1D};
use histoseg_core::image_io::{load_gray, save_binary, BinaryImage, GrayImage};
use histoseg_core::metrics::{count_contours, MetricsReport};
use histoseg_core::postprocess::{motion_blur_clean, remove_small, BlurAngle};
use histoseg_core::segment::{binarize, binarize_band};
use histoseg_core::threshold::{
    find_minima, fit_histogram_poly, fit_histogram_spline, otsu, select_threshold,
    threshold_from_curve, Method,
};
use histoseg_core::{adjust_intensity, compute_histogram, equalize, Histogram, ThresholdResult64};

use crate::{BoundaryArg, CliError, CurveMethodArg, MethodArg, PreprocessArg, TuningArgs};

pub fn hist(input: &Path, out: &Path) -> Result<(), CliError> {
    let img = load_gray(input)?;
    let mut buf = Vec::new();
    compute_histogram(&img).write_csv(&mut buf)?;
    fs::write(out, buf)?;
    Ok(())
}

pub struct SegmentArgs {
    pub input: PathBuf,
    pub out: PathBuf,
    pub method: MethodArg,
    pub tuning: TuningArgs,
    pub preprocess: PreprocessArg,
    pub postprocess: String,
    pub band: Option<String>,
    pub blur_length: usize,
    pub blur_angle: u32,
    pub adjust_low: f64,
    pub adjust_high: f64,
}

enum PostOpt {
    None,
    Blur,
    Small(usize),
}

fn parse_postprocess(s: &str) -> Result<PostOpt, CliError> {
    match s {
        "none" => Ok(PostOpt::None),
        "blur" => Ok(PostOpt::Blur),
        _ => {
            if let Some(n) = s.strip_prefix("small:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad area in --postprocess {s}")))?;
                Ok(PostOpt::Small(n))
            } else {
                Err(CliError::Usage(format!(
                    "--postprocess must be none, blur, or small:N (got {s})"
                )))
            }
        }
    }
}

fn parse_band(s: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let usage = || CliError::Usage(format!("--band expects th1,th2 in [0,1] (got {s})"));
    if parts.len() != 2 {
        return Err(usage());
    }
    let t1: f64 = parts[0].trim().parse().map_err(|_| usage())?;
    let t2: f64 = parts[1].trim().parse().map_err(|_| usage())?;
    if !(0.0..=1.0).contains(&t1) || !(0.0..=1.0).contains(&t2) || t1 > t2 {
        return Err(usage());
    }
    Ok((t1, t2))
}

fn parse_blur_angle(deg: u32) -> Result<BlurAngle, CliError> {
    match deg {
        0 => Ok(BlurAngle::Horizontal),
        90 => Ok(BlurAngle::Vertical),
        other => Err(CliError::Usage(format!("--blur-angle must be 0 or 90, got {other}"))),
    }
}

fn boundary_of(arg: BoundaryArg) -> Boundary {
    match arg {
        BoundaryArg::NotAKnot => Boundary::NotAKnot,
        BoundaryArg::Natural => Boundary::Natural,
    }
}

fn apply_preprocess(
    img: GrayImage,
    arg: PreprocessArg,
    low: f64,
    high: f64,
) -> Result<GrayImage, CliError> {
    Ok(match arg {
        PreprocessArg::None => img,
        PreprocessArg::Equalize => equalize(&img),
        PreprocessArg::Adjust => adjust_intensity(&img, low, high)?,
    })
}

fn threshold_for(
    hist: &Histogram,
    method: MethodArg,
    tuning: &TuningArgs,
) -> Result<ThresholdResult64, CliError> {
    Ok(match method {
        MethodArg::Spline => {
            let curve = fit_histogram_spline::<f64>(hist, boundary_of(tuning.boundary))?;
            threshold_from_curve(Method::Spline, &curve, tuning.grid_step, tuning.min_prominence)?
        }
        MethodArg::Polyfit => {
            let curve = fit_histogram_poly::<f64>(hist, tuning.degree)?;
            threshold_from_curve(Method::Polyfit, &curve, tuning.grid_step, tuning.min_prominence)?
        }
        MethodArg::Otsu => otsu(hist)?,
    })
}

pub fn segment(args: &SegmentArgs) -> Result<(), CliError> {
    let post = parse_postprocess(&args.postprocess)?;
    let img = load_gray(&args.input)?;
    let img = apply_preprocess(img, args.preprocess, args.adjust_low, args.adjust_high)?;

    let (bin, report) = if let Some(band) = &args.band {
        let (t1, t2) = parse_band(band)?;
        let bin = binarize_band(&img, t1, t2)?;
        let report = json!({ "method": "band", "th1_norm": t1, "th2_norm": t2 });
        (bin, serde_json::to_string(&report).unwrap())
    } else {
        let hist = compute_histogram(&img);
        let result = threshold_for(&hist, args.method, &args.tuning)?;
        let bin = binarize(&img, result.threshold_norm);
        (bin, serde_json::to_string(&result).unwrap())
    };

    let bin = match post {
        PostOpt::None => bin,
        PostOpt::Blur => motion_blur_clean(&bin, args.blur_length, parse_blur_angle(args.blur_angle)?)?,
        PostOpt::Small(n) => remove_small(&bin, n, Connectivity::Eight),
    };

    save_binary(&bin, &args.out)?;
    println!("{report}");
    Ok(())
}

/// Treats 0/1-valued images as raw label fields; anything else is
/// binarized at the midpoint.
fn reference_labels(img: &GrayImage) -> BinaryImage {
    if img.data().iter().all(|&v| v <= 1) {
        BinaryImage::new(img.width(), img.height(), img.data().to_vec()).unwrap()
    } else {
        binarize(img, 0.5)
    }
}

fn parse_methods(s: &str) -> Result<Vec<MethodArg>, CliError> {
    s.split(',')
        .map(|m| match m.trim() {
            "spline" => Ok(MethodArg::Spline),
            "polyfit" => Ok(MethodArg::Polyfit),
            "otsu" => Ok(MethodArg::Otsu),
            other => Err(CliError::Usage(format!("unknown method {other}"))),
        })
        .collect()
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Spline => "spline",
        MethodArg::Polyfit => "polyfit",
        MethodArg::Otsu => "otsu",
    }
}

pub fn compare(
    input: &Path,
    reference: &Path,
    out: &Path,
    methods: &str,
    connectivity: u8,
    tuning: &TuningArgs,
) -> Result<(), CliError> {
    let methods = parse_methods(methods)?;
    let conn = Connectivity::try_from(connectivity).map_err(CliError::Usage)?;
    let img = load_gray(input)?;
    let ref_img = load_gray(reference)?;
    if img.width() != ref_img.width() || img.height() != ref_img.height() {
        return Err(CliError::Io(format!(
            "dimension mismatch: input {}x{} vs reference {}x{}",
            img.width(),
            img.height(),
            ref_img.width(),
            ref_img.height()
        )));
    }
    let ref_bin = reference_labels(&ref_img);
    let ref_contours = count_contours(&ref_bin, conn);
    let hist = compute_histogram(&img);

    let mut csv = String::from("method,threshold_norm,gray_level,contours,deviation,mse_mean,mse_sum\n");
    csv.push_str(&format!("reference,,,{ref_contours},0,0,0\n"));
    let mut rows = Vec::new();
    for method in methods {
        let result = threshold_for(&hist, method, tuning)?;
        let bin = binarize(&img, result.threshold_norm);
        let report = MetricsReport::compare(&ref_bin, &bin, conn)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            method_name(method),
            result.threshold_norm,
            result.gray_level,
            report.contours_test,
            report.deviation,
            report.mse_mean,
            report.mse_sum,
        ));
        rows.push(json!({
            "method": method_name(method),
            "threshold_norm": result.threshold_norm,
            "gray_level": result.gray_level,
            "contours": report.contours_test,
            "deviation": report.deviation,
            "mse_mean": report.mse_mean,
            "mse_sum": report.mse_sum,
        }));
    }
    fs::write(out, csv)?;

    let report = json!({
        "reference": {
            "path": reference.display().to_string(),
            "contours": ref_contours,
            "width": ref_bin.width(),
            "height": ref_bin.height(),
            "connectivity": conn.as_u8(),
        },
        "rows": rows,
    });
    println!("{}", serde_json::to_string(&report).unwrap());
    Ok(())
}

pub fn plot(
    input: &Path,
    out: &Path,
    method: CurveMethodArg,
    tuning: &TuningArgs,
) -> Result<(), CliError> {
    let img = load_gray(input)?;
    let hist = compute_histogram(&img);
    let (curve, method_core): (Box<dyn Curve1D<f64>>, Method) = match method {
        CurveMethodArg::Spline => (
            Box::new(fit_histogram_spline::<f64>(&hist, boundary_of(tuning.boundary))?),
            Method::Spline,
        ),
        CurveMethodArg::Polyfit => (
            Box::new(fit_histogram_poly::<f64>(&hist, tuning.degree)?),
            Method::Polyfit,
        ),
    };

    let scan = find_minima(curve.as_ref(), tuning.grid_step, tuning.min_prominence)?;
    let selected = if scan.accepted.is_empty() {
        None
    } else {
        Some(select_threshold(method_core, scan.clone(), curve.as_ref(), tuning.grid_step)?)
    };

    let mut csv = Vec::new();
    write_curve_csv(curve.as_ref(), tuning.grid_step, &mut csv)?;
    fs::write(out.with_extension("csv"), csv)?;

    let svg = crate::plot::render_svg(&hist, curve.as_ref(), &scan, selected.as_ref(), tuning.grid_step);
    fs::write(out, svg)?;
    Ok(())
}
