//! histoseg: histogram-valley image thresholding from the command line.

mod commands;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use histoseg_core::curvefit::CurveFitError;
use histoseg_core::histogram::HistogramError;
use histoseg_core::image_io::ImageIoError;
use histoseg_core::metrics::MetricsError;
use histoseg_core::postprocess::PostprocessError;
use histoseg_core::segment::SegmentError;
use histoseg_core::threshold::ThresholdError;

/// Exit codes: 0 success, 1 usage, 2 I/O or decode, 3 algorithmic failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Algorithm(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Algorithm(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Algorithm(m) => m,
        }
    }
}

impl From<ImageIoError> for CliError {
    fn from(e: ImageIoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<HistogramError> for CliError {
    fn from(e: HistogramError) -> Self {
        match e {
            HistogramError::DegenerateRange(_) => CliError::Algorithm(e.to_string()),
            HistogramError::BadFractions { .. } => CliError::Usage(e.to_string()),
            HistogramError::Io(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<CurveFitError> for CliError {
    fn from(e: CurveFitError) -> Self {
        CliError::Algorithm(e.to_string())
    }
}

impl From<ThresholdError> for CliError {
    fn from(e: ThresholdError) -> Self {
        CliError::Algorithm(e.to_string())
    }
}

impl From<SegmentError> for CliError {
    fn from(e: SegmentError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PostprocessError> for CliError {
    fn from(e: PostprocessError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::DimensionMismatch(..) => CliError::Io(e.to_string()),
            MetricsError::ZeroReference => CliError::Algorithm(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "histoseg",
    version,
    about = "Grayscale segmentation via histogram-valley thresholding (spline, polynomial fit, Otsu)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spline,
    Polyfit,
    Otsu,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveMethodArg {
    Spline,
    Polyfit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    #[value(name = "notaknot")]
    NotAKnot,
    Natural,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PreprocessArg {
    None,
    Equalize,
    Adjust,
}

/// Shared curve/threshold tuning flags.
#[derive(Clone, clap::Args)]
pub struct TuningArgs {
    /// Polynomial degree for the polyfit method
    #[arg(long, default_value_t = 10)]
    pub degree: usize,

    /// Prominence floor for candidate minima, as a fraction of the peak
    #[arg(long, default_value_t = 0.02)]
    pub min_prominence: f64,

    /// Derivative evaluation grid step in gray levels
    #[arg(long, default_value_t = 0.25)]
    pub grid_step: f64,

    /// Spline boundary condition
    #[arg(long, value_enum, default_value_t = BoundaryArg::NotAKnot)]
    pub boundary: BoundaryArg,
}

#[derive(Subcommand)]
enum Command {
    /// Write the 256-bin intensity histogram as `bin,count` CSV
    Hist {
        /// Input image (PGM P2/P5, or 8-bit gray/RGB PNG)
        input: PathBuf,
        /// Output CSV path
        #[arg(short, long)]
        out: PathBuf,
    },

    /// Select a threshold, segment the image, and write the binary PGM;
    /// the threshold report is printed to stdout as JSON
    Segment {
        input: PathBuf,
        /// Output PGM path for the segmentation
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Spline)]
        method: MethodArg,
        #[command(flatten)]
        tuning: TuningArgs,
        /// Intensity preprocessing before thresholding
        #[arg(long, value_enum, default_value_t = PreprocessArg::None)]
        preprocess: PreprocessArg,
        /// Cleanup of the binary output: none, blur, or small:N
        #[arg(long, default_value = "none")]
        postprocess: String,
        /// Dual-threshold band `th1,th2` in [0,1]; overrides --method
        #[arg(long)]
        band: Option<String>,
        /// Motion blur kernel length (odd)
        #[arg(long, default_value_t = 9)]
        blur_length: usize,
        /// Motion blur kernel angle in degrees (0 or 90)
        #[arg(long, default_value_t = 0)]
        blur_angle: u32,
        /// Low saturation fraction for --preprocess adjust
        #[arg(long, default_value_t = 0.01)]
        adjust_low: f64,
        /// High saturation fraction for --preprocess adjust
        #[arg(long, default_value_t = 0.99)]
        adjust_high: f64,
    },

    /// Segment with one or more methods and score each against a reference
    /// segmentation; writes a CSV table and prints a JSON report
    Compare {
        input: PathBuf,
        /// Reference (accurately segmented) image, same dimensions
        #[arg(short, long)]
        reference: PathBuf,
        /// Output CSV path
        #[arg(short, long)]
        out: PathBuf,
        /// Comma-separated method list, rows keep this order
        #[arg(long, default_value = "spline,polyfit,otsu")]
        methods: String,
        /// Contour connectivity (4 or 8)
        #[arg(long, default_value_t = 8)]
        connectivity: u8,
        #[command(flatten)]
        tuning: TuningArgs,
    },

    /// Render histogram bars, the fitted curve, minima markers and the
    /// selected threshold as SVG, with a sampled-curve CSV sidecar
    Plot {
        input: PathBuf,
        /// Output SVG path (the CSV sidecar swaps the extension)
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = CurveMethodArg::Spline)]
        method: CurveMethodArg,
        #[command(flatten)]
        tuning: TuningArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Hist { input, out } => commands::hist(&input, &out),
        Command::Segment {
            input,
            out,
            method,
            tuning,
            preprocess,
            postprocess,
            band,
            blur_length,
            blur_angle,
            adjust_low,
            adjust_high,
        } => commands::segment(&commands::SegmentArgs {
            input,
            out,
            method,
            tuning,
            preprocess,
            postprocess,
            band,
            blur_length,
            blur_angle,
            adjust_low,
            adjust_high,
        }),
        Command::Compare { input, reference, out, methods, connectivity, tuning } => {
            commands::compare(&input, &reference, &out, &methods, connectivity, &tuning)
        }
        Command::Plot { input, out, method, tuning } => {
            commands::plot(&input, &out, method, &tuning)
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
