//! Self-contained SVG rendering of a histogram, its fitted curve, the
//! detected minima, and the selected threshold.

use std::fmt::Write;

use histoseg_core::curvefit::{uniform_grid, Curve1D};
use histoseg_core::threshold::MinimaScan;
use histoseg_core::{Histogram, ThresholdResult64};

const GENERATOR: &str = "histoseg plot v1";

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 24.0;
const MARGIN_BOTTOM: f64 = 44.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_lo) / (self.x_hi - self.x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let span = (self.y_hi - self.y_lo).max(1.0);
        HEIGHT - MARGIN_BOTTOM - (y - self.y_lo) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

pub fn render_svg(
    hist: &Histogram,
    curve: &dyn Curve1D<f64>,
    scan: &MinimaScan<f64>,
    selected: Option<&ThresholdResult64>,
    grid_step: f64,
) -> String {
    let (x_lo, x_hi) = curve.domain();
    let grid = uniform_grid(x_lo, x_hi, grid_step);
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, curve.value(x).expect("grid point in domain")))
        .collect();

    let peak = hist.max_count() as f64;
    let curve_min = samples.iter().fold(0.0f64, |m, &(_, v)| m.min(v));
    let curve_max = samples.iter().fold(0.0f64, |m, &(_, v)| m.max(v));
    let frame = Frame {
        x_lo,
        x_hi,
        y_lo: curve_min.min(0.0),
        y_hi: peak.max(curve_max) * 1.04,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "<!-- {GENERATOR} -->");
    let _ = writeln!(svg, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");

    // histogram bars
    let bar_w = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 256.0;
    let base = frame.py(0.0);
    for (bin, &count) in hist.counts().iter().enumerate() {
        if count == 0 {
            continue;
        }
        let x = frame.px(bin as f64) - bar_w / 2.0;
        let top = frame.py(count as f64);
        let _ = writeln!(
            svg,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#b8c9dd\"/>",
            x,
            top,
            bar_w,
            (base - top).max(0.0)
        );
    }

    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>",
        MARGIN_LEFT,
        base,
        WIDTH - MARGIN_RIGHT,
        base
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#333\"/>",
        MARGIN_LEFT,
        MARGIN_TOP,
        MARGIN_LEFT,
        base
    );
    for tick in [0.0, 64.0, 128.0, 192.0, 255.0] {
        if tick < x_lo || tick > x_hi {
            continue;
        }
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333\">{}</text>",
            frame.px(tick),
            HEIGHT - MARGIN_BOTTOM + 18.0,
            tick as u32
        );
    }
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" fill=\"#333\">{}</text>",
        MARGIN_LEFT - 6.0,
        MARGIN_TOP + 10.0,
        peak as u64
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" fill=\"#333\">0</text>",
        MARGIN_LEFT - 6.0,
        base + 4.0
    );

    // fitted curve
    let mut path = String::new();
    for (i, &(x, v)) in samples.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(path, "{}{:.2} {:.2} ", cmd, frame.px(x), frame.py(v));
    }
    let _ = writeln!(
        svg,
        "<path d=\"{}\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>",
        path.trim_end()
    );

    // minima markers: rejected in gray, candidates in orange
    for m in &scan.rejected {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#999999\"/>",
            frame.px(m.x),
            frame.py(m.value)
        );
    }
    for m in &scan.accepted {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#e07a00\"/>",
            frame.px(m.x),
            frame.py(m.value)
        );
    }

    match selected {
        Some(result) => {
            let x = frame.px(result.gray_level);
            let _ = writeln!(
                svg,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#c62828\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\" class=\"threshold\"/>",
                MARGIN_TOP, base
            );
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#c62828\">threshold {:.4} (gray {:.2})</text>",
                x + 6.0,
                MARGIN_TOP + 14.0,
                result.threshold_norm,
                result.gray_level
            );
        }
        None => {
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#c62828\">no threshold: no candidate minima</text>",
                MARGIN_LEFT + 10.0,
                MARGIN_TOP + 14.0
            );
        }
    }

    svg.push_str("</svg>\n");
    svg
}
