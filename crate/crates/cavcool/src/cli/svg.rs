//! Minimal SVG rendering of the cooling curve: ensemble kinetic energy versus
//! time with the fitted exponential overlaid. No plotting dependency, just a
//! hand-assembled document, which keeps the output byte-stable.

use std::fs;
use std::io;
use std::path::Path;

use crate::analysis::FitResult;
use crate::integrator::EnsembleSeries;

const WIDTH: f64 = 840.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 82.0;
const MARGIN_RIGHT: f64 = 26.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 62.0;

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        let span = (self.x_hi - self.x_lo).max(f64::MIN_POSITIVE);
        MARGIN_LEFT + (t - self.x_lo) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, e: f64) -> f64 {
        let span = (self.y_hi - self.y_lo).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN_BOTTOM - (e - self.y_lo) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

/// Picks roughly `target` axis ticks with steps of 1, 2, or 5 times a power of
/// ten, covering `[lo, hi]`.
// the negated comparison deliberately routes NaN spans to the fallback
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw_step = span / target.max(2) as f64;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let residual = raw_step / magnitude;
    let step = if residual <= 1.5 {
        magnitude
    } else if residual <= 3.5 {
        2.0 * magnitude
    } else if residual <= 7.5 {
        5.0 * magnitude
    } else {
        10.0 * magnitude
    };
    let mut ticks = Vec::new();
    let mut v = (lo / step).ceil() * step;
    while v <= hi + 1e-9 * step {
        // snap near-zero accumulation error so labels read "0", not "1.2e-16"
        if v.abs() < 1e-9 * step {
            v = 0.0;
        }
        ticks.push(v);
        v += step;
    }
    ticks
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded = (v * 1e9).round() / 1e9;
    if rounded.abs() >= 1e5 || rounded.abs() < 1e-3 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn polyline(points: &[(f64, f64)], style: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", x, y))
        .collect();
    format!("  <polyline points=\"{}\" {} fill=\"none\"/>\n", coords.join(" "), style)
}

/// Renders the cooling curve (and the fitted exponential, when available) to an
/// SVG file.
pub fn write_cooling_plot(
    path: &Path,
    series: &EnsembleSeries,
    fit: Option<&FitResult>,
) -> io::Result<()> {
    let x_lo = series.t.first().copied().unwrap_or(0.0);
    let x_hi = series.t.last().copied().unwrap_or(1.0);
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for i in 0..series.t.len() {
        y_lo = y_lo.min(series.e_kin_mean[i] - series.e_kin_sem[i]);
        y_hi = y_hi.max(series.e_kin_mean[i] + series.e_kin_sem[i]);
    }
    if !y_lo.is_finite() || !y_hi.is_finite() {
        y_lo = 0.0;
        y_hi = 1.0;
    }
    let pad = 0.06 * (y_hi - y_lo).max(1e-12);
    let frame = Frame {
        x_lo,
        x_hi: if x_hi > x_lo { x_hi } else { x_lo + 1.0 },
        y_lo: y_lo - pad,
        y_hi: y_hi + pad,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"14\">\n",
        w = WIDTH,
        h = HEIGHT
    ));
    svg.push_str(&format!(
        "  <rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
        WIDTH, HEIGHT
    ));

    // gridlines and tick labels
    for tick in nice_ticks(frame.x_lo, frame.x_hi, 8) {
        let x = frame.x(tick);
        svg.push_str(&format!(
            "  <line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>\n",
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM
        ));
        svg.push_str(&format!(
            "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">{}</text>\n",
            HEIGHT - MARGIN_BOTTOM + 20.0,
            tick_label(tick)
        ));
    }
    for tick in nice_ticks(frame.y_lo, frame.y_hi, 6) {
        let y = frame.y(tick);
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>\n",
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#333333\">{}</text>\n",
            MARGIN_LEFT - 8.0,
            y + 5.0,
            tick_label(tick)
        ));
    }

    // standard-error band drawn under the mean curve
    if series.t.len() > 1 && series.e_kin_sem.iter().any(|s| *s > 0.0) {
        let mut band: Vec<(f64, f64)> = Vec::with_capacity(2 * series.t.len());
        for i in 0..series.t.len() {
            band.push((
                frame.x(series.t[i]),
                frame.y(series.e_kin_mean[i] + series.e_kin_sem[i]),
            ));
        }
        for i in (0..series.t.len()).rev() {
            band.push((
                frame.x(series.t[i]),
                frame.y(series.e_kin_mean[i] - series.e_kin_sem[i]),
            ));
        }
        let coords: Vec<String> = band
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", x, y))
            .collect();
        svg.push_str(&format!(
            "  <polygon points=\"{}\" fill=\"#1f77b4\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
            coords.join(" ")
        ));
    }

    // ensemble mean
    let data: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(&series.e_kin_mean)
        .map(|(&t, &e)| (frame.x(t), frame.y(e)))
        .collect();
    svg.push_str(&polyline(&data, "stroke=\"#1f77b4\" stroke-width=\"1.8\""));

    // fitted exponential overlay
    if let Some(fit) = fit {
        let samples = 256;
        let curve: Vec<(f64, f64)> = (0..=samples)
            .map(|i| {
                let t = frame.x_lo + (frame.x_hi - frame.x_lo) * i as f64 / samples as f64;
                let e = fit.plateau + (fit.e0 - fit.plateau) * (-t / fit.tau_c).exp();
                (frame.x(t), frame.y(e))
            })
            .collect();
        svg.push_str(&polyline(
            &curve,
            "stroke=\"#d62728\" stroke-width=\"1.8\" stroke-dasharray=\"7 4\"",
        ));

        // legend
        let lx = WIDTH - MARGIN_RIGHT - 250.0;
        let ly = MARGIN_TOP + 16.0;
        svg.push_str(&format!(
            "  <line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"#1f77b4\" stroke-width=\"1.8\"/>\n",
            lx + 34.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" fill=\"#333333\">ensemble mean</text>\n",
            lx + 42.0,
            ly + 5.0
        ));
        svg.push_str(&format!(
            "  <line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#d62728\" \
             stroke-width=\"1.8\" stroke-dasharray=\"7 4\"/>\n",
            ly + 22.0,
            lx + 34.0,
            ly + 22.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" fill=\"#333333\">fit: τ = {:.1}/κ, k_BT = {:.0} ω_R</text>\n",
            lx + 42.0,
            ly + 27.0,
            fit.tau_c,
            fit.k_b_t_omega_r
        ));
    }

    // frame and axis labels
    svg.push_str(&format!(
        "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444444\"/>\n",
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#111111\">time  [1/κ]</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        "  <text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#111111\" \
         transform=\"rotate(-90 20 {:.2})\">kinetic energy per atom  [ω_R]</text>\n",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0
    ));
    svg.push_str("</svg>\n");

    fs::write(path, svg)
}
