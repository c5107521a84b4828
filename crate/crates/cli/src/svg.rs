//! Hand-rolled SVG log-log plot: per-n whisker marks (min, Q1, median,
//! Q3, max), the per-n mean, and the fitted power law. No plotting
//! dependency; the output is deterministic for fixed input.

use lers::stats::{ExponentEstimate, SizeSummary};
use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 46.0;
const MARGIN_B: f64 = 58.0;

struct Mapper {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Mapper {
    fn x(&self, ln_n: f64) -> f64 {
        let t = (ln_n - self.x_lo) / (self.x_hi - self.x_lo);
        MARGIN_L + t * (WIDTH - MARGIN_L - MARGIN_R)
    }
    fn y(&self, ln_v: f64) -> f64 {
        let t = (ln_v - self.y_lo) / (self.y_hi - self.y_lo);
        HEIGHT - MARGIN_B - t * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

/// Renders the whisker plot for `summaries` with `estimate`'s fitted
/// line. Values must be positive (they are surface sizes).
pub fn log_log_plot(summaries: &[SizeSummary], estimate: &ExponentEstimate, hypothesis: f64) -> String {
    assert!(!summaries.is_empty());
    let x_values: Vec<f64> = summaries.iter().map(|s| f64::from(s.n).ln()).collect();
    let pad = 0.05;
    let (x_min, x_max) = bounds(&x_values);
    let y_all: Vec<f64> = summaries
        .iter()
        .flat_map(|s| [s.min.ln(), s.max.ln()])
        .collect();
    let (y_min, y_max) = bounds(&y_all);
    let map = Mapper {
        x_lo: x_min - pad * (x_max - x_min).max(1e-9),
        x_hi: x_max + pad * (x_max - x_min).max(1e-9),
        y_lo: y_min - pad * (y_max - y_min).max(1e-9),
        y_hi: y_max + pad * (y_max - y_min).max(1e-9),
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="13" text-anchor="middle">n (log scale)</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" font-family="monospace" font-size="13" transform="rotate(-90 16 {:.1})" text-anchor="middle">surface size (log scale)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    // y decade labels
    let mut decade = y_min.exp().log10().floor() as i32;
    loop {
        let value = 10f64.powi(decade);
        let ln_v = value.ln();
        if ln_v > map.y_hi {
            break;
        }
        if ln_v >= map.y_lo {
            let y = map.y(ln_v);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#bbbbbb" stroke-dasharray="3 4"/>"##,
                x0, x1
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="monospace" font-size="12" text-anchor="end">{value}</text>"#,
                x0 - 6.0,
                y + 4.0
            );
        }
        decade += 1;
    }

    // fitted line across the full x span
    let fit_y = |ln_n: f64| estimate.intercept + estimate.slope * ln_n;
    let _ = writeln!(
        svg,
        r##"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#c03030" stroke-width="1.5"/>"##,
        map.x(map.x_lo),
        map.y(fit_y(map.x_lo)),
        map.x(map.x_hi),
        map.y(fit_y(map.x_hi))
    );

    // whiskers
    for s in summaries {
        let x = map.x(f64::from(s.n).ln());
        let tick = 7.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            map.y(s.min.ln()),
            map.y(s.max.ln())
        );
        for (value, half) in [
            (s.min, tick),
            (s.q1, tick * 1.6),
            (s.median, tick * 2.2),
            (s.q3, tick * 1.6),
            (s.max, tick),
        ] {
            let y = map.y(value.ln());
            let _ = writeln!(
                svg,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/>"#,
                x - half,
                x + half
            );
        }
        let _ = writeln!(
            svg,
            r##"<circle cx="{x:.1}" cy="{:.1}" r="3" fill="#2060c0"/>"##,
            map.y(s.mean.ln())
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            s.n
        );
    }

    // headline annotation
    let headline = match &estimate.bootstrap {
        Some(b) => {
            let verdict = if hypothesis >= b.lo && hypothesis <= b.hi {
                "inside"
            } else {
                "outside"
            };
            format!(
                "slope {:.4}, {:.0}% CI [{:.4}, {:.4}], 48/19 = {:.4} {verdict}",
                estimate.slope,
                (1.0 - b.alpha) * 100.0,
                b.lo,
                b.hi,
                hypothesis
            )
        }
        None => format!("slope {:.4} (no bootstrap)", estimate.slope),
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="monospace" font-size="14" text-anchor="middle">{headline}</text>"#,
        WIDTH / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
