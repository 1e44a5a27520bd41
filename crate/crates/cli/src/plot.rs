//! Standalone SVG rendering of experiment reports.
//!
//! Each scenario draws as one polyline of mean regret over rounds with a
//! vertical confidence whisker per checkpoint; the whisker spans mean minus
//! to mean plus one half-width under the linear y mapping exposed by
//! [`PlotGeometry`]. Bound curves render as dashed paths when requested.
//! Output is plain well-formed XML with no external references.

use std::fmt::Write as _;

use maximin_bandit::ExperimentReport;

pub const WIDTH: f64 = 840.0;
pub const HEIGHT: f64 = 520.0;
pub const MARGIN_LEFT: f64 = 70.0;
pub const MARGIN_RIGHT: f64 = 180.0;
pub const MARGIN_TOP: f64 = 30.0;
pub const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#17becf",
];

/// The linear data-to-pixel mapping used by the renderer. Tests rebuild it
/// to check coordinates against report values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotGeometry {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl PlotGeometry {
    /// Fit the axes to a report: x spans the checkpoints, y spans zero to
    /// the largest drawn value plus 5% headroom.
    pub fn for_report(report: &ExperimentReport<f64>, include_bounds: bool) -> Self {
        let x_min = report.checkpoints.first().copied().unwrap_or(1) as f64;
        let mut x_max = report.checkpoints.last().copied().unwrap_or(1) as f64;
        if x_max <= x_min {
            x_max = x_min + 1.0;
        }
        let mut top = 0.0f64;
        for scenario in &report.scenarios {
            for (mean, hw) in scenario.mean_regret.iter().zip(&scenario.ci_halfwidth) {
                top = top.max(mean + hw);
            }
            if include_bounds {
                for v in scenario.bound_t1.iter().chain(&scenario.bound_t2) {
                    top = top.max(*v);
                }
            }
        }
        if top <= 0.0 {
            top = 1.0;
        }
        Self {
            x_min,
            x_max,
            y_min: 0.0,
            y_max: top * 1.05,
        }
    }

    pub fn inner_width(&self) -> f64 {
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    }

    pub fn inner_height(&self) -> f64 {
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    }

    /// Pixel x of a round number.
    pub fn x(&self, round: f64) -> f64 {
        MARGIN_LEFT + (round - self.x_min) / (self.x_max - self.x_min) * self.inner_width()
    }

    /// Pixel y of a regret value (larger values sit higher on the canvas).
    pub fn y(&self, value: f64) -> f64 {
        MARGIN_TOP + self.inner_height()
            - (value - self.y_min) / (self.y_max - self.y_min) * self.inner_height()
    }
}

/// Render a report as a standalone SVG document.
pub fn render_svg(report: &ExperimentReport<f64>, include_bounds: bool) -> String {
    let geom = PlotGeometry::for_report(report, include_bounds);
    let mut svg = String::with_capacity(16 * 1024);
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );

    draw_axes(&mut svg, &geom, report.replications);

    for (idx, scenario) in report.scenarios.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="series">"#);

        let mut points = String::new();
        for (k, &checkpoint) in report.checkpoints.iter().enumerate() {
            let _ = write!(
                points,
                "{}{:.2},{:.2}",
                if k == 0 { "" } else { " " },
                geom.x(checkpoint as f64),
                geom.y(scenario.mean_regret[k]),
            );
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#
        );

        for (k, &checkpoint) in report.checkpoints.iter().enumerate() {
            let mean = scenario.mean_regret[k];
            let hw = scenario.ci_halfwidth[k];
            let x = geom.x(checkpoint as f64);
            let _ = writeln!(
                svg,
                r#"<line class="whisker" stroke="{color}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                x,
                geom.y(mean + hw),
                x,
                geom.y(mean - hw),
            );
        }

        if include_bounds {
            for (class, dash, curve) in [
                ("bound-t1", "6 3", &scenario.bound_t1),
                ("bound-t2", "2 3", &scenario.bound_t2),
            ] {
                let mut d = String::new();
                for (k, &checkpoint) in report.checkpoints.iter().enumerate() {
                    let _ = write!(
                        d,
                        "{}{:.2} {:.2}",
                        if k == 0 { "M" } else { " L" },
                        geom.x(checkpoint as f64),
                        geom.y(curve[k]),
                    );
                }
                let _ = writeln!(
                    svg,
                    r#"<path class="{class}" fill="none" stroke="{color}" stroke-dasharray="{dash}" d="{d}"/>"#
                );
            }
        }
        let _ = writeln!(svg, "</g>");
    }

    draw_legend(&mut svg, report);
    svg.push_str("</svg>\n");
    svg
}

fn draw_axes(svg: &mut String, geom: &PlotGeometry, replications: u32) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = MARGIN_TOP;
    let y1 = HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(svg, r##"<g class="axes" stroke="#333333">"##);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#);
    let _ = writeln!(svg, "</g>");

    let ticks = 5usize;
    for k in 0..=ticks {
        let frac = k as f64 / ticks as f64;
        let round = geom.x_min + frac * (geom.x_max - geom.x_min);
        let value = geom.y_min + frac * (geom.y_max - geom.y_min);
        let xpix = geom.x(round);
        let ypix = geom.y(value);
        let _ = writeln!(
            svg,
            r##"<line class="tick-mark" stroke="#333333" x1="{xpix:.2}" y1="{y1}" x2="{xpix:.2}" y2="{:.2}"/>"##,
            y1 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="tick" x="{xpix:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y1 + 18.0,
            format_tick(round),
        );
        let _ = writeln!(
            svg,
            r##"<line class="tick-mark" stroke="#333333" x1="{:.2}" y1="{ypix:.2}" x2="{x0}" y2="{ypix:.2}"/>"##,
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="tick" x="{:.2}" y="{ypix:.2}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            x0 - 8.0,
            format_tick(value),
        );
    }

    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">round</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">mean cumulative regret ({replications} reps)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

fn draw_legend(svg: &mut String, report: &ExperimentReport<f64>) {
    let x = WIDTH - MARGIN_RIGHT + 16.0;
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (idx, scenario) in report.scenarios.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_TOP + 8.0 + idx as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{color}"/>"#,
            y - 10.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend-entry" x="{:.2}" y="{y:.2}">{}</text>"#,
            x + 18.0,
            escape_xml(&scenario.label),
        );
    }
    let _ = writeln!(svg, "</g>");
}

fn format_tick(value: f64) -> String {
    if value == 0.0 {
        "0".to_string()
    } else if value.abs() >= 100.0 {
        format!("{value:.0}")
    } else if value.abs() >= 1.0 {
        format!("{value:.1}")
    } else {
        format!("{value:.3}")
    }
}

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
