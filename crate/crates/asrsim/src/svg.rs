//! Deterministic SVG rendering of a landscape: classification heatmap,
//! labeled ASR contours, strategy boundary, axes.

use std::fmt::Write as _;

use asrsim_core::contour::Polyline;
use asrsim_core::grid::LandscapeGrid;
use asrsim_core::metrics::Classification;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, Copy, Default)]
pub struct SvgStyle {
    /// Draw reference circles at (15, 45) and (30, 45).
    pub reference_markers: bool,
}

struct Mapper {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Mapper {
    fn x(&self, v: f64) -> f64 {
        MARGIN_LEFT + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    // SVG y grows downward; the plot has t1 growing upward.
    fn y(&self, v: f64) -> f64 {
        HEIGHT
            - MARGIN_BOTTOM
            - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn fill_for(class: Option<Classification>) -> &'static str {
    match class {
        Some(Classification::Guarding) => "#3a8f4e",
        Some(Classification::MultipleMating) => "#e8d44d",
        Some(Classification::Extinct) => "#ffffff",
        Some(Classification::NonConverged) => "#b5b5b5",
        // Invalid (t1 <= L/2) or failed cells.
        None => "#f2f2f2",
    }
}

fn fmt(v: f64) -> String {
    // Fixed decimals keep the document byte-deterministic and diff-friendly.
    format!("{v:.3}")
}

fn path_d(m: &Mapper, pl: &Polyline) -> String {
    let mut d = String::new();
    for (i, &(x, y)) in pl.points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{} {} ", fmt(m.x(x)), fmt(m.y(y)));
    }
    d.trim_end().to_string()
}

/// Renders the landscape as a standalone SVG document.
pub fn render_landscape_svg(grid: &LandscapeGrid, style: &SvgStyle) -> String {
    let xs = &grid.longevity_values;
    let ys = &grid.fertility_end_values;
    let m = Mapper {
        x0: xs[0],
        x1: *xs.last().unwrap(),
        y0: ys[0],
        y1: *ys.last().unwrap(),
    };
    let dx = if xs.len() > 1 { xs[1] - xs[0] } else { 1.0 };
    let dy = if ys.len() > 1 { ys[1] - ys[0] } else { 1.0 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"##
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );

    // Heatmap: one rect per node, centred on the node.
    for (row, &t1) in ys.iter().enumerate() {
        for (col, &l) in xs.iter().enumerate() {
            let class = grid.cell(row, col).outcome.classification();
            let x = m.x(l - dx / 2.0);
            let y = m.y(t1 + dy / 2.0);
            let w = m.x(l + dx / 2.0) - x;
            let h = m.y(t1 - dy / 2.0) - y;
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"##,
                fmt(x),
                fmt(y),
                fmt(w),
                fmt(h),
                fill_for(class)
            );
        }
    }

    // ASR contours in red, labelled at the polyline midpoint.
    for (level, polylines) in &grid.asr_contours {
        for pl in polylines {
            if pl.points.len() < 2 {
                continue;
            }
            let _ = writeln!(
                svg,
                r##"<path d="{}" fill="none" stroke="#cc2222" stroke-width="1.2"/>"##,
                path_d(&m, pl)
            );
            let (lx, ly) = pl.points[pl.points.len() / 2];
            let _ = writeln!(
                svg,
                r##"<text x="{}" y="{}" font-size="10" fill="#cc2222">{}</text>"##,
                fmt(m.x(lx) + 2.0),
                fmt(m.y(ly) - 2.0),
                format_level(*level)
            );
        }
    }

    // Strategy boundary in black.
    for pl in &grid.strategy_boundary {
        if pl.points.len() < 2 {
            continue;
        }
        let _ = writeln!(
            svg,
            r##"<path d="{}" fill="none" stroke="#000000" stroke-width="2"/>"##,
            path_d(&m, pl)
        );
    }

    if style.reference_markers {
        for (x, y) in [(15.0, 45.0), (30.0, 45.0)] {
            let _ = writeln!(
                svg,
                r##"<circle cx="{}" cy="{}" r="5" fill="none" stroke="#000000" stroke-width="1.5"/>"##,
                fmt(m.x(x)),
                fmt(m.y(y))
            );
        }
    }

    // Axes with ticks at the extremes and midpoint.
    let _ = writeln!(
        svg,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333333"/>"##,
        fmt(m.x(m.x0)),
        fmt(m.y(m.y1)),
        fmt(m.x(m.x1) - m.x(m.x0)),
        fmt(m.y(m.y0) - m.y(m.y1))
    );
    for v in [m.x0, (m.x0 + m.x1) / 2.0, m.x1] {
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" font-size="11" text-anchor="middle" fill="#333333">{}</text>"##,
            fmt(m.x(v)),
            fmt(HEIGHT - MARGIN_BOTTOM + 16.0),
            format_level(v)
        );
    }
    for v in [m.y0, (m.y0 + m.y1) / 2.0, m.y1] {
        let _ = writeln!(
            svg,
            r##"<text x="{}" y="{}" font-size="11" text-anchor="end" fill="#333333">{}</text>"##,
            fmt(MARGIN_LEFT - 6.0),
            fmt(m.y(v) + 4.0),
            format_level(v)
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{}" y="{}" font-size="13" text-anchor="middle" fill="#111111">L (years)</text>"##,
        fmt((MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0),
        fmt(HEIGHT - 12.0)
    );
    let _ = writeln!(
        svg,
        r##"<text x="16" y="{}" font-size="13" text-anchor="middle" fill="#111111" transform="rotate(-90 16 {})">t1 (years)</text>"##,
        fmt((MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0),
        fmt((MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0)
    );
    svg.push_str("</svg>\n");
    svg
}

fn format_level(v: f64) -> String {
    // Trim float noise in tick/contour labels (e.g. 1.2000000000000002).
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".into() } else { s.into() }
}
