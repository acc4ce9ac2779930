//! SVG output. Row 0 is drawn at the bottom so the picture matches the
//! projection's orientation.

use std::fmt::Write;

use gridweave_core::{ClusterId, GridLayout, SampleSet};

/// Categorical cycle indexed by cluster id (ids follow sorted cluster names).
pub const PALETTE: [&str; 20] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
];

pub const EMPTY_FILL: &str = "#ffffff";

pub fn cluster_color(cluster: ClusterId) -> &'static str {
    PALETTE[cluster.index() % PALETTE.len()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    cell_px: u32,
    pub stroke: f64,
    pub show_ids: bool,
}

impl RenderStyle {
    pub const MIN_CELL_PX: u32 = 4;

    /// Returns `None` when `cell_px` is below [`Self::MIN_CELL_PX`].
    pub fn new(cell_px: u32, stroke: f64, show_ids: bool) -> Option<Self> {
        (cell_px >= Self::MIN_CELL_PX).then_some(Self {
            cell_px,
            stroke,
            show_ids,
        })
    }

    pub fn cell_px(&self) -> u32 {
        self.cell_px
    }
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            cell_px: 16,
            stroke: 2.0,
            show_ids: false,
        }
    }
}

/// Boundary segments in cell units, `(x0, y0, x1, y1)` with y growing with
/// the row index. Collinear unit edges that touch are merged.
pub fn boundary_segments(layout: &GridLayout) -> Vec<(usize, usize, usize, usize)> {
    let spec = layout.spec();
    let (w, h) = (spec.width(), spec.height());
    let label = |c: usize, r: usize| layout.label(spec.index(c, r));
    let mut out = Vec::new();
    // Horizontal lines y = r between rows r - 1 and r.
    for r in 1..h {
        let mut start = None;
        for c in 0..=w {
            let differs = c < w && label(c, r - 1) != label(c, r);
            match (differs, start) {
                (true, None) => start = Some(c),
                (false, Some(s)) => {
                    out.push((s, r, c, r));
                    start = None;
                }
                _ => {}
            }
        }
    }
    // Vertical lines x = c between columns c - 1 and c.
    for c in 1..w {
        let mut start = None;
        for r in 0..=h {
            let differs = r < h && label(c - 1, r) != label(c, r);
            match (differs, start) {
                (true, None) => start = Some(r),
                (false, Some(s)) => {
                    out.push((c, s, c, r));
                    start = None;
                }
                _ => {}
            }
        }
    }
    out
}

pub fn render_svg(layout: &GridLayout, style: &RenderStyle) -> String {
    render(layout, None, style)
}

/// Like [`render_svg`], but labels cells with sample ids from `samples`
/// when `style.show_ids` is set.
pub fn render_svg_with_samples(layout: &GridLayout, samples: &SampleSet, style: &RenderStyle) -> String {
    render(layout, Some(samples), style)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn render(layout: &GridLayout, samples: Option<&SampleSet>, style: &RenderStyle) -> String {
    let spec = layout.spec();
    let (w, h) = (spec.width(), spec.height());
    let px = style.cell_px as usize;
    let (width, height) = (w * px, h * px);
    let flip = |y: usize| (h - y) * px;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    svg.push_str("<g class=\"cells\">\n");
    for row in 0..h {
        for col in 0..w {
            let cell = spec.index(col, row);
            let fill = layout.label(cell).map_or(EMPTY_FILL, cluster_color);
            let _ = writeln!(
                svg,
                r#"<rect class="cell" x="{}" y="{}" width="{px}" height="{px}" fill="{fill}"/>"#,
                col * px,
                flip(row + 1)
            );
        }
    }
    svg.push_str("</g>\n");
    let _ = writeln!(
        svg,
        r##"<g class="boundaries" stroke="#000000" stroke-width="{}" stroke-linecap="square">"##,
        style.stroke
    );
    for (x0, y0, x1, y1) in boundary_segments(layout) {
        let _ = writeln!(
            svg,
            r#"<line class="boundary" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            x0 * px,
            flip(y0),
            x1 * px,
            flip(y1)
        );
    }
    svg.push_str("</g>\n");
    if style.show_ids {
        let font = (px as f64 * 0.3).max(2.0);
        let _ = writeln!(
            svg,
            r#"<g class="ids" font-family="monospace" font-size="{font}" text-anchor="middle" dominant-baseline="central">"#
        );
        for cell in 0..spec.capacity() {
            let Some(s) = layout.sample_at(cell) else { continue };
            let (col, row) = spec.coords(cell);
            let text = samples.map_or_else(|| s.to_string(), |set| escape(&set.sample(s).id));
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}">{text}</text>"#,
                col * px + px / 2,
                flip(row + 1) + px / 2
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
