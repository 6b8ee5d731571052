//! Static SVG figures: the region plot of a size function over `Δ⁺` and the
//! cornerpoint diagram.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use crate::critical::{lattice_values, Grid};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sublevel::FormalSeries;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 8] = [
    "#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6", "#2171b5", "#08519c",
];

/// Square window `[lo, hi]²` shown by both plots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    /// Pads the finite cornerpoint coordinates by 15% of their span.
    pub fn fit(series: &FormalSeries) -> Self {
        let coords: Vec<f64> = series
            .points()
            .iter()
            .flat_map(|c| std::iter::once(c.x).chain(c.y.finite()))
            .collect();
        let lo = coords.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        let pad = if hi > lo { 0.15 * (hi - lo) } else { 0.5 };
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn px(&self, v: f64) -> f64 {
        MARGIN + (v - self.lo) / (self.hi - self.lo) * SIZE
    }

    fn py(&self, v: f64) -> f64 {
        MARGIN + SIZE - (v - self.lo) / (self.hi - self.lo) * SIZE
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPlot {
    pub svg: String,
    /// Distinct values of the size function on the sampled lattice.
    pub values: BTreeSet<usize>,
}

fn header(out: &mut String, title: &str) {
    let side = SIZE + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{side}" height="{side}" fill="white"/>"#);
}

fn axes(out: &mut String, w: &Window) {
    let (x0, x1) = (w.px(w.lo), w.px(w.hi));
    let (y0, y1) = (w.py(w.lo), w.py(w.hi));
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="black" stroke-width="1.5"/>"#
    );
    for i in 0..=4 {
        let v = w.lo + (w.hi - w.lo) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{v:.2}</text>"#,
            w.px(v),
            y0 + 16.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v:.2}</text>"#,
            x0 - 6.0,
            w.py(v) + 4.0
        );
    }
}

fn markers(out: &mut String, series: &FormalSeries, w: &Window) {
    for c in series.points() {
        let x = w.px(c.x);
        match c.y.finite() {
            Some(y) => {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{x:.2}" cy="{:.2}" r="4" fill="crimson" stroke="black"/>"#,
                    w.py(y)
                );
                if c.mult > 1 {
                    let _ = writeln!(
                        out,
                        r#"<text x="{:.2}" y="{:.2}" font-size="11">×{}</text>"#,
                        x + 6.0,
                        w.py(y) - 6.0,
                        c.mult
                    );
                }
            }
            None => {
                let _ = writeln!(
                    out,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="crimson" stroke-width="2" stroke-dasharray="6 3"/>"#,
                    w.py(c.x),
                    w.py(w.hi)
                );
                let label = if c.mult > 1 { format!("∞ ×{}", c.mult) } else { "∞".into() };
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" font-size="11">{label}</text>"#,
                    x + 4.0,
                    w.py(w.hi) + 12.0
                );
            }
        }
    }
}

/// Size function sampled on an `n_grid × n_grid` lattice over `Δ⁺`, cells
/// shaded by value, one label per connected constancy region, cornerpoints
/// and cornerlines overlaid.
pub fn region_plot(series: &FormalSeries, window: Option<Window>, n_grid: usize) -> Result<RegionPlot> {
    let w = window.unwrap_or_else(|| Window::fit(series));
    if !(w.lo.is_finite() && w.hi.is_finite() && w.lo < w.hi) {
        return Err(Error::precondition("plot window must satisfy lo < hi"));
    }
    let grid = Grid::new(n_grid, (w.lo, w.hi), (w.lo, w.hi))?;
    let values = lattice_values(series, &grid, Execution::Sequential)?;
    let n = n_grid;
    let cell = SIZE / (n - 1) as f64;

    let mut svg = String::new();
    header(&mut svg, "size function over the region above the diagonal");
    let present: BTreeSet<usize> = values.iter().flatten().flatten().copied().collect();
    for (j, row) in values.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let Some(v) = v else { continue };
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                w.px(grid.s(i)) - cell / 2.0,
                w.py(grid.t(j)) - cell / 2.0,
                cell,
                cell,
                PALETTE[(*v).min(PALETTE.len() - 1)]
            );
        }
    }

    // One label per 4-connected region of equal value, at its most central cell.
    let mut seen = vec![vec![false; n]; n];
    for j in 0..n {
        for i in 0..n {
            let Some(v) = values[j][i] else { continue };
            if seen[j][i] {
                continue;
            }
            let mut region = Vec::new();
            let mut queue = VecDeque::from([(i, j)]);
            seen[j][i] = true;
            while let Some((a, b)) = queue.pop_front() {
                region.push((a, b));
                let nbrs = [
                    (a.wrapping_sub(1), b),
                    (a + 1, b),
                    (a, b.wrapping_sub(1)),
                    (a, b + 1),
                ];
                for (c, d) in nbrs {
                    if c < n && d < n && !seen[d][c] && values[d][c] == Some(v) {
                        seen[d][c] = true;
                        queue.push_back((c, d));
                    }
                }
            }
            if region.len() < 4 {
                continue;
            }
            let (ci, cj) = region.iter().fold((0.0, 0.0), |acc, &(a, b)| (acc.0 + a as f64, acc.1 + b as f64));
            let (ci, cj) = (ci / region.len() as f64, cj / region.len() as f64);
            let &(a, b) = region
                .iter()
                .min_by(|p, q| {
                    let dp = (p.0 as f64 - ci).powi(2) + (p.1 as f64 - cj).powi(2);
                    let dq = (q.0 as f64 - ci).powi(2) + (q.1 as f64 - cj).powi(2);
                    dp.total_cmp(&dq)
                })
                .expect("non-empty region");
            let colour = if v >= PALETTE.len() / 2 { "white" } else { "black" };
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="16" font-weight="bold" text-anchor="middle" fill="{colour}">{v}</text>"#,
                w.px(grid.s(a)),
                w.py(grid.t(b)) + 6.0
            );
        }
    }
    axes(&mut svg, &w);
    markers(&mut svg, series, &w);
    svg.push_str("</svg>\n");
    Ok(RegionPlot { svg, values: present })
}

/// Diagram of the series: diagonal, proper cornerpoints, and cornerlines as
/// vertical dashed lines.
pub fn diagram_plot(series: &FormalSeries, window: Option<Window>) -> Result<String> {
    let w = window.unwrap_or_else(|| Window::fit(series));
    if !(w.lo.is_finite() && w.hi.is_finite() && w.lo < w.hi) {
        return Err(Error::precondition("plot window must satisfy lo < hi"));
    }
    let mut svg = String::new();
    header(&mut svg, "cornerpoint diagram");
    axes(&mut svg, &w);
    markers(&mut svg, series, &w);
    svg.push_str("</svg>\n");
    Ok(svg)
}
