// SPDX-License-Identifier: Apache-2.0

//! Static SVG line plots. Failures are returned as strings; callers turn
//! them into warnings.

use std::path::Path;

use plotters::prelude::*;

pub struct Series {
    pub label: String,
    /// `None` breaks the line (unstable or non-converged points).
    pub points: Vec<(f64, Option<f64>)>,
}

pub struct Figure<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series>,
    /// Dashed horizontal reference line.
    pub reference: Option<f64>,
}

fn segments(points: &[(f64, Option<f64>)]) -> Vec<Vec<(f64, f64)>> {
    let mut out = vec![Vec::new()];
    for &(x, y) in points {
        match y {
            Some(y) if y.is_finite() => out.last_mut().unwrap().push((x, y)),
            _ => {
                if !out.last().unwrap().is_empty() {
                    out.push(Vec::new());
                }
            }
        }
    }
    out.retain(|s| !s.is_empty());
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-12) };
    Some((lo - pad, hi + pad))
}

pub fn render(path: &Path, fig: &Figure) -> Result<(), String> {
    let xs = fig.series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (x0, x1) = bounds(xs).ok_or("nothing to plot")?;
    let ys = fig
        .series
        .iter()
        .flat_map(|s| s.points.iter().filter_map(|p| p.1))
        .filter(|y| y.is_finite())
        .chain(fig.reference);
    let (y0, y1) = bounds(ys).ok_or("no finite values to plot")?;

    let root = SVGBackend::new(path, (960, 640)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| e.to_string())?;
    let mut chart = ChartBuilder::on(&root)
        .caption(fig.title, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(48)
        .y_label_area_size(90)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(|e| e.to_string())?;
    chart
        .configure_mesh()
        .x_desc(fig.x_label)
        .y_desc(fig.y_label)
        .draw()
        .map_err(|e| e.to_string())?;

    if let Some(r) = fig.reference {
        chart
            .draw_series(DashedLineSeries::new(vec![(x0, r), (x1, r)], 8, 6, BLACK.stroke_width(1)))
            .map_err(|e| e.to_string())?;
    }
    for (k, s) in fig.series.iter().enumerate() {
        let colour = Palette99::pick(k).to_rgba();
        let mut first = true;
        for seg in segments(&s.points) {
            let drawn = chart
                .draw_series(LineSeries::new(seg, colour.stroke_width(2)))
                .map_err(|e| e.to_string())?;
            if first {
                drawn
                    .label(s.label.clone())
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], colour.stroke_width(2)));
                first = false;
            }
        }
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(|e| e.to_string())?;
    root.present().map_err(|e| e.to_string())
}
