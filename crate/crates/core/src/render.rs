//! Standalone SVG 1.1 plots of 2-D worlds with point sets overlaid.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::response::PointSet;
use crate::world::World;

const WIDTH: f64 = 640.0;
const MARGIN: f64 = 20.0;
const LEGEND_ROW: f64 = 18.0;

const POSITIVE_FILL: &str = "#cfe8cf";
const NEGATIVE_FILL: &str = "#f3cccc";
const EMPTY_FILL: &str = "#eeeeee";
const OVERLAY_COLOURS: [&str; 6] = ["#1f4fd6", "#e07b00", "#7b2fbf", "#008080", "#c0006a", "#5a5a00"];

/// Renders the world's cells coloured by their majority label, with each
/// named set drawn over them as a hatched layer. Output depends only on the
/// inputs.
pub fn render_svg(world: &World, sets: &[(String, PointSet)]) -> Result<String> {
    let coords = world.coords_2d().ok_or(Error::NoCoords)?;
    let (min_x, max_x) = extent(coords.iter().map(|c| c[0]));
    let (min_y, max_y) = extent(coords.iter().map(|c| c[1]));
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let radius_data = 0.5 * nearest_spacing(&coords).unwrap_or(span / 10.0);
    let inner = WIDTH - 2.0 * MARGIN - 2.0 * radius_data * (WIDTH - 2.0 * MARGIN) / span;
    let scale = (inner / span).max(1e-9);
    let r = (radius_data * scale).max(0.5);
    let to_px = |c: &[f64; 2]| {
        let x = MARGIN + r + (c[0] - min_x) * scale;
        let y = MARGIN + r + (max_y - c[1]) * scale;
        (x, y)
    };
    let plot_h = (max_y - min_y) * scale + 2.0 * (MARGIN + r);
    let height = plot_h + LEGEND_ROW * (sets.len() as f64 + 3.0);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    svg.push_str("<defs>\n");
    for (k, _) in sets.iter().enumerate() {
        let colour = OVERLAY_COLOURS[k % OVERLAY_COLOURS.len()];
        let angle = [45, -45, 0, 90, 30, -30][k % 6];
        let _ = writeln!(
            svg,
            r#"<pattern id="hatch{k}" patternUnits="userSpaceOnUse" width="4" height="4" patternTransform="rotate({angle})"><line x1="0" y1="0" x2="0" y2="4" stroke="{colour}" stroke-width="1.5"/></pattern>"#
        );
    }
    svg.push_str("</defs>\n");
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{height:.0}" fill="white"/>"#);

    svg.push_str("<g id=\"regions\">\n");
    for (i, c) in coords.iter().enumerate() {
        let [neg, pos] = world.mass()[i];
        let fill = if pos > neg {
            POSITIVE_FILL
        } else if neg > pos {
            NEGATIVE_FILL
        } else {
            EMPTY_FILL
        };
        let (x, y) = to_px(c);
        let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{fill}"/>"#);
    }
    svg.push_str("</g>\n");

    for (k, (name, set)) in sets.iter().enumerate() {
        let colour = OVERLAY_COLOURS[k % OVERLAY_COLOURS.len()];
        let _ = writeln!(svg, r#"<g id="set{k}" data-name="{}">"#, escape(name));
        for i in set.indices() {
            let (x, y) = to_px(&coords[i]);
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="url(#hatch{k})" stroke="{colour}" stroke-width="0.5"/>"#
            );
        }
        svg.push_str("</g>\n");
    }

    svg.push_str("<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n");
    let mut entries: Vec<(String, String)> = vec![
        ("positive mass".into(), POSITIVE_FILL.into()),
        ("negative mass".into(), NEGATIVE_FILL.into()),
        ("no mass".into(), EMPTY_FILL.into()),
    ];
    entries.extend(sets.iter().enumerate().map(|(k, (name, _))| (name.clone(), format!("url(#hatch{k})"))));
    for (row, (label, fill)) in entries.iter().enumerate() {
        let y = plot_h + LEGEND_ROW * row as f64;
        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN:.0}" y="{y:.1}" width="12" height="12" fill="{fill}" stroke="#444444" stroke-width="0.5"/><text x="{:.0}" y="{:.1}">{}</text>"##,
            MARGIN + 18.0,
            y + 10.0,
            escape(label)
        );
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

/// Writes [`render_svg`] output to `path`.
pub fn render_regions(world: &World, sets: &[(String, PointSet)], path: &Path) -> Result<()> {
    let svg = render_svg(world, sets)?;
    std::fs::write(path, svg)?;
    Ok(())
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn nearest_spacing(coords: &[[f64; 2]]) -> Option<f64> {
    let mut best = f64::INFINITY;
    for (i, a) in coords.iter().enumerate() {
        for b in &coords[i + 1..] {
            let d = (a[0] - b[0]).hypot(a[1] - b[1]);
            if d > 0.0 && d < best {
                best = d;
            }
        }
    }
    best.is_finite().then_some(best)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
