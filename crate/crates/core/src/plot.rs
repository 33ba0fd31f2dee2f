//! Heatmap rendering: pivot a CSV on two parameter columns and emit a
//! self-contained SVG grid, with a categorical palette for verdicts and a
//! green-to-red ramp for continuous columns.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::report::format_sig;

const CELL_W: usize = 72;
const CELL_H: usize = 40;
const MARGIN_LEFT: usize = 96;
const MARGIN_TOP: usize = 34;
const MARGIN_BOTTOM: usize = 62;
const MARGIN_RIGHT: usize = 170;

const GREEN: (u8, u8, u8) = (46, 125, 50);
const RED: (u8, u8, u8) = (198, 40, 40);
const GRAY: &str = "#9e9e9e";
const DARK: &str = "#37474f";
const NEUTRAL: &str = "#607d8b";

/// A complete rectangular pivot of one CSV value column over two
/// parameter columns. Category order is numeric when every label parses
/// as a number, lexicographic otherwise.
#[derive(Debug, Clone)]
pub struct PivotGrid {
    pub x_name: String,
    pub y_name: String,
    pub value_name: String,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    /// Row-major values, rows indexed by `y_labels`, columns by `x_labels`.
    pub cells: Vec<String>,
}

impl PivotGrid {
    pub fn cell(&self, xi: usize, yi: usize) -> &str {
        &self.cells[yi * self.x_labels.len() + xi]
    }
}

fn sort_labels(labels: &mut Vec<String>) {
    let numeric: Option<Vec<f64>> = labels
        .iter()
        .map(|s| s.parse::<f64>().ok().filter(|v| !v.is_nan()))
        .collect();
    match numeric {
        Some(values) => {
            let mut pairs: Vec<(f64, String)> =
                values.into_iter().zip(labels.drain(..)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            *labels = pairs.into_iter().map(|(_, s)| s).collect();
        }
        None => labels.sort(),
    }
}

/// Reads a headered CSV and pivots `value` over the `x` and `y` columns.
/// Every (x, y) pair must appear exactly once: duplicates and missing
/// cells are rejected, the latter with the full list of absent pairs.
pub fn pivot_csv(csv_text: &str, x: &str, y: &str, value: &str) -> Result<PivotGrid> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(csv_text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("csv header: {e}")))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!(
                "column {name:?} not found; csv has: {}",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let (xi, yi, vi) = (col(x)?, col(y)?, col(value)?);

    let mut entries: BTreeMap<(String, String), String> = BTreeMap::new();
    let mut x_labels: Vec<String> = Vec::new();
    let mut y_labels: Vec<String> = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse(format!("csv row: {e}")))?;
        let get = |i: usize| row.get(i).unwrap_or("").to_string();
        let (xv, yv, vv) = (get(xi), get(yi), get(vi));
        if !x_labels.contains(&xv) {
            x_labels.push(xv.clone());
        }
        if !y_labels.contains(&yv) {
            y_labels.push(yv.clone());
        }
        if entries.insert((xv.clone(), yv.clone()), vv).is_some() {
            return Err(Error::Parse(format!(
                "duplicate cell ({x}={xv}, {y}={yv})"
            )));
        }
    }
    if entries.is_empty() {
        return Err(Error::Parse("csv has no data rows".to_string()));
    }
    sort_labels(&mut x_labels);
    sort_labels(&mut y_labels);

    let missing: Vec<String> = y_labels
        .iter()
        .flat_map(|yv| x_labels.iter().map(move |xv| (xv, yv)))
        .filter(|(xv, yv)| !entries.contains_key(&((*xv).clone(), (*yv).clone())))
        .map(|(xv, yv)| format!("({x}={xv}, {y}={yv})"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Parse(format!(
            "ragged grid, missing cells: {}",
            missing.join(", ")
        )));
    }

    let entries = &entries;
    let cells = y_labels
        .iter()
        .flat_map(|yv| {
            x_labels
                .iter()
                .map(move |xv| entries[&(xv.clone(), yv.clone())].clone())
        })
        .collect();
    Ok(PivotGrid {
        x_name: x.to_string(),
        y_name: y.to_string(),
        value_name: value.to_string(),
        x_labels,
        y_labels,
        cells,
    })
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn hex(rgb: (u8, u8, u8)) -> String {
    format!("#{:02x}{:02x}{:02x}", rgb.0, rgb.1, rgb.2)
}

fn ramp_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let ch = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round() as u8;
    hex((
        ch(GREEN.0, RED.0),
        ch(GREEN.1, RED.1),
        ch(GREEN.2, RED.2),
    ))
}

fn verdict_color(label: &str) -> &'static str {
    match label {
        "undetectable" => "#c62828",
        s if s.starts_with("detectable") => "#2e7d32",
        "indeterminate" => GRAY,
        "error" => DARK,
        _ => NEUTRAL,
    }
}

fn verdict_abbrev(label: &str) -> String {
    match label {
        "undetectable" => "U".to_string(),
        "detectable-degree" => "DD".to_string(),
        "detectable-scan" => "DS".to_string(),
        "detectable-both" => "DB".to_string(),
        "indeterminate" => "IND".to_string(),
        "error" => "ERR".to_string(),
        s => s.chars().take(8).collect(),
    }
}

enum CellStyle {
    /// All cells parse as f64; color by position between min and max.
    Ramp { min: f64, max: f64 },
    Categorical,
}

fn classify_cells(cells: &[String]) -> CellStyle {
    let parsed: Option<Vec<f64>> = cells.iter().map(|s| s.parse::<f64>().ok()).collect();
    match parsed {
        Some(values) => {
            let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
            let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
            let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if finite.is_empty() {
                CellStyle::Categorical
            } else {
                CellStyle::Ramp { min, max }
            }
        }
        None => CellStyle::Categorical,
    }
}

fn cell_fill(style: &CellStyle, label: &str) -> String {
    match style {
        CellStyle::Ramp { min, max } => match label.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                let t = if max > min { (v - min) / (max - min) } else { 0.0 };
                ramp_color(t)
            }
            _ => GRAY.to_string(),
        },
        CellStyle::Categorical => verdict_color(label).to_string(),
    }
}

fn cell_text(style: &CellStyle, label: &str) -> String {
    match style {
        CellStyle::Ramp { .. } => match label.parse::<f64>() {
            Ok(v) => format_sig(v, 4),
            Err(_) => label.to_string(),
        },
        CellStyle::Categorical => verdict_abbrev(label),
    }
}

/// Renders the pivot as a standalone SVG document. Rows with larger
/// y labels sit higher, matching plot convention.
pub fn render_svg(grid: &PivotGrid) -> String {
    let nx = grid.x_labels.len();
    let ny = grid.y_labels.len();
    let style = classify_cells(&grid.cells);
    let width = MARGIN_LEFT + nx * CELL_W + MARGIN_RIGHT;
    let height = MARGIN_TOP + ny * CELL_H + MARGIN_BOTTOM;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{} over {} x {}</text>\n",
        MARGIN_LEFT + nx * CELL_W / 2,
        xml_escape(&grid.value_name),
        xml_escape(&grid.x_name),
        xml_escape(&grid.y_name),
    ));

    for yi in 0..ny {
        let top = MARGIN_TOP + (ny - 1 - yi) * CELL_H;
        for xi in 0..nx {
            let left = MARGIN_LEFT + xi * CELL_W;
            let label = grid.cell(xi, yi);
            svg.push_str(&format!(
                "<rect class=\"cell\" x=\"{left}\" y=\"{top}\" width=\"{CELL_W}\" \
                 height=\"{CELL_H}\" fill=\"{}\" stroke=\"#ffffff\"/>\n",
                cell_fill(&style, label)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#ffffff\">{}</text>\n",
                left + CELL_W / 2,
                top + CELL_H / 2 + 4,
                xml_escape(&cell_text(&style, label))
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_LEFT - 8,
            top + CELL_H / 2 + 4,
            xml_escape(&grid.y_labels[yi])
        ));
    }
    for xi in 0..nx {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_LEFT + xi * CELL_W + CELL_W / 2,
            MARGIN_TOP + ny * CELL_H + 18,
            xml_escape(&grid.x_labels[xi])
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        MARGIN_LEFT + nx * CELL_W / 2,
        MARGIN_TOP + ny * CELL_H + 44,
        xml_escape(&grid.x_name)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" \
         transform=\"rotate(-90 18 {})\">{}</text>\n",
        MARGIN_TOP + ny * CELL_H / 2,
        MARGIN_TOP + ny * CELL_H / 2,
        xml_escape(&grid.y_name)
    ));

    let legend_x = MARGIN_LEFT + nx * CELL_W + 16;
    let mut legend_y = MARGIN_TOP;
    let mut legend_entry = |svg: &mut String, color: &str, label: &str| {
        svg.push_str(&format!(
            "<rect x=\"{legend_x}\" y=\"{legend_y}\" width=\"14\" height=\"14\" \
             fill=\"{color}\" stroke=\"#666666\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            legend_x + 20,
            legend_y + 12,
            xml_escape(label)
        ));
        legend_y += 22;
    };
    match &style {
        CellStyle::Ramp { min, max } => {
            legend_entry(&mut svg, &ramp_color(0.0), &format!("min {}", format_sig(*min, 4)));
            legend_entry(&mut svg, &ramp_color(1.0), &format!("max {}", format_sig(*max, 4)));
            if grid.cells.iter().any(|c| {
                c.parse::<f64>().map(|v| !v.is_finite()).unwrap_or(false)
            }) {
                legend_entry(&mut svg, GRAY, "non-finite");
            }
        }
        CellStyle::Categorical => {
            let mut seen: Vec<&String> = Vec::new();
            for label in &grid.cells {
                if !seen.contains(&label) {
                    seen.push(label);
                }
            }
            seen.sort();
            for label in seen {
                legend_entry(&mut svg, verdict_color(label), label);
            }
        }
    }

    svg.push_str("</svg>\n");
    svg
}

/// Full pipeline: CSV text in, SVG document out.
pub fn heatmap_svg(csv_text: &str, x: &str, y: &str, value: &str) -> Result<String> {
    Ok(render_svg(&pivot_csv(csv_text, x, y, value)?))
}
