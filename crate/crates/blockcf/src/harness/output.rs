//! CSV and SVG emission for sweep and curve tables.
//!
//! The CSV schema is fixed; floats print through Rust's shortest
//! round-trip formatter, so a rerun of the same configuration is
//! byte-identical. The SVG is written directly as markup: four
//! log-probability curves against the cluster side length plus a vertical
//! line at the recovery threshold.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "n0,m0,area,threshold_area,fill_lb,fill_ub,clust_same_ub,clust_diff_P1,emp_pe,emp_pe_ci3,emp_prc,emp_prc_ci3,trials,master_seed,flags";

/// One output row. Analytic columns are `None` when not applicable (then a
/// flag says why); empirical columns are `None` for rows without trials.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepRow {
    pub n0: u64,
    pub m0: u64,
    pub area: u64,
    pub threshold_area: Option<f64>,
    pub fill_lb: Option<f64>,
    pub fill_ub: Option<f64>,
    pub clust_same_ub: Option<f64>,
    pub clust_diff_p1: Option<f64>,
    pub emp_pe: Option<f64>,
    pub emp_pe_ci3: Option<f64>,
    pub emp_prc: Option<f64>,
    pub emp_prc_ci3: Option<f64>,
    pub trials: u64,
    pub master_seed: u64,
    pub flags: Vec<String>,
}

fn cell(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.n0,
            row.m0,
            row.area,
            cell(row.threshold_area),
            cell(row.fill_lb),
            cell(row.fill_ub),
            cell(row.clust_same_ub),
            cell(row.clust_diff_p1),
            cell(row.emp_pe),
            cell(row.emp_pe_ci3),
            cell(row.emp_prc),
            cell(row.emp_prc_ci3),
            row.trials,
            row.master_seed,
            row.flags.join(";"),
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Svg,
}

impl OutputFormat {
    pub fn parse_list(text: &str) -> Result<Vec<OutputFormat>> {
        text.split(',')
            .filter(|part| !part.is_empty())
            .map(|part| match part.trim() {
                "csv" => Ok(OutputFormat::Csv),
                "svg" => Ok(OutputFormat::Svg),
                other => Err(Error::Config(format!("unknown output format {other:?}"))),
            })
            .collect()
    }
}

const PLOT_WIDTH: f64 = 860.0;
const PLOT_HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 210.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const LOG_FLOOR: f64 = -16.0;
const LOG_CEIL: f64 = 2.0;

struct Curve<'a> {
    label: &'a str,
    color: &'a str,
    select: fn(&SweepRow) -> Option<f64>,
}

/// Renders the four probability curves of a table on a log10 scale over
/// the cluster side length `n0`. Values are clamped into
/// `[1e-16, 1e2]` so vacuous bounds stay visible at the top edge.
pub fn render_svg(rows: &[SweepRow]) -> String {
    let curves = [
        Curve {
            label: "fill error lower bound",
            color: "#c0392b",
            select: |r| r.fill_lb,
        },
        Curve {
            label: "fill error upper bound",
            color: "#2471a3",
            select: |r| r.fill_ub,
        },
        Curve {
            label: "clustering split bound",
            color: "#1e8449",
            select: |r| r.clust_same_ub,
        },
        Curve {
            label: "clustering merge bound",
            color: "#b7950b",
            select: |r| r.clust_diff_p1,
        },
    ];

    let x_min = rows.iter().map(|r| r.n0).min().unwrap_or(0) as f64;
    let x_max = rows.iter().map(|r| r.n0).max().unwrap_or(1) as f64;
    let span = (x_max - x_min).max(1.0);
    let inner_w = PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let inner_h = PLOT_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |n0: f64| MARGIN_LEFT + (n0 - x_min) / span * inner_w;
    let y_of = |value: f64| {
        let log = value.max(1e-300).log10().clamp(LOG_FLOOR, LOG_CEIL);
        MARGIN_TOP + (LOG_CEIL - log) / (LOG_CEIL - LOG_FLOOR) * inner_h
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" viewBox=\"0 0 {PLOT_WIDTH} {PLOT_HEIGHT}\">"
    );
    let _ = write!(
        svg,
        "<rect width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" fill=\"white\"/>"
    );

    // axes
    let x0 = MARGIN_LEFT;
    let x1 = PLOT_WIDTH - MARGIN_RIGHT;
    let y0 = PLOT_HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = write!(
        svg,
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>"
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"13\">cluster side n0</text>",
        (x0 + x1) / 2.0 - 40.0,
        PLOT_HEIGHT - 14.0
    );
    let _ = write!(
        svg,
        "<text x=\"16\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 16 {})\">log10 probability</text>",
        (y0 + y1) / 2.0 + 40.0,
        (y0 + y1) / 2.0 + 40.0
    );
    for exp in [0i32, -4, -8, -12, -16] {
        let y = y_of(10f64.powi(exp));
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{y}\" x2=\"{x0}\" y2=\"{y}\" stroke=\"black\"/>\
             <text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">1e{exp}</text>",
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }

    // threshold marker at the side length where the area crosses it
    if let Some(threshold) = rows.iter().find_map(|r| r.threshold_area) {
        let side = threshold.sqrt();
        if side.is_finite() && side >= x_min && side <= x_max {
            let x = x_of(side);
            let _ = write!(
                svg,
                "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#555555\" stroke-dasharray=\"6 4\"/>\
                 <text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"#555555\">threshold side {side:.1}</text>",
                x + 5.0,
                y1 + 14.0
            );
        }
    }

    for (index, curve) in curves.iter().enumerate() {
        let mut points = String::new();
        for row in rows {
            if let Some(value) = (curve.select)(row) {
                let _ = write!(points, "{:.2},{:.2} ", x_of(row.n0 as f64), y_of(value));
            }
        }
        if !points.is_empty() {
            let _ = write!(
                svg,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>",
                curve.color,
                points.trim_end()
            );
        }
        let legend_y = MARGIN_TOP + 20.0 + 18.0 * index as f64;
        let _ = write!(
            svg,
            "<line x1=\"{}\" y1=\"{legend_y}\" x2=\"{}\" y2=\"{legend_y}\" stroke=\"{}\" stroke-width=\"2\"/>\
             <text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>",
            x1 + 10.0,
            x1 + 34.0,
            curve.color,
            x1 + 40.0,
            legend_y + 4.0,
            curve.label
        );
    }

    svg.push_str("</svg>");
    svg
}

/// Writes the requested formats next to `stem` (extensions appended) and
/// returns the created paths. An empty format list writes nothing.
pub fn write_outputs(
    rows: &[SweepRow],
    formats: &[OutputFormat],
    stem: &Path,
) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::Config("refusing to write an empty table".into()));
    }
    let mut written = Vec::new();
    for format in formats {
        let (path, payload) = match format {
            OutputFormat::Csv => (stem.with_extension("csv"), render_csv(rows)),
            OutputFormat::Svg => (stem.with_extension("svg"), render_svg(rows)),
        };
        std::fs::write(&path, payload)?;
        written.push(path);
    }
    Ok(written)
}
