//! CSV, JSON and SVG renderings of sweep rows.
//!
//! Numbers are written with 17 significant digits so that a CSV file parses back
//! to the same `f64` values.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{Estimator, SweepRow};

pub const CSV_HEADER: [&str; 9] = [
    "vary",
    "value",
    "nbar_numeric",
    "nbar_projected",
    "nbar_eq1",
    "nbar_eq15",
    "eq15_term1",
    "eq15_term2",
    "flags",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::config(format!("unknown output format `{other}`"))),
        }
    }
}

/// One CSV line; empty numeric cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub vary: String,
    pub value: f64,
    pub nbar_numeric: Option<f64>,
    pub nbar_projected: Option<f64>,
    pub nbar_eq1: Option<f64>,
    pub nbar_eq15: Option<f64>,
    pub eq15_term1: Option<f64>,
    pub eq15_term2: Option<f64>,
    pub flags: String,
}

impl From<&SweepRow> for CsvRecord {
    fn from(r: &SweepRow) -> Self {
        Self {
            vary: r.vary.name().to_string(),
            value: r.value,
            nbar_numeric: r.nbar(Estimator::NumericFull),
            nbar_projected: r.nbar(Estimator::NumericProjected),
            nbar_eq1: r.nbar(Estimator::Eq1),
            nbar_eq15: r.nbar(Estimator::Eq15),
            eq15_term1: r.eq15_terms.map(|t| t.zeroth),
            eq15_term2: r.eq15_terms.map(|t| t.recoil),
            flags: r.flags(),
        }
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

pub fn csv_string(records: &[CsvRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::config(format!("CSV encoding failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record([
            r.vary.clone(),
            number(r.value),
            cell(r.nbar_numeric),
            cell(r.nbar_projected),
            cell(r.nbar_eq1),
            cell(r.nbar_eq15),
            cell(r.eq15_term1),
            cell(r.eq15_term2),
            r.flags.clone(),
        ])
        .map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::config(format!("CSV encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is ASCII"))
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let records: Vec<CsvRecord> = rows.iter().map(CsvRecord::from).collect();
    csv_string(&records)
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<CsvRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r
        .headers()
        .map_err(|e| Error::config(format!("unreadable CSV header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::config(format!(
            "unexpected CSV header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize()
        .map(|rec| rec.map_err(|e| Error::config(format!("malformed CSV row: {e}"))))
        .collect()
}

#[derive(Serialize)]
struct JsonReport<'a> {
    rows: &'a [SweepRow],
}

pub fn rows_to_json(rows: &[SweepRow]) -> Result<String> {
    serde_json::to_string_pretty(&JsonReport { rows })
        .map_err(|e| Error::Numerical(format!("JSON encoding failed: {e}")))
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn colour(e: Estimator) -> &'static str {
    match e {
        Estimator::NumericFull => "#1f77b4",
        Estimator::NumericProjected => "#9467bd",
        Estimator::Eq1 => "#2ca02c",
        Estimator::Eq15 => "#d62728",
        Estimator::Eq16 => "#ff7f0e",
        Estimator::Eq17 => "#8c564b",
    }
}

fn dash(e: Estimator) -> &'static str {
    match e {
        Estimator::NumericFull | Estimator::NumericProjected => "",
        Estimator::Eq1 => " stroke-dasharray=\"2,4\"",
        _ => " stroke-dasharray=\"8,4\"",
    }
}

/// Static line chart, one polyline per estimator, logarithmic y axis.
pub fn rows_to_svg(rows: &[SweepRow], title: &str) -> String {
    let estimators: Vec<Estimator> = Estimator::ALL
        .into_iter()
        .filter(|e| rows.iter().any(|r| r.nbar(*e).is_some_and(|v| v > 0.0)))
        .collect();
    let positive: Vec<f64> = rows
        .iter()
        .flat_map(|r| estimators.iter().filter_map(|e| r.nbar(*e)))
        .filter(|v| *v > 0.0 && v.is_finite())
        .collect();
    let (lo, hi) = positive
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (dmin, dmax) = if positive.is_empty() {
        (-3, 0)
    } else {
        let a = lo.log10().floor() as i32;
        let b = hi.log10().ceil() as i32;
        (a, if b > a { b } else { a + 1 })
    };
    let xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let (xmin, xmax) = match (xs.first(), xs.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a - 0.5, a + 0.5),
        _ => (0.0, 1.0),
    };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let py = |y: f64| MARGIN_TOP + (dmax as f64 - y.log10()) / (dmax - dmin) as f64 * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>"
    );
    for k in dmin..=dmax {
        let y = py(10f64.powi(k));
        let _ = writeln!(
            s,
            "<line x1=\"{MARGIN_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>",
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{k}</text>",
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    for &x in &xs {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            px(x),
            MARGIN_TOP + plot_h + 18.0,
            x
        );
    }
    let axis = rows.first().map(|r| r.vary.name()).unwrap_or("");
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{axis}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        "<text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">mean phonon number</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    for (i, &e) in estimators.iter().enumerate() {
        let points: Vec<String> = rows
            .iter()
            .filter_map(|r| r.nbar(e).filter(|v| *v > 0.0).map(|v| (r.value, v)))
            .map(|(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{} points=\"{}\"/>",
            colour(e),
            dash(e),
            points.join(" ")
        );
        let ly = MARGIN_TOP + 16.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"2\"{}/>",
            lx + 28.0,
            colour(e),
            dash(e)
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            lx + 34.0,
            ly + 4.0,
            e.name()
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(rows: &[SweepRow], format: Format, title: &str) -> Result<String> {
    match format {
        Format::Csv => rows_to_csv(rows),
        Format::Json => rows_to_json(rows),
        Format::Svg => Ok(rows_to_svg(rows, title)),
    }
}

pub fn write(rows: &[SweepRow], path: &Path, format: Format, title: &str) -> Result<()> {
    fs::write(path, render(rows, format, title)?)?;
    Ok(())
}
