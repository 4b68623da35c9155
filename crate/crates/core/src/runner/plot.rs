//! Deterministic SVG line charts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::font::{text_path, text_width, Anchor};
use super::format::fmt_sig6;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 500.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 360.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Force the y range to include zero.
    pub y_from_zero: bool,
}

/// Round tick positions covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        let pad = (lo.abs() * 0.1).max(0.5);
        (lo - pad, hi + pad)
    };
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).floor() as i64;
    let end = (hi / step).ceil() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn text(out: &mut String, s: &str, x: f64, y: f64, size: f64, anchor: Anchor, vertical: bool) {
    let d = text_path(s, x, y, size, anchor, vertical);
    if !d.is_empty() {
        writeln!(out, r##"<path d="{d}" fill="none" stroke="#000" stroke-width="1"/>"##).unwrap();
    }
}

pub fn render_line_chart(chart: &LineChart) -> String {
    let pts = chart.series.iter().flat_map(|s| s.points.iter());
    let (mut xmin, mut xmax, mut ymin, mut ymax) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts.filter(|p| p.0.is_finite() && p.1.is_finite()) {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
    }
    if chart.y_from_zero {
        ymin = ymin.min(0.0);
    }
    let xt = nice_ticks(xmin, xmax);
    let yt = nice_ticks(ymin, ymax);
    let (x0, x1) = (xt[0], xt[xt.len() - 1]);
    let (y0, y1) = (yt[0], yt[yt.len() - 1]);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (RIGHT - LEFT);
    let sy = |y: f64| BOTTOM - (y - y0) / (y1 - y0) * (BOTTOM - TOP);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>"##).unwrap();
    writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="#000" stroke-width="1"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    )
    .unwrap();
    for &t in &xt {
        let x = sx(t);
        writeln!(out, r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{}" stroke="#000"/>"##, BOTTOM + 5.0).unwrap();
        text(&mut out, &fmt_sig6(t), x, BOTTOM + 20.0, 9.0, Anchor::Middle, false);
    }
    for &t in &yt {
        let y = sy(t);
        writeln!(out, r##"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#000"/>"##, LEFT - 5.0).unwrap();
        text(&mut out, &fmt_sig6(t), LEFT - 9.0, y + 4.5, 9.0, Anchor::End, false);
    }
    text(&mut out, &chart.title, (LEFT + RIGHT) / 2.0, 30.0, 12.0, Anchor::Middle, false);
    text(&mut out, &chart.x_label, (LEFT + RIGHT) / 2.0, BOTTOM + 45.0, 11.0, Anchor::Middle, false);
    text(&mut out, &chart.y_label, 25.0, (TOP + BOTTOM) / 2.0, 11.0, Anchor::Middle, true);

    for (k, s) in chart.series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        // a missing value breaks the line instead of bridging it
        let mut runs: Vec<Vec<String>> = vec![Vec::new()];
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                runs.last_mut().unwrap().push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else if !runs.last().unwrap().is_empty() {
                runs.push(Vec::new());
            }
        }
        for run in runs.iter().filter(|r| r.len() > 1) {
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                run.join(" ")
            )
            .unwrap();
        }
        for c in runs.iter().flatten() {
            let (cx, cy) = c.split_once(',').unwrap();
            writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>"#).unwrap();
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            RIGHT + 15.0,
            RIGHT + 35.0
        )
        .unwrap();
        let size = 10.0;
        let max_w = WIDTH - RIGHT - 50.0;
        let size = if text_width(&s.name, size) > max_w {
            size * max_w / text_width(&s.name, size)
        } else {
            size
        };
        text(&mut out, &s.name, RIGHT + 42.0, ly + size / 2.0, size, Anchor::Start, false);
    }
    out.push_str("</svg>\n");
    out
}

/// Header-indexed view of a CSV file.
pub struct Table {
    path: PathBuf,
    headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let mut rdr = csv::Reader::from_path(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        let headers = rdr
            .headers()
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Table {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Data(format!("{}: missing column '{name}'", self.path.display()))
        })
    }

    pub fn number(&self, row: usize, col: usize) -> Result<f64> {
        let v = &self.rows[row][col];
        v.parse().map_err(|_| {
            Error::Data(format!(
                "{}: row {}, column '{}': '{v}' is not a number",
                self.path.display(),
                row + 2,
                self.headers[col]
            ))
        })
    }
}

/// NMP / FDR / Power against `p`, one chart per (scenario, p0) group.
pub fn aggregate_charts(table: &Table) -> Result<Vec<(String, LineChart)>> {
    let cs = table.column("scenario")?;
    let cp = table.column("p")?;
    let cp0 = table.column("p0")?;
    let cm = table.column("method")?;
    let metrics = [
        ("nmp", "NMP", table.column("mean_NMP")?),
        ("fdr", "FDR", table.column("FDR")?),
        ("power", "Power", table.column("Power")?),
    ];
    let mut groups: BTreeMap<(u64, u64), BTreeMap<String, Vec<usize>>> = BTreeMap::new();
    for r in 0..table.rows.len() {
        let key = (table.number(r, cs)? as u64, table.number(r, cp0)? as u64);
        groups
            .entry(key)
            .or_default()
            .entry(table.rows[r][cm].clone())
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for ((s, p0), methods) in &groups {
        for &(file, label, col) in &metrics {
            let mut series = Vec::new();
            for (name, rows) in methods {
                let mut points = rows
                    .iter()
                    .map(|&r| Ok((table.number(r, cp)?, table.number(r, col)?)))
                    .collect::<Result<Vec<_>>>()?;
                points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
                series.push(Series {
                    name: name.clone(),
                    points,
                });
            }
            out.push((
                format!("{file}_scenario{s}_p0{p0}.svg"),
                LineChart {
                    title: format!("Scenario {s}, p0 = {p0}"),
                    x_label: "p".into(),
                    y_label: label.into(),
                    series,
                    y_from_zero: true,
                },
            ));
        }
    }
    Ok(out)
}

/// FD against TP along the ordered coefficients, one chart per scenario entry.
pub fn fdtp_charts(table: &Table) -> Result<Vec<(String, LineChart)>> {
    let ci = table.column("scenario_index")?;
    let cs = table.column("scenario")?;
    let cn = table.column("n")?;
    let cp = table.column("p")?;
    let cm = table.column("method")?;
    let ck = table.column("k")?;
    let ctp = table.column("tp")?;
    let cfd = table.column("fd")?;
    let mut groups: BTreeMap<u64, (String, BTreeMap<String, Vec<(f64, f64, f64)>>)> = BTreeMap::new();
    for r in 0..table.rows.len() {
        let idx = table.number(r, ci)? as u64;
        let title = format!(
            "Scenario {}, n = {}, p = {}",
            table.rows[r][cs], table.rows[r][cn], table.rows[r][cp]
        );
        let entry = groups.entry(idx).or_insert_with(|| (title, BTreeMap::new()));
        entry.1.entry(table.rows[r][cm].clone()).or_default().push((
            table.number(r, ck)?,
            table.number(r, ctp)?,
            table.number(r, cfd)?,
        ));
    }
    Ok(groups
        .into_iter()
        .map(|(idx, (title, methods))| {
            let series = methods
                .into_iter()
                .map(|(name, mut pts)| {
                    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
                    let points = std::iter::once((0.0, 0.0))
                        .chain(pts.into_iter().map(|(_, tp, fd)| (tp, fd)))
                        .collect();
                    Series { name, points }
                })
                .collect();
            (
                format!("fdtp_{idx}.svg"),
                LineChart {
                    title,
                    x_label: "TP".into(),
                    y_label: "FD".into(),
                    series,
                    y_from_zero: true,
                },
            )
        })
        .collect())
}

/// Renders every chart derivable from `aggregate.csv` / `fdtp.csv` in
/// `input_dir` into `output_dir`, returning the written file names.
pub fn emit_plots(input_dir: &Path, output_dir: &Path) -> Result<Vec<String>> {
    let agg = input_dir.join("aggregate.csv");
    if !agg.exists() {
        return Err(Error::Data(format!("{} not found", agg.display())));
    }
    let mut charts = aggregate_charts(&Table::read(&agg)?)?;
    let fdtp = input_dir.join("fdtp.csv");
    if fdtp.exists() {
        charts.extend(fdtp_charts(&Table::read(&fdtp)?)?);
    }
    if charts.is_empty() {
        charts.push((
            "empty.svg".into(),
            LineChart {
                title: "No data".into(),
                x_label: "p".into(),
                y_label: "NMP".into(),
                series: Vec::new(),
                y_from_zero: true,
            },
        ));
    }
    std::fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let mut names = Vec::new();
    for (name, chart) in charts {
        let path = output_dir.join(&name);
        std::fs::write(&path, render_line_chart(&chart)).map_err(|e| Error::io(&path, e))?;
        names.push(name);
    }
    Ok(names)
}
