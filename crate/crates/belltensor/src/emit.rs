//! CSV and SVG output for scan grids.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use belltensor_core::scan::{BiasedRecord, DeformedRecord};

use crate::error::{Error, Result};

/// `v` rounded to 12 significant digits, printed without exponent.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let s = rounded.to_string();
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// A scan record with named columns.
pub trait Record {
    fn fields() -> &'static [&'static str];
    fn row(&self) -> Vec<String>;
    fn violated(&self) -> bool;
}

impl Record for DeformedRecord {
    fn fields() -> &'static [&'static str] {
        &DeformedRecord::FIELDS
    }

    fn row(&self) -> Vec<String> {
        vec![
            format_number(self.y),
            format_number(self.t),
            format_number(self.norm_m),
            format_number(self.norm_c),
            format_number(self.ratio),
            self.violated.to_string(),
            self.invertible.to_string(),
        ]
    }

    fn violated(&self) -> bool {
        self.violated
    }
}

impl Record for BiasedRecord {
    fn fields() -> &'static [&'static str] {
        &BiasedRecord::FIELDS
    }

    fn row(&self) -> Vec<String> {
        vec![
            format_number(self.y),
            format_number(self.p),
            format_number(self.q),
            format_number(self.norm_g),
            format_number(self.norm_c),
            format_number(self.ratio),
            self.violated.to_string(),
            self.invertible.to_string(),
        ]
    }

    fn violated(&self) -> bool {
        self.violated
    }
}

pub fn write_csv<R: Record, W: Write>(records: &[R], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::fields())?;
    for r in records {
        w.write_record(r.row())?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv<R: Record>(records: &[R], path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(belltensor_core::Error::Empty { what: "scan grid" }.into());
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(records, file).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            what: "CSV",
            reason: format!("{other:?}"),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Filled cells where the record is violated.
    Region,
    /// One polyline per fixed game parameter, over `y`.
    Curves,
}

/// Value drawn by a curves plot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveField {
    Norm,
    Ratio,
}

pub struct RegionPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub cells: Vec<(f64, f64, bool)>,
}

pub struct CurvePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn key(v: f64) -> i64 {
    (v * 1e9).round() as i64
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

fn axes(out: &mut String, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for (v, x) in [(x0, l), (x1, r)] {
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, b + 16.0, format_number(v));
    }
    for (v, y) in [(y0, b), (y1, t)] {
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, l - 4.0, y + 4.0, format_number(v));
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl RegionPlot {
    pub fn to_svg(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.title, &self.x_label, &self.y_label);
        let mut xs: Vec<f64> = self.cells.iter().map(|c| c.0).collect();
        let mut ys: Vec<f64> = self.cells.iter().map(|c| c.1).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(f64::total_cmp);
            v.dedup_by_key(|x| key(*x));
        }
        let (nx, ny) = (xs.len().max(1) as f64, ys.len().max(1) as f64);
        let cw = (WIDTH - 2.0 * MARGIN) / nx;
        let ch = (HEIGHT - 2.0 * MARGIN) / ny;
        let xi: BTreeMap<i64, usize> = xs.iter().enumerate().map(|(i, &x)| (key(x), i)).collect();
        let yi: BTreeMap<i64, usize> = ys.iter().enumerate().map(|(i, &y)| (key(y), i)).collect();
        let _ = writeln!(out, r##"<g fill="#d62728" stroke="none">"##);
        for &(x, y, on) in &self.cells {
            if !on {
                continue;
            }
            let px = MARGIN + xi[&key(x)] as f64 * cw;
            let py = HEIGHT - MARGIN - (yi[&key(y)] as f64 + 1.0) * ch;
            let _ = writeln!(out, r#"<rect x="{px:.3}" y="{py:.3}" width="{:.3}" height="{:.3}"/>"#, cw, ch);
        }
        let _ = writeln!(out, "</g>");
        let xr = (xs.first().copied().unwrap_or(0.0), xs.last().copied().unwrap_or(1.0));
        let yr = (ys.first().copied().unwrap_or(0.0), ys.last().copied().unwrap_or(1.0));
        axes(&mut out, xr, yr);
        out.push_str("</svg>\n");
        out
    }
}

impl CurvePlot {
    pub fn to_svg(&self) -> String {
        let mut out = String::new();
        header(&mut out, &self.title, &self.x_label, &self.y_label);
        let points = || self.series.iter().flat_map(|s| s.1.iter());
        let xr = range(points().map(|p| p.0));
        let yr = range(points().map(|p| p.1).filter(|v| v.is_finite()));
        let sx = |x: f64| MARGIN + (x - xr.0) / (xr.1 - xr.0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - yr.0) / (yr.1 - yr.0) * (HEIGHT - 2.0 * MARGIN);
        for (i, (label, pts)) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let coords: Vec<String> = pts
                .iter()
                .filter(|p| p.1.is_finite())
                .map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
            let ly = MARGIN + 14.0 + 16.0 * i as f64;
            let lx = WIDTH - MARGIN + 6.0;
            let _ = writeln!(out, r#"<text x="{lx}" y="{ly}" fill="{color}">{}</text>"#, escape(label));
        }
        axes(&mut out, xr, yr);
        out.push_str("</svg>\n");
        out
    }
}

/// Region over `(t, y)` or curves over `y`, one per `t`.
pub fn deformed_svg(records: &[DeformedRecord], kind: PlotKind, field: CurveField) -> String {
    match kind {
        PlotKind::Region => RegionPlot {
            title: "Violation region, deformed CHSH".into(),
            x_label: "t".into(),
            y_label: "y".into(),
            cells: records.iter().map(|r| (r.t, r.y, r.violated)).collect(),
        }
        .to_svg(),
        PlotKind::Curves => {
            let mut series: BTreeMap<i64, (f64, Vec<(f64, f64)>)> = BTreeMap::new();
            for r in records {
                let v = match field {
                    CurveField::Norm => r.norm_m,
                    CurveField::Ratio => r.ratio,
                };
                series.entry(key(r.t)).or_insert((r.t, Vec::new())).1.push((r.y, v));
            }
            CurvePlot {
                title: "Deformed CHSH".into(),
                x_label: "y".into(),
                y_label: field_label(field, "norm_m").into(),
                series: series
                    .into_values()
                    .map(|(t, pts)| (format!("t = {}", format_number(t)), pts))
                    .collect(),
            }
            .to_svg()
        }
    }
}

/// Region over `(p, q)`, filled when any scanned `y` violates, or curves
/// over `y`, one per `(p, q)`.
pub fn biased_svg(records: &[BiasedRecord], kind: PlotKind, field: CurveField) -> String {
    match kind {
        PlotKind::Region => {
            let mut cells: BTreeMap<(i64, i64), (f64, f64, bool)> = BTreeMap::new();
            for r in records {
                let c = cells.entry((key(r.p), key(r.q))).or_insert((r.p, r.q, false));
                c.2 |= r.violated;
            }
            RegionPlot {
                title: "Violation region, biased CHSH".into(),
                x_label: "p".into(),
                y_label: "q".into(),
                cells: cells.into_values().collect(),
            }
            .to_svg()
        }
        PlotKind::Curves => {
            type Series = (f64, f64, Vec<(f64, f64)>);
            let mut series: BTreeMap<(i64, i64), Series> = BTreeMap::new();
            for r in records {
                let v = match field {
                    CurveField::Norm => r.norm_g,
                    CurveField::Ratio => r.ratio,
                };
                series.entry((key(r.p), key(r.q))).or_insert((r.p, r.q, Vec::new())).2.push((r.y, v));
            }
            CurvePlot {
                title: "Biased CHSH".into(),
                x_label: "y".into(),
                y_label: field_label(field, "norm_g").into(),
                series: series
                    .into_values()
                    .map(|(p, q, pts)| (format!("p = {}, q = {}", format_number(p), format_number(q)), pts))
                    .collect(),
            }
            .to_svg()
        }
    }
}

fn field_label(field: CurveField, norm: &'static str) -> &'static str {
    match field {
        CurveField::Norm => norm,
        CurveField::Ratio => "ratio",
    }
}

pub fn emit_svg(svg: &str, path: &Path) -> Result<()> {
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}
