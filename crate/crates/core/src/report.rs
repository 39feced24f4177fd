//! CSV and SVG output for experiment results.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{QcsError, Result};
use crate::harness::CellSummary;

pub const CSV_HEADER: &str = "family,n,k_or_r,m,L,delta,lambda,zeta,trials,mean_err,stderr,slope_group";

/// One row per grid cell.
pub fn csv_string(cells: &[CellSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in cells {
        let p = &c.cell;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.family.short_name(),
            p.n(),
            p.k_or_r(),
            p.m,
            p.levels,
            p.delta,
            p.lambda,
            p.zeta,
            c.trials,
            c.mean_error,
            c.std_error,
            p.slope_group()
        )
        .unwrap();
    }
    out
}

pub fn emit_csv(cells: &[CellSummary], path: &Path) -> Result<()> {
    if cells.is_empty() {
        return Err(QcsError::InvalidParameter("no cells to write".into()));
    }
    fs::write(path, csv_string(cells))?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Log-log plot of mean error against m, one polyline per curve.
pub fn svg_string(cells: &[CellSummary]) -> Result<String> {
    let pts: Vec<(f64, f64)> =
        cells.iter().filter(|c| c.mean_error > 0.0).map(|c| (c.cell.m as f64, c.mean_error)).collect();
    if pts.is_empty() {
        return Err(QcsError::InvalidParameter("no positive errors to plot".into()));
    }
    let (xlo, xhi) = log_range(pts.iter().map(|p| p.0));
    let (ylo, yhi) = log_range(pts.iter().map(|p| p.1));
    let sx = |m: f64| LEFT + (m.log10() - xlo) / (xhi - xlo) * (WIDTH - LEFT - RIGHT);
    let sy = |e: f64| HEIGHT - BOTTOM - (e.log10() - ylo) / (yhi - ylo) * (HEIGHT - TOP - BOTTOM);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0)
        .unwrap();
    for d in decade_ticks(xlo, xhi) {
        let x = sx(10f64.powf(d));
        writeln!(s, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y1 + 5.0).unwrap();
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
            y1 + 20.0,
            tick_label(d)
        )
        .unwrap();
    }
    for d in decade_ticks(ylo, yhi) {
        let y = sy(10f64.powf(d));
        writeln!(s, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0).unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            y + 4.0,
            tick_label(d)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">m</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    writeln!(s, r#"<text x="15" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {:.2})">mean error</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0).unwrap();

    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for c in cells.iter().filter(|c| c.mean_error > 0.0) {
        let g = c.cell.slope_group();
        let p = (sx(c.cell.m as f64), sy(c.mean_error));
        match groups.iter_mut().find(|(name, _)| *name == g) {
            Some((_, v)) => v.push(p),
            None => groups.push((g, vec![p])),
        }
    }
    for (i, (name, line)) in groups.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = line.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, coords.join(" "))
            .unwrap();
        for (x, y) in line {
            writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#).unwrap();
        }
        let ly = TOP + 15.0 + 18.0 * i as f64;
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            x1 + 10.0,
            x1 + 30.0
        )
        .unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, x1 + 35.0, ly + 4.0, xml_escape(name))
            .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_loglog(cells: &[CellSummary], path: &Path) -> Result<()> {
    fs::write(path, svg_string(cells)?)?;
    Ok(())
}

/// Log10 range padded to avoid zero width.
fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.log10()), hi.max(v.log10())));
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn decade_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let ticks: Vec<f64> = (lo.ceil() as i32..=hi.floor() as i32).map(f64::from).collect();
    if ticks.is_empty() {
        vec![(lo + hi) / 2.0]
    } else {
        ticks
    }
}

fn tick_label(d: f64) -> String {
    let v = 10f64.powf(d);
    if d.fract() == 0.0 {
        format!("1e{}", d as i32)
    } else {
        format!("{v:.3}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
