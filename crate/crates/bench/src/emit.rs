//! File output: `runs.csv`, `profile_<metric>.csv` and `profile_<metric>.svg`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::profile::Profiles;
use crate::suite::RunRecord;

pub const RUNS_FILE: &str = "runs.csv";

pub fn write_runs(path: &Path, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if records.is_empty() {
        w.write_record(["problem", "n", "solver", "status", "iterations", "fevals", "gevals", "final_f", "final_gnorm", "wall_time_s"])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs(path: &Path) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_path(path)?.deserialize().collect()
}

#[derive(Serialize)]
struct ProfileRow<'a> {
    solver: &'a str,
    tau: f64,
    rho: f64,
}

pub fn write_profile_csv(path: &Path, profiles: &Profiles) -> csv::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for s in &profiles.solvers {
        for p in &s.points {
            w.serialize(ProfileRow { solver: &s.solver, tau: p.tau, rho: p.rho })?;
        }
    }
    if profiles.solvers.is_empty() {
        w.write_record(["solver", "tau", "rho"])?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Step-curve chart on a log τ axis with a dotted vertical at `τ = 1`.
pub fn render_svg(profiles: &Profiles) -> String {
    let taus: Vec<f64> = profiles.solvers.iter().flat_map(|s| s.points.iter().map(|p| p.tau)).collect();
    let lo = taus.iter().copied().fold(f64::INFINITY, f64::min).min(0.5);
    let hi = taus.iter().copied().fold(0.0, f64::max).max(2.0);
    let (a, b) = (lo.log2(), hi.log2());
    let px = |tau: f64| MARGIN + (tau.log2() - a) / (b - a) * (WIDTH - 2.0 * MARGIN);
    let py = |rho: f64| HEIGHT - MARGIN - rho * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let x1 = px(1.0);
    let _ = writeln!(
        svg,
        r#"<line x1="{x1:.2}" y1="{MARGIN}" x2="{x1:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="2,3"/>"#,
        HEIGHT - MARGIN
    );
    for k in (a.floor() as i32)..=(b.ceil() as i32) {
        let tau = 2f64.powi(k);
        if tau < lo || tau > hi {
            continue;
        }
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">2^{k}</text>"#, px(tau), HEIGHT - MARGIN + 16.0);
    }
    for (i, rho) in [0.0, 0.25, 0.5, 0.75, 1.0].iter().enumerate() {
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#, MARGIN - 6.0, py(*rho) + 4.0, ["0", "0.25", "0.5", "0.75", "1"][i]);
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">τ ({})</text>"#, WIDTH / 2.0, HEIGHT - 12.0, profiles.metric);
    for (i, s) in profiles.solvers.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut pts = String::new();
        let mut prev: Option<f64> = None;
        for p in &s.points {
            let (x, y) = (px(p.tau), py(p.rho));
            if let Some(py_prev) = prev {
                let _ = write!(pts, "{x:.2},{py_prev:.2} ");
            }
            let _ = write!(pts, "{x:.2},{y:.2} ");
            prev = Some(y);
        }
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.trim_end());
        let ly = MARGIN + 16.0 + 16.0 * i as f64;
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{ly:.2}" font-size="12" fill="{color}">{}</text>"#, MARGIN + 8.0, s.solver);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `profile_<metric>.csv` and `.svg` into `dir`; returns both paths.
pub fn write_profile(dir: &Path, profiles: &Profiles) -> csv::Result<(PathBuf, PathBuf)> {
    let csv_path = dir.join(format!("profile_{}.csv", profiles.metric));
    let svg_path = dir.join(format!("profile_{}.svg", profiles.metric));
    write_profile_csv(&csv_path, profiles)?;
    fs::write(&svg_path, render_svg(profiles))?;
    Ok((csv_path, svg_path))
}

/// Writes the run table and one profile per entry of `profiles` into `dir`.
pub fn emit(records: &[RunRecord], profiles: &[Profiles], dir: &Path) -> csv::Result<()> {
    fs::create_dir_all(dir)?;
    write_runs(&dir.join(RUNS_FILE), records)?;
    for p in profiles {
        write_profile(dir, p)?;
    }
    Ok(())
}
