//! Minimal deterministic SVG line charts of a dispatch run.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diesel::DieselGenSpec;
use crate::scenario::StepLog;

use super::DataError;

pub const PLOT_FILES: [&str; 4] = [
    "load_vs_supply.svg",
    "grid_dispatch.svg",
    "pv_dispatch.svg",
    "diesel_dispatch.svg",
];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

struct Series {
    label: String,
    values: Vec<f64>,
}

fn chart(title: &str, series: &[Series]) -> String {
    let n = series.iter().map(|s| s.values.len()).max().unwrap_or(0);
    let ymax = series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(0.0, f64::max)
        .max(1.0)
        * 1.05;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |k: usize| MARGIN + plot_w * k as f64 / (n.max(2) - 1) as f64;
    let y = |v: f64| HEIGHT - MARGIN - plot_h * v / ymax;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        r#"<path d="M{m},{t} V{b} H{r}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for frac in [0.0, 0.5, 1.0] {
        let v = ymax / 1.05 * frac;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{:.0} kW</text>"#,
            MARGIN - 4.0,
            y(v) + 3.0,
            v
        );
    }
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (k, &v) in ser.values.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if k == 0 { "M" } else { " L" },
                x(k),
                y(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<path d="{d}" stroke="{color}" stroke-width="1.2" fill="none"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            MARGIN + 10.0 + 150.0 * i as f64,
            HEIGHT - 15.0,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

fn series(label: &str, steps: &[StepLog], f: impl Fn(&StepLog) -> f64) -> Series {
    Series {
        label: label.to_string(),
        values: steps.iter().map(f).collect(),
    }
}

/// Writes the four charts listed in [`PLOT_FILES`] into `out_dir`.
pub fn render_plots(
    steps: &[StepLog],
    fleet: &[DieselGenSpec],
    out_dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, DataError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| DataError::io(out_dir, e))?;

    let supply = chart(
        "Load and available supply",
        &[
            series("load", steps, |s| s.inputs.load_kw),
            series("available supply", steps, |s| {
                s.inputs.grid_capability()
                    + s.inputs.pv_available_kw
                    + fleet.iter().map(|g| g.rated_kw).sum::<f64>()
            }),
        ],
    );
    let grid = chart(
        "Grid",
        &[
            series("grid available", steps, |s| s.inputs.grid_capability()),
            series("grid import", steps, |s| s.decision.grid_import_kw),
            series("export", steps, |s| s.decision.export_kw),
        ],
    );
    let pv = chart(
        "PV",
        &[
            series("PV available", steps, |s| s.inputs.pv_available_kw),
            series("PV dispatched", steps, |s| s.decision.pv_dispatch_kw),
            series("PV exported", steps, |s| s.decision.export_kw),
        ],
    );
    let dg_series: Vec<Series> = fleet
        .iter()
        .enumerate()
        .map(|(i, g)| series(&g.id, steps, |s| s.decision.diesel_kw[i]))
        .collect();
    let diesel = chart("Diesel generators", &dg_series);

    let mut written = Vec::new();
    for (name, body) in PLOT_FILES.iter().zip([supply, grid, pv, diesel]) {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| DataError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_chart_is_well_formed() {
        let s = chart("t", &[]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
    }

    #[test]
    fn scales_into_frame() {
        let s = chart(
            "t",
            &[Series {
                label: "a".into(),
                values: vec![0.0, 100.0],
            }],
        );
        assert!(s.contains("M50.00,310.00 L910.00,"), "{s}");
    }
}
