use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, Utc};

use crate::diesel::DieselGenSpec;
use crate::scenario::{CaseSummary, ComparisonReport, StepLog};

use super::series::format_timestamp;
use super::DataError;

/// Fixed six-decimal rendering used by every numeric CSV column.
pub fn format_fixed(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), DataError> {
    File::create(path)
        .and_then(|mut f| f.write_all(body.as_bytes()))
        .map_err(|e| DataError::io(path, e))
}

fn dispatch_header(n: usize) -> Vec<String> {
    let mut cols: Vec<String> = [
        "timestamp",
        "P_load",
        "P_av_pv",
        "alpha_g",
        "P_disp_g",
        "P_exp",
        "P_disp_pv",
        "P_curtail",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 1..=n {
        cols.push(format!("S_{i}"));
        cols.push(format!("P_disp_dg_{i}"));
        cols.push(format!("fuel_{i}"));
    }
    cols
}

/// Per-step dispatch table. Generator columns are numbered from 1 in fleet
/// order.
pub fn write_dispatch_csv(
    steps: &[StepLog],
    fleet: &[DieselGenSpec],
    path: impl AsRef<Path>,
) -> Result<(), DataError> {
    let mut s = dispatch_header(fleet.len()).join(",");
    s.push('\n');
    for step in steps {
        let d = &step.decision;
        let mut row = vec![
            format_timestamp(&step.timestamp),
            format_fixed(step.inputs.load_kw),
            format_fixed(step.inputs.pv_available_kw),
            u8::from(step.inputs.grid_on).to_string(),
            format_fixed(d.grid_import_kw),
            format_fixed(d.export_kw),
            format_fixed(d.pv_dispatch_kw),
            format_fixed(d.curtail_kw),
        ];
        for i in 0..fleet.len() {
            row.push(u8::from(d.state.is_on(i)).to_string());
            row.push(format_fixed(d.diesel_kw[i]));
            row.push(format_fixed(d.fuel_lph[i]));
        }
        s.push_str(&row.join(","));
        s.push('\n');
    }
    write_file(path.as_ref(), &s)
}

/// One parsed row of a dispatch CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchRow {
    pub timestamp: DateTime<Utc>,
    pub load_kw: f64,
    pub pv_available_kw: f64,
    pub grid_on: bool,
    pub grid_import_kw: f64,
    pub export_kw: f64,
    pub pv_dispatch_kw: f64,
    pub curtail_kw: f64,
    pub status: Vec<bool>,
    pub diesel_kw: Vec<f64>,
    pub fuel_lph: Vec<f64>,
}

pub fn read_dispatch_csv(path: impl AsRef<Path>) -> Result<Vec<DispatchRow>, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| DataError::Header(e.to_string()))?
        .clone();
    if headers.len() < 8 || (headers.len() - 8) % 3 != 0 {
        return Err(DataError::Header(format!(
            "unexpected column count {}",
            headers.len()
        )));
    }
    let n = (headers.len() - 8) / 3;
    if headers
        .iter()
        .ne(dispatch_header(n).iter().map(String::as_str))
    {
        return Err(DataError::Header("not a dispatch table".to_string()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| DataError::Format(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64, DataError> {
            rec[i].parse().map_err(|_| DataError::Row {
                line,
                message: format!("column {}: '{}' is not a number", &headers[i], &rec[i]),
            })
        };
        let flag = |i: usize| -> Result<bool, DataError> {
            match &rec[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(DataError::Row {
                    line,
                    message: format!("column {}: '{other}' is not 0 or 1", &headers[i]),
                }),
            }
        };
        let timestamp = DateTime::parse_from_rfc3339(&rec[0])
            .map_err(|e| DataError::Row {
                line,
                message: format!("bad timestamp: {e}"),
            })?
            .with_timezone(&Utc);
        let mut row = DispatchRow {
            timestamp,
            load_kw: num(1)?,
            pv_available_kw: num(2)?,
            grid_on: flag(3)?,
            grid_import_kw: num(4)?,
            export_kw: num(5)?,
            pv_dispatch_kw: num(6)?,
            curtail_kw: num(7)?,
            status: Vec::with_capacity(n),
            diesel_kw: Vec::with_capacity(n),
            fuel_lph: Vec::with_capacity(n),
        };
        for i in 0..n {
            let c = 8 + 3 * i;
            row.status.push(flag(c)?);
            row.diesel_kw.push(num(c + 1)?);
            row.fuel_lph.push(num(c + 2)?);
        }
        out.push(row);
    }
    Ok(out)
}

const SUMMARY_ROWS: [&str; 7] = [
    "E_disp_g_MWh",
    "E_disp_dg_MWh",
    "E_disp_pv_MWh",
    "E_exp_MWh",
    "Cost_grid_kUSD",
    "Cost_diesel_kUSD",
    "Total_kUSD",
];

fn summary_values(s: &CaseSummary) -> [Option<f64>; 7] {
    let pv = |x: f64| s.has_pv.then_some(x);
    [
        Some(s.energy.grid_mwh),
        Some(s.energy.diesel_mwh),
        pv(s.energy.pv_mwh),
        Some(s.energy.export_mwh),
        Some(s.cost.grid),
        Some(s.cost.diesel),
        Some(s.cost.total),
    ]
}

fn fixed2(x: f64) -> String {
    format!("{:.2}", crate::scenario::round_half_up(x, 2))
}

/// Summary table as CSV: one row per metric, one column per case, then
/// one row per pairwise reduction (percent).
pub fn summary_csv(summaries: &[CaseSummary], comparison: Option<&ComparisonReport>) -> String {
    let mut s = String::from("metric");
    for c in summaries {
        s.push(',');
        s.push_str(&c.name);
    }
    s.push('\n');
    let values: Vec<_> = summaries.iter().map(summary_values).collect();
    for (r, name) in SUMMARY_ROWS.iter().enumerate() {
        s.push_str(name);
        for v in &values {
            s.push(',');
            s.push_str(&v[r].map_or_else(|| "NA".to_string(), fixed2));
        }
        s.push('\n');
    }
    if let Some(cmp) = comparison {
        for red in &cmp.reductions {
            s.push_str(&format!("Reduction_pct {} vs {}", red.case, red.baseline));
            for c in summaries {
                s.push(',');
                if c.name == red.case {
                    s.push_str(&red.formatted());
                }
            }
            s.push('\n');
        }
    }
    s
}

/// Human-readable version of [`summary_csv`].
pub fn render_summary_table(
    summaries: &[CaseSummary],
    comparison: Option<&ComparisonReport>,
) -> String {
    let label_w = SUMMARY_ROWS.iter().map(|r| r.len()).max().unwrap_or(0);
    let col_w = summaries
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0)
        .max(10);
    let mut s = format!("{:<label_w$}", "");
    for c in summaries {
        s.push_str(&format!("  {:>col_w$}", c.name));
    }
    s.push('\n');
    let values: Vec<_> = summaries.iter().map(summary_values).collect();
    for (r, name) in SUMMARY_ROWS.iter().enumerate() {
        s.push_str(&format!("{name:<label_w$}"));
        for v in &values {
            let cell = v[r].map_or_else(|| "N/A".to_string(), fixed2);
            s.push_str(&format!("  {cell:>col_w$}"));
        }
        s.push('\n');
    }
    if let Some(cmp) = comparison {
        if summaries.len() > 1 && !cmp.reductions.is_empty() {
            s.push('\n');
            for red in &cmp.reductions {
                s.push_str(&format!(
                    "{} vs {}: {}%\n",
                    red.case,
                    red.baseline,
                    red.formatted()
                ));
            }
        }
    }
    s
}

/// Writes the CSV to `path` and the text table next to it with a `.txt`
/// extension.
pub fn write_summary(
    summaries: &[CaseSummary],
    comparison: Option<&ComparisonReport>,
    path: impl AsRef<Path>,
) -> Result<(), DataError> {
    let path = path.as_ref();
    write_file(path, &summary_csv(summaries, comparison))?;
    write_file(
        &path.with_extension("txt"),
        &render_summary_table(summaries, comparison),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{compare_cases, CostSummary, EnergySummary};

    fn case(name: &str, pv: bool, total: f64) -> CaseSummary {
        CaseSummary {
            name: name.to_string(),
            has_pv: pv,
            energy: EnergySummary {
                grid_mwh: 667.32,
                diesel_mwh: 919.98,
                pv_mwh: 100.0,
                ..Default::default()
            },
            cost: CostSummary {
                grid: 100.1,
                diesel: total - 100.1,
                total,
                ..Default::default()
            },
        }
    }

    #[test]
    fn fixed_format() {
        assert_eq!(format_fixed(1.5), "1.500000");
        assert_eq!(format_fixed(-0.0), "0.000000");
        assert_eq!(format_fixed(-1e-9), "0.000000");
        assert_eq!(format_fixed(-2.25), "-2.250000");
    }

    #[test]
    fn csv_layout() {
        let s = [
            case("Case 1", false, 862.25),
            case("Case 2", true, 686.55),
            case("Case 3", true, 483.08),
        ];
        let cmp = compare_cases(&s).unwrap();
        let csv = summary_csv(&s, Some(&cmp));
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "metric,Case 1,Case 2,Case 3");
        assert_eq!(lines[1], "E_disp_g_MWh,667.32,667.32,667.32");
        assert_eq!(lines[3], "E_disp_pv_MWh,NA,100.00,100.00");
        assert!(lines.contains(&"Reduction_pct Case 3 vs Case 2,,,29.64"));
        assert!(lines.contains(&"Reduction_pct Case 3 vs Case 1,,,43.97"));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn table_footer() {
        let s = [case("Case 2", true, 686.55), case("Case 3", true, 483.08)];
        let cmp = compare_cases(&s).unwrap();
        let t = render_summary_table(&s, Some(&cmp));
        assert!(t.contains("Case 3 vs Case 2: 29.64%"), "{t}");
        let single = render_summary_table(&[case("Case 1", false, 1.0)], None);
        assert!(single.contains("N/A"));
        assert!(!single.contains("vs"));
    }
}
