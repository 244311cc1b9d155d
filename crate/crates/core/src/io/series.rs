use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::solar::WeatherRecord;

use super::output::format_fixed;
use super::DataError;

const WEATHER_REQUIRED: [&str; 5] = ["timestamp", "G", "Gb", "Gd", "Ta"];
const WEATHER_OPTIONAL: [&str; 2] = ["Gt", "alpha_g"];
const LOAD_COLUMNS: [&str; 2] = ["timestamp", "P_load"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSample {
    pub timestamp: DateTime<Utc>,
    pub load_kw: f64,
}

pub(crate) fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn parse_timestamp(raw: &str, line: u64) -> Result<DateTime<Utc>, DataError> {
    DateTime::parse_from_rfc3339(raw.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| DataError::Row {
            line,
            message: format!("bad timestamp '{raw}': {e}"),
        })
}

fn parse_number(raw: &str, column: &str, line: u64) -> Result<f64, DataError> {
    let v: f64 = raw.trim().parse().map_err(|_| DataError::Row {
        line,
        message: format!("column {column}: '{raw}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(DataError::Row {
            line,
            message: format!("column {column}: value must be finite"),
        });
    }
    Ok(v)
}

/// Checks strictly increasing, uniformly spaced timestamps.
fn check_steps(stamps: &[(u64, DateTime<Utc>)]) -> Result<(), DataError> {
    let Some(first_step) = stamps.windows(2).next().map(|w| w[1].1 - w[0].1) else {
        return Ok(());
    };
    for w in stamps.windows(2) {
        let step = w[1].1 - w[0].1;
        if step <= chrono::Duration::zero() {
            return Err(DataError::Row {
                line: w[1].0,
                message: "timestamps must be strictly increasing".to_string(),
            });
        }
        if step != first_step {
            return Err(DataError::NonUniformStep {
                line: w[1].0,
                expected: first_step.num_seconds() as f64 / 3600.0,
                found: step.num_seconds() as f64 / 3600.0,
            });
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<File, DataError> {
    File::open(path).map_err(|e| DataError::io(path, e))
}

fn csv_error(e: csv::Error) -> DataError {
    let line = e.position().map_or(0, |p| p.line());
    DataError::Row {
        line,
        message: e.to_string(),
    }
}

/// Parses weather CSV with columns `timestamp,G,Gb,Gd,Ta` and optional
/// `Gt` (plane-of-array irradiance) and `alpha_g` (grid status 0/1).
pub fn read_weather<R: Read>(reader: R) -> Result<Vec<WeatherRecord>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let index_of = |name: &str| headers.iter().position(|h| h == name);
    for h in headers.iter() {
        if !WEATHER_REQUIRED.contains(&h) && !WEATHER_OPTIONAL.contains(&h) {
            return Err(DataError::Header(format!("unknown column '{h}'")));
        }
    }
    let mut cols = [0usize; 5];
    for (slot, name) in cols.iter_mut().zip(WEATHER_REQUIRED) {
        *slot = index_of(name)
            .ok_or_else(|| DataError::Header(format!("missing required column '{name}'")))?;
    }
    let gt_col = index_of("Gt");
    let alpha_col = index_of("alpha_g");

    let mut out = Vec::new();
    let mut stamps = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        let ts = parse_timestamp(field(cols[0]), line)?;
        let mut rec = WeatherRecord::new(
            ts,
            parse_number(field(cols[1]), "G", line)?,
            parse_number(field(cols[2]), "Gb", line)?,
            parse_number(field(cols[3]), "Gd", line)?,
            parse_number(field(cols[4]), "Ta", line)?,
        );
        if let Some(i) = gt_col {
            rec.tilted = Some(parse_number(field(i), "Gt", line)?);
        }
        if let Some(i) = alpha_col {
            rec.grid_on = Some(match field(i).trim() {
                "1" => true,
                "0" => false,
                other => {
                    return Err(DataError::Row {
                        line,
                        message: format!("column alpha_g: '{other}' is not 0 or 1"),
                    })
                }
            });
        }
        rec.validate().map_err(|e| DataError::Row {
            line,
            message: e.to_string(),
        })?;
        stamps.push((line, ts));
        out.push(rec);
    }
    check_steps(&stamps)?;
    Ok(out)
}

pub fn load_weather_csv(path: impl AsRef<Path>) -> Result<Vec<WeatherRecord>, DataError> {
    read_weather(open(path.as_ref())?)
}

/// Parses load CSV with columns `timestamp,P_load` (kW).
pub fn read_load<R: Read>(reader: R) -> Result<Vec<LoadSample>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != LOAD_COLUMNS {
        return Err(DataError::Header(format!(
            "expected columns {}, found {}",
            LOAD_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    let mut stamps = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(0, |p| p.line());
        let ts = parse_timestamp(row.get(0).unwrap_or(""), line)?;
        let load = parse_number(row.get(1).unwrap_or(""), "P_load", line)?;
        if load < 0.0 {
            return Err(DataError::Row {
                line,
                message: format!("negative load {load}"),
            });
        }
        stamps.push((line, ts));
        out.push(LoadSample {
            timestamp: ts,
            load_kw: load,
        });
    }
    check_steps(&stamps)?;
    Ok(out)
}

pub fn load_load_csv(path: impl AsRef<Path>) -> Result<Vec<LoadSample>, DataError> {
    read_load(open(path.as_ref())?)
}

/// Load values in weather order, requiring identical timestamps.
pub fn align_load(weather: &[WeatherRecord], load: &[LoadSample]) -> Result<Vec<f64>, DataError> {
    if weather.len() != load.len() {
        return Err(DataError::LengthMismatch {
            weather: weather.len(),
            load: load.len(),
        });
    }
    for (index, (w, l)) in weather.iter().zip(load).enumerate() {
        if w.timestamp != l.timestamp {
            return Err(DataError::Misaligned {
                index,
                weather: format_timestamp(&w.timestamp),
                load: format_timestamp(&l.timestamp),
            });
        }
    }
    Ok(load.iter().map(|l| l.load_kw).collect())
}

pub fn write_weather_csv(
    weather: &[WeatherRecord],
    path: impl AsRef<Path>,
) -> Result<(), DataError> {
    let path = path.as_ref();
    let mut s = String::from("timestamp,G,Gb,Gd,Ta\n");
    for w in weather {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            format_timestamp(&w.timestamp),
            format_fixed(w.global),
            format_fixed(w.beam),
            format_fixed(w.diffuse),
            format_fixed(w.ambient)
        ));
    }
    File::create(path)
        .and_then(|mut f| f.write_all(s.as_bytes()))
        .map_err(|e| DataError::io(path, e))
}

pub fn write_load_csv(
    weather: &[WeatherRecord],
    load_kw: &[f64],
    path: impl AsRef<Path>,
) -> Result<(), DataError> {
    let path = path.as_ref();
    let mut s = String::from("timestamp,P_load\n");
    for (w, l) in weather.iter().zip(load_kw) {
        s.push_str(&format!(
            "{},{}\n",
            format_timestamp(&w.timestamp),
            format_fixed(*l)
        ));
    }
    File::create(path)
        .and_then(|mut f| f.write_all(s.as_bytes()))
        .map_err(|e| DataError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "timestamp,G,Gb,Gd,Ta\n";

    #[test]
    fn two_rows() {
        let text =
            format!("{HEAD}2021-01-01T00:00:00Z,0,0,0,10\n2021-01-01T01:00:00Z,100,60,40,11\n");
        let w = read_weather(text.as_bytes()).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[1].beam, 60.0);
        assert!(w[0].tilted.is_none() && w[0].grid_on.is_none());
    }

    #[test]
    fn split_violation_names_line() {
        let text =
            format!("{HEAD}2021-01-01T00:00:00Z,100,60,40,10\n2021-01-01T01:00:00Z,100,80,40,11\n");
        let err = read_weather(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        assert!(err.contains("beam+diffuse exceeds global"), "{err}");
    }

    #[test]
    fn optional_columns() {
        let text = "timestamp,G,Gb,Gd,Ta,Gt,alpha_g\n2021-01-01T00:00:00Z,100,60,40,10,120,0\n";
        let w = read_weather(text.as_bytes()).unwrap();
        assert_eq!(w[0].tilted, Some(120.0));
        assert_eq!(w[0].grid_on, Some(false));
        let bad = "timestamp,G,Gb,Gd,Ta,alpha_g\n2021-01-01T00:00:00Z,100,60,40,10,2\n";
        assert!(read_weather(bad.as_bytes()).is_err());
    }

    #[test]
    fn header_and_step_errors() {
        assert!(matches!(
            read_weather("timestamp,G,Gb,Ta\n".as_bytes()),
            Err(DataError::Header(_))
        ));
        assert!(matches!(
            read_weather("timestamp,G,Gb,Gd,Ta,wind\n".as_bytes()),
            Err(DataError::Header(_))
        ));
        let text = format!(
            "{HEAD}2021-01-01T00:00:00Z,0,0,0,10\n2021-01-01T01:00:00Z,0,0,0,10\n2021-01-01T03:00:00Z,0,0,0,10\n"
        );
        assert!(matches!(
            read_weather(text.as_bytes()),
            Err(DataError::NonUniformStep { line: 4, .. })
        ));
        let text = format!("{HEAD}2021-01-01T00:00:00Z,abc,0,0,10\n");
        let err = read_weather(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("column G"), "{err}");
    }

    #[test]
    fn load_alignment() {
        let w = read_weather(
            format!("{HEAD}2021-01-01T00:00:00Z,0,0,0,10\n2021-01-01T01:00:00Z,0,0,0,10\n")
                .as_bytes(),
        )
        .unwrap();
        let ok = read_load(
            "timestamp,P_load\n2021-01-01T00:00:00Z,100\n2021-01-01T01:00:00Z,120.5\n".as_bytes(),
        )
        .unwrap();
        assert_eq!(align_load(&w, &ok).unwrap(), vec![100.0, 120.5]);
        let shifted = read_load(
            "timestamp,P_load\n2021-01-01T00:00:00Z,100\n2021-01-01T02:00:00Z,120.5\n".as_bytes(),
        )
        .unwrap();
        let err = align_load(&w, &shifted).unwrap_err();
        assert!(matches!(err, DataError::Misaligned { index: 1, .. }));
        assert!(err.to_string().contains("2021-01-01T02:00:00Z"));
        let neg = read_load("timestamp,P_load\n2021-01-01T00:00:00Z,-1\n".as_bytes());
        assert!(neg.unwrap_err().to_string().contains("negative load"));
    }
}
