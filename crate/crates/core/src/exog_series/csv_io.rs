use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{day_from_date, ExogenousSeries, Unit};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
enum DayFormat {
    Number,
    Date,
}

/// Reads a `day,value` or `YYYY-MM-DD,value` file. The series is named after
/// the file stem.
pub fn load_csv(path: impl AsRef<Path>, unit: Unit) -> Result<ExogenousSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_csv(file, &path.display().to_string(), name, unit)
}

/// Parses CSV text from `reader`. `source` only labels error messages.
pub fn parse_csv<R: Read>(
    reader: R,
    source: &str,
    name: impl Into<String>,
    unit: Unit,
) -> Result<ExogenousSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let malformed = |line: u64, message: String| Error::MalformedRow {
        path: source.to_owned(),
        line,
        message,
    };

    let mut format: Option<DayFormat> = None;
    let mut days = Vec::new();
    let mut values = Vec::new();
    for (index, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(malformed(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        if index == 0 && is_header(&record[0], &record[1]) {
            continue;
        }

        let (day, row_format) = parse_day(&record[0])
            .ok_or_else(|| malformed(line, format!("bad day or date {:?}", &record[0])))?;
        match format {
            None => format = Some(row_format),
            Some(f) if f != row_format => {
                return Err(malformed(line, "mixed date and day-number rows".to_owned()));
            }
            Some(_) => {}
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| malformed(line, format!("bad value {:?}", &record[1])))?;
        if !value.is_finite() {
            return Err(malformed(line, format!("non-finite value {value}")));
        }
        if value < 0.0 {
            return Err(malformed(line, format!("negative value {value}")));
        }
        if let Some(&prev) = days.last() {
            if day <= prev {
                return Err(malformed(
                    line,
                    format!("day {day} is not after previous day {prev}"),
                ));
            }
        }
        days.push(day);
        values.push(value);
    }
    ExogenousSeries::from_columns(name, unit, days, values)
}

fn is_header(first: &str, second: &str) -> bool {
    let first = first.to_ascii_lowercase();
    (first == "day" || first == "date") && second.eq_ignore_ascii_case("value")
}

fn parse_day(field: &str) -> Option<(f64, DayFormat)> {
    if let Ok(d) = field.parse::<f64>() {
        return d.is_finite().then_some((d, DayFormat::Number));
    }
    NaiveDate::parse_from_str(field, "%Y-%m-%d")
        .ok()
        .map(|date| (day_from_date(date), DayFormat::Date))
}

/// Writes `day,value` rows with shortest round-trip float formatting.
pub fn write_csv(series: &ExogenousSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(series.len() * 24);
    out.extend_from_slice(b"day,value\n");
    for (d, v) in series.points() {
        writeln!(out, "{d},{v}").expect("write to Vec");
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
