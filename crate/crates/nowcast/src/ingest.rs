//! CSV readers for monthly unemployment rates and weekly search intensity.
//!
//! Unemployment rows are `YYYY-MM,<rate>`, trends rows `YYYY-MM-DD,<value>`.
//! Both accept an optional header row, comma separation and dot decimals.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use nowcast_core::series::{MonthlySeries, Units, WeeklySeries, YearMonth};

use crate::error::IngestError;

struct Row {
    line: u64,
    key: String,
    value: String,
}

fn rows<R: Read>(reader: R, path: &Path) -> Result<Vec<Row>, IngestError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut out = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| IngestError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(IngestError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        out.push(Row { line, key: record[0].to_string(), value: record[1].to_string() });
    }
    Ok(out)
}

fn parse_value(row: &Row, path: &Path) -> Result<f64, IngestError> {
    let value: f64 = row.value.parse().map_err(|_| IngestError::Parse {
        path: path.to_path_buf(),
        line: row.line,
        message: format!("invalid number {:?}", row.value),
    })?;
    if !value.is_finite() {
        return Err(IngestError::Parse {
            path: path.to_path_buf(),
            line: row.line,
            message: format!("non-finite number {:?}", row.value),
        });
    }
    if !(0.0..=100.0).contains(&value) {
        return Err(IngestError::Range { path: path.to_path_buf(), line: row.line, value });
    }
    Ok(value)
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

/// Drops a leading header: the first row counts as one when its key does
/// not parse.
fn skip_header<T>(rows: &mut Vec<Row>, parse: impl Fn(&str) -> Option<T>) {
    if rows.first().is_some_and(|r| parse(&r.key).is_none()) {
        rows.remove(0);
    }
}

pub fn read_unemployment_csv(path: &Path) -> Result<MonthlySeries, IngestError> {
    parse_unemployment(open(path)?, path)
}

pub fn parse_unemployment<R: Read>(reader: R, path: &Path) -> Result<MonthlySeries, IngestError> {
    let mut rows = rows(reader, path)?;
    skip_header(&mut rows, |k| k.parse::<YearMonth>().ok());
    let first = rows.first().ok_or_else(|| IngestError::Empty { path: path.to_path_buf() })?;
    let mut start = None;
    let mut prev: Option<YearMonth> = None;
    let mut values = Vec::with_capacity(rows.len());
    for row in &rows {
        let month: YearMonth = row.key.parse().map_err(|_| IngestError::Parse {
            path: path.to_path_buf(),
            line: row.line,
            message: format!("invalid month {:?}, expected YYYY-MM", row.key),
        })?;
        if let Some(p) = prev {
            let expected = p.add_months(1);
            if month > expected {
                return Err(IngestError::Gap { path: path.to_path_buf(), month: expected });
            }
            if month < expected {
                return Err(IngestError::Parse {
                    path: path.to_path_buf(),
                    line: row.line,
                    message: format!("month {month} does not follow {p}"),
                });
            }
        }
        values.push(parse_value(row, path)?);
        start.get_or_insert(month);
        prev = Some(month);
    }
    let start = start.expect("at least one row");
    MonthlySeries::new("UR", start, values, Units::Percent).map_err(|e| IngestError::Parse {
        path: path.to_path_buf(),
        line: first.line,
        message: e.to_string(),
    })
}

pub fn read_trends_csv(path: &Path) -> Result<WeeklySeries, IngestError> {
    parse_trends(open(path)?, path)
}

pub fn parse_trends<R: Read>(reader: R, path: &Path) -> Result<WeeklySeries, IngestError> {
    let parse_date = |k: &str| NaiveDate::parse_from_str(k, "%Y-%m-%d").ok().filter(|_| k.len() == 10);
    let mut rows = rows(reader, path)?;
    skip_header(&mut rows, parse_date);
    if rows.is_empty() {
        return Err(IngestError::Empty { path: path.to_path_buf() });
    }
    let mut first = None;
    let mut prev: Option<NaiveDate> = None;
    let mut values = Vec::with_capacity(rows.len());
    for row in &rows {
        let date = parse_date(&row.key).ok_or_else(|| IngestError::Parse {
            path: path.to_path_buf(),
            line: row.line,
            message: format!("invalid date {:?}, expected YYYY-MM-DD", row.key),
        })?;
        if prev.is_some_and(|p| (date - p).num_days() != 7) {
            return Err(IngestError::NonWeeklySpacing { path: path.to_path_buf(), line: row.line, date });
        }
        values.push(parse_value(row, path)?);
        first.get_or_insert(date);
        prev = Some(date);
    }
    WeeklySeries::new("GI", first.expect("at least one row"), values).map_err(|e| IngestError::Parse {
        path: path.to_path_buf(),
        line: rows[0].line,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unemployment(text: &str) -> Result<MonthlySeries, IngestError> {
        parse_unemployment(text.as_bytes(), Path::new("ur.csv"))
    }

    fn trends(text: &str) -> Result<WeeklySeries, IngestError> {
        parse_trends(text.as_bytes(), Path::new("gi.csv"))
    }

    #[test]
    fn minimal_unemployment_file() {
        let s = unemployment("2004-01,9.0\n2004-02,8.9").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.start(), YearMonth::new(2004, 1).unwrap());
        assert_eq!(s.values(), &[9.0, 8.9]);
        assert_eq!(s.units(), Units::Percent);
    }

    #[test]
    fn header_and_crlf_are_accepted() {
        let s = unemployment("month,rate\r\n2004-01,9\r\n2004-02,8.9\r\n").unwrap();
        assert_eq!(s.values(), &[9.0, 8.9]);
    }

    #[test]
    fn missing_month_is_a_gap() {
        match unemployment("2004-01,9.0\n2004-02,8.9\n2004-04,8.7").unwrap_err() {
            IngestError::Gap { month, .. } => assert_eq!(month, YearMonth::new(2004, 3).unwrap()),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_value_reports_line() {
        match unemployment("2004-01,9.0\n2004-02,abc").unwrap_err() {
            IngestError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(unemployment("2004-01,NaN"), Err(IngestError::Parse { line: 1, .. })));
        assert!(matches!(unemployment("2004-01,9.0,1"), Err(IngestError::Parse { line: 1, .. })));
        assert!(matches!(
            unemployment("2004-01,9.0\n2004-01,9.0"),
            Err(IngestError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn rate_outside_percent_range() {
        assert!(matches!(unemployment("2004-01,101"), Err(IngestError::Range { line: 1, .. })));
        assert!(matches!(unemployment("2004-01,-0.1"), Err(IngestError::Range { line: 1, .. })));
    }

    #[test]
    fn empty_files() {
        assert!(matches!(unemployment(""), Err(IngestError::Empty { .. })));
        assert!(matches!(unemployment("month,rate\n"), Err(IngestError::Empty { .. })));
        assert!(matches!(trends("week,interest\n"), Err(IngestError::Empty { .. })));
    }

    #[test]
    fn minimal_trends_file() {
        let w = trends("week,jobs\n2004-01-04,55\n2004-01-11,61.5\n").unwrap();
        assert_eq!(w.values(), &[55.0, 61.5]);
        assert_eq!(w.first_week(), NaiveDate::from_ymd_opt(2004, 1, 4).unwrap());
    }

    #[test]
    fn trends_spacing_violation() {
        match trends("2004-01-04,55\n2004-01-12,61").unwrap_err() {
            IngestError::NonWeeklySpacing { line, date, .. } => {
                assert_eq!(line, 2);
                assert_eq!(date, NaiveDate::from_ymd_opt(2004, 1, 12).unwrap());
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn trends_range_and_parse_errors() {
        assert!(matches!(trends("2004-01-04,120"), Err(IngestError::Range { line: 1, .. })));
        assert!(matches!(trends("2004-01-04,55\n2004-1-11,3"), Err(IngestError::Parse { line: 2, .. })));
        assert!(matches!(trends("2004-01-04,<1"), Err(IngestError::Parse { line: 1, .. })));
    }
}
