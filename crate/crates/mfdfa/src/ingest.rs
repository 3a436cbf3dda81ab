//! Reading reference-rate tables and plain return files.
//!
//! Rate tables are delimited text with a header row: a date in the first
//! column and one column of rates per currency. Dates may be written
//! `DD/MM/YYYY`, `YYYY-MM-DD`, `DD-MM-YYYY` or `DD-Mon-YYYY`. Blank or
//! non-numeric cells in the chosen column (market holidays) are skipped and
//! counted.

use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use mfdfa_core::{PriceSeries, ReturnSeries};

use crate::error::{Error, Result};

const DATE_FORMATS: &[&str] = &["%d/%m/%Y", "%Y-%m-%d", "%d-%m-%Y", "%d-%b-%Y", "%Y/%m/%d"];

/// Column name aliases, matched case-insensitively.
const ALIASES: &[&[&str]] = &[
    &["USD", "US DOLLAR", "DOLLAR"],
    &["GBP", "POUND", "POUND STERLING"],
    &["EURO", "EUR"],
    &["YEN", "JPY", "JAPANESE YEN"],
];

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedPrices {
    pub prices: PriceSeries,
    pub dates: Vec<NaiveDate>,
    pub skipped_rows: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestedReturns {
    pub returns: ReturnSeries,
    pub skipped_rows: usize,
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    DATE_FORMATS.iter().find_map(|f| NaiveDate::parse_from_str(s, f).ok())
}

fn sniff_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    if header.contains('\t') {
        b'\t'
    } else if header.contains(';') && !header.contains(',') {
        b';'
    } else {
        b','
    }
}

fn normalise(name: &str) -> String {
    name.trim().trim_matches('"').to_ascii_uppercase()
}

/// Index of `column` in `headers`, trying known aliases when there is no
/// exact (case-insensitive) match.
pub fn find_column(headers: &[String], column: &str) -> Option<usize> {
    let wanted = normalise(column);
    let norm: Vec<String> = headers.iter().map(|h| normalise(h)).collect();
    if let Some(i) = norm.iter().position(|h| *h == wanted) {
        return Some(i);
    }
    let group = ALIASES.iter().find(|g| g.contains(&wanted.as_str()))?;
    norm.iter().position(|h| group.contains(&h.as_str()))
}

fn parse_number(cell: &str) -> Option<f64> {
    let v: f64 = cell.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn records(path: &Path, text: &str) -> Result<Vec<csv::StringRecord>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .delimiter(sniff_delimiter(text))
        .from_reader(text.as_bytes())
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|source| Error::Csv { path: PathBuf::from(path), source })
}

/// Prices of one currency from a reference-rate table.
pub fn parse_rate_csv(path: &Path, column: &str) -> Result<IngestedPrices> {
    let text = read_text(path)?;
    parse_rate_text(path, &text, column)
}

pub fn parse_rate_text(path: &Path, text: &str, column: &str) -> Result<IngestedPrices> {
    let rows = records(path, text)?;
    let (header, body) = rows.split_first().ok_or_else(|| Error::EmptySeries {
        path: path.into(),
        column: column.into(),
    })?;
    let headers: Vec<String> = header.iter().map(str::to_owned).collect();
    let col = find_column(&headers, column)
        .filter(|&c| c > 0)
        .ok_or_else(|| Error::MissingColumn { path: path.into(), column: column.into() })?;

    let mut values = Vec::new();
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut skipped_rows = 0;
    for (i, rec) in body.iter().enumerate() {
        let line = i + 2;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let raw_date = rec.get(0).unwrap_or("");
        let date = parse_date(raw_date).ok_or_else(|| Error::BadDate {
            path: path.into(),
            line,
            value: raw_date.into(),
        })?;
        let Some(v) = rec.get(col).and_then(parse_number) else {
            skipped_rows += 1;
            continue;
        };
        if dates.last().is_some_and(|&last| date <= last) {
            return Err(Error::NonMonotoneDates { path: path.into(), line });
        }
        dates.push(date);
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptySeries { path: path.into(), column: column.into() });
    }
    let keys = dates.iter().map(|d| i64::from(d.num_days_from_ce())).collect();
    let prices = PriceSeries::with_dates(values, keys)
        .map_err(|e| Error::analysis(format!("{} column {column}", path.display()), e))?;
    Ok(IngestedPrices { prices, dates, skipped_rows })
}

/// Raw returns, one per line. An optional header line is detected by its
/// first cell not being a number; with several columns `column` picks one.
pub fn parse_returns_file(path: &Path, column: Option<&str>) -> Result<IngestedReturns> {
    let text = read_text(path)?;
    parse_returns_text(path, &text, column)
}

pub fn parse_returns_text(path: &Path, text: &str, column: Option<&str>) -> Result<IngestedReturns> {
    let rows = records(path, text)?;
    let has_header = rows.first().is_some_and(|r| r.get(0).and_then(parse_number).is_none());
    let width = rows.first().map_or(0, |r| r.len());
    let col = match (has_header, column) {
        (true, Some(name)) if width > 1 => {
            let headers: Vec<String> = rows[0].iter().map(str::to_owned).collect();
            find_column(&headers, name)
                .ok_or_else(|| Error::MissingColumn { path: path.into(), column: name.into() })?
        }
        (_, Some(name)) if width > 1 => {
            return Err(Error::MissingColumn { path: path.into(), column: name.into() })
        }
        _ => 0,
    };
    let mut values = Vec::new();
    let mut skipped_rows = 0;
    for rec in rows.iter().skip(usize::from(has_header)) {
        match rec.get(col).and_then(parse_number) {
            Some(v) => values.push(v),
            None => skipped_rows += 1,
        }
    }
    let label = column.unwrap_or("returns");
    if values.is_empty() {
        return Err(Error::EmptySeries { path: path.into(), column: label.into() });
    }
    let returns = ReturnSeries::new(values)
        .map_err(|e| Error::analysis(format!("{} column {label}", path.display()), e))?;
    Ok(IngestedReturns { returns, skipped_rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("fixture.csv")
    }

    #[test]
    fn three_row_fixture() {
        let text = "Date,USD,GBP\n03/01/2000,42.5,70.1\n04/01/2000,42.6,70.3\n05/01/2000,42.4,70.0\n";
        let got = parse_rate_text(p(), text, "USD").unwrap();
        assert_eq!(got.prices.values(), &[42.5, 42.6, 42.4]);
        assert_eq!(got.skipped_rows, 0);
        assert_eq!(got.dates[0], NaiveDate::from_ymd_opt(2000, 1, 3).unwrap());
    }

    #[test]
    fn holiday_gap_is_skipped() {
        let text = "Date,USD\n2000-01-03,42.5\n2000-01-04,\n2000-01-05,42.4\n2000-01-06,42.45\n";
        let got = parse_rate_text(p(), text, "usd").unwrap();
        assert_eq!(got.prices.len(), 3);
        assert_eq!(got.skipped_rows, 1);
    }

    #[test]
    fn aliases_and_tabs() {
        let text = "Date\tUS Dollar\tEUR\tJPY\n06-Jan-1999\t42.3\t49.9\t37.8\n07-Jan-1999\t42.4\t50.0\t37.9\n08-Jan-1999\t42.5\t50.1\t38.0\n";
        let got = parse_rate_text(p(), text, "Euro").unwrap();
        assert_eq!(got.prices.values(), &[49.9, 50.0, 50.1]);
        let got = parse_rate_text(p(), text, "Yen").unwrap();
        assert_eq!(got.prices.values(), &[37.8, 37.9, 38.0]);
        let got = parse_rate_text(p(), text, "USD").unwrap();
        assert_eq!(got.prices.values(), &[42.3, 42.4, 42.5]);
    }

    #[test]
    fn error_cases() {
        let text = "Date,USD\n2000-01-03,42.5\n2000-01-04,42.6\n";
        assert!(matches!(parse_rate_text(p(), text, "CHF"), Err(Error::MissingColumn { .. })));
        assert!(matches!(parse_rate_text(p(), text, "Date"), Err(Error::MissingColumn { .. })));

        let text = "Date,USD\n2000-01-04,42.5\n2000-01-03,42.6\n";
        assert!(matches!(parse_rate_text(p(), text, "USD"), Err(Error::NonMonotoneDates { line: 3, .. })));

        let text = "Date,USD\n2000-01-04,\n2000-01-05,n/a\n";
        assert!(matches!(parse_rate_text(p(), text, "USD"), Err(Error::EmptySeries { .. })));

        let text = "Date,USD\nyesterday,42.5\n";
        assert!(matches!(parse_rate_text(p(), text, "USD"), Err(Error::BadDate { line: 2, .. })));

        // too few prices for returns surfaces the core error with context
        let text = "Date,USD\n2000-01-04,42.5\n2000-01-05,42.6\n";
        let err = parse_rate_text(p(), text, "USD").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("fixture.csv"));
    }

    #[test]
    fn date_formats() {
        let d = NaiveDate::from_ymd_opt(2018, 7, 24).unwrap();
        for s in ["24/07/2018", "2018-07-24", "24-07-2018", "24-Jul-2018", " 2018/07/24 "] {
            assert_eq!(parse_date(s), Some(d), "{s}");
        }
        assert_eq!(parse_date("07/24/2018"), None);
    }
}
