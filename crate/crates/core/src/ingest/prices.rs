use std::io::Write;
use std::path::Path;

use super::{read_file, IngestError};
use crate::calendar::CalendarDate;
use crate::series::PriceSeries;

/// Column layout of a Yahoo Finance daily history export.
pub const PRICE_HEADER: [&str; 7] = ["Date", "Open", "High", "Low", "Close", "Adj Close", "Volume"];

/// Parses Yahoo-layout CSV content into the closing-price series of `ticker`.
///
/// Only `Date` and `Close` are required. Rows whose `Close` is not a positive
/// number (Yahoo writes `null` for gaps) are skipped with a warning.
pub fn read_prices(source: &str, content: &str, ticker: &str) -> Result<PriceSeries, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(content.as_bytes());
    let headers = rdr.headers().map_err(|e| IngestError::Csv { path: source.to_string(), source: e })?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| IngestError::HeaderMismatch {
            path: source.to_string(),
            message: format!("missing column '{name}' (expected {})", PRICE_HEADER.join(",")),
        })
    };
    let date_col = col("Date")?;
    let close_col = col("Close")?;

    let mut values = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| IngestError::Csv { path: source.to_string(), source: e })?;
        let date: CalendarDate = row.get(date_col).unwrap_or("").parse().map_err(|e| IngestError::Format {
            path: source.to_string(),
            line,
            message: format!("{e}"),
        })?;
        let close = row.get(close_col).unwrap_or("");
        match close.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => values.push((date, v)),
            _ => log::warn!("{source}:{line}: skipping {date}, Close = '{close}'"),
        }
    }
    if values.is_empty() {
        return Err(IngestError::EmptySeries { path: source.to_string() });
    }
    // values were filtered to be positive above
    Ok(PriceSeries::new(ticker, values).expect("positive prices"))
}

pub fn parse_prices(path: &Path, ticker: &str) -> Result<PriceSeries, IngestError> {
    let content = read_file(path)?;
    read_prices(&path.display().to_string(), &content, ticker)
}

/// Writes a Yahoo-layout file where every price column holds the close.
pub fn write_prices<W: Write>(out: W, series: &PriceSeries) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PRICE_HEADER)?;
    for (date, close) in series.values() {
        let c = format!("{close}");
        w.write_record([date.to_string().as_str(), &c, &c, &c, &c, &c, "0"])?;
    }
    w.flush()?;
    Ok(())
}
