use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::spectral::DataMatrix;

/// Daily log returns, one row per date and one column per ticker.
#[derive(Debug, Clone)]
pub struct ReturnsPanel {
    dates: Vec<NaiveDate>,
    tickers: Vec<String>,
    returns: DataMatrix,
}

impl ReturnsPanel {
    pub fn new(dates: Vec<NaiveDate>, tickers: Vec<String>, returns: DataMatrix) -> Result<Self> {
        if returns.row_count() != dates.len() || returns.col_count() != tickers.len() {
            return Err(Error::InvalidInput(format!(
                "returns are {}×{} but there are {} dates and {} tickers",
                returns.row_count(),
                returns.col_count(),
                dates.len(),
                tickers.len()
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!("dates not strictly increasing at {}", dates[i + 1])));
        }
        Ok(ReturnsPanel { dates, tickers, returns })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn returns(&self) -> &DataMatrix {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

fn table(row: usize, message: impl Into<String>) -> Error {
    Error::Table { row, message: message.into() }
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => table(row, format!("{kind:?}")),
    }
}

/// Parses a `date,TICKER...` price table into log returns.
///
/// A return that cannot be computed (first row, or either price missing) is 0.
pub fn parse_prices_csv<R: Read>(reader: R) -> Result<ReturnsPanel> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.len() < 2 || !header[0].trim().eq_ignore_ascii_case("date") {
        return Err(table(1, "header must be `date,TICKER1,TICKER2,...`"));
    }
    let tickers: Vec<String> = header.iter().skip(1).map(|t| t.trim().to_string()).collect();
    if let Some(i) = tickers.iter().position(|t| t.is_empty()) {
        return Err(table(1, format!("ticker name in column {} is empty", i + 2)));
    }

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut prices: Vec<Vec<Option<f64>>> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let row = record.position().map_or(0, |p| p.line() as usize);
        let date = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d")
            .map_err(|e| table(row, format!("bad date {:?}: {e}", &record[0])))?;
        if let Some(&prev) = dates.last() {
            if date <= prev {
                return Err(table(row, format!("date {date} does not follow {prev}")));
            }
        }
        let cells = record
            .iter()
            .skip(1)
            .zip(&tickers)
            .map(|(cell, ticker)| {
                let cell = cell.trim();
                if cell.is_empty() {
                    return Ok(None);
                }
                match cell.parse::<f64>() {
                    Ok(p) if p.is_finite() && p > 0.0 => Ok(Some(p)),
                    _ => Err(table(row, format!("{ticker}: price {cell:?} is not a positive number"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        dates.push(date);
        prices.push(cells);
    }
    if dates.is_empty() {
        return Err(table(2, "no price rows"));
    }

    let returns = Array2::from_shape_fn((dates.len(), tickers.len()), |(t, j)| {
        if t == 0 {
            return 0.0;
        }
        match (prices[t - 1][j], prices[t][j]) {
            (Some(prev), Some(cur)) => (cur / prev).ln(),
            _ => 0.0,
        }
    });
    ReturnsPanel::new(dates, tickers, DataMatrix::new(returns)?)
}

pub fn load_prices_csv(path: impl AsRef<Path>) -> Result<ReturnsPanel> {
    parse_prices_csv(std::fs::File::open(path)?)
}

/// Writes a price table; NaN entries become empty (missing) cells.
pub fn write_prices_csv<W: Write>(
    writer: W,
    dates: &[NaiveDate],
    tickers: &[String],
    prices: &Array2<f64>,
) -> Result<()> {
    if prices.dim() != (dates.len(), tickers.len()) {
        return Err(Error::argument("price matrix does not match dates × tickers"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Io(e.into());
    w.write_field("date").map_err(io)?;
    w.write_record(tickers).map_err(io)?;
    for (date, row) in dates.iter().zip(prices.rows()) {
        w.write_field(date.format("%Y-%m-%d").to_string()).map_err(io)?;
        let cells: Vec<String> = row
            .iter()
            .map(|p| if p.is_nan() { String::new() } else { format!("{p:?}") })
            .collect();
        w.write_record(&cells).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ReturnsPanel> {
        parse_prices_csv(s.as_bytes())
    }

    #[test]
    fn simple_return() {
        let p = parse("date,A,B\n2020-01-02,100,5\n2020-01-03,110,5\n").unwrap();
        assert_eq!(p.tickers(), &["A", "B"]);
        let r = p.returns().values();
        assert_eq!(r.row(0).to_vec(), vec![0.0, 0.0]);
        assert!((r[[1, 0]] - 0.095_310_179_804_324_9).abs() < 1e-15);
        assert_eq!(r[[1, 1]], 0.0);
    }

    #[test]
    fn missing_cells_give_zero_returns() {
        let p = parse("date,A\n2020-01-01,100\n2020-01-02,\n2020-01-03,121\n2020-01-04,133.1\n").unwrap();
        let r: Vec<f64> = p.returns().values().column(0).to_vec();
        assert_eq!(&r[..3], &[0.0, 0.0, 0.0]);
        assert!((r[3] - 1.1f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn errors_name_the_row() {
        let e = parse("date,A\n2020-01-02,1\n2020-01-01,2\n").unwrap_err();
        assert!(matches!(e, Error::Table { row: 3, .. }), "{e}");
        let e = parse("date,A\n2020-01-01,1\n2020-01-02,abc\n").unwrap_err();
        assert!(matches!(e, Error::Table { row: 3, .. }), "{e}");
        let e = parse("date,A\n2020-01-01,-4\n").unwrap_err();
        assert!(matches!(e, Error::Table { row: 2, .. }), "{e}");
        let e = parse("date,A\n2020-01-01,1,2\n").unwrap_err();
        assert!(matches!(e, Error::Table { row: 2, .. }), "{e}");
        assert!(matches!(parse("day,A\n"), Err(Error::Table { row: 1, .. })));
        assert!(matches!(parse("date,A\n"), Err(Error::Table { .. })));
    }

    #[test]
    fn write_then_parse() {
        let dates: Vec<NaiveDate> = (1..=3).map(|d| NaiveDate::from_ymd_opt(2021, 3, d).unwrap()).collect();
        let tickers = vec!["X".to_string(), "Y".to_string()];
        let prices = ndarray::array![[10.0, 1.0], [f64::NAN, 2.0], [12.5, 4.0]];
        let mut buf = Vec::new();
        write_prices_csv(&mut buf, &dates, &tickers, &prices).unwrap();
        let p = parse_prices_csv(buf.as_slice()).unwrap();
        assert_eq!(p.dates(), dates.as_slice());
        assert_eq!(p.returns().values()[[2, 1]], 2.0f64.ln());
        assert_eq!(p.returns().values()[[2, 0]], 0.0);
    }
}
