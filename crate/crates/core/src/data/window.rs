use chrono::NaiveDate;
use ndarray::s;
use serde::{Deserialize, Serialize};

use super::ReturnsPanel;
use crate::error::{Error, Result};
use crate::spectral::DataMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub width: usize,
    pub stride: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec { width: 60, stride: 1 }
    }
}

impl WindowSpec {
    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(Error::argument(format!("window width must be at least 2, got {}", self.width)));
        }
        if self.stride == 0 {
            return Err(Error::argument("window stride must be positive"));
        }
        Ok(())
    }
}

/// `(rows − width) / stride + 1`, or an error when `rows < width`.
pub fn window_count(rows: usize, spec: WindowSpec) -> Result<usize> {
    spec.validate()?;
    if rows < spec.width {
        return Err(Error::argument(format!(
            "{rows} dates are fewer than the window width {}",
            spec.width
        )));
    }
    Ok((rows - spec.width) / spec.stride + 1)
}

/// Windows of `width` consecutive rows, the first ending at row `width`,
/// each later one `stride` rows further on. Paired with their last date.
pub fn sliding_windows(panel: &ReturnsPanel, spec: WindowSpec) -> Result<Vec<(NaiveDate, DataMatrix)>> {
    let count = window_count(panel.len(), spec)?;
    let r = panel.returns().values();
    (0..count)
        .map(|i| {
            let end = spec.width + i * spec.stride;
            let block = r.slice(s![end - spec.width..end, ..]).to_owned();
            Ok((panel.dates()[end - 1], DataMatrix::new(block)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn panel(n: usize) -> ReturnsPanel {
        let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let dates = (0..n as u64).map(|d| start + chrono::Days::new(d)).collect();
        let r = Array2::from_shape_fn((n, 2), |(i, j)| (i * 2 + j) as f64);
        ReturnsPanel::new(dates, vec!["A".into(), "B".into()], DataMatrix::new(r).unwrap()).unwrap()
    }

    #[test]
    fn counts() {
        let w = WindowSpec::default();
        assert_eq!(window_count(61, w).unwrap(), 2);
        assert_eq!(window_count(60, w).unwrap(), 1);
        assert_eq!(window_count(64, WindowSpec { width: 60, stride: 2 }).unwrap(), 3);
        assert!(window_count(59, w).is_err());
        assert!(window_count(10, WindowSpec { width: 1, stride: 1 }).is_err());
    }

    #[test]
    fn windows_end_where_expected() {
        let p = panel(64);
        let ws = sliding_windows(&p, WindowSpec { width: 60, stride: 2 }).unwrap();
        let ends: Vec<NaiveDate> = ws.iter().map(|w| w.0).collect();
        assert_eq!(ends, vec![p.dates()[59], p.dates()[61], p.dates()[63]]);
        let last = &ws[2].1;
        assert_eq!(last.row_count(), 60);
        assert_eq!(last.values()[[59, 1]], 127.0);
        assert_eq!(last.values()[[0, 0]], 8.0);
    }
}
