#![no_main]

use dimest::data::parse_prices_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(panel) = parse_prices_csv(data) {
        let r = panel.returns();
        assert_eq!(r.row_count(), panel.dates().len());
        assert_eq!(r.col_count(), panel.tickers().len());
        assert!(r.values().iter().all(|v| v.is_finite()));
    }
});
