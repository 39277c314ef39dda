#![no_main]

use dimest::data::{decode_idx_labels, encode_idx_labels};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(labels) = decode_idx_labels(data) {
        assert_eq!(encode_idx_labels(&labels).unwrap(), data);
    }
});
