#![no_main]

use dimest::data::{decode_idx_images, encode_idx_images};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(images) = decode_idx_images(data) {
        assert_eq!(images.pixels.len(), images.count * images.rows * images.cols);
        assert_eq!(encode_idx_images(&images).unwrap(), data);
    }
});
