#![no_main]

use dimest::autoencoder::AeModel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(model) = AeModel::from_bytes(data) {
        // Decoding is canonical: a valid file re-encodes to itself.
        assert_eq!(model.to_bytes(), data);
    }
});
