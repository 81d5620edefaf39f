#![no_main]

use libfuzzer_sys::fuzz_target;
use lambdaq::compile::{decode_config, encode_config};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(term) = lambdaq::parse_term(src) else {
        return;
    };
    // decoding normalises first; keep inputs small so fuel bounds the work
    if term.size() > 200 {
        return;
    }
    if let Ok(config) = decode_config(&term) {
        assert_eq!(decode_config(&encode_config(&config)), Ok(config));
    }
});
