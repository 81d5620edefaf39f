#![no_main]

use libfuzzer_sys::fuzz_target;
use lambdaq::manifest::parse_manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = parse_manifest(src) {
        assert_eq!(parse_manifest(&m.render()).as_ref(), Ok(&m));
    }
});
