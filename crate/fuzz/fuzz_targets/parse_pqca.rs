#![no_main]

use libfuzzer_sys::fuzz_target;
use lambdaq::pqca::{parse_pqca, validate, validate_state, write_pqca};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = parse_pqca(src) else {
        return;
    };
    assert_eq!(parse_pqca(&write_pqca(&file)).as_ref(), Ok(&file));
    let report = validate(&file.spec);
    if report.errors.is_empty() && file.spec.configuration_count() <= 64 {
        if let Some(init) = &file.init {
            if validate_state(init, &file.spec).is_empty() {
                let _ = lambdaq::pqca::step(init, &file.spec);
            }
        }
    }
});
