#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(term) = lambdaq::parse_term(src) {
        // printing must produce text that parses back to the same term
        let printed = term.to_string();
        let back = lambdaq::parse_term(&printed).expect("printed term parses");
        assert!(lambdaq::alpha_eq(&term, &back), "{printed}");
        let _ = lambdaq::canonicalize(&term);
    }
});
