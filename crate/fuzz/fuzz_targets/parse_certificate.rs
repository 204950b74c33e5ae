#![no_main]

use circflow::text::{parse_certificate, write_certificate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_certificate(s) {
        assert_eq!(parse_certificate(&write_certificate(&c)).unwrap(), c);
    }
});
