#![no_main]

use circflow::text::{parse_boundary, write_boundary};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(b) = parse_boundary(s) {
        assert_eq!(parse_boundary(&write_boundary(&b)).unwrap(), b);
    }
});
