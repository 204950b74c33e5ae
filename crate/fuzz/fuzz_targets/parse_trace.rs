#![no_main]

use circflow::text::{parse_trace, write_trace};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_trace(s) {
        assert_eq!(parse_trace(&write_trace(&t)).unwrap(), t);
    }
});
