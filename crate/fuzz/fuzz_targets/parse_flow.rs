#![no_main]

use circflow::text::{parse_flow, write_flow};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = parse_flow(s) {
        assert_eq!(parse_flow(&write_flow(&f)).unwrap(), f);
    }
});
