#![no_main]

use circflow::text::{parse_rotation, write_rotation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(rs) = parse_rotation(s) {
        assert_eq!(parse_rotation(&write_rotation(&rs)).unwrap(), rs);
        // Face tracing either succeeds or reports a bad embedding.
        let _ = rs.faces();
    }
});
