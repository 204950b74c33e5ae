#![no_main]

use circflow::text::{parse_partition, write_partition};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_partition(s) {
        assert_eq!(parse_partition(&write_partition(&p)).unwrap(), p);
    }
});
