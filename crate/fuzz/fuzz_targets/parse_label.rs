#![no_main]

use circflow::CatalogLabel;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(l) = s.parse::<CatalogLabel>() {
        assert_eq!(l.to_string().parse::<CatalogLabel>().unwrap(), l);
        // Huge multiplicities are rejected, not allocated.
        let _ = l.build();
    }
});
