#![no_main]

use circflow::text::{parse_graph, write_graph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_graph(s) {
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
    }
});
