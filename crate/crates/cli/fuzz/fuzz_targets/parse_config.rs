#![no_main]

use libfuzzer_sys::fuzz_target;
use uavcov_cli::config::{emit, parse_config};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Anything accepted must survive a round trip unchanged.
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&emit(&cfg)).expect("emitted config parses");
        assert_eq!(cfg, again);
    }
});
