#![no_main]

use libfuzzer_sys::fuzz_target;
use onel1::io::{format_mask, parse_mask};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mask) = parse_mask(text) {
        assert!(mask.indices().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(parse_mask(&format_mask(&mask)).unwrap(), mask);
    }
});
