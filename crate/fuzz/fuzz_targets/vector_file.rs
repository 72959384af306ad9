#![no_main]

use libfuzzer_sys::fuzz_target;
use onel1::io::{format_vector, parse_vector};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_vector(text) {
        assert!(v.iter().all(|x| x.is_finite()));
        assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
    }
});
