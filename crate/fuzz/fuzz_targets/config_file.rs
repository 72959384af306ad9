#![no_main]

use std::path::PathBuf;

use libfuzzer_sys::fuzz_target;
use onel1::io::{parse_config_pairs, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if parse_config_pairs(text).is_err() {
        return;
    }
    if let Ok(cfg) = RunConfig::from_config_str(text, PathBuf::from("out")) {
        let again = RunConfig::from_config_str(&cfg.to_config_string(), PathBuf::from("out")).unwrap();
        assert_eq!(again, cfg);
    }
});
