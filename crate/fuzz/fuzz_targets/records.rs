#![no_main]

use libfuzzer_sys::fuzz_target;
use onel1::experiments::{BenchmarkRecord, TrialRecord};
use onel1::io::{records_from_csv, records_from_json, records_to_csv, TransitionRow};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = records_from_csv::<TrialRecord>(data) {
        let bytes = records_to_csv(&rows).unwrap();
        assert_eq!(records_from_csv::<TrialRecord>(&bytes).unwrap().len(), rows.len());
    }
    let _ = records_from_csv::<BenchmarkRecord>(data);
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = records_from_json::<TrialRecord>(text);
        let _ = records_from_json::<TransitionRow>(text);
    }
});
