#![no_main]

use libfuzzer_sys::fuzz_target;
use minigraph::bounds::{parse_reports, reports_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(reports) = parse_reports(s) {
        if let Ok(json) = reports_to_json(&reports) {
            let back = parse_reports(&json).expect("reparse");
            assert_eq!(back.len(), reports.len());
        }
    }
});
