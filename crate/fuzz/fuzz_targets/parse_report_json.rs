#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::experiment::RunReport;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(report) = RunReport::from_json(text) {
            let _ = report.to_json();
        }
    }
});
