#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::experiment::Settings;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = Settings::from_text(text);
    }
});
