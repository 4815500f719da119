#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::basis::{label, parse_label};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((index, width)) = parse_label(text) {
        assert_eq!(parse_label(&label(index, width)), Ok((index, width)));
    }
});
