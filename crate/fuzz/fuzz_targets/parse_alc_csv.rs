#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::device::{fit_avoided_crossing, AlcDataset};

fuzz_target!(|data: &[u8]| {
    let Ok(set) = AlcDataset::from_csv(data) else {
        return;
    };
    if let Ok(fit) = fit_avoided_crossing(&set) {
        assert!(fit.j_ghz >= 0.0);
    }
});
