#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::device::{conditional_phase, FringeData};

fuzz_target!(|data: &[u8]| {
    let Ok(f) = FringeData::from_csv(data) else {
        return;
    };
    if let Ok(p) = conditional_phase(&f, &f) {
        assert!((0.0..360.0).contains(&p.theta_deg));
    }
});
