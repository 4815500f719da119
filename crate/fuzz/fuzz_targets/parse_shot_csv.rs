#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::readout::{read_shot_csv, write_shot_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(file) = read_shot_csv(data) else {
        return;
    };
    let mut out = Vec::new();
    write_shot_csv(&mut out, file.seed, &file.model_hash, &file.sets).unwrap();
    let again = read_shot_csv(out.as_slice()).unwrap();
    assert_eq!(again.sets.len(), file.sets.len());
});
