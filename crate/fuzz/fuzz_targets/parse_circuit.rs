#![no_main]

use libfuzzer_sys::fuzz_target;
use qreadout_core::circuit::{Circuit, QuantumState};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(circuit) = Circuit::parse(text) else {
        return;
    };
    // Printed programs must parse back to the same gates.
    assert_eq!(Circuit::parse(&circuit.to_text()).as_ref(), Ok(&circuit));
    if circuit.width() <= 2 {
        let out = circuit.run(&QuantumState::zero(2).unwrap()).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    }
});
