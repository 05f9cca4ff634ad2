#![no_main]

use libfuzzer_sys::fuzz_target;

// Parsing must never panic, and anything it accepts must be finite and
// orderable.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(values) = gevtail::parse_sample_file(text) else { return };
    assert!(values.iter().all(|v| v.is_finite()));
    if values.len() >= 3 {
        let _ = gevtail::order_sample(&values);
    }
});
