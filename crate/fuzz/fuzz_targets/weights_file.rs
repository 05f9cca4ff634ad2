#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(entries) = gevtail::parse_weights_file(text) else { return };
    for (_, _, w) in &entries {
        assert!(w.is_finite() && *w >= 0.0);
    }
    // Accepted entries may still be invalid elementals for a given n;
    // that must surface as an error, not a panic.
    let _ = gevtail::weight_vector(&gevtail::WeightScheme::Custom(entries), 6);
});
