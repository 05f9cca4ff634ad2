#![no_main]

use arbitrary::Arbitrary;
use gevtail::{
    combined_estimate_opts, enumerate_elementals, order_sample, parse_sample_file,
    spacing_ratios, Family, NAMED_SCHEMES,
};
use libfuzzer_sys::fuzz_target;

#[derive(Debug, Arbitrary)]
struct Input<'a> {
    text: &'a str,
    scheme: u8,
    family: u8,
    skip_degenerate: bool,
}

// The full text-to-estimate path must never panic, whatever the bytes.
fuzz_target!(|input: Input| {
    let Ok(values) = parse_sample_file(input.text) else { return };
    if values.len() < 3 || values.len() > 64 {
        return;
    }
    let Ok(sample) = order_sample(&values) else { return };

    for e in enumerate_elementals(sample.n()).expect("n >= 3") {
        if let Ok(r) = spacing_ratios(&sample, e) {
            assert!(r.tau >= 0.0 && r.tau <= 1.0, "tau = {}", r.tau);
            assert!(r.t >= 0.0 && r.t <= 1.0, "t = {}", r.t);
        }
    }

    let scheme = NAMED_SCHEMES[input.scheme as usize % NAMED_SCHEMES.len()].clone();
    let family = match input.family % 3 {
        0 => Family::Gev,
        1 => Family::Gpd,
        _ => Family::Weibull,
    };
    let _ = combined_estimate_opts(&sample, &scheme, family, input.skip_degenerate);
});
