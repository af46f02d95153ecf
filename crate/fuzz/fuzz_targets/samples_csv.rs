#![no_main]

use aerosym::aero::{fit_sin2_family, fit_tan_family, parse_samples};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(samples) = parse_samples(data) {
        assert!(!samples.is_empty());
        for s in &samples {
            assert!(s.alpha.is_finite() && s.weight > 0.0);
        }
        let _ = fit_sin2_family(&samples);
        let _ = fit_tan_family(&samples, 1.5);
    }
});
