#![no_main]

use libfuzzer_sys::fuzz_target;
use onel1::experiments::parse_reference_curve;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(curve) = parse_reference_curve(text) {
        let (lo, hi) = curve.delta_range();
        for d in [lo, 0.5 * (lo + hi), hi, -1.0, 2.0] {
            let rho = curve.rho_at(d);
            assert!((0.0..=1.0).contains(&rho));
        }
    }
});
