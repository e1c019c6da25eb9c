#![no_main]

use cubic_slice::parse::parse_theta;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if s.len() > 4096 {
        return;
    }
    if let Ok(theta) = parse_theta(s) {
        let x = theta.value();
        assert!(x > 0.0 && x <= 1.0, "{s} -> {x}");
    }
});
