#![no_main]

use cubic_slice::parse::{format_complex, parse_complex};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(z) = parse_complex(s) {
        if z.re.is_finite() && z.im.is_finite() {
            let back = parse_complex(&format_complex(z)).expect("formatted value parses");
            assert_eq!(back.re.to_bits(), z.re.to_bits());
            assert_eq!(back.im.to_bits(), z.im.to_bits());
        }
    }
});
