#![no_main]

use cubic_slice::render::Sidecar;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(side) = Sidecar::decode(data) {
        assert_eq!(side.values.len() as u64, side.width as u64 * side.height as u64);
        let again = Sidecar::decode(&side.encode()).expect("re-encoded sidecar decodes");
        assert_eq!(again.encode(), side.encode());
    }
});
