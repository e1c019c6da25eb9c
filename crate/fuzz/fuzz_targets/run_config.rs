#![no_main]

use cubic_slice_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(s) {
        let json = cfg.to_json();
        let back = RunConfig::from_json(&json).expect("serialized config parses");
        assert_eq!(back.to_json(), json);
    }
});
