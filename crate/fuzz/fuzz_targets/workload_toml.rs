#![no_main]

use libfuzzer_sys::fuzz_target;
use sram_pad::presets::WorkloadSet;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(set) = WorkloadSet::from_toml_str(text) {
        for name in ["active", "hot", "cold"] {
            if let Ok(w) = set.get(name) {
                w.validate().expect("loaded profiles are valid");
                assert!(w.dynamic_power().is_finite());
            }
        }
    }
});
