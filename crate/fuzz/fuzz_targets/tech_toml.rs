#![no_main]

use libfuzzer_sys::fuzz_target;
use sram_pad::tech::Technology;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = Technology::from_toml_str(text) {
        t.validate().expect("loaded technologies are valid");
        let _ = t.retention_floor();
    }
});
