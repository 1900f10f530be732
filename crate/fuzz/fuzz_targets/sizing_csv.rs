#![no_main]

use libfuzzer_sys::fuzz_target;
use sram_pad::cell::SizingMethod;
use sram_pad::presets::SizingTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = SizingTable::parse(text) {
        for m in SizingMethod::ALL {
            for node in ["32nm", "90nm"] {
                if let Ok(s) = table.lookup(m, node) {
                    s.validate().expect("table entries are valid");
                }
            }
        }
    }
});
